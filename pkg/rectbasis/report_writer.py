import json
from os import PathLike
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import pandas as pd

from rectbasis.data.report import VerificationReport

FLOAT_FORMAT = "%.17g"


class ReportWriter:
    def __init__(self, out_dir: Union[str, PathLike], command: str) -> None:
        """A class for writing CSV reports and JSON summaries of one command

        :param out_dir: output directory, created on opening
        :param command: command name, used as file name prefix
        """
        self._out_dir = Path(out_dir)
        self._command = command
        self._summary: Optional[Dict[str, Any]] = None
        self._files: List[Path] = []

    @property
    def out_dir(self) -> Path:
        return self._out_dir

    @property
    def files(self) -> List[Path]:
        """Files written so far"""
        return list(self._files)

    def __enter__(self) -> "ReportWriter":
        self.open()
        return self

    def __exit__(self, exc_type, exc_value, traceback) -> None:
        self.close()

    def open(self) -> None:
        """Creates the output directory and starts a new summary.

        It is good practice to use context managers whenever possible:

        .. code-block:: python

            with ReportWriter("/path/to/out", "verify") as w:
                pass

        """
        self._out_dir.mkdir(parents=True, exist_ok=True)
        self._summary = {"command": self._command, "sections": {}}

    def close(self) -> None:
        """Writes the JSON summary of the command"""
        if self._summary is not None:
            self.write_json("summary", self._summary)
            self._summary = None

    def set(self, key: str, value: Any) -> None:
        """Records a top-level summary entry"""
        self._check_open()
        self._summary[key] = value

    def write_frame(self, name: str, frame: pd.DataFrame) -> Path:
        """Writes a data frame as comma-separated values with a header row"""
        self._check_open()
        path = self._path(name, ".csv")
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
        self._files.append(path)
        return path

    def write_report(self, name: str, report: VerificationReport) -> Path:
        """Writes one CSV row per check and adds the report totals to the
        summary"""
        path = self.write_frame(name, report.to_frame())
        self._summary["sections"][name] = report.summary()
        return path

    def write_json(self, name: str, data: Dict[str, Any]) -> Path:
        self._check_open()
        path = self._path(name, ".json")
        with path.open("w") as f:
            json.dump(data, f, indent=2, sort_keys=True, default=_to_json)
            f.write("\n")
        self._files.append(path)
        return path

    def _path(self, name: str, suffix: str) -> Path:
        return self._out_dir / f"{self._command}_{name}{suffix}"

    def _check_open(self) -> None:
        if self._summary is None:
            raise IOError(f"Report writer for '{self._command}' has not been opened")


def _to_json(value: Any) -> Any:
    if hasattr(value, "tolist"):
        return value.tolist()
    if hasattr(value, "item"):
        return value.item()
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")
