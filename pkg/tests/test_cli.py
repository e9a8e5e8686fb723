import json
from pathlib import Path
from typing import List

import pandas as pd
import pytest

from rectbasis import cli


def _run(tmp_path: Path, *args: str) -> int:
    argv: List[str] = list(args) + ["--out", str(tmp_path), "--threads", "1"]
    return cli.main(argv)


def _summary(tmp_path: Path, command: str) -> dict:
    return json.loads((tmp_path / f"{command}_summary.json").read_text())


class TestCLI:
    def test_gen_angles(self, tmp_path: Path):
        assert _run(tmp_path, "gen-angles") == cli.EXIT_OK
        frame = pd.read_csv(tmp_path / "gen-angles_angles.csv")
        assert list(frame.columns) == ["index", "theta", "tangent"]
        assert len(frame) == 50
        certificate = json.loads((tmp_path / "gen-angles_certificate.json").read_text())
        assert certificate["t_kind"] == "linear"
        assert certificate["zeta_reduced_from"] == pytest.approx(0.4)
        assert certificate["lacunarity"] == "lacunary"
        assert _summary(tmp_path, "gen-angles")["regime"]["kind"] == "lacunary"

    def test_gen_angles_power(self, tmp_path: Path):
        assert _run(tmp_path, "gen-angles", "--regime", "power") == cli.EXIT_OK
        certificate = json.loads((tmp_path / "gen-angles_certificate.json").read_text())
        assert certificate["j0"] == certificate["j0_conditions"][
            certificate["j0_binding"]
        ]

    def test_verify(self, tmp_path: Path):
        code = _run(
            tmp_path, "verify", "--kmax", "3", "--samples", "200000", "--seed", "5"
        )
        assert code == cli.EXIT_OK
        frame = pd.read_csv(tmp_path / "verify_report.csv")
        assert frame["passed"].all()
        checks = set(frame["check"])
        assert {"separation", "diameter-decreasing", "union-monte-carlo"} <= checks
        assert {"blowup", "overlap-constant", "stokolos-c1"} <= checks
        summary = _summary(tmp_path, "verify")
        assert summary["passed"]
        assert summary["seed"] == 5

    def test_verify_is_deterministic(self, tmp_path: Path):
        args = ["verify", "--kmax", "2", "--samples", "20000", "--seed", "3"]
        first, second = tmp_path / "first", tmp_path / "second"
        assert _run(first, *args) == _run(second, *args)
        names = sorted(p.name for p in first.iterdir())
        assert names == sorted(p.name for p in second.iterdir())
        assert "verify_report.csv" in names
        for name in names:
            assert (first / name).read_bytes() == (second / name).read_bytes()

    def test_verify_zero_tolerance(self, tmp_path: Path):
        code = _run(
            tmp_path, "verify", "--kmax", "2", "--samples", "20000", "--tolerance", "0"
        )
        frame = pd.read_csv(tmp_path / "verify_report.csv")
        configured = frame[frame["check"].isin(["maximal-lower", "blowup"])]
        assert len(configured) == 2
        assert (configured["tolerance"] == 0.0).all()
        assert list(configured["passed"]) == list(configured["margin"] >= 0.0)
        assert (frame["tolerance"] <= 1e-12).all()
        summary = _summary(tmp_path, "verify")
        assert summary["passed"] == bool(frame["passed"].all())
        assert code == (cli.EXIT_OK if summary["passed"] else cli.EXIT_FAILED)

    def test_blowup_plot_data(self, tmp_path: Path):
        code = _run(tmp_path, "blowup", "--kmax", "5", "--plot-data")
        assert code == cli.EXIT_OK
        series = pd.read_csv(tmp_path / "blowup_series.csv")
        assert list(series["k"]) == [2, 3, 4, 5]
        plot = pd.read_csv(tmp_path / "blowup_plot.csv")
        assert set(plot["series"]) == {"ratio", "divergence"}
        assert len(plot) == 8

    def test_blowup_empty_range(self, tmp_path: Path):
        assert _run(tmp_path, "blowup", "--kmin", "5", "--kmax", "3") == cli.EXIT_OK
        series = pd.read_csv(tmp_path / "blowup_series.csv")
        assert len(series) == 0
        assert "divergence" in series.columns

    def test_unknown_psi(self, tmp_path: Path):
        assert _run(tmp_path, "blowup", "--psi", "cubic") == cli.EXIT_CONFIG

    def test_stokolos(self, tmp_path: Path):
        with pytest.warns(UserWarning):
            code = _run(tmp_path, "stokolos", "--kmax", "4")
        assert code == cli.EXIT_OK
        constants = pd.read_csv(tmp_path / "stokolos_constants.csv")
        assert list(constants["k"]) == [2, 3, 4]
        assert (tmp_path / "stokolos_factors.csv").exists()

    def test_kakeya(self, tmp_path: Path):
        assert _run(tmp_path, "kakeya", "--kmax", "3") == cli.EXIT_OK
        ratios = pd.read_csv(tmp_path / "kakeya_ratios.csv")
        assert list(ratios["k"]) == [2, 3]
        assert (ratios["ratio"] > 3.0).all()

    def test_weak11_command(self, tmp_path: Path):
        code = _run(
            tmp_path, "probe-weak11", "--kmax", "2", "--trials", "100", "--raster", "64"
        )
        assert code == cli.EXIT_OK
        result = json.loads((tmp_path / "probe-weak11_probe.json").read_text())
        assert result["trials"] == 100
        assert result["constant"] > 0.0
        history = pd.read_csv(tmp_path / "probe-weak11_history.csv")
        assert len(history) == 100

    def test_config_file(self, tmp_path: Path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"regime": "power", "kmax": 3}))
        assert _run(tmp_path, "gen-angles", "--config", str(config)) == cli.EXIT_OK
        summary = _summary(tmp_path, "gen-angles")
        assert summary["regime"]["kind"] == "power"

    def test_invalid_config(self, tmp_path: Path):
        config = tmp_path / "config.json"
        config.write_text("{")
        assert _run(tmp_path, "verify", "--config", str(config)) == cli.EXIT_CONFIG
        missing = tmp_path / "missing.json"
        assert _run(tmp_path, "verify", "--config", str(missing)) == cli.EXIT_CONFIG
        assert _run(tmp_path, "verify", "--kmin", "0") == cli.EXIT_CONFIG

    def test_capacity(self, tmp_path: Path):
        code = _run(tmp_path, "verify", "--regime", "superlacunary", "--kmax", "4")
        assert code == cli.EXIT_CAPACITY
        assert _run(tmp_path, "blowup", "--kmax", "21") == cli.EXIT_CAPACITY

    def test_threads_env(self, monkeypatch: pytest.MonkeyPatch):
        config = cli.ConfigParser('{"threads": 8}').parse_run_config()
        monkeypatch.setenv(cli.THREADS_ENV, "2")
        assert cli.max_workers(config) == 2
        monkeypatch.setenv(cli.THREADS_ENV, "two")
        with pytest.raises(cli.ConfigError):
            cli.max_workers(config)

    def test_run_jobs(self):
        assert cli.run_jobs(abs, [-1, 2, -3], 1) == [1, 2, 3]
