import json
from typing import Any, Dict, List, Optional

from rectbasis.data.run import RunConfig
from rectbasis.data.sequence import (
    LacunarySpec,
    PowerSpec,
    RegimeSpec,
    SuperlacunarySpec,
)
from rectbasis.errors import ConfigError

DEFAULT_REGIMES: Dict[str, Dict[str, Any]] = {
    "lacunary": {"lam": 0.4, "mu": 0.6, "m0": 0.4},
    "superlacunary": {"d": 2, "lam": 0.4, "mu": 0.5, "m0": 0.4},
    "power": {"d": 0.5, "a": 0.02, "b": 0.02},
}
"""Parameters used when a regime is given by name only"""

DEFAULT_KMAX = {"lacunary": 8, "superlacunary": 3, "power": 8}


def default_regime(kind: str) -> RegimeSpec:
    """Regime description with the default parameters of ``kind``"""
    if kind not in DEFAULT_REGIMES:
        raise ConfigError(f"Unknown regime '{kind}'")
    return ConfigParser.parse_regime(dict(DEFAULT_REGIMES[kind], kind=kind))


class ConfigParser:
    _KEYS = (
        "regime",
        "kmin",
        "kmax",
        "epsilon",
        "phi",
        "psi",
        "tolerance",
        "samples",
        "seed",
        "out",
        "threads",
        "random_subsets",
        "raster",
        "trials",
        "plot_data",
        "margin",
    )

    def __init__(self, config_json: str) -> None:
        """A class for parsing JSON run configurations

        :param config_json: configuration document
        """
        self._config_json = config_json
        try:
            self._config = json.loads(config_json)
        except json.JSONDecodeError as e:
            raise ConfigError(f"Configuration is not valid JSON: {e}") from e
        if not isinstance(self._config, dict):
            raise ConfigError("Configuration is not a JSON object")
        unknown = sorted(set(self._config) - set(self._KEYS))
        if unknown:
            raise ConfigError(f"Unknown configuration keys {unknown}")

    @property
    def config_json(self) -> str:
        return self._config_json

    def parse_run_config(
        self, overrides: Optional[Dict[str, Any]] = None
    ) -> RunConfig:
        """Extract run settings, filling in defaults

        :param overrides: values replacing those of the document; a regime name
            keeps the document's regime parameters when the kinds agree
        """
        values = dict(self._config)
        for key, value in (overrides or {}).items():
            if key not in self._KEYS:
                raise ConfigError(f"Unknown configuration key '{key}'")
            current = values.get("regime")
            if key == "regime" and isinstance(current, dict):
                if current.get("kind") == value:
                    continue
            values[key] = value
        regime_value = values.get("regime", "lacunary")
        if isinstance(regime_value, str):
            regime = default_regime(regime_value)
        elif isinstance(regime_value, dict):
            regime = self.parse_regime(regime_value)
        else:
            raise ConfigError(f"Invalid regime {regime_value!r}")
        config = RunConfig(
            regime=regime,
            kmin=self._get_int(values, "kmin", 2),
            kmax=self._get_int(values, "kmax", DEFAULT_KMAX[regime.kind]),
            epsilon=self._get_float(values, "epsilon", 1.0),
            phi=self._get_str_list(values, "phi", ["identity", "psi", "exp"]),
            psi=self._get_str(values, "psi", "identity"),
            tolerance=self._get_float(values, "tolerance", 1e-9),
            samples=self._get_int(values, "samples", 1_000_000),
            seed=self._get_int(values, "seed", 0),
            out=self._get_str(values, "out", "."),
            threads=self._get_int_or_none(values, "threads"),
            random_subsets=self._get_int(values, "random_subsets", 100),
            raster=self._get_int(values, "raster", 2048),
            trials=self._get_int(values, "trials", 100),
            plot_data=self._get_bool(values, "plot_data", False),
            margin=self._get_float(values, "margin", 0.9),
        )
        validate_run_config(config)
        return config

    @classmethod
    def parse_regime(cls, regime: Dict[str, Any]) -> RegimeSpec:
        """Regime description from its JSON object"""
        kind = cls._get_str(regime, "kind", "")
        try:
            if kind == "lacunary":
                return LacunarySpec(
                    lam=cls._get_float(regime, "lam"),
                    mu=cls._get_float(regime, "mu"),
                    m0=cls._get_float(regime, "m0"),
                    n=cls._get_int(regime, "n", 50),
                )
            if kind == "superlacunary":
                return SuperlacunarySpec(
                    d=cls._get_int(regime, "d"),
                    lam=cls._get_float(regime, "lam"),
                    mu=cls._get_float(regime, "mu"),
                    m0=cls._get_float(regime, "m0"),
                    n=cls._get_int(regime, "n", 8),
                )
            if kind == "power":
                return PowerSpec(
                    d=cls._get_float(regime, "d"),
                    a=cls._get_float(regime, "a"),
                    b=cls._get_float(regime, "b"),
                    decay=cls._get_float(regime, "decay", 0.5),
                    n=cls._get_int(regime, "n", 40),
                )
        except (TypeError, ValueError) as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError(f"Invalid {kind} regime: {e}") from e
        raise ConfigError(f"Unknown regime kind '{kind}'")

    @staticmethod
    def _get_value(parent: Dict[str, Any], key: str, default: Any) -> Any:
        value = parent.get(key, default)
        if value is ...:
            raise ConfigError(f"Configuration key '{key}' is missing")
        return value

    @classmethod
    def _get_float(
        cls, parent: Dict[str, Any], key: str, default: Any = ...
    ) -> float:
        value = cls._get_value(parent, key, default)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"Value {value!r} of key '{key}' is not a number")
        return float(value)

    @classmethod
    def _get_int(cls, parent: Dict[str, Any], key: str, default: Any = ...) -> int:
        value = cls._get_value(parent, key, default)
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"Value {value!r} of key '{key}' is not an integer")
        return value

    @classmethod
    def _get_int_or_none(cls, parent: Dict[str, Any], key: str) -> Optional[int]:
        if parent.get(key) is None:
            return None
        return cls._get_int(parent, key)

    @classmethod
    def _get_str(cls, parent: Dict[str, Any], key: str, default: Any = ...) -> str:
        value = cls._get_value(parent, key, default)
        if not isinstance(value, str):
            raise ConfigError(f"Value {value!r} of key '{key}' is not a string")
        return value

    @classmethod
    def _get_str_list(
        cls, parent: Dict[str, Any], key: str, default: List[str]
    ) -> List[str]:
        value = cls._get_value(parent, key, default)
        if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
            raise ConfigError(f"Value {value!r} of key '{key}' is not a string list")
        return list(value)

    @classmethod
    def _get_bool(cls, parent: Dict[str, Any], key: str, default: bool) -> bool:
        value = cls._get_value(parent, key, default)
        if not isinstance(value, bool):
            raise ConfigError(f"Value {value!r} of key '{key}' is not a boolean")
        return value


def validate_run_config(config: RunConfig) -> None:
    """Checks value ranges that do not depend on the capacity of the geometry"""
    if config.kmin < 1:
        raise ConfigError(f"Smallest construction index kmin={config.kmin} is below 1")
    if not config.epsilon > 0.0:
        raise ConfigError(f"Interval bound epsilon={config.epsilon} is not positive")
    if config.tolerance < 0.0:
        raise ConfigError(f"Tolerance {config.tolerance} is negative")
    if config.samples < 1 or config.raster < 8 or config.random_subsets < 0:
        raise ConfigError(
            f"Invalid sampling settings samples={config.samples}, "
            f"raster={config.raster}, random_subsets={config.random_subsets}"
        )
    if config.threads is not None and config.threads < 1:
        raise ConfigError(f"Thread count {config.threads} is below 1")
    if not 0.0 < config.margin < 1.0:
        raise ConfigError(f"Margin {config.margin} not in (0, 1)")
