from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from rectbasis.data.shapes import Region
from rectbasis.errors import InvalidInputError


@dataclass(frozen=True)
class SimpleFunction:
    """Nonnegative linear combination of region indicators"""

    terms: Tuple[Tuple[float, Region], ...]
    """Pairs of coefficient and region"""

    def __post_init__(self) -> None:
        for coefficient, region in self.terms:
            if not coefficient > 0.0:
                raise InvalidInputError(
                    f"Simple function coefficient {coefficient} is not positive"
                )
            if not isinstance(region, Region):
                raise InvalidInputError(f"Unsupported region type {type(region)}")

    @classmethod
    def of(cls, terms: Sequence[Tuple[float, Region]]) -> "SimpleFunction":
        return cls(tuple((float(c), region) for c, region in terms))

    @classmethod
    def indicator(cls, region: Region, coefficient: float = 1.0) -> "SimpleFunction":
        return cls(((float(coefficient), region),))

    @property
    def is_zero(self) -> bool:
        return len(self.terms) == 0

    @property
    def max_coefficient(self) -> float:
        """Supremum of the function when its regions are disjoint"""
        return max((c for c, _ in self.terms), default=0.0)


ORLICZ_KINDS = ("power", "phi_beta", "loglog", "exp", "tabulated")


@dataclass(frozen=True, eq=False)
class OrliczFunction:
    """Convex increasing function with value 0 at 0"""

    kind: str
    """One of :data:`ORLICZ_KINDS`"""

    param: float = 1.0
    """Exponent ``p`` (power) or ``beta`` (phi_beta)"""

    scale: float = 1.0
    """Multiplier of the power kind"""

    grid: Optional[np.ndarray] = None
    """Sample points of the tabulated kind, starting at 0"""

    values: Optional[np.ndarray] = None
    """Sample values of the tabulated kind, starting at 0"""

    def __post_init__(self) -> None:
        if self.kind not in ORLICZ_KINDS:
            raise InvalidInputError(f"Unknown Orlicz function kind '{self.kind}'")
        if self.kind == "power" and not (self.param >= 1.0 and self.scale > 0.0):
            raise InvalidInputError(
                f"Power Orlicz function needs p >= 1 and scale > 0, "
                f"got p={self.param}, scale={self.scale}"
            )
        if self.kind == "phi_beta" and not self.param > 0.0:
            raise InvalidInputError(f"Exponent beta={self.param} is not positive")
        if self.kind == "tabulated":
            if self.grid is None or self.values is None:
                raise InvalidInputError("Tabulated Orlicz function requires samples")
            grid, values = np.asarray(self.grid), np.asarray(self.values)
            if grid.shape != values.shape or grid.ndim != 1 or len(grid) < 2:
                raise InvalidInputError("Tabulated samples must be 1-D of equal length")
            if grid[0] != 0.0 or values[0] != 0.0:
                raise InvalidInputError("Tabulated samples must start at (0, 0)")
            if np.any(np.diff(grid) <= 0.0):
                raise InvalidInputError("Tabulated grid is not strictly increasing")

    @classmethod
    def power(cls, p: float, scale: float = 1.0) -> "OrliczFunction":
        return cls("power", param=float(p), scale=float(scale))

    @classmethod
    def identity(cls) -> "OrliczFunction":
        return cls.power(1.0)

    @classmethod
    def phi_beta(cls, beta: float) -> "OrliczFunction":
        """``t * (1 + log+(t) ** beta)``"""
        return cls("phi_beta", param=float(beta))

    @classmethod
    def loglog(cls) -> "OrliczFunction":
        """``t * (1 + log+(log+(t)))``"""
        return cls("loglog")

    @classmethod
    def exp(cls) -> "OrliczFunction":
        """``exp(t) - 1``"""
        return cls("exp")

    @classmethod
    def tabulated(
        cls, grid: Sequence[float], values: Sequence[float]
    ) -> "OrliczFunction":
        return cls(
            "tabulated",
            grid=np.asarray(grid, dtype=float),
            values=np.asarray(values, dtype=float),
        )

    @classmethod
    def from_name(cls, name: str) -> "OrliczFunction":
        """Parses ``"identity"``, ``"power:p[:scale]"``, ``"phi_beta:beta"``,
        ``"loglog"`` or ``"exp"``"""
        kind, *args = name.strip().split(":")
        try:
            numbers = [float(arg) for arg in args]
        except ValueError as e:
            raise InvalidInputError(f"Invalid Orlicz function name '{name}'") from e
        if kind == "identity" and not numbers:
            return cls.identity()
        if kind == "power" and 1 <= len(numbers) <= 2:
            return cls.power(*numbers)
        if kind == "phi_beta" and len(numbers) == 1:
            return cls.phi_beta(numbers[0])
        if kind == "loglog" and not numbers:
            return cls.loglog()
        if kind == "exp" and not numbers:
            return cls.exp()
        raise InvalidInputError(f"Unknown Orlicz function '{name}'")

    @property
    def name(self) -> str:
        if self.kind == "power":
            if self.param == 1.0 and self.scale == 1.0:
                return "identity"
            if self.scale == 1.0:
                return f"power:{self.param:g}"
            return f"power:{self.param:g}:{self.scale:g}"
        if self.kind == "phi_beta":
            return f"phi_beta:{self.param:g}"
        return self.kind
