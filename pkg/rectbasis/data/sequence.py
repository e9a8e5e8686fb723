import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from rectbasis.errors import InvalidInputError


class RegimeSpec(ABC):
    """Description of an angle regime"""

    n: int
    """Number of angles to generate"""

    @property
    @abstractmethod
    def kind(self) -> str:
        """Regime name (``"lacunary"``, ``"superlacunary"`` or ``"power"``)"""
        raise NotImplementedError()

    @property
    def exponent(self) -> float:
        """Exponent ``d`` of the ratio condition ``m_{j+1} / m_j^d``"""
        return 1.0


@dataclass(frozen=True)
class LacunarySpec(RegimeSpec):
    """Tangents with ``lam <= m_{j+1} / m_j <= mu``"""

    lam: float
    mu: float
    m0: float
    n: int = 50
    ratios: Optional[Tuple[float, ...]] = None
    """User-supplied ratios ``m_{j+1} / m_j`` (geometric midpoint if absent)"""

    @property
    def kind(self) -> str:
        return "lacunary"


@dataclass(frozen=True)
class SuperlacunarySpec(RegimeSpec):
    """Tangents with ``lam <= m_{j+1} / m_j^d <= mu`` for an integer ``d > 1``"""

    d: int
    lam: float
    mu: float
    m0: float
    n: int = 8
    ratios: Optional[Tuple[float, ...]] = None

    @property
    def kind(self) -> str:
        return "superlacunary"

    @property
    def exponent(self) -> float:
        return float(self.d)


@dataclass(frozen=True)
class PowerSpec(RegimeSpec):
    """Tangents ``m_j = a_j ** (j ** d)`` with ``a_j = a + (b - a) * decay ** j``"""

    d: float
    a: float
    b: float
    decay: float = 0.5
    n: int = 40

    @property
    def kind(self) -> str:
        return "power"

    def base(self, j: int) -> float:
        """Base ``a_j`` of the ``j``-th tangent"""
        return self.a + (self.b - self.a) * self.decay**j


@dataclass
class AngleSequence:
    """Strictly decreasing angles in ``(0, pi/4]`` indexed from ``j0``"""

    thetas: np.ndarray
    """Angles, in radians"""

    j0: int = 0
    """Absolute index of the first angle"""

    regime: str = "custom"
    """Generating regime"""

    normalized: Optional[bool] = None
    """Whether ``lam / 2 <= m_{j0} <= lam`` holds (lacunary regimes only)"""

    j0_conditions: Dict[str, int] = field(default_factory=dict)
    """Smallest index at which each start-index condition holds (power regime)"""

    def __post_init__(self) -> None:
        self.thetas = np.asarray(self.thetas, dtype=float)

    @classmethod
    def from_tangents(cls, tangents: Sequence[float], **kwargs) -> "AngleSequence":
        return cls(np.arctan(np.asarray(tangents, dtype=float)), **kwargs)

    @property
    def n(self) -> int:
        """Number of angles"""
        return len(self.thetas)

    @property
    def tangents(self) -> np.ndarray:
        """Tangents ``m_j = tan(theta_j)``"""
        return np.tan(self.thetas)

    @property
    def indices(self) -> np.ndarray:
        """Absolute indices ``j0, ..., j0 + n - 1``"""
        return np.arange(self.j0, self.j0 + self.n)

    @property
    def is_decreasing(self) -> bool:
        return bool(np.all(np.diff(self.thetas) < 0.0))

    def _position(self, j: int) -> int:
        pos = j - self.j0
        if not 0 <= pos < self.n:
            raise InvalidInputError(
                f"Index {j} outside of sequence range [{self.j0}, {self.j0 + self.n})"
            )
        return pos

    def theta_at(self, j: int) -> float:
        """Angle with absolute index ``j``"""
        return float(self.thetas[self._position(j)])

    def tangent_at(self, j: int) -> float:
        """Tangent with absolute index ``j``"""
        return math.tan(self.theta_at(j))


@dataclass(frozen=True)
class SeparationCertificate:
    """Constants ``(C, zeta, t)`` with ``m_j - m_k >= C * zeta ** t_k`` for
    ``j0 <= j < k``"""

    C: float
    zeta: float
    t_kind: str
    """Closed form of ``t_k``: ``"linear"`` (k), ``"exponential"`` (d^k) or
    ``"power"`` (k^d)"""

    t_param: float = 1.0
    """Parameter ``d`` of the closed form"""

    beta: Optional[float] = None
    """Exponent of the target Orlicz function (absent for ``L log log L``)"""

    j0: int = 0
    regime: str = "custom"

    zeta_reduced_from: Optional[float] = None
    """Original ``zeta`` when the certificate was tightened"""

    def __post_init__(self) -> None:
        if not self.C > 0.0:
            raise InvalidInputError(f"Certificate constant C={self.C} is not positive")
        if not 0.0 < self.zeta < 1.0:
            raise InvalidInputError(f"Certificate zeta={self.zeta} not in (0, 1)")
        if self.t_kind not in ("linear", "exponential", "power"):
            raise InvalidInputError(f"Unknown exponent sequence '{self.t_kind}'")

    def t(self, k: float) -> float:
        """Exponent ``t_k``"""
        if self.t_kind == "linear":
            return float(k)
        if self.t_kind == "exponential":
            try:
                return math.pow(self.t_param, k)
            except OverflowError:
                return math.inf
        return math.pow(k, self.t_param)

    def log_zeta_power(self, k: float) -> float:
        """Natural logarithm of ``zeta ** t_k``"""
        return self.t(k) * math.log(self.zeta)

    @property
    def eta(self) -> float:
        """``e * zeta ** (2 ** d - 1)``, which must stay below 1 in the power regime"""
        return math.e * self.zeta ** (2.0**self.t_param - 1.0)

    @property
    def regime_condition(self) -> bool:
        """Whether the regime-specific smallness condition on ``zeta`` holds"""
        if self.t_kind == "power":
            return self.eta < 1.0
        if self.t_kind == "linear":
            return self.zeta < 1.0 / math.e
        return True


@dataclass(frozen=True)
class DerivedConstants:
    """Constants derived from the certificate constant ``C``"""

    cC: float
    """Lower shape constant ``4 / C``"""

    dC: float
    """Upper shape constant ``2 * sqrt(1 + 4 / C**2)``"""

    eC: float
    """Overlap constant ``2 / (C * c(C))``"""

    gamma: float
    """``c(C) / (2 * pi)``"""

    gamma_prime: float
    """``pi / (4 * d(C))``"""

    gamma_dprime: float
    """Equal to ``e(C)``"""

    @classmethod
    def from_C(cls, C: float) -> "DerivedConstants":
        cC = 4.0 / C
        dC = 2.0 * math.sqrt(1.0 + 4.0 / C**2)
        eC = 2.0 / (C * cC)
        return cls(
            cC=cC,
            dC=dC,
            eC=eC,
            gamma=cC / (2.0 * math.pi),
            gamma_prime=math.pi / (4.0 * dC),
            gamma_dprime=eC,
        )
