from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple


@dataclass(frozen=True)
class Measurement:
    """Area value with its error bound"""

    value: float
    stderr: float = 0.0
    """Standard error (zero for exact methods)"""

    method: str = "exact"
    seed: Optional[int] = None
    samples: Optional[int] = None
    resolution: float = 0.0
    """Area represented by a single Monte-Carlo sample"""

    @property
    def sigma(self) -> float:
        """Standard error floored at the sampling resolution"""
        return max(self.stderr, self.resolution)

    def agrees_with(self, value: float, sigmas: float = 3.0) -> bool:
        return abs(self.value - value) <= sigmas * self.sigma


@dataclass(frozen=True)
class ConjugateResult:
    """Value of a complementary function at one point"""

    value: float
    argmax: float
    """Maximizing ``t`` of ``s * t - phi(t)``"""

    attained: bool
    """Whether the supremum is attained below the search cap"""


@dataclass(frozen=True)
class Delta2Result:
    satisfied: bool
    K: Optional[float] = None
    """Supremum of ``phi(2t) / phi(t)`` over the grid"""

    witness: Optional[float] = None
    """Point from which the ratio grows without bound"""


@dataclass(frozen=True)
class LacunarityResult:
    """Tail behavior of consecutive tangent ratios"""

    classification: str
    """``"lacunary"``, ``"degenerate"`` or ``"not_lacunary"``"""

    liminf: Optional[float] = None
    limsup: Optional[float] = None
    flagged: bool = False

    @property
    def is_lacunary(self) -> bool:
        return self.classification != "not_lacunary"


@dataclass(frozen=True)
class KakeyaResult:
    ratio: float
    """``|union of tripled rectangles| / |union of rectangles|``"""

    maximal_check: float
    """Smallest average of the union indicator over a tripled rectangle"""

    union_area: float
    extended_union_area: float


@dataclass(frozen=True)
class ProbeResult:
    """Empirical weak-type constant of a rectangle maximal operator"""

    constant: float
    """Largest observed ``alpha * |{Mf > alpha}| / ||f||_1``"""

    trials: int
    seed: int
    raster: int
    shapes: List[Tuple[int, int]] = field(default_factory=list)
    """Raster sizes ``(rows, columns)`` of the rectangles"""

    flagged: bool = False
    """Whether the running maximum doubled during the second half of the trials"""

    history: List[float] = field(default_factory=list)


@dataclass(frozen=True)
class StartIndex:
    """Smallest admissible start index of a power-regime sequence"""

    j0: int
    conditions: Dict[str, int] = field(default_factory=dict)
    """Smallest index from which each condition holds"""

    binding: str = ""
    """Condition that determines ``j0``"""


@dataclass(frozen=True)
class DecayResult:
    """Behavior of a ratio ``psi / phi`` over the top of a logarithmic grid"""

    final_ratio: float
    decreasing: bool
    """Whether the ratio decreases over the examined decades"""

    vanishing: bool
    """Whether the ratio ends below the threshold"""

    t_max: float
    epsilon: float
