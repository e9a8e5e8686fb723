from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np

from rectbasis.data.functions import OrliczFunction
from rectbasis.data.sequence import DerivedConstants, SeparationCertificate
from rectbasis.data.shapes import Disk, HalfRect, RotatedRect
from rectbasis.errors import InvalidInputError


@dataclass
class Construction:
    """Rotated copies of one standard interval together with the disk they share"""

    k: int
    """Construction index (the family holds ``k + 1`` rectangles)"""

    L: float
    """Interval length"""

    ell: float
    """Interval width"""

    epsilon: float
    """Upper bound imposed on ``L``"""

    theta_subset: np.ndarray
    """Rotation angles, decreasing"""

    indices: np.ndarray
    """Absolute sequence indices of the rotation angles"""

    rects: List[RotatedRect]
    """Rotated intervals, one per angle"""

    Theta: Disk
    """Disk of radius ``ell`` centered at the common vertex"""

    Y_area: float
    """Exact area of the union of ``rects``"""

    cert: SeparationCertificate
    """Certificate the interval was built from"""

    tau: float
    """Shape exponent ``t`` at the shape index"""

    @property
    def Q_area(self) -> float:
        """Area of the standard interval"""
        return self.L * self.ell

    @property
    def half_rects(self) -> List[HalfRect]:
        """Far halves of the rotated intervals"""
        return [HalfRect(rect) for rect in self.rects]

    @property
    def constants(self) -> DerivedConstants:
        return DerivedConstants.from_C(self.cert.C)

    @property
    def diameter(self) -> float:
        return float(np.hypot(self.L, self.ell))


@dataclass
class StokolosInput:
    """Families of equal-area rectangles with the Orlicz pair they are tested
    against"""

    families: List[Construction]
    """One construction per ``k``, increasing in ``k``"""

    phi: OrliczFunction
    """Target Orlicz function"""

    psi: Callable[[np.ndarray], np.ndarray]
    """Complementary function of ``phi`` on the positive integers"""

    dominating: Optional[Callable[[np.ndarray], np.ndarray]] = None
    """Envelope ``K * E >= psi`` the overlap constant ``c1`` is measured
    against; ``psi`` itself when unset"""

    random_subsets: int = 100
    seed: int = 0

    def __post_init__(self) -> None:
        ks = [c.k for c in self.families]
        if not ks or any(b <= a for a, b in zip(ks, ks[1:])):
            raise InvalidInputError(f"Family indices {ks} are not strictly increasing")

    @property
    def lambdas(self) -> List[float]:
        """``lambda_k = zeta**(-t)`` at the shape index of each family"""
        return [c.cert.zeta ** (-c.tau) for c in self.families]
