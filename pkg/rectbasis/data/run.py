from dataclasses import dataclass, field
from typing import List, Optional

from rectbasis.data.sequence import RegimeSpec


@dataclass
class RunConfig:
    """Settings of one command-line run"""

    regime: RegimeSpec
    """Angle regime description"""

    kmin: int = 2
    kmax: int = 8
    """Largest construction index, at most 20"""

    epsilon: float = 1.0
    """Length of the first standard interval"""

    phi: List[str] = field(default_factory=lambda: ["identity", "psi", "exp"])
    """Test functions of the overlap-integral bound (``"psi"`` is the regime's
    complementary function)"""

    psi: str = "identity"
    """Comparison function of the divergence series"""

    tolerance: float = 1e-9
    """Relative tolerance of the exact checks"""

    samples: int = 1_000_000
    seed: int = 0
    out: str = "."
    """Output directory"""

    threads: Optional[int] = None
    random_subsets: int = 100
    raster: int = 2048
    trials: int = 100
    plot_data: bool = False
    margin: float = 0.9
    """Target value of the regime condition when tightening the certificate"""

    @property
    def ks(self) -> List[int]:
        return list(range(self.kmin, self.kmax + 1))
