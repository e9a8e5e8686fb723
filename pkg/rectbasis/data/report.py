import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Iterator, List, Optional

import pandas as pd

ANCHORS: Dict[str, str] = {
    "separation-hypothesis": "m_j - m_k >= C * zeta ** t_k for all j0 <= j < k",
    "tangent-gap": "tan(theta_j - theta_k) >= (m_j - m_k) / 2",
    "regime-condition": "zeta < 1/e (lacunary) or e * zeta ** (2**d - 1) < 1 (power)",
    "interval-size": "0 < 2 * ell < L <= epsilon",
    "interval-shape": "c(C) * zeta ** -t <= L / ell <= d(C) * zeta ** -t",
    "halfrect-disjointness": "far halves of rotated intervals are pairwise disjoint",
    "halfrect-union": "union of far halves has area (k + 1) * |Q| / 2",
    "union-lower-bound": "union of rotated intervals has area >= k * |Q| / 2",
    "overlap-integral-bound": "integral of phi(sum of indicators) over a subfamily "
    "is bounded by phi(1) (l + 1) |Q| + e(C) |Q| zeta ** t "
    "sum_{j >= 1} phi(j + 1) sum_{r >= j} zeta ** -t_{i_r}",
    "levelset-containment": "|{chi = j + 1}| <= ell**2 * sum of "
    "1 / tan(alpha_s - alpha_{s+j})",
    "nesting": "standard intervals are ordered by inclusion with shrinking diameters",
    "disk-union-ratio": "|Y_k| >= gamma(C) * k * zeta ** -t * |Theta_k|",
    "quarter-disk-ratio": "|R & Theta_k| / |R| = (pi/4) * ell / L "
    ">= gamma'(C) * zeta ** t",
    "equal-areas": "all rotated intervals have area L * ell",
    "maximal-lower-bound": "M f_k >= 1 on Y_k",
    "blowup-claim": "|{M f_k >= 1}| >= gamma_1 * integral of Phi(f_k)",
    "divergence-claim": "integral Phi(f_k) / integral Psi(T f_k) tends to infinity",
    "overlap-constant-bound": "integral Psi(sum of indicators) / |Q_k| stays bounded",
    "vanishing-factor": "regime bound factor decreases to zero",
    "stokolos-equal-area": "each family consists of rectangles of equal area",
    "stokolos-overlap": "integral Psi(sum over subfamily) <= c1 * sum of areas",
    "stokolos-ball-ratio": "|R & B_k| / |R| >= c2 / lambda_k",
    "stokolos-union": "|union of family| >= c3 * Phi(lambda_k) * |E_k|",
    "kakeya-ratio": "|union of tripled rectangles| / |union of rectangles|",
    "kakeya-average": "average of the union indicator over a tripled rectangle >= 1/3",
    "monte-carlo-agreement": "exact measure agrees with a Monte-Carlo estimate",
}
"""Vocabulary of anchors attached to report rows"""


@dataclass(frozen=True)
class ReportRow:
    """Single numeric check"""

    check: str
    """Check identifier"""

    anchor: str
    """Key of :data:`ANCHORS`"""

    lhs: float
    relation: str
    """One of ``"<="``, ``">="``, ``"=="`` or ``"~"`` (statistical agreement)"""

    rhs: float
    margin: float
    """Relative slack of the relation, negative when violated"""

    tolerance: float
    method: str = "exact"
    """``"exact"``, ``"closed-form"``, ``"monte-carlo"`` or ``"raster"``"""

    stderr: Optional[float] = None
    seed: Optional[int] = None
    k: Optional[int] = None
    note: str = ""

    @property
    def passed(self) -> bool:
        return bool(self.margin >= -self.tolerance)


def relative_margin(lhs: float, relation: str, rhs: float) -> float:
    """Relative slack of ``lhs <relation> rhs``"""
    if math.isnan(lhs) or math.isnan(rhs):
        return -math.inf
    if math.isinf(lhs) or math.isinf(rhs):
        if lhs == rhs:
            return 0.0
        if relation == "==":
            return -math.inf
        diff = rhs - lhs if relation == "<=" else lhs - rhs
        return math.copysign(math.inf, diff)
    scale = max(abs(lhs), abs(rhs))
    if scale == 0.0:
        return 0.0
    if relation == "<=":
        return (rhs - lhs) / scale
    if relation == ">=":
        return (lhs - rhs) / scale
    if relation == "==":
        return -abs(lhs - rhs) / scale
    raise ValueError(f"Unknown relation '{relation}'")


@dataclass
class VerificationReport:
    """Ordered collection of report rows"""

    rows: List[ReportRow] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self) -> Iterator[ReportRow]:
        return iter(self.rows)

    def add(self, row: ReportRow) -> ReportRow:
        if row.anchor not in ANCHORS:
            raise ValueError(f"Unknown anchor '{row.anchor}'")
        self.rows.append(row)
        return row

    def extend(self, other: "VerificationReport") -> None:
        for row in other:
            self.add(row)

    def compare(
        self,
        check: str,
        anchor: str,
        lhs: float,
        relation: str,
        rhs: float,
        tolerance: float,
        **kwargs,
    ) -> ReportRow:
        """Adds the row checking ``lhs <relation> rhs`` with a relative margin"""
        lhs, rhs = float(lhs), float(rhs)
        margin = relative_margin(lhs, relation, rhs)
        return self.add(
            ReportRow(check, anchor, lhs, relation, rhs, margin, tolerance, **kwargs)
        )

    def compare_log(
        self,
        check: str,
        anchor: str,
        log_lhs: float,
        relation: str,
        log_rhs: float,
        tolerance: float,
        **kwargs,
    ) -> ReportRow:
        """Adds the row checking ``lhs <relation> rhs`` given natural logarithms of
        both sides; the margin is the difference of the logarithms"""
        if relation == "<=":
            margin = log_rhs - log_lhs
        elif relation == ">=":
            margin = log_lhs - log_rhs
        else:
            margin = -abs(log_lhs - log_rhs)
        if math.isnan(margin):
            margin = -math.inf
        kwargs.setdefault("note", "log scale")
        return self.add(
            ReportRow(
                check, anchor, log_lhs, relation, log_rhs, margin, tolerance, **kwargs
            )
        )

    def agreement(
        self,
        check: str,
        anchor: str,
        exact: float,
        estimate: float,
        sigma: float,
        sigmas: float = 3.0,
        **kwargs,
    ) -> ReportRow:
        """Adds the row checking ``|exact - estimate| <= sigmas * sigma``"""
        scale = max(abs(exact), abs(estimate), 1e-300)
        margin = (sigmas * sigma - abs(exact - estimate)) / scale
        kwargs.setdefault("method", "monte-carlo")
        kwargs.setdefault("stderr", sigma)
        return self.add(
            ReportRow(check, anchor, exact, "~", estimate, margin, 0.0, **kwargs)
        )

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)

    @property
    def failures(self) -> List[ReportRow]:
        return [row for row in self.rows if not row.passed]

    @property
    def first_failure(self) -> Optional[ReportRow]:
        return next((row for row in self.rows if not row.passed), None)

    @property
    def worst(self) -> Optional[ReportRow]:
        """Row with the smallest margin relative to its tolerance"""
        if not self.rows:
            return None
        return min(self.rows, key=lambda row: row.margin + row.tolerance)

    def select(self, check: str) -> "VerificationReport":
        return VerificationReport([row for row in self.rows if row.check == check])

    def to_frame(self) -> pd.DataFrame:
        """Report rows as a data frame, one row per check"""
        columns = [
            "check",
            "anchor",
            "k",
            "lhs",
            "relation",
            "rhs",
            "margin",
            "tolerance",
            "passed",
            "method",
            "stderr",
            "seed",
            "note",
        ]
        records = [dict(asdict(row), passed=row.passed) for row in self.rows]
        return pd.DataFrame.from_records(records, columns=columns)

    def summary(self) -> Dict[str, Any]:
        worst = self.worst
        return {
            "rows": len(self.rows),
            "passed": self.passed,
            "failures": len(self.failures),
            "worst_check": worst.check if worst is not None else None,
            "worst_margin": worst.margin if worst is not None else None,
        }


@dataclass(frozen=True)
class BlowupReport:
    """Superlevel-set measure against the Orlicz integral of the test function"""

    k: int
    superlevel_area: float
    """Exact area of ``Y_k``, a subset of ``{M f_k >= 1}``"""

    phi_integral: float
    """Integral of the target function applied to ``f_k``"""

    ratio: float
    gamma1: float
    M_tilde: float
    """Growth constant used in ``gamma1``"""

    divergence: Optional[float] = None
    """Quotient of the target integral and the comparison integral"""

    @property
    def passed(self) -> bool:
        return bool(self.ratio >= self.gamma1)
