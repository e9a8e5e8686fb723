"""Standard intervals, rotated families and the checks of their overlap bounds"""

import math
from itertools import combinations
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from rectbasis import geom, orlicz
from rectbasis.angles import LOG_TINY
from rectbasis.data.construction import Construction
from rectbasis.data.functions import OrliczFunction
from rectbasis.data.report import VerificationReport
from rectbasis.data.sequence import AngleSequence, SeparationCertificate
from rectbasis.data.shapes import ORIGIN, Disk, RotatedRect
from rectbasis.errors import CapacityError, InvalidInputError

MAX_K = 20
"""Largest construction index handled by exact geometry"""

LOG_MAX = 700.0

NamedFunction = Tuple[str, Callable[[np.ndarray], np.ndarray]]


def shape_index(cert: SeparationCertificate, k: int) -> int:
    """Absolute index whose exponent fixes the shape of the ``k``-th interval"""
    return cert.j0 + 2 * k


def build_interval(
    cert: SeparationCertificate, k: int, epsilon: float
) -> Tuple[float, float]:
    """Standard interval with ``(L / ell)**2 = 4 + 16 C**-2 zeta**(-2 t)``, where
    ``t`` is the exponent at :func:`shape_index`

    :param cert: separation certificate
    :param k: construction index, at least 1
    :param epsilon: upper bound on ``L``
    :return: ``(L, ell)`` with ``L = epsilon``
    """
    if k < 1:
        raise InvalidInputError(f"Construction index k={k} is below 1")
    if not (epsilon > 0.0 and math.isfinite(epsilon)):
        raise InvalidInputError(f"Interval bound epsilon={epsilon} is not positive")
    tau = cert.t(shape_index(cert, k))
    log_term = math.log(16.0 / cert.C**2) - 2.0 * tau * math.log(cert.zeta)
    if not log_term < LOG_MAX:
        raise CapacityError(
            f"Interval shape for k={k} (t={tau:g}) exceeds double precision: "
            f"log (L/ell)^2 = {log_term:.1f}"
        )
    ratio = math.sqrt(4.0 + 16.0 / cert.C**2 * math.pow(cert.zeta, -2.0 * tau))
    L = float(epsilon)
    ell = L / ratio
    if not math.log(ell) > 0.5 * LOG_TINY:
        raise CapacityError(f"Interval width {ell:g} for k={k} is not representable")
    return L, ell


def build_construction(
    seq: AngleSequence, cert: SeparationCertificate, k: int, epsilon: float
) -> Construction:
    """Rotated copies of the ``k``-th interval by the first ``k + 1`` angles

    :param seq: certified angle sequence
    :param cert: separation certificate of ``seq``
    :param k: construction index
    :param epsilon: upper bound on the interval length
    :return: construction with the exact union area
    """
    if k > MAX_K:
        raise CapacityError(f"Construction index k={k} exceeds {MAX_K}")
    if seq.n < k + 1:
        raise InvalidInputError(
            f"Sequence has {seq.n} angles, {k + 1} required for k={k}"
        )
    if seq.j0 != cert.j0:
        raise InvalidInputError(
            f"Sequence starts at index {seq.j0}, certificate at {cert.j0}"
        )
    L, ell = build_interval(cert, k, epsilon)
    thetas = seq.thetas[: k + 1].copy()
    rects = [RotatedRect(L, ell, float(theta)) for theta in thetas]
    return Construction(
        k=k,
        L=L,
        ell=ell,
        epsilon=float(epsilon),
        theta_subset=thetas,
        indices=seq.indices[: k + 1].copy(),
        rects=rects,
        Theta=Disk(ORIGIN, ell),
        Y_area=geom.union_area(rects).value,
        cert=cert,
        tau=cert.t(shape_index(cert, k)),
    )


def build_nested_family(
    seq: AngleSequence, cert: SeparationCertificate, kmax: int
) -> List[Construction]:
    """Constructions ``k = 1..kmax`` with ``epsilon_1 = 1`` and
    ``epsilon_{k+1} = min(ell_k, 1/k)``

    :param seq: certified angle sequence
    :param cert: separation certificate of ``seq``
    :param kmax: largest construction index
    :return: constructions whose intervals are ordered by inclusion
    """
    if kmax < 1:
        raise InvalidInputError(f"Largest construction index kmax={kmax} is below 1")
    if kmax > MAX_K:
        raise CapacityError(f"Construction index kmax={kmax} exceeds {MAX_K}")
    family: List[Construction] = []
    epsilon = 1.0
    for k in range(1, kmax + 1):
        c = build_construction(seq, cert, k, epsilon)
        family.append(c)
        epsilon = min(c.ell, 1.0 / k)
    return family


def verify_nesting(
    family: Sequence[Construction], tolerance: float = 0.0
) -> VerificationReport:
    """Checks inclusion of consecutive intervals and shrinking diameters"""
    report = VerificationReport()
    for prev, c in zip(family, family[1:]):
        checks = [
            ("nested-length", c.L, prev.ell),
            ("nested-width", c.ell, prev.ell),
            ("diameter-decreasing", c.diameter, prev.diameter),
            ("length-bound", c.L, 1.0 / (c.k - 1)),
        ]
        for check, lhs, rhs in checks:
            report.compare(check, "nesting", lhs, "<=", rhs, tolerance, k=c.k)
    return report


def default_test_functions(cert: SeparationCertificate) -> List[NamedFunction]:
    """Identity, complementary function of the regime target and ``exp(t) - 1``"""
    target = orlicz.target_function(cert)
    return [
        ("identity", orlicz.as_callable(OrliczFunction.identity())),
        (f"psi[{target.name}]", orlicz.conjugate_function(target)),
        ("exp", orlicz.as_callable(OrliczFunction.exp())),
    ]


def subsets(
    k: int, random_subsets: int = 100, seed: int = 0, exhaustive_max_k: int = 8
) -> List[Tuple[int, ...]]:
    """Subsets of positions ``0..k``: all of them for small ``k``, otherwise the
    contiguous ones plus seeded random ones

    :param k: largest position
    :param random_subsets: number of random subsets drawn when not exhaustive
    :param seed: random seed
    :param exhaustive_max_k: largest ``k`` with exhaustive enumeration
    """
    positions = range(k + 1)
    if k <= exhaustive_max_k:
        return [s for size in range(1, k + 2) for s in combinations(positions, size)]
    chosen = [tuple(range(i, j + 1)) for i in positions for j in range(i, k + 1)]
    rng = np.random.default_rng(seed)
    for _ in range(random_subsets):
        size = int(rng.integers(1, k + 2))
        drawn = rng.choice(k + 1, size, replace=False)
        chosen.append(tuple(sorted(int(p) for p in drawn)))
    return chosen


def overlap_bound(
    c: Construction, positions: Sequence[int], values: np.ndarray
) -> float:
    """Right-hand side of the overlap-integral bound for a subfamily

    The level ``chi = 1`` is bounded by the total area ``(l + 1) |Q|``; levels
    ``j + 1 >= 2`` use ``e(C) |Q| zeta**t sum_{r >= j} zeta**(-t_{i_r})``.

    :param c: construction
    :param positions: increasing positions ``i_0 < ... < i_l`` in the family
    :param values: test function values at ``1..l+1``
    """
    l = len(positions) - 1
    log_zeta = math.log(c.cert.zeta)
    weights = [
        math.exp((c.tau - c.cert.t(int(c.indices[p]))) * log_zeta) for p in positions
    ]
    tails = np.cumsum(weights[::-1])[::-1]
    levels = math.fsum(float(values[j]) * tails[j] for j in range(1, l + 1))
    return float(values[0]) * (l + 1) * c.Q_area + c.constants.eC * c.Q_area * levels


def verify_overlap_bound(
    c: Construction,
    functions: Optional[Sequence[NamedFunction]] = None,
    random_subsets: int = 100,
    seed: int = 0,
    tolerance: float = 1e-9,
    exhaustive_max_k: int = 8,
) -> VerificationReport:
    """Checks the overlap-integral bound over subfamilies, one row per test
    function reporting the subfamily with the smallest slack"""
    if c.k > MAX_K:
        raise CapacityError(f"Construction index k={c.k} exceeds {MAX_K}")
    if functions is None:
        functions = default_test_functions(c.cert)
    chosen = subsets(c.k, random_subsets, seed, exhaustive_max_k)
    tables = [
        (name, np.asarray(fn(np.arange(1, c.k + 2, dtype=float)), dtype=float))
        for name, fn in functions
    ]
    worst: List[Optional[Tuple[float, float, float, Tuple[int, ...]]]] = [None] * len(
        tables
    )
    for positions in chosen:
        depths = geom.depth_measures([c.rects[p] for p in positions])
        for i, (_, values) in enumerate(tables):
            lhs = math.fsum(values[: len(depths)] * depths)
            rhs = overlap_bound(c, positions, values)
            slack = (rhs - lhs) / max(abs(lhs), abs(rhs), 1e-300)
            if worst[i] is None or slack < worst[i][0]:
                worst[i] = (slack, lhs, rhs, positions)
    report = VerificationReport()
    for (name, _), entry in zip(tables, worst):
        _, lhs, rhs, positions = entry
        report.compare(
            f"overlap-integral[{name}]",
            "overlap-integral-bound",
            lhs,
            "<=",
            rhs,
            tolerance,
            k=c.k,
            seed=seed,
            note=f"{len(chosen)} subsets; worst {list(positions)}",
        )
    return report


def level_set_containment(
    c: Construction, positions: Optional[Sequence[int]] = None, halved: bool = False
) -> List[Tuple[int, float, float]]:
    """Measured ``|{chi = j + 1}|`` against
    ``ell**2 * sum_s 1 / tan(alpha_s - alpha_{s+j})`` for ``j >= 1``

    :param c: construction
    :param positions: subfamily positions (whole family by default)
    :param halved: use the bound with the factor 1/2
    :return: triples ``(j, measured, bound)``
    """
    if positions is None:
        positions = range(c.k + 1)
    positions = list(positions)
    alphas = [float(c.theta_subset[p]) for p in positions]
    depths = geom.depth_measures([c.rects[p] for p in positions])
    factor = 0.5 if halved else 1.0
    rows = []
    for j in range(1, len(positions)):
        bound = factor * math.fsum(
            geom.pair_intersection_bound(c.ell, alphas[s], alphas[s + j])
            for s in range(len(positions) - j)
        )
        rows.append((j, float(depths[j]), bound))
    return rows


def _level_rows(c: Construction, report: VerificationReport, tolerance: float) -> None:
    for halved in (False, True):
        rows = level_set_containment(c, halved=halved)
        if not rows:
            continue
        j, measured, bound = min(
            rows, key=lambda r: (r[2] - r[1]) / max(r[1], r[2], 1e-300)
        )
        report.compare(
            "levelset-containment-half" if halved else "levelset-containment",
            "levelset-containment",
            measured,
            "<=",
            bound,
            tolerance,
            k=c.k,
            note=f"worst level {j + 1}",
        )


def verify_lemmaA(
    c: Construction,
    functions: Optional[Sequence[NamedFunction]] = None,
    random_subsets: int = 100,
    seed: int = 0,
    tolerance: float = 1e-9,
    exhaustive_max_k: int = 8,
) -> VerificationReport:
    """Checks interval size, interval shape, the union bounds and the
    overlap-integral bound of a construction

    :param c: construction with ``k <= 20``
    :param functions: named test functions (identity, regime complementary
        function and ``exp(t) - 1`` by default)
    :param random_subsets: random subfamilies drawn when not exhaustive
    :param seed: random seed
    :param tolerance: relative tolerance of the union and overlap checks
    :param exhaustive_max_k: largest ``k`` with exhaustive subfamily enumeration
    :return: report
    """
    if c.k > MAX_K:
        raise CapacityError(f"Construction index k={c.k} exceeds {MAX_K}")
    report = VerificationReport()
    q = c.Q_area
    report.compare(
        "interval-width", "interval-size", 2.0 * c.ell, "<=", c.L, 0.0, k=c.k
    )
    report.compare("interval-length", "interval-size", c.L, "<=", c.epsilon, 0.0, k=c.k)

    consts = c.constants
    log_shape = math.log(c.L) - math.log(c.ell) + c.tau * math.log(c.cert.zeta)
    report.compare_log(
        "shape-lower", "interval-shape", log_shape, ">=", math.log(consts.cC), 1e-12,
        k=c.k,
    )
    report.compare_log(
        "shape-upper", "interval-shape", log_shape, "<=", math.log(consts.dC), 1e-12,
        k=c.k,
    )

    halves = c.half_rects
    worst_pair = max(
        (geom.pair_intersection_area(a, b) for a, b in combinations(halves, 2)),
        default=0.0,
    )
    report.compare(
        "halfrect-disjoint", "halfrect-disjointness", worst_pair, "<=", 1e-12 * q, 0.0,
        k=c.k,
    )
    half_union = geom.union_area(halves).value
    report.compare(
        "halfrect-union", "halfrect-union", half_union, "==", 0.5 * (c.k + 1) * q,
        tolerance, k=c.k,
    )
    report.compare(
        "union-lower", "union-lower-bound", c.Y_area, ">=", 0.5 * c.k * q, tolerance,
        k=c.k,
    )
    report.compare(
        "union-lower-halves", "union-lower-bound", c.Y_area, ">=",
        0.5 * (c.k + 1) * q, tolerance, k=c.k,
    )
    _level_rows(c, report, tolerance)
    report.extend(
        verify_overlap_bound(
            c, functions, random_subsets, seed, tolerance, exhaustive_max_k
        )
    )
    return report


def verify_propB(
    c: Construction,
    tolerance: float = 1e-9,
    overlap: bool = False,
    **overlap_kwargs,
) -> VerificationReport:
    """Checks the disk-union ratio, the quarter-disk ratios and the equal areas
    of a construction

    :param c: construction with ``k <= 20``
    :param tolerance: relative tolerance
    :param overlap: include the overlap-integral rows (with ``e(C)``)
    :return: report
    """
    if c.k > MAX_K:
        raise CapacityError(f"Construction index k={c.k} exceeds {MAX_K}")
    report = VerificationReport()
    consts = c.constants
    log_zeta = math.log(c.cert.zeta)
    report.compare_log(
        "disk-union",
        "disk-union-ratio",
        math.log(c.Y_area),
        ">=",
        math.log(consts.gamma * c.k) - c.tau * log_zeta + math.log(c.Theta.area),
        tolerance,
        k=c.k,
    )
    quarter = 0.25 * math.pi * c.ell / c.L
    ratios = [geom.disk_polygon_area(c.Theta, r) / r.area for r in c.rects]
    worst = max(ratios, key=lambda v: abs(v - quarter))
    report.compare(
        "quarter-disk", "quarter-disk-ratio", worst, "==", quarter, tolerance, k=c.k
    )
    report.compare_log(
        "quarter-disk-lower",
        "quarter-disk-ratio",
        math.log(min(ratios)),
        ">=",
        math.log(consts.gamma_prime) + c.tau * log_zeta,
        tolerance,
        k=c.k,
    )
    areas = [r.area for r in c.rects]
    worst_area = max(areas, key=lambda v: abs(v - c.Q_area))
    report.compare(
        "equal-areas", "equal-areas", worst_area, "==", c.Q_area, 1e-12, k=c.k
    )
    if overlap:
        report.extend(verify_overlap_bound(c, tolerance=tolerance, **overlap_kwargs))
    return report


def constructions_in_range(
    family: Iterable[Construction], kmin: int, kmax: int
) -> List[Construction]:
    return [c for c in family if kmin <= c.k <= kmax]
