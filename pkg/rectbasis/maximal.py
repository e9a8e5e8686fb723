"""Maximal-operator lower bounds, blowup rates, Stokolos hypotheses and Kakeya
ratios of constructed rectangle families"""

import math
import sys
from typing import Callable, Dict, List, Optional, Sequence, Tuple
from warnings import warn

import numpy as np
import pandas as pd
from scipy.ndimage import maximum_filter

from rectbasis import geom, orlicz
from rectbasis.construct import subsets
from rectbasis.data.construction import Construction, StokolosInput
from rectbasis.data.functions import OrliczFunction, SimpleFunction
from rectbasis.data.report import BlowupReport, VerificationReport
from rectbasis.data.results import KakeyaResult, ProbeResult
from rectbasis.data.sequence import DerivedConstants, SeparationCertificate
from rectbasis.data.shapes import Disk, RotatedRect, StretchedRect
from rectbasis.errors import InvalidInputError

KAKEYA_FACTOR = 3.0
MIN_TRIALS = 100
STABILITY_BAND = 2.0
TINY = sys.float_info.min

_STOKOLOS_ANCHORS = {
    "c1": "stokolos-overlap",
    "c2": "stokolos-ball-ratio",
    "c3": "stokolos-union",
}


def blowup_function(c: Construction) -> SimpleFunction:
    """``f_k = zeta**(-t) / gamma'(C)`` times the indicator of the shared disk"""
    coefficient = c.cert.zeta ** (-c.tau) / c.constants.gamma_prime
    return SimpleFunction.indicator(c.Theta, coefficient)


def maximal_lower_on_Y(c: Construction, f: SimpleFunction) -> float:
    """Lower bound of the maximal function of ``f`` valid on the whole union of
    the rotated intervals

    :param c: construction
    :param f: zero, or a positive multiple of the indicator of ``c.Theta``
    :return: ``coefficient * min_R |R & Theta| / |R|``
    """
    if f.is_zero:
        return 0.0
    if len(f.terms) != 1:
        raise InvalidInputError(
            f"Simple function with {len(f.terms)} terms is not a multiple of the "
            f"disk indicator"
        )
    coefficient, region = f.terms[0]
    if not (
        isinstance(region, Disk)
        and region.center == c.Theta.center
        and region.radius == c.Theta.radius
    ):
        raise InvalidInputError(f"Region {region!r} is not the construction's disk")
    return coefficient * min(
        geom.disk_polygon_area(c.Theta, r) / r.area for r in c.rects
    )


def growth_estimate(family: Sequence[Construction], phi: OrliczFunction) -> float:
    """Finite-``k`` estimate of ``max(1, lim sup t**beta / (2k))``: the largest
    ``t**beta / (2k)`` (``log t / k`` for the log-log target) over the family"""
    if phi.kind == "loglog":
        values = [math.log(c.tau) / c.k for c in family if c.tau > 1.0]
    else:
        values = [c.tau**phi.param / (2 * c.k) for c in family]
    return max([1.0] + values)


def growth_constant(family: Sequence[Construction], phi: OrliczFunction) -> float:
    """Growth constant ``M~`` of the blowup constant

    Linear exponents with ``beta = 1`` and power exponents ``t = j**d`` with
    ``beta = 1 / d`` have the closed form ``M = 1``; other pairs fall back to
    :func:`growth_estimate`.
    """
    if family and phi.kind == "phi_beta":
        cert = family[0].cert
        if cert.t_kind == "linear" and phi.param == 1.0:
            return 1.0
        if cert.t_kind == "power" and math.isclose(phi.param * cert.t_param, 1.0):
            return 1.0
    return growth_estimate(family, phi)


def blowup_constant(
    cert: SeparationCertificate, phi: OrliczFunction, M_tilde: float
) -> float:
    """Constant ``gamma_1`` of ``|Y_k| >= gamma_1 * int phi(f_k)``

    :param cert: certificate of the regime
    :param phi: ``phi_beta`` or log-log target
    :param M_tilde: growth constant, see :func:`growth_constant`
    """
    dc = DerivedConstants.from_C(cert.C)
    log_inv_zeta = -math.log(cert.zeta)
    if phi.kind == "loglog":
        return dc.gamma * dc.gamma_prime / (4.0 * M_tilde * log_inv_zeta)
    if phi.kind != "phi_beta":
        raise InvalidInputError(f"No blowup constant for {phi.name}")
    beta = phi.param
    return (
        log_inv_zeta ** (-beta)
        * dc.gamma
        * dc.gamma_prime
        / (2.0 ** (beta + 1.0) * M_tilde)
    )


def blowup_series(
    constructions: Sequence[Construction],
    phi: Optional[OrliczFunction] = None,
    psi: Optional[orlicz.TestFunction] = None,
    T: float = 2.0,
) -> List[BlowupReport]:
    """Exact ``|Y_k|`` against ``int phi(f_k)`` for each construction

    :param constructions: constructions of one certified regime
    :param phi: target function (the regime's by default)
    :param psi: comparison function of the divergence series
        ``int phi(f_k) / int psi(T f_k)``
    :param T: scale of the comparison function
    :return: one report per construction
    """
    if not constructions:
        return []
    cert = constructions[0].cert
    if phi is None:
        phi = orlicz.target_function(cert)
    M_tilde = growth_constant(constructions, phi)
    gamma1 = blowup_constant(cert, phi, M_tilde)
    reports = []
    for c in constructions:
        f = blowup_function(c)
        phi_integral = orlicz.integral(phi, f)
        divergence = None
        if psi is not None:
            scaled = SimpleFunction.indicator(c.Theta, T * f.terms[0][0])
            divergence = phi_integral / orlicz.integral(psi, scaled)
        reports.append(
            BlowupReport(
                k=c.k,
                superlevel_area=c.Y_area,
                phi_integral=phi_integral,
                ratio=c.Y_area / phi_integral,
                gamma1=gamma1,
                M_tilde=M_tilde,
                divergence=divergence,
            )
        )
    return reports


def blowup_frame(reports: Sequence[BlowupReport]) -> pd.DataFrame:
    columns = [
        "k",
        "superlevel_area",
        "phi_integral",
        "ratio",
        "gamma1",
        "M_tilde",
        "divergence",
    ]
    return pd.DataFrame(
        [[getattr(r, name) for name in columns] for r in reports], columns=columns
    )


def verify_blowup(
    constructions: Sequence[Construction],
    phi: Optional[OrliczFunction] = None,
    psi: Optional[orlicz.TestFunction] = None,
    T: float = 2.0,
    tolerance: float = 1e-9,
) -> VerificationReport:
    """Checks the maximal lower bound on ``Y_k``, the blowup claim and the growth
    of the divergence series"""
    report = VerificationReport()
    for c in constructions:
        report.compare(
            "maximal-lower",
            "maximal-lower-bound",
            maximal_lower_on_Y(c, blowup_function(c)),
            ">=",
            1.0,
            tolerance,
            k=c.k,
        )
    series = blowup_series(constructions, phi, psi, T)
    for entry in series:
        report.compare(
            "blowup",
            "blowup-claim",
            entry.ratio,
            ">=",
            entry.gamma1,
            tolerance,
            k=entry.k,
            method="closed-form",
            note=f"M_tilde={entry.M_tilde:g}",
        )
    for prev, entry in zip(series, series[1:]):
        if entry.divergence is None or prev.divergence is None:
            continue
        report.compare(
            "divergence-increasing",
            "divergence-claim",
            entry.divergence,
            ">=",
            prev.divergence,
            tolerance,
            k=entry.k,
            method="closed-form",
        )
    return report


def overlap_constant(c: Construction, psi: orlicz.TestFunction) -> float:
    """``int psi(sum of indicators) / |Q|`` over the whole family"""
    return orlicz.overlap_integral(psi, c.rects) / c.Q_area


def regime_envelope(cert: SeparationCertificate) -> Callable[[np.ndarray], np.ndarray]:
    """``e^s``, ``exp(e^s)`` or ``e^(s^d)`` for linear, exponential and power
    exponents"""
    if cert.t_kind == "linear":
        return orlicz.envelope("exp")
    if cert.t_kind == "exponential":
        return orlicz.envelope("exp_exp")
    return orlicz.envelope("exp_power", d=cert.t_param)


def regime_constant(cert: SeparationCertificate, s_max: float) -> float:
    """Smallest ``K`` dominating the complementary function of the regime target
    by the regime envelope on ``[0, s_max]``"""
    if cert.t_kind == "exponential":
        # maximizer exp(exp(s - 1)) stays below the search cap
        s_max = min(s_max, 1.0 + math.log(math.log(orlicz.DOMAIN_CAP)))
    return orlicz.domination_constant(
        orlicz.target_function(cert), regime_envelope(cert), s_max
    )


def dominating_function(
    cert: SeparationCertificate, s_max: float
) -> Callable[[np.ndarray], np.ndarray]:
    """``K * E >= psi`` on ``[0, s_max]``, with ``E`` the regime envelope and ``K``
    from :func:`regime_constant`"""
    K = regime_constant(cert, s_max)
    env = regime_envelope(cert)
    return lambda s: K * env(np.asarray(s, dtype=float))


def overlap_bound_series(
    cert: SeparationCertificate, ks: Sequence[int], K: Optional[float] = None
) -> pd.DataFrame:
    """Bound-constant factors of the regimes, in log space

    Lacunary: ``2 K' / (1 - zeta)`` with ``K' = e K e(C)``, constant in ``k``.
    Superlacunary: ``exp[e**(k+1) + d**k - d**(2k)]``.
    Power: ``(k + 1)**2 * eta**(k**d)``.

    :param cert: certificate of the regime
    :param ks: construction indices
    :param K: envelope constant of the complementary function (computed on
        ``[0, max(ks) + 1]`` by default)
    :return: data frame with columns ``k``, ``log_factor``, ``factor`` and
        ``log_constant``
    """
    ks = list(ks)
    if K is None:
        K = regime_constant(cert, float(max(ks, default=1) + 1))
    eC = DerivedConstants.from_C(cert.C).eC
    zeta = cert.zeta
    rows = []
    for k in ks:
        if cert.t_kind == "linear":
            log_constant = math.log(2.0 * math.e * K * eC / (1.0 - zeta))
            log_factor = 0.0
        elif cert.t_kind == "exponential":
            d = cert.t_param
            log_constant = math.log(
                K * eC * math.e / ((1.0 - zeta) * (math.e - 1.0))
            )
            log_factor = math.exp(k + 1.0) + d**k - d ** (2.0 * k)
        else:
            log_constant = math.log(K * eC)
            log_factor = 2.0 * math.log(k + 1.0) + k**cert.t_param * math.log(
                cert.eta
            )
        rows.append(
            {
                "k": k,
                "log_factor": log_factor,
                "factor": math.exp(min(log_factor, 700.0)),
                "log_constant": log_constant,
            }
        )
    return pd.DataFrame(rows, columns=["k", "log_factor", "factor", "log_constant"])


def verify_overlap_constants(
    constructions: Sequence[Construction],
    psi: Optional[orlicz.TestFunction] = None,
    ks: Optional[Sequence[int]] = None,
    tolerance: float = 1e-9,
) -> VerificationReport:
    """Checks the measured overlap constant against the lacunary bound and the
    decay of the superlacunary and power factors

    :param constructions: constructions of one certified regime
    :param psi: complementary function (of the regime target by default)
    :param ks: indices of the analytic factor series (those of the
        constructions by default)
    :param tolerance: relative tolerance
    """
    report = VerificationReport()
    if not constructions:
        return report
    cert = constructions[0].cert
    if psi is None:
        psi = orlicz.conjugate_function(orlicz.target_function(cert))
    if ks is None:
        ks = [c.k for c in constructions]
    series = overlap_bound_series(cert, ks)
    if cert.t_kind == "linear":
        bound = math.exp(float(series["log_constant"].iloc[0]))
        for c in constructions:
            report.compare(
                "overlap-constant",
                "overlap-constant-bound",
                overlap_constant(c, psi),
                "<=",
                bound,
                tolerance,
                k=c.k,
            )
        return report
    log_factors = series["log_factor"].to_numpy()
    for k, prev, cur in zip(series["k"].iloc[1:], log_factors, log_factors[1:]):
        report.compare_log(
            "factor-decreasing", "vanishing-factor", cur, "<=", prev, 0.0, k=int(k)
        )
    if len(log_factors) > 1:
        report.compare_log(
            "factor-halved",
            "vanishing-factor",
            log_factors[-1],
            "<=",
            log_factors[0] + math.log(0.5),
            0.0,
            k=int(series["k"].iloc[-1]),
        )
    return report


def _subfamily_constant(
    c: Construction, psi: orlicz.TestFunction, stokolos: StokolosInput
) -> float:
    table = np.asarray(psi(np.arange(1, c.k + 2, dtype=float)), dtype=float)
    c1 = 0.0
    for positions in subsets(c.k, stokolos.random_subsets, stokolos.seed):
        depths = geom.depth_measures([c.rects[p] for p in positions])
        value = math.fsum(table[: len(depths)] * depths)
        c1 = max(c1, value / (len(positions) * c.Q_area))
    return c1


def stokolos_constants(stokolos: StokolosInput) -> pd.DataFrame:
    """Smallest feasible ``c1`` and ``c2`` and largest feasible ``c3`` per family

    ``c1``: largest ``int Psi(sum over S) / sum_S |R|`` over subfamilies ``S``,
    with ``Psi`` the dominating function of the input (``psi`` itself when it
    has none); ``c1_exact`` is the same quantity for ``psi``;
    ``c2``: ``lambda_k * min_R |R & B_k| / |R|``;
    ``c3``: ``|union| / (phi(lambda_k) |E_k|)`` with ``E_k = B_k``.
    """
    rows = []
    for c, lam in zip(stokolos.families, stokolos.lambdas):
        c1_exact = _subfamily_constant(c, stokolos.psi, stokolos)
        c1 = c1_exact
        if stokolos.dominating is not None:
            c1 = _subfamily_constant(c, stokolos.dominating, stokolos)
        ball_ratio = min(geom.disk_polygon_area(c.Theta, r) / r.area for r in c.rects)
        phi_lam = float(orlicz.evaluate(stokolos.phi, lam))
        rows.append(
            {
                "k": c.k,
                "lambda": lam,
                "c1": c1,
                "c1_exact": c1_exact,
                "c2": lam * ball_ratio,
                "c3": c.Y_area / (phi_lam * c.Theta.area),
            }
        )
    return pd.DataFrame(rows, columns=["k", "lambda", "c1", "c1_exact", "c2", "c3"])


def constant_spread(constants: pd.DataFrame) -> Dict[str, float]:
    """``max / min`` of ``c1``, ``c2`` and ``c3`` across the families; infinite
    when a constant is not finite and positive"""
    spread = {}
    for name in _STOKOLOS_ANCHORS:
        values = constants[name].to_numpy(dtype=float)
        if values.size == 0 or not np.all(np.isfinite(values) & (values > 0.0)):
            spread[name] = math.inf
        else:
            spread[name] = float(values.max() / values.min())
    return spread


def stability_check(
    constants: pd.DataFrame, tolerance: float = 1e-9
) -> VerificationReport:
    """Checks that ``c1``, ``c2`` and ``c3`` are finite, positive and within
    :data:`STABILITY_BAND` of each other across the families

    :param constants: frame of :func:`stokolos_constants`
    :param tolerance: relative tolerance
    :return: report with one positivity row per family and constant, and one
        spread row per constant
    """
    report = VerificationReport()
    for _, row in constants.iterrows():
        for name, anchor in _STOKOLOS_ANCHORS.items():
            value = float(row[name]) if math.isfinite(row[name]) else math.nan
            report.compare(
                f"stokolos-{name}-positive",
                anchor,
                value,
                ">=",
                TINY,
                0.0,
                k=int(row["k"]),
            )
    ks = [int(k) for k in constants["k"]]
    span = f"k={ks[0]}..{ks[-1]}" if ks else "no families"
    for name, spread in constant_spread(constants).items():
        report.compare(
            f"stokolos-{name}",
            _STOKOLOS_ANCHORS[name],
            spread,
            "<=",
            STABILITY_BAND,
            tolerance,
            k=ks[-1] if ks else None,
            note=f"max/min over {span}" + (", E_k = B_k" if name == "c3" else ""),
        )
    return report


def stokolos_check(
    stokolos: StokolosInput, tolerance: float = 1e-9
) -> VerificationReport:
    """Checks equal areas and the stability of the constants ``c1``, ``c2`` and
    ``c3`` across the families, see :func:`stability_check`

    :param stokolos: families and Orlicz pair
    :param tolerance: relative tolerance
    :return: report
    """
    warn("Stokolos union check identifies E_k with the disk B_k")
    report = VerificationReport()
    for c in stokolos.families:
        areas = [r.area for r in c.rects]
        worst = max(areas, key=lambda v: abs(v - c.Q_area))
        report.compare(
            "stokolos-equal-area", "stokolos-equal-area", worst, "==", c.Q_area, 1e-12,
            k=c.k,
        )
    report.extend(stability_check(stokolos_constants(stokolos), tolerance))
    return report


def kakeya_ratio(
    rects: Sequence[RotatedRect], factor: float = KAKEYA_FACTOR
) -> KakeyaResult:
    """Ratio of the union of stretched rectangles to the union of rectangles

    :param rects: non-square rotated rectangles, at most 23
    :param factor: length multiplier about the center
    :return: ratio and the smallest average of the union indicator over a
        stretched rectangle, which is at least ``1 / factor``
    """
    if not rects:
        raise InvalidInputError("Kakeya ratio of an empty family")
    for r in rects:
        if math.isclose(r.L, r.ell, rel_tol=1e-12):
            raise InvalidInputError(
                f"RotatedRect(L={r.L:g}, ell={r.ell:g}) is a square"
            )
    union = geom.union_area(rects).value
    stretched = [StretchedRect(r, factor) for r in rects]
    extended = geom.union_area(stretched).value
    averages = []
    for s in stretched:
        covered = union + s.area - geom.union_area(list(rects) + [s]).value
        averages.append(covered / s.area)
    return KakeyaResult(
        ratio=extended / union,
        maximal_check=min(averages),
        union_area=union,
        extended_union_area=extended,
    )


def raster_shapes(
    family: Sequence[Construction], pixel: float
) -> List[Tuple[int, int]]:
    """Raster sizes ``(rows, columns)`` of the standard intervals, at least one
    pixel each"""
    shapes = []
    for c in family:
        shape = (max(1, round(c.ell / pixel)), max(1, round(c.L / pixel)))
        if shape not in shapes:
            shapes.append(shape)
    return shapes


def raster_maximal(f: np.ndarray, shapes: Sequence[Tuple[int, int]]) -> np.ndarray:
    """Maximal function over translates of axis-parallel boxes of the given
    raster sizes containing each pixel, with ``f = 0`` outside the raster"""
    n_rows, n_cols = f.shape
    out = np.zeros_like(f, dtype=float)
    for h, w in shapes:
        padded = np.pad(f, ((h - 1, h - 1), (w - 1, w - 1)))
        table = np.zeros((padded.shape[0] + 1, padded.shape[1] + 1))
        table[1:, 1:] = padded.cumsum(axis=0).cumsum(axis=1)
        means = (
            table[h:, w:] - table[:-h, w:] - table[h:, :-w] + table[:-h, :-w]
        ) / (h * w)
        # window starting at padded row a covers raster rows a - h + 1 .. a
        best = maximum_filter(means, size=(h, w), origin=(-(h // 2), -(w // 2)))
        out = np.maximum(out, best[:n_rows, :n_cols])
    return out


def weak_ratio(
    f: np.ndarray, shapes: Sequence[Tuple[int, int]], alpha: float
) -> float:
    """``alpha * |{Mf > alpha}| / ||f||_1`` on a raster"""
    total = float(f.sum())
    if total <= 0.0:
        raise InvalidInputError("Raster function has zero integral")
    maximal = raster_maximal(f, shapes)
    return alpha * float(np.count_nonzero(maximal > alpha)) / total


def _random_raster(n: int, rng: np.random.Generator) -> np.ndarray:
    f = np.zeros((n, n))
    for _ in range(int(rng.integers(1, 5))):
        r0, c0 = rng.integers(n // 4, 3 * n // 4, size=2)
        h, w = rng.integers(1, n // 4 + 1, size=2)
        f[r0 : r0 + h, c0 : c0 + w] += rng.uniform(0.5, 2.0)
    return f


def weak11_probe(
    family: Sequence[Construction],
    trials: int = MIN_TRIALS,
    seed: int = 0,
    raster: int = 2048,
) -> ProbeResult:
    """Empirical weak (1,1) constant of the maximal operator over translates of
    the standard intervals

    :param family: nested constructions whose intervals form the basis
    :param trials: number of random simple functions, at least 100
    :param seed: random seed
    :param raster: raster side in pixels
    :return: largest observed constant with its running history
    """
    if trials < MIN_TRIALS:
        raise InvalidInputError(f"Weak (1,1) probe needs {MIN_TRIALS} trials")
    if not family:
        raise InvalidInputError("Weak (1,1) probe of an empty family")
    pixel = 2.0 * max(c.L for c in family) / raster
    shapes = raster_shapes(family, pixel)
    rng = np.random.default_rng(seed)
    history: List[float] = []
    best = 0.0
    for _ in range(trials):
        f = _random_raster(raster, rng)
        alpha = float(rng.uniform(0.05, 1.0)) * float(f.max())
        best = max(best, weak_ratio(f, shapes, alpha))
        history.append(best)
    half = trials // 2
    return ProbeResult(
        constant=best,
        trials=trials,
        seed=seed,
        raster=raster,
        shapes=shapes,
        flagged=bool(history[-1] > 2.0 * history[half - 1]),
        history=history,
    )
