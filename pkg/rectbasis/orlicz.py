"""Orlicz functions, complementary functions and integrals of simple functions"""

import math
from typing import Callable, Optional, Sequence, Tuple, Union
from warnings import warn

import numpy as np

from rectbasis import geom
from rectbasis.data.functions import OrliczFunction, SimpleFunction
from rectbasis.data.results import ConjugateResult, DecayResult, Delta2Result
from rectbasis.data.sequence import SeparationCertificate
from rectbasis.data.shapes import ConvexRegion, Disk, Region
from rectbasis.errors import (
    InvalidInputError,
    UnboundedConjugateError,
    UnsupportedInputError,
)

DOMAIN_CAP = 1e16
SEARCH_ITERATIONS = 200

TestFunction = Union[OrliczFunction, Callable[[np.ndarray], np.ndarray]]


def _log_plus(t: np.ndarray) -> np.ndarray:
    return np.log(np.maximum(t, 1.0))


def _evaluate(phi: OrliczFunction, t: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore", invalid="ignore"):
        if phi.kind == "power":
            return phi.scale * t**phi.param
        if phi.kind == "phi_beta":
            return t * (1.0 + _log_plus(t) ** phi.param)
        if phi.kind == "loglog":
            return t * (1.0 + _log_plus(_log_plus(t)))
        if phi.kind == "exp":
            return np.expm1(t)
        grid, values = phi.grid, phi.values
        slope = (values[-1] - values[-2]) / (grid[-1] - grid[-2])
        inside = np.interp(t, grid, values)
        return np.where(t > grid[-1], values[-1] + slope * (t - grid[-1]), inside)


def evaluate(
    phi: OrliczFunction, t: Union[float, np.ndarray]
) -> Union[float, np.ndarray]:
    """Evaluates an Orlicz function

    :param phi: Orlicz function
    :param t: nonnegative argument(s)
    :return: value(s), with ``phi(0) = 0``
    """
    arr = np.asarray(t, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0.0):
        raise InvalidInputError(f"Orlicz function {phi.name} evaluated at negative t")
    value = _evaluate(phi, arr)
    if np.ndim(t) == 0:
        return float(value)
    return value


def check_convexity(
    phi: OrliczFunction, t_max: float = 100.0, points: int = 2001
) -> bool:
    """Checks monotonicity and convexity on a grid, warning when they fail

    :param phi: Orlicz function
    :param t_max: end of the grid
    :param points: number of grid points
    :return: whether both properties hold up to rounding
    """
    t = np.linspace(0.0, t_max, points)
    values = _evaluate(phi, t)
    finite = np.isfinite(values)
    values = values[finite]
    scale = max(1.0, float(np.max(np.abs(values)))) if len(values) else 1.0
    increasing = bool(np.all(np.diff(values) >= -1e-10 * scale))
    convex = bool(np.all(np.diff(values, 2) >= -1e-10 * scale))
    if not (increasing and convex):
        warn(f"Orlicz function {phi.name} is not increasing and convex on [0, {t_max}]")
    return increasing and convex


def closed_form_conjugate(phi: OrliczFunction, s: float) -> Optional[float]:
    """Complementary function in closed form where one is known

    :param phi: Orlicz function
    :param s: nonnegative argument
    :return: ``sup_t (s t - phi(t))``, or ``None`` for kinds without a closed form
    """
    if s < 0.0:
        raise InvalidInputError(f"Complementary function evaluated at negative s={s}")
    if phi.kind == "power":
        p, c = phi.param, phi.scale
        if p == 1.0:
            return 0.0 if s <= c else math.inf
        return (p - 1.0) * c * (s / (p * c)) ** (p / (p - 1.0))
    if phi.kind == "phi_beta" and phi.param == 1.0:
        if s >= 2.0:
            return math.exp(s - 2.0)
        return max(0.0, s - 1.0)
    if phi.kind == "exp":
        return s * math.log(s) - s + 1.0 if s >= 1.0 else 0.0
    return None


def _conjugate_many(
    phi: OrliczFunction, s: np.ndarray, domain_cap: float
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Ternary search of ``t -> s t - phi(t)`` on ``[0, domain_cap]``"""

    def objective(t: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore", invalid="ignore"):
            g = s * t - _evaluate(phi, t)
        return np.where(np.isnan(g), -np.inf, g)

    lo = np.zeros_like(s)
    hi = np.full_like(s, domain_cap)
    for _ in range(SEARCH_ITERATIONS):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        rising = objective(m1) < objective(m2)
        lo = np.where(rising, m1, lo)
        hi = np.where(rising, hi, m2)
    t = 0.5 * (lo + hi)
    values = np.maximum(objective(t), 0.0)
    # still rising at the cap
    near_cap = np.full_like(s, domain_cap * (1.0 - 1e-6))
    rising = objective(np.full_like(s, domain_cap)) > objective(near_cap)
    attained = ~((t >= near_cap) & rising)
    return values, t, attained


def conjugate(
    phi: OrliczFunction,
    s: float,
    domain_cap: float = DOMAIN_CAP,
    strict: bool = True,
) -> ConjugateResult:
    """Complementary function ``sup{s t - phi(t) : 0 <= t}`` by ternary search

    :param phi: Orlicz function
    :param s: nonnegative argument
    :param domain_cap: upper end of the search interval
    :param strict: raise if the supremum is not attained below ``domain_cap``
    :return: value, maximizer and whether the supremum was attained
    """
    if not s >= 0.0:
        raise InvalidInputError(f"Complementary function evaluated at negative s={s}")
    values, t, attained = _conjugate_many(phi, np.array([float(s)]), domain_cap)
    result = ConjugateResult(float(values[0]), float(t[0]), bool(attained[0]))
    if not result.attained and strict:
        raise UnboundedConjugateError(
            f"Complementary function of {phi.name} at s={s} is not attained "
            f"below {domain_cap:g}"
        )
    return result


def conjugate_function(
    phi: OrliczFunction, domain_cap: float = DOMAIN_CAP
) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized complementary function, closed-form where available"""

    def psi(s: np.ndarray) -> np.ndarray:
        arr = np.atleast_1d(np.asarray(s, dtype=float))
        if np.any(arr < 0.0):
            raise InvalidInputError("Complementary function evaluated at negative s")
        closed = [closed_form_conjugate(phi, float(v)) for v in arr]
        if all(v is not None for v in closed):
            out = np.array(closed, dtype=float)
        else:
            out, _, attained = _conjugate_many(phi, arr, domain_cap)
            if not np.all(attained):
                raise UnboundedConjugateError(
                    f"Complementary function of {phi.name} is not attained "
                    f"below {domain_cap:g}"
                )
        return out if np.ndim(s) else out[0]

    return psi


def delta2_check(
    phi: OrliczFunction, t_min: float, t_max: float, points: int = 200
) -> Delta2Result:
    """Grid test of ``phi(2t) <= K phi(t)``

    :param phi: Orlicz function
    :param t_min: start of the logarithmic grid
    :param t_max: end of the logarithmic grid
    :param points: number of grid points
    :return: supremum ``K`` of the ratio, or the point from which it diverges
    """
    if not 0.0 < t_min < t_max:
        raise InvalidInputError(f"Invalid grid [{t_min}, {t_max}]")
    t = np.geomspace(t_min, t_max, points)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        ratio = _evaluate(phi, 2.0 * t) / _evaluate(phi, t)
    if not np.all(np.isfinite(ratio)):
        return Delta2Result(False, witness=float(t[np.argmax(~np.isfinite(ratio))]))
    half = points // 2
    tail = ratio[half:]
    if np.all(np.diff(tail) > 0.0) and tail[-1] > 2.0 * tail[0]:
        return Delta2Result(False, witness=float(t[half]))
    return Delta2Result(True, K=float(ratio.max()))


def little_o(
    psi: OrliczFunction,
    phi: OrliczFunction,
    t_max: float = 1e12,
    epsilon: float = 1e-3,
    points: int = 401,
) -> DecayResult:
    """Tests ``psi = o(phi)`` on the top two decades of a logarithmic grid

    :param psi: candidate smaller function
    :param phi: reference function
    :param t_max: end of the grid, which starts at 1
    :param epsilon: threshold for the final ratio
    :param points: number of grid points
    """
    t = np.geomspace(1.0, t_max, points)
    t = t[t >= t_max / 100.0]
    with np.errstate(over="ignore", invalid="ignore"):
        ratio = _evaluate(psi, t) / _evaluate(phi, t)
    return DecayResult(
        final_ratio=float(ratio[-1]),
        decreasing=bool(np.all(np.diff(ratio) <= 0.0) and ratio[-1] < ratio[0]),
        vanishing=bool(ratio[-1] < epsilon),
        t_max=t_max,
        epsilon=epsilon,
    )


def domination_constant(
    phi: OrliczFunction,
    envelope: Callable[[np.ndarray], np.ndarray],
    s_max: float,
    points: int = 3001,
) -> float:
    """Smallest ``K`` with ``psi(s) <= K * envelope(s)`` on ``[0, s_max]``, where
    ``psi`` is the complementary function of ``phi``

    :param phi: Orlicz function
    :param envelope: positive comparison function
    :param s_max: end of the grid
    :param points: number of grid points
    """
    s = np.linspace(0.0, s_max, points)
    psi = conjugate_function(phi)(s)
    with np.errstate(over="ignore"):
        env = envelope(s)
    return float(np.max(psi / env))


def envelope(name: str, d: float = 1.0) -> Callable[[np.ndarray], np.ndarray]:
    """Comparison functions ``"exp"`` (e^s), ``"exp_exp"`` (exp(e^s)) and
    ``"exp_power"`` (e^(s^d))"""
    if name == "exp":
        return np.exp
    if name == "exp_exp":
        return lambda s: np.exp(np.exp(s))
    if name == "exp_power":
        return lambda s: np.exp(np.power(s, d))
    raise InvalidInputError(f"Unknown envelope '{name}'")


def target_function(cert: SeparationCertificate) -> OrliczFunction:
    """Orlicz function the regime's basis differentiates"""
    if cert.t_kind == "exponential" or cert.beta is None:
        return OrliczFunction.loglog()
    return OrliczFunction.phi_beta(cert.beta)


def as_callable(phi: TestFunction) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(phi, OrliczFunction):
        return lambda t: _evaluate(phi, np.asarray(t, dtype=float))
    return phi


def regions_overlap(a: Region, b: Region) -> bool:
    """Whether two regions intersect in a set of positive measure"""
    if isinstance(a, Disk) and isinstance(b, Disk):
        gap = math.hypot(a.center.x - b.center.x, a.center.y - b.center.y)
        return gap < a.radius + b.radius
    if isinstance(a, Disk) and isinstance(b, ConvexRegion):
        return geom.disk_polygon_area(a, b) > 1e-14 * min(a.area, b.area)
    if isinstance(b, Disk) and isinstance(a, ConvexRegion):
        return regions_overlap(b, a)
    if isinstance(a, ConvexRegion) and isinstance(b, ConvexRegion):
        return geom.pair_intersection_area(a, b) > 0.0
    raise InvalidInputError(f"Unsupported region pair {a!r}, {b!r}")


def _check_disjoint(f: SimpleFunction) -> None:
    regions = [region for _, region in f.terms]
    for i, a in enumerate(regions):
        for b in regions[i + 1 :]:
            if regions_overlap(a, b):
                raise UnsupportedInputError(
                    f"Simple function regions {a!r} and {b!r} overlap"
                )


def integral(phi: TestFunction, f: SimpleFunction) -> float:
    """Integral of ``phi(f)`` for a simple function with disjoint regions

    :param phi: Orlicz function or vectorized callable with ``phi(0) = 0``
    :param f: simple function
    :return: ``sum_i phi(c_i) * |region_i|``
    """
    _check_disjoint(f)
    fn = as_callable(phi)
    return math.fsum(float(fn(np.array(c))) * region.area for c, region in f.terms)


def weak_type_bound(
    phi: OrliczFunction, f: SimpleFunction, alpha: float, constant: float = 1.0
) -> float:
    """Right-hand side ``constant * integral phi(|f| / alpha)`` of a weak-type
    estimate"""
    if not alpha > 0.0:
        raise InvalidInputError(f"Threshold alpha={alpha} is not positive")
    scaled = SimpleFunction(tuple((c / alpha, region) for c, region in f.terms))
    return constant * integral(phi, scaled)


def overlap_integral(phi: TestFunction, regions: Sequence[ConvexRegion]) -> float:
    """Integral of ``phi(sum of indicators)``, i.e. ``sum_m phi(m) |{chi = m}|``

    :param phi: function on the positive integers with ``phi(0) = 0``
    :param regions: convex regions
    """
    depths = geom.depth_measures(regions)
    if len(depths) == 0:
        return 0.0
    fn = as_callable(phi)
    weights = np.asarray(fn(np.arange(1, len(depths) + 1, dtype=float)), dtype=float)
    return math.fsum(weights * depths)
