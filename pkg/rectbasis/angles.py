"""Angle sequences of the three regimes and their separation certificates"""

import math
import sys
from dataclasses import replace
from typing import Dict, Union
from warnings import warn

import numpy as np

from rectbasis.data.report import VerificationReport
from rectbasis.data.results import LacunarityResult, StartIndex
from rectbasis.data.sequence import (
    AngleSequence,
    LacunarySpec,
    PowerSpec,
    RegimeSpec,
    SeparationCertificate,
    SuperlacunarySpec,
)
from rectbasis.errors import InvalidInputError, InvalidSpecError

LOG_TINY = math.log(sys.float_info.min)

J0_SCAN_LIMIT = 1_000_000


def validate(spec: RegimeSpec) -> None:
    """Checks the invariants of a regime description

    :param spec: regime description
    """
    if spec.n < 1:
        raise InvalidSpecError(f"Sequence length {spec.n} is not positive")
    if isinstance(spec, (LacunarySpec, SuperlacunarySpec)):
        if not 0.0 < spec.lam < spec.mu < 1.0:
            raise InvalidSpecError(
                f"{spec.kind} regime requires 0 < lam < mu < 1, "
                f"got lam={spec.lam}, mu={spec.mu}"
            )
        if not 0.0 < spec.m0 <= 1.0:
            raise InvalidSpecError(f"Initial tangent m0={spec.m0} not in (0, 1]")
        if isinstance(spec, SuperlacunarySpec) and (
            int(spec.d) != spec.d or spec.d < 2
        ):
            raise InvalidSpecError(
                f"Superlacunary exponent d={spec.d} is not an integer > 1"
            )
        if spec.ratios is not None:
            if len(spec.ratios) < spec.n - 1:
                raise InvalidSpecError(
                    f"{len(spec.ratios)} ratios supplied for {spec.n} terms"
                )
            for j, r in enumerate(spec.ratios):
                if not spec.lam <= r <= spec.mu:
                    raise InvalidSpecError(
                        f"Ratio {r} at index {j} outside of [{spec.lam}, {spec.mu}]"
                    )
    elif isinstance(spec, PowerSpec):
        if not 0.0 < spec.d < 1.0:
            raise InvalidSpecError(f"Power regime exponent d={spec.d} not in (0, 1)")
        if not 0.0 < spec.a <= spec.b < 1.0:
            raise InvalidSpecError(
                f"Power regime requires 0 < a <= b < 1, got a={spec.a}, b={spec.b}"
            )
        if not 0.0 <= spec.decay < 1.0:
            raise InvalidSpecError(f"Power regime decay={spec.decay} not in [0, 1)")
    else:
        raise InvalidSpecError(f"Unsupported regime description {spec!r}")


def is_normalized(spec: RegimeSpec) -> bool:
    """Whether ``lam / 2 <= m0 <= lam`` (always true for the power regime)"""
    if isinstance(spec, (LacunarySpec, SuperlacunarySpec)):
        return 0.5 * spec.lam <= spec.m0 <= spec.lam
    return True


def power_theta(j: int, spec: PowerSpec) -> float:
    """Power-regime angle ``arctan(a_j ** (j ** d))`` at absolute index ``j``"""
    return math.atan(math.pow(spec.base(j), math.pow(j, spec.d)))


def _first_holding(ok: np.ndarray) -> int:
    """One-based index from which a condition holds over the rest of the scan"""
    failing = np.flatnonzero(~ok)
    if len(failing) == 0:
        return 1
    if failing[-1] == len(ok) - 1:
        return -1
    return int(failing[-1]) + 2


def power_j0(spec: PowerSpec) -> StartIndex:
    """Smallest start index of a power-regime sequence

    Scans ``j = 1, 2, ...`` for the helper inequalities
    ``j**d - (j - 1)**d >= d / (2 j**(1 - d))`` and
    ``(2 / d) j**(1 - d) <= b**(-j**d) / 2``, the separation threshold
    ``(4 / (d log(1/b))) j**(1 - d) <= b**(-j**d)`` and the monotonicity threshold
    ``j**d >= (1 - d) / (d log(1/b))``.

    :param spec: power regime description
    :return: start index together with the index at which each condition holds
    """
    validate(spec)
    d, log_inv_b = spec.d, -math.log(spec.b)
    j = np.arange(1, J0_SCAN_LIMIT + 1, dtype=float)
    jd = j**d
    log_j = np.log(j)
    checks: Dict[str, np.ndarray] = {
        "difference": jd - (j - 1.0) ** d >= d / (2.0 * j ** (1.0 - d)),
        "exponential": math.log(4.0 / d) + (1.0 - d) * log_j <= jd * log_inv_b,
        "separation": math.log(4.0 / (d * log_inv_b)) + (1.0 - d) * log_j
        <= jd * log_inv_b,
        "monotonicity": jd >= (1.0 - d) / (d * log_inv_b),
    }
    conditions = {name: _first_holding(ok) for name, ok in checks.items()}
    # log_a(log_a e) is undefined for a < 1
    conditions["logarithmic"] = 1
    failed = [name for name, value in conditions.items() if value < 0]
    if failed:
        raise InvalidSpecError(
            f"Power regime conditions {failed} do not settle below j={J0_SCAN_LIMIT}"
        )
    binding = max(conditions, key=lambda name: conditions[name])
    return StartIndex(j0=conditions[binding], conditions=conditions, binding=binding)


def _ratio_sequence(spec: Union[LacunarySpec, SuperlacunarySpec]) -> np.ndarray:
    n, d = spec.n, spec.exponent
    if spec.ratios is not None:
        ratios = np.asarray(spec.ratios[: n - 1], dtype=float)
    else:
        ratios = np.full(n - 1, math.sqrt(spec.lam * spec.mu))
    log_m = np.empty(n)
    log_m[0] = math.log(spec.m0)
    for j in range(n - 1):
        log_m[j + 1] = math.log(ratios[j]) + d * log_m[j]
        if log_m[j + 1] < LOG_TINY:
            raise InvalidSpecError(
                f"{spec.kind} sequence underflows at index {j + 1}; "
                f"at most {j + 1} terms are representable"
            )
    return np.exp(log_m)


def generate(spec: RegimeSpec) -> AngleSequence:
    """Generates the angle sequence of a regime

    :param spec: regime description
    :return: strictly decreasing angles in ``(0, pi/4]``
    """
    validate(spec)
    if isinstance(spec, PowerSpec):
        start = power_j0(spec)
        indices = np.arange(start.j0, start.j0 + spec.n)
        log_m = np.array([j**spec.d * math.log(spec.base(j)) for j in indices])
        if log_m.min() < LOG_TINY:
            first = indices[np.argmax(log_m < LOG_TINY)]
            raise InvalidSpecError(f"Power sequence underflows at index {first}")
        seq = AngleSequence.from_tangents(
            np.exp(log_m),
            j0=start.j0,
            regime=spec.kind,
            normalized=True,
            j0_conditions=dict(start.conditions),
        )
    else:
        normalized = is_normalized(spec)
        if not normalized:
            warn(
                f"Initial tangent m0={spec.m0} outside of "
                f"[{spec.lam / 2}, {spec.lam}]; "
                "the certificate uses m0 without rescaling"
            )
        seq = AngleSequence.from_tangents(
            _ratio_sequence(spec), j0=0, regime=spec.kind, normalized=normalized
        )
    if not seq.is_decreasing:
        raise InvalidSpecError(f"{spec.kind} sequence is not strictly decreasing")
    return seq


def derive_certificate(spec: RegimeSpec) -> SeparationCertificate:
    """Separation certificate ``(C, zeta, t, beta)`` of a regime

    :param spec: regime description
    :return: certificate with the regime's closed-form constants
    """
    validate(spec)
    if isinstance(spec, LacunarySpec):
        return SeparationCertificate(
            C=0.5 * spec.m0 * (1.0 / spec.mu - 1.0),
            zeta=spec.lam,
            t_kind="linear",
            beta=1.0,
            regime=spec.kind,
        )
    if isinstance(spec, SuperlacunarySpec):
        return SeparationCertificate(
            C=0.5 * (spec.mu ** (-1.0 / (spec.d - 1)) - 1.0),
            zeta=(0.5 * spec.lam) ** 2,
            t_kind="exponential",
            t_param=float(spec.d),
            regime=spec.kind,
        )
    assert isinstance(spec, PowerSpec)
    return SeparationCertificate(
        C=2.0,
        zeta=spec.a * spec.b,
        t_kind="power",
        t_param=spec.d,
        beta=1.0 / spec.d,
        j0=power_j0(spec).j0,
        regime=spec.kind,
    )


def tighten_certificate(
    cert: SeparationCertificate, margin: float = 0.9
) -> SeparationCertificate:
    """Reduces ``zeta`` until the regime condition holds with the given margin

    A smaller ``zeta`` keeps the separation hypothesis valid. The lacunary regime
    gets ``e * zeta <= margin``, the power regime ``e * zeta ** (2**d - 1) <= margin``.

    :param cert: certificate
    :param margin: target value of the regime condition, below 1
    :return: certificate with ``zeta_reduced_from`` set if ``zeta`` changed
    """
    if not 0.0 < margin < 1.0:
        raise InvalidInputError(f"Margin {margin} not in (0, 1)")
    if cert.t_kind == "linear":
        zeta = min(cert.zeta, margin / math.e)
    elif cert.t_kind == "power":
        zeta = min(cert.zeta, (margin / math.e) ** (1.0 / (2.0**cert.t_param - 1.0)))
    else:
        return cert
    if zeta == cert.zeta:
        return cert
    return replace(cert, zeta=zeta, zeta_reduced_from=cert.zeta)


def verify_certificate(
    seq: AngleSequence,
    cert: SeparationCertificate,
    upto: int,
    tolerance: float = 1e-12,
) -> VerificationReport:
    """Checks ``m_j - m_k >= C * zeta ** t_k`` and
    ``tan(theta_j - theta_k) >= (m_j - m_k) / 2`` for ``j0 <= j < k <= j0 + upto``

    One row per ``k`` reports the pair with the smallest slack.

    :param seq: angle sequence
    :param cert: separation certificate
    :param upto: number of steps past the start index
    :param tolerance: relative tolerance
    :return: report with failures as rows
    """
    if seq.n < upto + 1:
        raise InvalidInputError(
            f"Sequence has {seq.n} terms, {upto + 1} required for upto={upto}"
        )
    report = VerificationReport()
    m = seq.tangents
    thetas = seq.thetas
    log_C = math.log(cert.C)
    for pos in range(1, upto + 1):
        k = seq.j0 + pos
        diffs = m[:pos] - m[pos]
        worst = int(np.argmin(diffs))
        diff = float(diffs[worst])
        note = f"j={seq.j0 + worst}"
        if diff > 0.0:
            report.compare_log(
                "separation",
                "separation-hypothesis",
                math.log(diff),
                ">=",
                log_C + cert.log_zeta_power(k),
                tolerance,
                k=k,
                note=f"{note}; log scale",
            )
        else:
            report.compare(
                "separation",
                "separation-hypothesis",
                diff,
                ">=",
                cert.C * math.exp(cert.log_zeta_power(k)),
                tolerance,
                k=k,
                note=f"{note}; inverted pair",
            )
        gaps = np.tan(thetas[:pos] - thetas[pos])
        halves = 0.5 * diffs
        with np.errstate(divide="ignore", invalid="ignore"):
            slack = np.where(halves > 0.0, gaps / halves, -np.inf)
        worst = int(np.argmin(slack))
        report.compare(
            "tangent-gap",
            "tangent-gap",
            float(gaps[worst]),
            ">=",
            float(halves[worst]),
            tolerance,
            k=k,
            note=f"j={seq.j0 + worst}",
        )
    return report


def check_lacunarity(
    seq: AngleSequence, tolerance: float = 1e-3, tail: int = 20
) -> LacunarityResult:
    """Classifies the tail of consecutive tangent ratios ``m_{j+1} / m_j``

    Ratios within ``tolerance`` of 1, or increasing towards 1 at a power rate, are
    not lacunary; ratios decreasing below ``tolerance`` are degenerate.

    :param seq: angle sequence with at least 10 terms
    :param tolerance: distance from 1 (and from 0) regarded as a limit
    :param tail: number of trailing ratios examined
    :return: classification with tail estimates of the limits
    """
    if seq.n < 10:
        raise InvalidInputError(f"Lacunarity check needs 10 terms, got {seq.n}")
    m = seq.tangents
    ratios = (m[1:] / m[:-1])[-tail:]
    if ratios.max() > 1.0 - tolerance:
        return LacunarityResult("not_lacunary", flagged=True)
    steps = np.diff(ratios)
    if np.all(steps > 0.0):
        idx = np.arange(seq.n - len(ratios), seq.n, dtype=float)
        slope = np.polyfit(np.log(idx), np.log1p(-ratios), 1)[0]
        if slope < -0.1:
            return LacunarityResult("not_lacunary", flagged=True)
    if np.all(steps < 0.0) and ratios[-1] < tolerance:
        return LacunarityResult("degenerate", liminf=0.0, limsup=0.0, flagged=True)
    return LacunarityResult(
        "lacunary", liminf=float(ratios.min()), limsup=float(ratios.max())
    )
