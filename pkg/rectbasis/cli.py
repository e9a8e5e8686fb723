"""Command-line driver: sequence generation, verification runs and report files"""

import argparse
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from rectbasis import angles, construct, geom, maximal, orlicz
from rectbasis.config_parser import ConfigParser
from rectbasis.data.construction import Construction, StokolosInput
from rectbasis.data.functions import OrliczFunction
from rectbasis.data.report import VerificationReport
from rectbasis.data.run import RunConfig
from rectbasis.data.sequence import AngleSequence, PowerSpec, SeparationCertificate
from rectbasis.errors import (
    CapacityError,
    ConfigError,
    InvalidInputError,
    InvalidSpecError,
    UnboundedConjugateError,
)
from rectbasis.report_writer import ReportWriter

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_CAPACITY = 3

THREADS_ENV = "RBL_THREADS"


def resolve_function(name: str, cert: SeparationCertificate) -> construct.NamedFunction:
    """Named test function: ``"psi"`` is the complementary function of the regime
    target, other names follow :meth:`OrliczFunction.from_name`"""
    if name == "psi":
        return construct.default_test_functions(cert)[1]
    try:
        phi = OrliczFunction.from_name(name)
    except InvalidInputError as e:
        raise ConfigError(f"Unknown function name '{name}'") from e
    return name, orlicz.as_callable(phi)


def max_workers(config: RunConfig) -> int:
    workers = config.threads or os.cpu_count() or 1
    cap = os.environ.get(THREADS_ENV)
    if cap:
        try:
            workers = min(workers, int(cap))
        except ValueError as e:
            raise ConfigError(f"{THREADS_ENV}={cap!r} is not an integer") from e
    return max(1, workers)


def run_jobs(fn: Callable, jobs: Sequence[Any], workers: int) -> List[Any]:
    """Results of ``fn`` over ``jobs`` in job order"""
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as executor:
            return list(executor.map(fn, jobs))
    return [fn(job) for job in jobs]


def prepare(config: RunConfig) -> Tuple[AngleSequence, SeparationCertificate]:
    """Sequence and tightened certificate of the configured regime"""
    seq = angles.generate(config.regime)
    cert = angles.tighten_certificate(
        angles.derive_certificate(config.regime), config.margin
    )
    if cert.zeta_reduced_from is not None:
        logger.info(f"Reduced zeta from {cert.zeta_reduced_from:g} to {cert.zeta:g}")
    return seq, cert


def build_family(
    config: RunConfig, seq: AngleSequence, cert: SeparationCertificate
) -> List[Construction]:
    """Nested constructions ``k = 1..kmax``, scaled by ``epsilon``"""
    if config.kmax > construct.MAX_K:
        raise CapacityError(
            f"Construction index kmax={config.kmax} exceeds {construct.MAX_K}"
        )
    family = []
    epsilon = config.epsilon
    for k in range(1, config.kmax + 1):
        c = construct.build_construction(seq, cert, k, epsilon)
        logger.info(f"Built k={k}: L={c.L:.6g}, ell={c.ell:.6g}, |Y|={c.Y_area:.6g}")
        family.append(c)
        epsilon = min(c.ell, 1.0 / k)
    return family


def _verify_construction(job: Tuple[Construction, RunConfig]) -> VerificationReport:
    c, config = job
    functions = [resolve_function(name, c.cert) for name in config.phi]
    report = construct.verify_lemmaA(
        c,
        functions,
        random_subsets=config.random_subsets,
        seed=config.seed,
        tolerance=config.tolerance,
    )
    report.extend(construct.verify_propB(c, tolerance=config.tolerance))
    estimate = geom.union_area(
        c.rects,
        method="monte_carlo",
        samples=config.samples,
        seed=np.random.SeedSequence([config.seed, c.k]),
    )
    report.agreement(
        "union-monte-carlo",
        "monte-carlo-agreement",
        c.Y_area,
        estimate.value,
        estimate.sigma,
        seed=config.seed,
        k=c.k,
        note=f"{config.samples} samples",
    )
    return report


def cmd_gen_angles(config: RunConfig, writer: ReportWriter) -> int:
    seq, cert = prepare(config)
    writer.write_frame(
        "angles",
        pd.DataFrame(
            {"index": seq.indices, "theta": seq.thetas, "tangent": seq.tangents}
        ),
    )
    certificate: Dict[str, Any] = asdict(cert)
    certificate["n"] = seq.n
    if isinstance(config.regime, PowerSpec):
        start = angles.power_j0(config.regime)
        certificate["j0_conditions"] = start.conditions
        certificate["j0_binding"] = start.binding
    if seq.n >= 10:
        lacunarity = angles.check_lacunarity(seq)
        certificate["lacunarity"] = lacunarity.classification
    writer.write_json("certificate", certificate)
    logger.info(f"Generated {seq.n} angles from index {seq.j0}")
    return EXIT_OK


def cmd_verify(config: RunConfig, writer: ReportWriter) -> int:
    seq, cert = prepare(config)
    report = angles.verify_certificate(seq, cert, min(config.kmax, seq.n - 1))
    family = build_family(config, seq, cert)
    report.extend(construct.verify_nesting(family))
    selected = construct.constructions_in_range(family, config.kmin, config.kmax)
    jobs = [(c, config) for c in selected]
    partials = run_jobs(_verify_construction, jobs, max_workers(config))
    for c, partial in zip(selected, partials):
        logger.info(f"Verified k={c.k}: {partial.summary()}")
        report.extend(partial)
    if selected:
        psi = resolve_function(config.psi, cert)[1]
        report.extend(
            maximal.verify_blowup(selected, psi=psi, tolerance=config.tolerance)
        )
        report.extend(
            maximal.verify_overlap_constants(selected, tolerance=config.tolerance)
        )
        report.extend(maximal.stokolos_check(_stokolos_input(config, selected, cert)))
    writer.write_report("report", report)
    writer.set("passed", report.passed)
    return _exit_code(report)


def _stokolos_input(
    config: RunConfig, family: List[Construction], cert: SeparationCertificate
) -> StokolosInput:
    target = orlicz.target_function(cert)
    s_max = float(max((c.k for c in family), default=1) + 1)
    return StokolosInput(
        families=family,
        phi=target,
        psi=orlicz.conjugate_function(target),
        dominating=maximal.dominating_function(cert, s_max),
        random_subsets=config.random_subsets,
        seed=config.seed,
    )


def cmd_blowup(config: RunConfig, writer: ReportWriter) -> int:
    seq, cert = prepare(config)
    psi = resolve_function(config.psi, cert)[1]
    family = build_family(config, seq, cert) if config.kmin <= config.kmax else []
    selected = construct.constructions_in_range(family, config.kmin, config.kmax)
    frame = maximal.blowup_frame(maximal.blowup_series(selected, psi=psi))
    writer.write_frame("series", frame)
    if config.plot_data:
        points = [
            pd.DataFrame({"series": name, "x": frame["k"], "y": frame[column]})
            for name, column in (("ratio", "ratio"), ("divergence", "divergence"))
        ]
        writer.write_frame("plot", pd.concat(points, ignore_index=True))
    report = VerificationReport()
    for row in frame.itertuples():
        report.compare(
            "blowup", "blowup-claim", row.ratio, ">=", row.gamma1, config.tolerance,
            k=int(row.k), method="closed-form",
        )
    writer.set("passed", report.passed)
    return _exit_code(report)


def cmd_stokolos(config: RunConfig, writer: ReportWriter) -> int:
    seq, cert = prepare(config)
    family = build_family(config, seq, cert)
    selected = construct.constructions_in_range(family, config.kmin, config.kmax)
    stokolos = _stokolos_input(config, selected, cert)
    writer.write_frame("constants", maximal.stokolos_constants(stokolos))
    report = maximal.stokolos_check(stokolos, config.tolerance)
    report.extend(
        maximal.verify_overlap_constants(selected, tolerance=config.tolerance)
    )
    writer.write_frame("factors", maximal.overlap_bound_series(cert, config.ks))
    writer.write_report("report", report)
    writer.set("passed", report.passed)
    return _exit_code(report)


def cmd_kakeya(config: RunConfig, writer: ReportWriter) -> int:
    seq, cert = prepare(config)
    family = build_family(config, seq, cert)
    rows = []
    for c in construct.constructions_in_range(family, config.kmin, config.kmax):
        result = maximal.kakeya_ratio(c.rects)
        logger.info(f"Kakeya ratio k={c.k}: {result.ratio:.6g}")
        rows.append(dict(k=c.k, **asdict(result)))
    columns = ["k", "ratio", "maximal_check", "union_area", "extended_union_area"]
    writer.write_frame("ratios", pd.DataFrame(rows, columns=columns))
    report = VerificationReport()
    for row in rows:
        report.compare(
            "kakeya-average", "kakeya-average", row["maximal_check"], ">=",
            1.0 / maximal.KAKEYA_FACTOR, config.tolerance, k=row["k"],
        )
    writer.set("passed", report.passed)
    return _exit_code(report)


def cmd_probe_weak11(config: RunConfig, writer: ReportWriter) -> int:
    seq, cert = prepare(config)
    family = build_family(config, seq, cert)
    result = maximal.weak11_probe(family, config.trials, config.seed, config.raster)
    writer.write_frame(
        "history",
        pd.DataFrame(
            {"trial": np.arange(1, result.trials + 1), "constant": result.history}
        ),
    )
    writer.write_json(
        "probe",
        {
            "constant": result.constant,
            "trials": result.trials,
            "seed": result.seed,
            "raster": result.raster,
            "shapes": [list(s) for s in result.shapes],
            "flagged": result.flagged,
        },
    )
    if result.flagged:
        logger.warning("Running maximum doubled in the second half of the trials")
    return EXIT_OK


COMMANDS: Dict[str, Callable[[RunConfig, ReportWriter], int]] = {
    "gen-angles": cmd_gen_angles,
    "verify": cmd_verify,
    "blowup": cmd_blowup,
    "stokolos": cmd_stokolos,
    "kakeya": cmd_kakeya,
    "probe-weak11": cmd_probe_weak11,
}


def _exit_code(report: VerificationReport) -> int:
    if report.passed:
        return EXIT_OK
    failure = report.first_failure
    logger.error(
        f"{len(report.failures)} failed checks, first: {failure.check} "
        f"(k={failure.k}, margin={failure.margin:.3g})"
    )
    return EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rectbasis",
        description="Rotated-rectangle differentiation-basis constructions and "
        "numerical verification of their inequalities",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", type=Path, help="JSON run configuration")
    parser.add_argument("--out", help="Output directory")
    parser.add_argument("--seed", type=int, help="Random seed")
    parser.add_argument("--samples", type=int, help="Monte-Carlo samples")
    parser.add_argument("--kmin", type=int, help="Smallest construction index")
    parser.add_argument("--kmax", type=int, help="Largest construction index")
    parser.add_argument(
        "--regime", choices=["lacunary", "superlacunary", "power"], help="Angle regime"
    )
    parser.add_argument("--tolerance", type=float, help="Relative tolerance")
    parser.add_argument("--psi", help="Comparison function of the divergence series")
    parser.add_argument("--trials", type=int, help="Weak (1,1) probe trials")
    parser.add_argument("--raster", type=int, help="Weak (1,1) probe raster side")
    parser.add_argument("--threads", type=int, help="Worker processes")
    parser.add_argument(
        "--plot-data", action="store_true", default=None, help="Emit plot series"
    )
    parser.add_argument("--verbose", action="store_true", help="Debug logging")
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    """Run configuration from the JSON file, overridden by command-line flags"""
    text = "{}"
    if args.config is not None:
        try:
            text = args.config.read_text()
        except OSError as e:
            raise ConfigError(f"Cannot read configuration '{args.config}'") from e
    keys = [
        "out",
        "seed",
        "samples",
        "kmin",
        "kmax",
        "regime",
        "tolerance",
        "psi",
        "trials",
        "raster",
        "threads",
        "plot_data",
    ]
    overrides = {key: getattr(args, key) for key in keys}
    overrides = {key: value for key, value in overrides.items() if value is not None}
    return ConfigParser(text).parse_run_config(overrides)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        config = load_config(args)
        kind = config.regime.kind
        logger.info(f"Running {args.command} ({kind}, seed {config.seed})")
        with ReportWriter(config.out, args.command) as writer:
            writer.set("seed", config.seed)
            writer.set("regime", dict(asdict(config.regime), kind=kind))
            return COMMANDS[args.command](config, writer)
    except (ConfigError, InvalidSpecError, InvalidInputError) as e:
        logger.error(str(e))
        return EXIT_CONFIG
    except (CapacityError, UnboundedConjugateError) as e:
        logger.error(str(e))
        return EXIT_CAPACITY


if __name__ == "__main__":
    sys.exit(main())
