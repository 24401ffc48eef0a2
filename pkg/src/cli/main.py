#!/usr/bin/env python3
"""
fsi-beam command line: run a configuration, run the verification suites,
or compare empirical contact times against the a-priori bound.

Exit codes: 0 success, 1 failure (incl. failed verification), 2 contact,
3 Picard divergence, 4 configuration or checkpoint error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

logger = logging.getLogger(__name__)

THREAD_VARIABLES = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS")

CONFIG_HELP = """\
configuration keys (override with --set section.key=value):
  physics.length                  L, period in x
  physics.rho_f / rho_s           fluid and beam densities
  physics.mu                      viscosity
  physics.beta / alpha            tension and bending stiffness
  discretization.n_pairs          N, number of fluid modes
  discretization.interior_wavenumbers / interior_profiles
                                  M and N_z of the interior candidate pool
  discretization.n_x / n_z / oversampling
                                  quadrature sizes, derived when unset
  discretization.beam_projection  l2 or h2 pairing
  discretization.compat_tol       tolerance of the initial compatibility checks
  time.dt / t_end                 step and horizon
  time.picard_tol / picard_max_iter
  time.dt_halving / dt_min        retry failed steps with dt/2 down to dt_min
  time.h_floor                    height that counts as contact
  initial.scenario                flat, sine_perturbation, descending, lifted_mode, sampled
  initial.params / initial.file   scenario parameters, sampled h0/h1 (CSV or npz)
  output.directory / output_dt / checkpoint_every / norm_ceiling
  output.snapshots / snapshot_format / snapshot_nx / snapshot_nz
  cache                           SQLite basis cache
  seed                            verification sampling seed
"""


def _set_threads(threads: Optional[int]) -> None:
    # Only effective before numpy is imported, hence the lazy imports below.
    if threads is None:
        return
    for name in THREAD_VARIABLES:
        os.environ[name] = str(threads)


def _configure_logging(quiet: bool, verbose: bool) -> None:
    level = logging.WARNING if quiet else logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(levelname)s - %(message)s'
    )
    logging.getLogger().setLevel(level)


def _load(config_path: str, overrides: Sequence[str]):
    from src.pipeline.config import apply_overrides, load_config

    config = load_config(config_path)
    if overrides:
        config = apply_overrides(config, overrides)
    return config


def _options(mutation: Optional[str]):
    from src.assembly.operators import DEFAULT_OPTIONS
    from src.verification.suites import MUTATIONS

    if mutation is None:
        return DEFAULT_OPTIONS
    if mutation not in MUTATIONS:
        raise SystemExit(f"unknown mutation '{mutation}' (available: {', '.join(MUTATIONS)})")
    logger.warning("Assembly mutation '%s' is active", mutation)
    return MUTATIONS[mutation]


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------


def _post_run(result, config, options) -> Dict[str, Any]:
    """Norm budget and differentiated residual over the stored trajectory."""
    from src.core.errors import InsufficientWindow
    from src.diagnostics.budget import norm_budget
    from src.integrator.residual import differentiated_residual

    sim = result.simulation
    extras: Dict[str, Any] = {}
    trajectory = result.trajectory
    if len(trajectory) == 0:
        return extras

    budget = norm_budget(
        trajectory,
        sim.basis,
        sim.grid,
        config.physics,
        h_min=config.time.h_floor,
        ceiling=config.output.norm_ceiling,
        options=options,
    )
    extras["norm_budget"] = budget.to_dict()
    if budget.blow_up:
        logger.warning("Monitored norms exceeded the ceiling %.3e", budget.ceiling)

    try:
        series = differentiated_residual(
            trajectory, sim.basis, sim.grid, config.physics, options, config.time.h_floor
        )
        extras["differentiated_residual_max"] = series.max
    except InsufficientWindow as exc:
        logger.info("Differentiated residual skipped: %s", exc)
    return extras


def cmd_run(args: argparse.Namespace) -> int:
    from src.core.errors import SimulationError, exit_code_for
    from src.export.checkpoint import load_checkpoint
    from src.export.writer import RunWriter
    from src.integrator.driver import prepare, run
    from src.pipeline.config import config_hash

    options = _options(args.mutate)
    try:
        config = _load(args.config, args.overrides)
        checkpoint = None
        if args.resume:
            checkpoint = load_checkpoint(args.resume, expected_hash=config_hash(config))
        simulation = prepare(config, options)
    except SimulationError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return exit_code_for(exc)

    writer = RunWriter(config, simulation.basis, resume_step=checkpoint.step if checkpoint else None)
    summary: Dict[str, Any] = {"config": str(args.config), "config_hash": writer.config_hash}
    code = 0
    try:
        result = run(
            config,
            simulation=simulation,
            resume=checkpoint,
            observer=writer,
            progress=not args.quiet,
            options=options,
        )
        summary.update(result.summary())
        summary.update(_post_run(result, config, options))
        if result.status == "contact":
            code = result.contact.exit_code if result.contact is not None else 2
    except SimulationError as exc:
        logger.error("Run aborted at step %s: %s", exc.step_index, exc)
        summary.update({"status": type(exc).__name__, "error": str(exc), "step": exc.step_index})
        summary["details"] = dict(exc.details)
        code = exit_code_for(exc)
    finally:
        writer.close()

    if args.verify:
        verification = _verify(args.verify, options, config.seed)
        summary["verification"] = [suite.to_dict() for suite in verification]
        if code == 0 and not all(suite.passed for suite in verification):
            code = 1

    path = writer.write_summary(summary)
    logger.info("Summary written to %s", path)
    return code


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _verify(names: Sequence[str], options, seed: int):
    from src.verification.suites import VerifyContext, run_suites

    return run_suites(list(names), VerifyContext(options=options, seed=seed))


def cmd_verify(args: argparse.Namespace) -> int:
    options = _options(args.mutate)
    try:
        results = _verify(args.suites, options, args.seed)
    except KeyError as exc:
        logger.error("%s", exc.args[0])
        return 4

    for suite in results:
        status = "PASS" if suite.passed else "FAIL"
        logger.info("%s %s (%d checks)", status, suite.suite, len(suite.checks))
        for check in suite.failures:
            logger.error("  %s: %.3e vs limit %.1e", check.name, check.value, check.limit)

    if args.report:
        report = Path(args.report)
        report.parent.mkdir(parents=True, exist_ok=True)
        report.write_text(json.dumps([suite.to_dict() for suite in results], indent=2, default=str))
    return 0 if all(suite.passed for suite in results) else 1


# ---------------------------------------------------------------------------
# contact-study
# ---------------------------------------------------------------------------


def _study_one(config_path: str, overrides: Sequence[str], r: float, progress: bool) -> Dict[str, Any]:
    import numpy as np

    from src.geometry.monitors import CONTACT_ALLOWANCE, bound_holds, hoelder_check
    from src.integrator.driver import prepare, run

    config = _load(config_path, overrides)
    simulation = prepare(config)
    result = run(config, simulation=simulation, progress=progress)

    bound = simulation.contact_bound
    contact = result.contact_time
    holds = bound_holds(contact, bound)

    states = result.trajectory.states
    x = simulation.assembler.fine_x
    heights = np.stack([simulation.basis.beam.evaluate(s.g_coeffs, x, mean=s.g_mean) for s in states])
    ratio = hoelder_check(result.trajectory.times, x, heights, simulation.C0, r, config.physics.length)

    row = {
        "config": str(config_path),
        "delta": simulation.delta,
        "h_floor": config.time.h_floor,
        "C0": simulation.C0,
        "contact_bound": bound,
        "status": result.status,
        "contact_time": contact,
        "bound_holds": holds,
        "allowance": CONTACT_ALLOWANCE,
        "hoelder_ratio": ratio,
        "hoelder_r": r,
    }
    if contact is None:
        logger.info("%s: no contact up to t=%.4g (bound %.4g)", config_path, result.final_state.t, bound)
    else:
        logger.info("%s: contact at t=%.4g, bound %.4g -> %s", config_path, contact, bound,
                    "holds" if holds else "VIOLATED")
    return row


def cmd_contact_study(args: argparse.Namespace) -> int:
    from src.core.errors import SimulationError, exit_code_for

    rows: List[Dict[str, Any]] = []
    for config_path in args.configs:
        try:
            rows.append(_study_one(config_path, args.overrides, args.hoelder_r, not args.quiet))
        except SimulationError as exc:
            logger.error("%s: %s", config_path, exc)
            return exit_code_for(exc)

    if args.output:
        target = Path(args.output)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(json.dumps(rows, indent=2, default=str))
    else:
        print(json.dumps(rows, indent=2, default=str))
    return 0 if all(row["bound_holds"] for row in rows) else 1


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--quiet', action='store_true', help='Only warnings and errors, no progress bar')
    common.add_argument('--verbose', action='store_true', help='Debug logging')
    common.add_argument('--threads', type=int, help='Thread count for the BLAS/FFT backends')

    parser = argparse.ArgumentParser(prog="fsi-beam", description="Elastic beam coupled to 2D Navier-Stokes flow")
    sub = parser.add_subparsers(dest="command", required=True)

    run_parser = sub.add_parser(
        "run",
        parents=[common],
        help="Integrate a configuration",
        epilog=CONFIG_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    run_parser.add_argument('--config', required=True, help='YAML/JSON configuration file')
    run_parser.add_argument('--set', dest='overrides', action='append', default=[], metavar='KEY=VALUE',
                            help='Override a configuration key (repeatable)')
    run_parser.add_argument('--resume', help='Checkpoint to resume from')
    run_parser.add_argument('--verify', nargs='+', metavar='SUITE', help='Run verification suites after the run')
    run_parser.add_argument('--mutate', help='Inject an assembly mutation (sanity check of the suites)')
    run_parser.set_defaults(handler=cmd_run)

    verify_parser = sub.add_parser("verify", parents=[common], help="Run invariant suites standalone")
    verify_parser.add_argument('suites', nargs='*', default=['all'], help='Suite names or "all"')
    verify_parser.add_argument('--mutate', help='Inject an assembly mutation (expect failures)')
    verify_parser.add_argument('--seed', type=int, default=0)
    verify_parser.add_argument('--report', help='Write the suite results as JSON')
    verify_parser.set_defaults(handler=cmd_verify)

    study_parser = sub.add_parser("contact-study", parents=[common], help="Compare contact times with the a-priori bound")
    study_parser.add_argument('configs', nargs='+', help='Configurations to run')
    study_parser.add_argument('--set', dest='overrides', action='append', default=[], metavar='KEY=VALUE')
    study_parser.add_argument('--hoelder-r', type=float, default=0.25, help='Scale r of the Hoelder check')
    study_parser.add_argument('--output', help='Write the study as JSON instead of printing it')
    study_parser.set_defaults(handler=cmd_contact_study)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _set_threads(args.threads)
    _configure_logging(args.quiet, args.verbose)
    try:
        return args.handler(args)
    except FileNotFoundError as exc:
        logger.error("%s", exc)
        return 4


if __name__ == "__main__":
    sys.exit(main())
