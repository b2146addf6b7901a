"""Command line for simulation, estimation, dwell times, inference and experiments.

Exit codes: 0 success, 2 a check failed, 3 invalid input or configuration.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from backend.application import fit_models, predict, sanity_checks
from backend.core.complexity import CONDITIONS, check_conditions, max_network_size, min_dwell
from backend.core.csvio import read_trajectory, write_trajectory
from backend.core.dynamics import feasibility_check, simulate
from backend.core.estimator import estimate
from backend.core.inference import infer
from backend.core.schema import (
    EstimationDocument,
    HarnessConfig,
    SocialSystemDocument,
    load_harness_config,
    load_pac_config,
    read_document,
)
from backend.core.settings import get_settings
from backend.core.validation import ValidationError
from backend.domain import Schedule
from backend.exporters import (
    write_estimation,
    write_inference,
    write_panel,
    write_prediction_errors,
    write_prediction_trajectories,
)
from backend.extractors import ingest_ideology
from backend.infrastructure import configure_logging
from backend.workers import pac_experiment, round_trip_experiment

EXIT_OK = 0
EXIT_CHECK_FAILED = 2
EXIT_INPUT = 3

PAC_FIELDS = (
    "phi",
    "delta",
    "eps_net",
    "rho",
    "varrho1",
    "varrho2",
    "c_univ",
    "kappa",
    "gamma",
    "s_upper",
    "s_lower",
    "sigma_o",
    "sigma_p",
)


def _emit(payload: dict, out: Path | None = None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out is not None:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text + "\n", encoding="utf-8")
    print(text)


def parse_schedule(text: str) -> Schedule:
    """``-1:30,1:40`` -> runs of (label, length)."""
    try:
        runs = [tuple(int(part) for part in item.split(":")) for item in text.split(",") if item.strip()]
        return Schedule([(label, length) for label, length in runs])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad schedule {text!r}: {exc}") from exc


def _add_pac_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="PacConfig YAML file")
    for name in PAC_FIELDS:
        parser.add_argument(f"--{name.replace('_', '-')}", dest=name, type=float)


def _pac_config(args: argparse.Namespace):
    overrides = {name: getattr(args, name) for name in PAC_FIELDS}
    return load_pac_config(args.config or get_settings().pac_config, **overrides)


def _harness_config() -> HarnessConfig:
    return load_harness_config(get_settings().harness_config)


def cmd_simulate(args: argparse.Namespace) -> int:
    system = read_document(args.system, SocialSystemDocument).to_domain()
    seed = args.seed if args.seed is not None else system.noise.seed
    x1 = None if args.x1 is None else np.array([float(v) for v in args.x1.split(",")])
    traj = simulate(system, args.schedule, x1, rng=np.random.default_rng(seed))
    write_trajectory(args.out, traj)
    _emit({"steps": traj.steps, "n": traj.n, "out": str(args.out)})
    return EXIT_OK


def cmd_estimate(args: argparse.Namespace) -> int:
    traj = read_trajectory(args.trajectory)
    est = estimate(traj)
    write_estimation(args.out, est, source=args.trajectory)
    _emit({"out": str(args.out), "gram_min_singular": {f"{k:+d}": v for k, v in est.gram_min_singular.items()}})
    return EXIT_OK


def cmd_dwell(args: argparse.Namespace) -> int:
    cfg = _pac_config(args)
    if args.windows:
        k_minus, p_minus, k_plus, p_plus = args.windows
        report = max_network_size(k_minus, p_minus, k_plus, p_plus, cfg, require=args.require or CONDITIONS)
        _emit({"n_max": report.n_max, "require": list(report.require), "passing": report.passing_sizes()}, args.out)
        return EXIT_OK
    if args.n is None:
        raise ValidationError("--n is required unless --windows is given")
    if args.p is not None:
        report = check_conditions(args.k_start, args.p, args.n, cfg)
        _emit(_condition_payload(report), args.out)
        return EXIT_OK if report.passed else EXIT_CHECK_FAILED
    result = min_dwell(args.n, cfg, args.k_start, args.cap or _harness_config().dwell_cap)
    payload = {"n": args.n, "k_start": args.k_start, "reachable": result.reachable, "p": result.p, "tau": result.tau}
    if result.report is not None:
        payload.update(_condition_payload(result.report))
    _emit(payload, args.out)
    return EXIT_OK if result.reachable else EXIT_CHECK_FAILED


def _condition_payload(report) -> dict:
    return {
        "k": report.k,
        "p": report.p,
        "n": report.n,
        "concentration": report.concentration,
        "concentration_margin": report.concentration_margin,
        "excitation": report.excitation,
        "excitation_margin": report.excitation_margin,
        "note": report.note,
    }


def cmd_infer(args: argparse.Namespace) -> int:
    est = read_document(args.estimation, EstimationDocument).to_domain()
    harness = _harness_config()
    sol = infer(est, tol_s=args.tol_s or harness.tol_s, plausible=(harness.plausible_low, harness.plausible_high))
    write_inference(args.out, sol)
    _emit(
        {
            "out": str(args.out),
            "ok": sol.ok_rows,
            "flagged": sol.flagged_rows,
            "errored": {str(i): message for i, message in sol.errors.items()},
        }
    )
    return EXIT_CHECK_FAILED if sol.errored_rows else EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    est = read_document(args.estimation, EstimationDocument).to_domain()
    harness = _harness_config()
    report = sanity_checks(
        est,
        horizon=args.horizon or harness.sanity_horizon,
        initial_conditions=args.initial_conditions or harness.sanity_initial_conditions,
        seed=harness.sanity_seed if args.seed is None else args.seed,
    )
    _emit(
        {
            "passed": report.passed,
            "entries_bounded": report.entries_bounded,
            "offsets_bounded": report.offsets_bounded,
            "trajectories_bounded": report.trajectories_bounded,
            "offset_values": report.offset_values,
            "max_excursion": report.max_excursion,
        }
    )
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def _panel(args: argparse.Namespace, first: int | None = None, last: int | None = None):
    units = args.units.split(",") if args.units else None
    return ingest_ideology(
        args.members,
        args.presidents,
        first=first,
        last=last,
        chamber=args.chamber or _harness_config().chamber,
        units=units,
    )


def cmd_ingest(args: argparse.Namespace) -> int:
    panel = _panel(args, args.first, args.last)
    write_panel(args.out, panel)
    _emit({"units": panel.units, "dropped": panel.dropped_units, "clamped": panel.clamped, "out": str(args.out)})
    return EXIT_OK


def cmd_predict(args: argparse.Namespace) -> int:
    harness = _harness_config()
    fit_first, fit_last = args.fit or (harness.fit_first, harness.fit_last)
    first, last = args.horizon or (harness.predict_first, harness.predict_last)
    panel = _panel(args, fit_first, last)
    models = fit_models(panel, fit_first, fit_last)
    report = predict(panel, models, first, last)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    write_estimation(args.out_dir / "switching_estimation.json", models.switching)
    write_prediction_trajectories(args.out_dir / "prediction_trajectories.csv", report)
    write_prediction_errors(args.out_dir / "prediction_errors.csv", report)
    _emit(
        {
            "units": report.units,
            "mean_error_switching": report.mean_switching,
            "mean_error_fixed": report.mean_fixed,
            "switching_wins": report.switching_wins,
        }
    )
    return EXIT_OK


def cmd_roundtrip(args: argparse.Namespace) -> int:
    report = round_trip_experiment(args.n, args.seed, sigma_o=args.sigma_o)
    _emit(
        {
            "n": report.n,
            "seed": report.seed,
            "resamples": report.resamples,
            "max_error": report.max_error,
            "error_A": report.error_A,
            "error_a": report.error_a,
            "flagged": report.flagged_rows,
            "errored": report.errored_rows,
        }
    )
    return EXIT_OK


def cmd_pac(args: argparse.Namespace) -> int:
    cfg = _pac_config(args)
    report = pac_experiment(args.n, cfg, args.trials, args.seed, cap=args.cap or _harness_config().dwell_cap)
    _emit(
        {
            "n": report.n,
            "trials": report.trials,
            "tau_minus": report.tau_minus,
            "tau_plus": report.tau_plus,
            "success": {"+1": report.fraction(1), "-1": report.fraction(-1)},
            "lower_bound": {"+1": report.lower_bound(1), "-1": report.lower_bound(-1)},
            "certified": report.certified,
        }
    )
    return EXIT_OK if report.certified else EXIT_CHECK_FAILED


def cmd_feasibility(args: argparse.Namespace) -> int:
    system = read_document(args.system, SocialSystemDocument).to_domain()
    report = feasibility_check(system)
    _emit(
        {
            "passed": report.passed,
            "violations": [{"index": row.index, "margin": row.margin, "reason": row.reason} for row in report.violations],
        }
    )
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def _add_panel_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--members", type=Path, required=True)
    parser.add_argument("--presidents", type=Path, required=True)
    parser.add_argument("--units", help="comma-separated unit list")
    parser.add_argument("--chamber", help="chamber filter, defaults to the harness config")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="socinfer", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate a system under an extremal schedule")
    p.add_argument("--system", type=Path, required=True)
    p.add_argument("--schedule", type=parse_schedule, required=True)
    p.add_argument("--x1", help="comma-separated initial state")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", help="fit both regimes from a trajectory CSV")
    p.add_argument("--trajectory", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("dwell", help="dwell time, single-window check, or maximum network size")
    _add_pac_flags(p)
    p.add_argument("--n", type=int)
    p.add_argument("--k-start", type=int, default=1)
    p.add_argument("--p", type=int, help="check one window (k-start, p) instead of searching")
    p.add_argument("--cap", type=int)
    p.add_argument("--windows", type=int, nargs=4, metavar=("K_MINUS", "P_MINUS", "K_PLUS", "P_PLUS"))
    p.add_argument("--require", choices=CONDITIONS, action="append")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_dwell)

    p = sub.add_parser("infer", help="recover topology and biases from an estimation")
    p.add_argument("--estimation", type=Path, required=True)
    p.add_argument("--tol-s", type=float)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("validate", help="sanity checks on an estimation")
    p.add_argument("--estimation", type=Path, required=True)
    p.add_argument("--horizon", type=int)
    p.add_argument("--initial-conditions", type=int)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("ingest", help="build an ideology panel")
    _add_panel_flags(p)
    p.add_argument("--first", type=int)
    p.add_argument("--last", type=int)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("predict", help="switching versus fixed prediction on an ideology panel")
    _add_panel_flags(p)
    p.add_argument("--fit", type=int, nargs=2, metavar=("FIRST", "LAST"))
    p.add_argument("--horizon", type=int, nargs=2, metavar=("FIRST", "LAST"))
    p.add_argument("--out-dir", type=Path, required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("roundtrip", help="synthetic simulate-estimate-infer round trip")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--sigma-o", type=float, default=0.0)
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("pac", help="Monte Carlo check of the dwell-time guarantee")
    _add_pac_flags(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int)
    p.add_argument("--cap", type=int)
    p.set_defaults(func=cmd_pac)

    p = sub.add_parser("feasibility", help="worst-case feasibility of a system file")
    p.add_argument("--system", type=Path, required=True)
    p.set_defaults(func=cmd_feasibility)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging()
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"[error] {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
