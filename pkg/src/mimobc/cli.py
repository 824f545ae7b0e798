"""Command line front end (``mimo-bc-sim``).

Subcommands: ``run`` (one sweep to CSV), ``figure`` (canned experiment
recipes), ``analytic`` (tabulate closed-form curves).  SNR is total
transmit power in dB over unit noise; per-stream power is total divided
by the realized stream count.  Exit codes: 0 success, 2 usage error,
3 numerical error.
"""

import argparse
import sys

import numpy as np

from . import analytic, harness
from .backend import active_backend
from .errors import (ContractViolationError, DimensionError, DomainError,
                     NumericalError, RankDeficiencyError, SizeGuardError)
from .selection import ALL_MODES, PRINCIPAL_ONLY, DeltaSchedule

_USAGE_ERRORS = (DomainError, DimensionError, SizeGuardError, ValueError)
_NUMERICAL_ERRORS = (NumericalError, RankDeficiencyError,
                     ContractViolationError, np.linalg.LinAlgError,
                     FloatingPointError)

_SCOPES = {"all": ALL_MODES, "principal": PRINCIPAL_ONLY}
_POWER = {"waterfill": "waterfilling", "equal": "equal"}


def _parse_delta(text: str) -> DeltaSchedule:
    if text == "inv-log-k":
        return DeltaSchedule.inverse_log_k()
    if text == "adaptive":
        return DeltaSchedule.adaptive()
    try:
        return DeltaSchedule.fixed(float(text))
    except ValueError as exc:
        raise DomainError(
            f"--delta must be 'inv-log-k', 'adaptive' or a float in (0,1); "
            f"got {text!r}") from exc


def _parse_schemes(text: str):
    schemes = []
    for label in text.split(","):
        label = label.strip()
        if label not in harness.SCHEME_FROM_LABEL:
            raise DomainError(
                f"unknown scheme {label!r}; choose from "
                f"{sorted(harness.SCHEME_FROM_LABEL)}")
        schemes.append(harness.SCHEME_FROM_LABEL[label])
    return tuple(schemes)


def _parse_grid(text: str, cast=float):
    return tuple(cast(part) for part in text.split(","))


def _parse_range(text: str):
    try:
        start, stop, count = text.split(":")
        return np.linspace(float(start), float(stop), int(count))
    except ValueError as exc:
        raise DomainError(
            f"--grid must look like start:stop:count, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mimo-bc-sim",
        description="Sum-rate simulation and closed-form analysis for "
                    "eigenmode transmission with semi-orthogonal user "
                    "selection on the MIMO broadcast channel.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a Monte Carlo sweep to CSV")
    run.add_argument("--scheme", required=True,
                     help="comma list: zfdpc-sus,zfbf-sus,zfbf-exhaustive,"
                          "upper-bound,asymptotic")
    run.add_argument("--tx", type=int, required=True,
                     help="transmit antennas M")
    run.add_argument("--rx", required=True,
                     help="receive antennas N (comma list for a grid)")
    run.add_argument("--users", required=True,
                     help="user count K (comma list for a grid)")
    run.add_argument("--snr-db", required=True,
                     help="total power P in dB over unit noise "
                          "(comma list for a grid)")
    run.add_argument("--trials", type=int, default=2000)
    run.add_argument("--delta", default="inv-log-k",
                     help="'inv-log-k', 'adaptive', or a fixed value in (0,1)")
    run.add_argument("--power", choices=sorted(_POWER), default="waterfill")
    run.add_argument("--scope", choices=sorted(_SCOPES), default="all",
                     help="eigenmodes per user entering the candidate set")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--max-streams", type=int, default=None)
    run.add_argument("--out", required=True, help="output CSV path")

    fig = sub.add_parser("figure", help="run a canned experiment recipe")
    fig.add_argument("name",
                     choices=["fig1_gaps", "fig2_sumrates",
                              "fig3_rx_antennas"])
    fig.add_argument("--out", required=True, help="output CSV path")
    fig.add_argument("--trials", type=int, default=None,
                     help="override the default 2000 trials/point")
    fig.add_argument("--seed", type=int, default=None)
    fig.add_argument("--workers", type=int, default=None)

    ana = sub.add_parser("analytic", help="tabulate closed-form curves")
    ana.add_argument("--curve", required=True,
                     choices=["mu_n", "fmax-pdf", "fmax-cdf", "beta-cdf",
                              "gamma-bounds", "tail", "scaling", "e-delta"])
    ana.add_argument("--tx", type=int, required=True)
    ana.add_argument("--rx", type=int, default=None)
    ana.add_argument("--n", type=int, default=None,
                     help="selection iteration index")
    ana.add_argument("--delta", type=float, default=None)
    ana.add_argument("--users", type=int, default=None)
    ana.add_argument("--snr-db", type=float, default=None)
    ana.add_argument("--grid", default=None,
                     help="evaluation grid start:stop:count")
    ana.add_argument("--out", default=None,
                     help="output CSV path (default: stdout)")

    parser.add_argument("--version", action="version",
                        version=f"mimo-bc-sim (backend: {active_backend()})")
    return parser


def _cmd_run(args) -> int:
    config = harness.ExperimentConfig(
        tx=args.tx,
        rx=_parse_grid(args.rx, int),
        users=_parse_grid(args.users, int),
        snr_db=_parse_grid(args.snr_db, float),
        schemes=_parse_schemes(args.scheme),
        trials=args.trials,
        delta=_parse_delta(args.delta),
        power=_POWER[args.power],
        master_seed=args.seed,
        eigenmode_scope=_SCOPES[args.scope],
        max_streams=args.max_streams,
        workers=args.workers,
    )
    result = harness.sweep(config)
    harness.emit_csv(result, args.out)
    print(f"wrote {len(result.rows)} rows to {args.out}")
    return 0


def _cmd_figure(args) -> int:
    config = harness.figure_recipes(args.name)
    overrides = {}
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.workers is not None:
        overrides["workers"] = args.workers
    if overrides:
        from dataclasses import replace
        config = replace(config, **overrides)
    result = harness.sweep(config)
    harness.emit_csv(result, args.out)
    print(f"wrote {len(result.rows)} rows to {args.out}")
    return 0


def _require(args, names):
    for name in names:
        if getattr(args, name) is None:
            raise DomainError(
                f"curve {args.curve!r} needs --{name.replace('_', '-')}")


def _analytic_curves(args):
    grid = None if args.grid is None else _parse_range(args.grid)
    if args.curve == "mu_n":
        _require(args, ["n"])
        limit = 1.0 / (args.tx - 1)
        x = grid if grid is not None else np.linspace(
            limit * 1e-3, limit * 0.999, 64)
        y = [analytic.candidate_probability(args.tx, args.n, d) for d in x]
        return [analytic.AnalyticCurve(
            "cdf", np.asarray(x), np.asarray(y),
            {"tx": args.tx, "n": args.n})]
    if args.curve in ("fmax-pdf", "fmax-cdf"):
        _require(args, ["rx"])
        spec = analytic.wishart_coefficients(args.tx, args.rx)
        x = grid if grid is not None else np.linspace(
            0.0, 4.0 * (args.tx + args.rx), 200)
        if args.curve == "fmax-pdf":
            y = analytic.max_eigenvalue_pdf(spec, x)
            kind = "pdf"
        else:
            y = analytic.max_eigenvalue_cdf(spec, x)
            kind = "cdf"
        return [analytic.AnalyticCurve(
            kind, np.asarray(x), np.asarray(y),
            {"tx": args.tx, "rx": args.rx})]
    if args.curve == "beta-cdf":
        _require(args, ["n", "delta"])
        lo = 1.0 - (args.n - 1) * args.delta
        x = grid if grid is not None else np.linspace(lo, 1.0, 101)
        params = {"tx": args.tx, "n": args.n, "delta": args.delta}
        curves = []
        for kind, mode in (("cdf", "numeric"), ("bound_lower", "bound_lower"),
                           ("bound_upper", "bound_upper")):
            y = analytic.residual_fraction_cdf(
                args.tx, args.n, args.delta, x, mode=mode)
            curves.append(analytic.AnalyticCurve(
                kind, np.asarray(x), np.asarray(y), params))
        return curves
    if args.curve == "gamma-bounds":
        _require(args, ["rx", "n", "delta"])
        spec = analytic.wishart_coefficients(args.tx, args.rx)
        x = grid if grid is not None else np.linspace(
            0.05, 4.0 * (args.tx + args.rx), 200)
        lower, upper = analytic.effective_gain_cdf_bounds(
            spec, args.n, args.delta, x)
        params = {"tx": args.tx, "rx": args.rx, "n": args.n,
                  "delta": args.delta}
        return [
            analytic.AnalyticCurve("bound_lower", np.asarray(x), lower,
                                   params),
            analytic.AnalyticCurve("bound_upper", np.asarray(x), upper,
                                   params),
        ]
    if args.curve == "tail":
        _require(args, ["rx", "n", "delta"])
        spec = analytic.wishart_coefficients(args.tx, args.rx)
        x = grid if grid is not None else np.linspace(10.0, 40.0, 121)
        upper_tail, lower_tail = analytic.effective_gain_tail_bounds(
            spec, args.n, args.delta, x)
        params = {"tx": args.tx, "rx": args.rx, "n": args.n,
                  "delta": args.delta}
        return [
            analytic.AnalyticCurve("tail", np.asarray(x),
                                   np.asarray(upper_tail), params),
            analytic.AnalyticCurve("tail", np.asarray(x),
                                   np.asarray(lower_tail), params),
        ]
    if args.curve == "scaling":
        _require(args, ["rx", "snr_db"])
        x = grid if grid is not None else np.linspace(10, 1000, 100)
        p_total = 10.0 ** (args.snr_db / 10.0)
        y = [analytic.asymptotic_sum_rate(args.tx, args.rx, int(k),
                                          p_total / args.tx) for k in x]
        return [analytic.AnalyticCurve(
            "scaling", np.asarray(x, dtype=float), np.asarray(y),
            {"tx": args.tx, "rx": args.rx, "snr_db": args.snr_db})]
    # e-delta
    limit = 1.0 / (args.tx - 1) if args.tx > 1 else 1.0
    x = grid if grid is not None else np.linspace(
        limit * 1e-3, limit * 0.99, 64)
    y = [analytic.zfbf_snr_loss_bound(args.tx, d) for d in x]
    return [analytic.AnalyticCurve(
        "scaling", np.asarray(x), np.asarray(y), {"tx": args.tx})]


def _cmd_analytic(args) -> int:
    curves = _analytic_curves(args)
    if args.out is None:
        harness.emit_curves_csv(curves, sys.stdout)
    else:
        harness.emit_curves_csv(curves, args.out)
        print(f"wrote {sum(len(c.grid) for c in curves)} points to "
              f"{args.out}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "figure":
            return _cmd_figure(args)
        return _cmd_analytic(args)
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
