"""Monte Carlo experiment runner, sweeps, and CSV emission.

SNR convention: ``snr_db`` is the total transmit power P in dB over unit
noise variance; the per-stream power used by the benchmark bound and the
asymptotic curves is P divided by the realized stream count.  Trials are
independent work items seeded by (master_seed, trial_index, user_index),
so results are bit-identical across worker counts; aggregation is a fold
in trial order.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import partial
from typing import Optional, Sequence, Union

import numpy as np

from . import analytic, transceiver
from .channel import TrialStream, all_mode_arrays, draw_matrix
from .errors import DomainError, SizeGuardError
from .selection import (ALL_MODES, PRINCIPAL_ONLY, DeltaSchedule,
                        SelectionConfig, exhaustive_zfbf, sus_select_arrays,
                        _scope_filter)
from .transceiver import (EQUAL, WATERFILLING, PowerPolicy, allocate_powers,
                          det_upper_bound, snr_gap_predictions, sum_rate,
                          zfbf_gains, zfdpc_gains)

SCHEME_ZFDPC = "zfdpc_sus"
SCHEME_ZFBF = "zfbf_sus"
SCHEME_EXHAUSTIVE = "zfbf_exhaustive"
SCHEME_UPPER = "upper_bound_C"
SCHEME_ASYMPTOTIC = "asymptotic_approx"

ALL_SCHEMES = (SCHEME_ZFDPC, SCHEME_ZFBF, SCHEME_EXHAUSTIVE, SCHEME_UPPER,
               SCHEME_ASYMPTOTIC)

SCHEME_LABELS = {
    SCHEME_ZFDPC: "zfdpc-sus",
    SCHEME_ZFBF: "zfbf-sus",
    SCHEME_EXHAUSTIVE: "zfbf-exhaustive",
    SCHEME_UPPER: "upper-bound",
    SCHEME_ASYMPTOTIC: "asymptotic",
}
SCHEME_FROM_LABEL = {v: k for k, v in SCHEME_LABELS.items()}

_EXHAUSTIVE_MODE_LIMIT = 16

CSV_HEADER = ("scheme,M,N,K,snr_db,delta_mode,power,trials,"
              "mean_sum_rate,std_err")
CURVE_CSV_HEADER = "kind,M,N,n,delta,K,snr_db,x,y"


def _as_tuple(value) -> tuple:
    if isinstance(value, (list, tuple, np.ndarray)):
        return tuple(value)
    return (value,)


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: a parameter grid plus scheme and policy choices.

    ``rx``, ``users`` and ``snr_db`` may each be a scalar or a grid; the
    sweep runs their cartesian product.
    """

    tx: int
    rx: Union[int, Sequence[int]]
    users: Union[int, Sequence[int]]
    snr_db: Union[float, Sequence[float]]
    schemes: Sequence[str] = (SCHEME_ZFDPC, SCHEME_ZFBF)
    trials: int = 2000
    delta: DeltaSchedule = DeltaSchedule.inverse_log_k()
    power: str = WATERFILLING
    master_seed: int = 0
    eigenmode_scope: str = ALL_MODES
    max_streams: Optional[int] = None
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise DomainError("trials must be >= 1")
        unknown = set(self.schemes) - set(ALL_SCHEMES)
        if unknown:
            raise DomainError(f"unknown schemes: {sorted(unknown)}")
        if self.power not in (EQUAL, WATERFILLING):
            raise DomainError(f"unknown power policy {self.power!r}")
        if SCHEME_EXHAUSTIVE in self.schemes:
            for n_rx in _as_tuple(self.rx):
                for k in _as_tuple(self.users):
                    if k * min(n_rx, self.tx) > _EXHAUSTIVE_MODE_LIMIT:
                        raise SizeGuardError(
                            "exhaustive scheme needs K*min(N,M) <= "
                            f"{_EXHAUSTIVE_MODE_LIMIT}, got "
                            f"{k * min(n_rx, self.tx)}")

    def grid_points(self):
        for n_rx in _as_tuple(self.rx):
            for k in _as_tuple(self.users):
                for snr in _as_tuple(self.snr_db):
                    yield replace(self, rx=int(n_rx), users=int(k),
                                  snr_db=float(snr))


def run_trial(point: ExperimentConfig, trial_index: int,
              diagnostics: bool = False) -> dict:
    """One channel draw, one selection, every requested scheme.

    ``point`` must be a single grid point (scalar rx/users/snr_db).  All
    schemes except the exhaustive search are evaluated on the same
    selection outcome.  Deterministic given (master_seed, trial_index).
    """
    m = point.tx
    n_rx = int(point.rx)
    k = int(point.users)
    p_total = 10.0 ** (float(point.snr_db) / 10.0)

    stream = TrialStream(point.master_seed, trial_index)
    h = np.empty((k, n_rx, m), dtype=np.complex128)
    for user in range(k):
        h[user] = draw_matrix(m, n_rx, stream.user_rng(user))

    lam, w, owner, order = all_mode_arrays(h)
    config = SelectionConfig(delta_mode=point.delta,
                             eigenmode_scope=point.eigenmode_scope,
                             max_streams=point.max_streams)
    outcome = sus_select_arrays(lam, w, owner, order, config, num_users=k)
    policy = PowerPolicy(point.power, p_total)
    rho = p_total / outcome.num_streams

    out = {}
    if SCHEME_ZFDPC in point.schemes or diagnostics:
        gains = zfdpc_gains(outcome)
        out[SCHEME_ZFDPC] = sum_rate(gains, allocate_powers(gains, policy))
    if SCHEME_ZFBF in point.schemes or diagnostics:
        gains = zfbf_gains(outcome).gains
        out[SCHEME_ZFBF] = sum_rate(gains, allocate_powers(gains, policy))
    if SCHEME_UPPER in point.schemes or diagnostics:
        out[SCHEME_UPPER] = det_upper_bound(outcome, rho)
    if SCHEME_EXHAUSTIVE in point.schemes:
        lam_s, w_s, _, _ = _scope_filter(lam, w, owner, order,
                                         point.eigenmode_scope)
        max_streams = m if point.max_streams is None \
            else min(point.max_streams, m)
        rate, _ = exhaustive_zfbf(lam_s, w_s, max_streams, p_total,
                                  equal_power=point.power == EQUAL)
        out[SCHEME_EXHAUSTIVE] = rate
    if diagnostics:
        preds = snr_gap_predictions(outcome, rho)
        out["diagnostics"] = {
            "num_streams": outcome.num_streams,
            "per_stream_power": rho,
            "predictions": preds,
        }
    return out


@dataclass(frozen=True)
class SweepRow:
    """Aggregate of one (scheme, grid point) cell."""

    scheme: str
    tx: int
    rx: int
    users: int
    snr_db: float
    delta_label: str
    power: str
    trials: int
    mean_sum_rate: float
    std_err: float


@dataclass(frozen=True)
class SweepResult:
    """All rows of a sweep, plus optional per-trial samples."""

    rows: tuple
    samples: dict = field(default_factory=dict, repr=False)


def _aggregate(values: np.ndarray):
    mean = float(np.mean(values))
    if values.shape[0] < 2:
        return mean, 0.0
    return mean, float(np.std(values, ddof=1) / math.sqrt(values.shape[0]))


def sweep(config: ExperimentConfig, keep_samples: bool = False,
          progress=None) -> SweepResult:
    """Run every grid point of ``config`` and aggregate per scheme.

    Trials are mapped (optionally across processes) and reduced in trial
    order, so the output is independent of the worker count.
    """
    rows = []
    samples = {}
    mc_schemes = [s for s in config.schemes if s != SCHEME_ASYMPTOTIC]
    for point in config.grid_points():
        if progress is not None:
            progress(point)
        per_scheme = {s: np.empty(config.trials) for s in mc_schemes}
        runner = partial(run_trial, point)
        if config.workers > 1:
            with ProcessPoolExecutor(max_workers=config.workers) as pool:
                chunk = max(1, config.trials // (config.workers * 8))
                results = pool.map(runner, range(config.trials),
                                   chunksize=chunk)
                for t, res in enumerate(results):
                    for s in mc_schemes:
                        per_scheme[s][t] = res[s]
        else:
            for t in range(config.trials):
                res = runner(t)
                for s in mc_schemes:
                    per_scheme[s][t] = res[s]

        for s in mc_schemes:
            mean, se = _aggregate(per_scheme[s])
            rows.append(SweepRow(
                scheme=s, tx=point.tx, rx=point.rx, users=point.users,
                snr_db=point.snr_db, delta_label=config.delta.label(),
                power=config.power, trials=config.trials,
                mean_sum_rate=mean, std_err=se))
            if keep_samples:
                samples[(s, point.rx, point.users, point.snr_db)] = \
                    per_scheme[s]
        if SCHEME_ASYMPTOTIC in config.schemes:
            p_total = 10.0 ** (point.snr_db / 10.0)
            rate = analytic.asymptotic_sum_rate(
                point.tx, point.rx, point.users, p_total / point.tx)
            rows.append(SweepRow(
                scheme=SCHEME_ASYMPTOTIC, tx=point.tx, rx=point.rx,
                users=point.users, snr_db=point.snr_db,
                delta_label=config.delta.label(), power=config.power,
                trials=0, mean_sum_rate=rate, std_err=0.0))
    return SweepResult(rows=tuple(rows), samples=samples)


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".12g")


def emit_csv(result: SweepResult, path) -> None:
    """Write sweep rows as CSV (exact column order, '.' decimal point)."""
    lines = [CSV_HEADER]
    for row in result.rows:
        lines.append(",".join([
            SCHEME_LABELS[row.scheme],
            _fmt(row.tx), _fmt(row.rx), _fmt(row.users), _fmt(row.snr_db),
            row.delta_label, row.power, _fmt(row.trials),
            _fmt(row.mean_sum_rate), _fmt(row.std_err),
        ]))
    _write_lines(path, lines)


def emit_curves_csv(curves, path) -> None:
    """Write analytic curves as CSV with blank cells for absent params."""
    lines = [CURVE_CSV_HEADER]
    for curve in curves:
        p = curve.params
        fixed = [
            curve.kind,
            _opt(p.get("tx")), _opt(p.get("rx")), _opt(p.get("n")),
            _opt(p.get("delta")), _opt(p.get("users")),
            _opt(p.get("snr_db")),
        ]
        for x, y in zip(curve.grid, curve.values):
            lines.append(",".join(fixed + [_fmt(x), _fmt(y)]))
    _write_lines(path, lines)


def _opt(value) -> str:
    return "" if value is None else _fmt(value)


def _write_lines(path, lines) -> None:
    text = "\n".join(lines) + "\n"
    if hasattr(path, "write"):
        path.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


def read_csv(path) -> SweepResult:
    """Read back a sweep CSV produced by :func:`emit_csv`."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise DomainError(f"unexpected CSV header: {header!r}")
        for line in fh:
            parts = line.strip().split(",")
            if not line.strip():
                continue
            rows.append(SweepRow(
                scheme=SCHEME_FROM_LABEL[parts[0]],
                tx=int(parts[1]), rx=int(parts[2]), users=int(parts[3]),
                snr_db=float(parts[4]), delta_label=parts[5], power=parts[6],
                trials=int(parts[7]), mean_sum_rate=float(parts[8]),
                std_err=float(parts[9])))
    return SweepResult(rows=tuple(rows))


def figure_recipes(name: str) -> ExperimentConfig:
    """Experiment configurations reproducing the reference figures.

    * ``fig1_gaps``: benchmark-gap curves over SNR at M = N = 4, K = 50.
      Equal power and principal eigenmodes, matching the finite-system
      gap analysis assumptions.
    * ``fig2_sumrates``: sum rate over the user count at M = N = 4,
      P = 15 dB, water-filling, with the asymptotic overlay.
    * ``fig3_rx_antennas``: sum rate over the user count for
      N in {1, 2, 4} at M = 4, P = 15 dB.
    """
    users_grid = tuple(range(10, 101, 10))
    if name == "fig1_gaps":
        return ExperimentConfig(
            tx=4, rx=4, users=50,
            snr_db=(-20.0, -10.0, 0.0, 10.0, 20.0, 30.0, 40.0),
            schemes=(SCHEME_ZFDPC, SCHEME_ZFBF, SCHEME_UPPER),
            power=EQUAL, eigenmode_scope=PRINCIPAL_ONLY)
    if name == "fig2_sumrates":
        return ExperimentConfig(
            tx=4, rx=4, users=users_grid, snr_db=15.0,
            schemes=(SCHEME_ZFDPC, SCHEME_ZFBF, SCHEME_ASYMPTOTIC),
            power=WATERFILLING)
    if name == "fig3_rx_antennas":
        return ExperimentConfig(
            tx=4, rx=(1, 2, 4), users=users_grid, snr_db=15.0,
            schemes=(SCHEME_ZFDPC, SCHEME_ZFBF), power=WATERFILLING)
    raise DomainError(f"unknown figure name {name!r}; expected one of "
                      "fig1_gaps, fig2_sumrates, fig3_rx_antennas")
