"""Greedy semi-orthogonal eigenmode selection and its exhaustive baseline.

The scheduler picks (user, eigen-index) pairs one at a time: the first
pick maximizes the eigenmode gain, later picks maximize the projected
gain ``lambda * ||residual||^2`` over the candidates that stayed
semi-orthogonal (squared projection below the threshold in force) to all
previously built basis directions.  Gram-Schmidt runs in the modified,
sequential-projection form; the basis never exceeds M rows.
"""

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import backend
from ._kernels_numpy import DELTA_ADAPTIVE, DELTA_FIXED, DELTA_INV_LOG_K
from .channel import EigenMode
from .errors import (ContractViolationError, DomainError, DimensionError,
                     SizeGuardError)

ALL_MODES = "all_modes"
PRINCIPAL_ONLY = "principal_only"

_SCHEDULE_KINDS = {
    "fixed": DELTA_FIXED,
    "inverse_log_k": DELTA_INV_LOG_K,
    "adaptive": DELTA_ADAPTIVE,
}


@dataclass(frozen=True)
class DeltaSchedule:
    """Semi-orthogonality threshold schedule.

    ``fixed`` uses a constant in (0, 1); ``inverse_log_k`` uses 1/ln(K);
    ``adaptive`` uses 1/ln(candidate count) at each iteration, floored at
    1/ln(K) so the schedule stays monotone.
    """

    kind: str
    value: Optional[float] = None

    def __post_init__(self):
        if self.kind not in _SCHEDULE_KINDS:
            raise DomainError(f"unknown delta schedule kind {self.kind!r}")
        if self.kind == "fixed":
            if self.value is None or not 0.0 < self.value < 1.0:
                raise DomainError(
                    f"fixed delta must lie in (0, 1), got {self.value}")
        elif self.value is not None:
            raise DomainError(f"{self.kind} schedule takes no value")

    @classmethod
    def fixed(cls, value: float) -> "DeltaSchedule":
        return cls("fixed", float(value))

    @classmethod
    def inverse_log_k(cls) -> "DeltaSchedule":
        return cls("inverse_log_k")

    @classmethod
    def adaptive(cls) -> "DeltaSchedule":
        return cls("adaptive")

    def label(self) -> str:
        if self.kind == "fixed":
            return f"fixed:{self.value:g}"
        return "inv-log-k" if self.kind == "inverse_log_k" else "adaptive"


def delta_value(schedule: DeltaSchedule, num_users: int,
                candidates: Optional[int] = None) -> float:
    """Threshold produced by ``schedule`` for the given iteration state.

    ``candidates`` is the current candidate-set size (adaptive mode only).
    Logarithmic modes require ``num_users >= 3`` so ln(K) > 1.
    """
    if schedule.kind == "fixed":
        return schedule.value
    if num_users < 3:
        raise DomainError(
            f"logarithmic delta schedules need at least 3 users, got {num_users}")
    if schedule.kind == "inverse_log_k":
        return 1.0 / math.log(num_users)
    if candidates is None:
        raise DomainError("adaptive schedule needs the candidate count")
    return max(1.0 / math.log(max(int(candidates), 2)),
               1.0 / math.log(num_users))


@dataclass(frozen=True)
class SelectionConfig:
    """Options of one scheduler run.

    ``exclude_selected_user`` removes all remaining eigenmodes of a user
    once one of its modes is selected; by default only the selected pair
    itself leaves the candidate set.
    """

    delta_mode: DeltaSchedule
    eigenmode_scope: str = ALL_MODES
    max_streams: Optional[int] = None
    exclude_selected_user: bool = False

    def __post_init__(self):
        if self.eigenmode_scope not in (ALL_MODES, PRINCIPAL_ONLY):
            raise DomainError(
                f"unknown eigenmode scope {self.eigenmode_scope!r}")
        if self.max_streams is not None and self.max_streams < 1:
            raise DomainError("max_streams must be >= 1")


@dataclass(frozen=True)
class SelectionOutcome:
    """Result of one scheduler run.

    ``selected`` holds (user, eigen-index) pairs in pick order.  Row n of
    ``basis`` is the unit direction built from pick n; ``lower_triangular``
    collects the projections of the picked directions onto the basis, with
    real positive diagonal.  ``gains`` are the effective per-stream power
    gains ``lambdas * betas``.  ``candidate_history[n]`` is the candidate
    count before pick n, and ``deltas[n]`` the threshold in force there.
    """

    selected: tuple
    lambdas: np.ndarray
    betas: np.ndarray
    basis: np.ndarray
    lower_triangular: np.ndarray
    gains: np.ndarray
    candidate_history: np.ndarray
    deltas: np.ndarray
    mode_indices: np.ndarray = field(repr=False, default=None)

    @property
    def num_streams(self) -> int:
        return len(self.selected)


def project_residual(v: np.ndarray, basis: np.ndarray):
    """Project a direction out of an orthonormal row basis.

    Parameters
    ----------
    v : (M,) complex
        Unit direction vector.
    basis : (n-1, M) complex
        Orthonormal rows ``q_1 .. q_{n-1}``.

    Returns
    -------
    residual : (M,) complex
        ``v^H - sum_i xi_i q_i`` as a row vector.
    projections : (n-1,) complex
        ``xi_i = v^H q_i^H``.
    residual_norm_sq : float
    """
    v = np.asarray(v, dtype=np.complex128)
    basis = np.atleast_2d(np.asarray(basis, dtype=np.complex128))
    gram = basis @ basis.conj().T
    if not np.allclose(gram, np.eye(basis.shape[0]), atol=1e-8):
        raise ContractViolationError("basis rows are not orthonormal")
    w = v.conj()
    projections = basis.conj() @ v.conj()
    residual = w - projections @ basis
    norm_sq = float(np.real(np.vdot(residual, residual)))
    return residual, projections, norm_sq


def _scope_filter(lam, w, owner, order, scope):
    if scope == PRINCIPAL_ONLY:
        keep = order == 0
        return lam[keep], w[keep], owner[keep], order[keep]
    return lam, w, owner, order


def sus_select_arrays(lam, w, owner, order, config: SelectionConfig,
                      num_users: int) -> SelectionOutcome:
    """Array fast path of :func:`sus_select`.

    ``lam``/``w``/``owner``/``order`` describe the candidate eigenmodes in
    (user, eigen-index) order; ``w`` rows are conjugated direction vectors.
    """
    lam = np.ascontiguousarray(lam, dtype=np.float64)
    w = np.ascontiguousarray(w, dtype=np.complex128)
    owner = np.ascontiguousarray(owner, dtype=np.int64)
    order = np.ascontiguousarray(order, dtype=np.int64)
    lam, w, owner, order = _scope_filter(lam, w, owner, order,
                                         config.eigenmode_scope)
    if lam.shape[0] == 0:
        raise DomainError("need at least one candidate eigenmode")

    m = w.shape[1]
    max_streams = m if config.max_streams is None else min(config.max_streams, m)
    kind = _SCHEDULE_KINDS[config.delta_mode.kind]
    fixed = config.delta_mode.value if config.delta_mode.kind == "fixed" else 0.0
    if kind != DELTA_FIXED and num_users < 3:
        raise DomainError(
            f"logarithmic delta schedules need at least 3 users, got {num_users}")

    sel, beta, basis, counts, deltas = backend.kernels.sus_core(
        lam, w, owner, kind, fixed, num_users, max_streams,
        config.exclude_selected_user)

    w_sel = w[sel]
    tri = np.tril(w_sel @ basis.conj().T)
    return SelectionOutcome(
        selected=tuple((int(owner[i]), int(order[i])) for i in sel),
        lambdas=lam[sel].copy(),
        betas=beta,
        basis=basis,
        lower_triangular=tri,
        gains=lam[sel] * beta,
        candidate_history=counts,
        deltas=deltas,
        mode_indices=sel,
    )


def sus_select(modes: Sequence[EigenMode], config: SelectionConfig,
               num_users: Optional[int] = None) -> SelectionOutcome:
    """Run the greedy semi-orthogonal scheduler over eigenmodes.

    Selection stops after ``min(max_streams, M)`` picks or as soon as the
    candidate set empties, so the stream count never exceeds M.
    """
    if not modes:
        raise DomainError("need at least one candidate eigenmode")
    modes = sorted(modes, key=lambda mo: (mo.user, mo.order))
    lam = np.array([mo.gain for mo in modes], dtype=np.float64)
    w = np.array([mo.right_vector.conj() for mo in modes],
                 dtype=np.complex128)
    owner = np.array([mo.user for mo in modes], dtype=np.int64)
    order = np.array([mo.order for mo in modes], dtype=np.int64)
    if num_users is None:
        num_users = len({mo.user for mo in modes})
    return sus_select_arrays(lam, w, owner, order, config, num_users)


def candidate_trace(lam, w, owner, order, config: SelectionConfig,
                    outcome: SelectionOutcome):
    """Replay a selection run and report per-iteration candidate state.

    Returns one dict per iteration with the surviving mode indices, their
    projected gains and their eigenmode gains.  Used to compare candidate
    statistics against the closed-form laws; the replayed counts must
    match ``outcome.candidate_history``.
    """
    lam = np.asarray(lam, dtype=np.float64)
    w = np.asarray(w, dtype=np.complex128)
    owner = np.asarray(owner, dtype=np.int64)
    order = np.asarray(order, dtype=np.int64)
    lam, w, owner, order = _scope_filter(lam, w, owner, order,
                                         config.eigenmode_scope)

    alive = np.ones(lam.shape[0], dtype=bool)
    res_sq = np.ones(lam.shape[0])
    trace = []
    for n in range(outcome.num_streams):
        if n > 0:
            sel_prev = int(outcome.mode_indices[n - 1])
            alive[sel_prev] = False
            if config.exclude_selected_user:
                alive &= owner != owner[sel_prev]
            proj_sq = np.abs(w @ np.conj(outcome.basis[n - 1])) ** 2
            res_sq = res_sq - proj_sq
            alive &= proj_sq < outcome.deltas[n - 1]
        indices = np.nonzero(alive)[0]
        if indices.shape[0] != outcome.candidate_history[n]:
            raise ContractViolationError(
                "candidate replay disagrees with the recorded history")
        trace.append({
            "iteration": n + 1,
            "indices": indices,
            "gammas": lam[indices] * res_sq[indices],
            "lambdas": lam[indices].copy(),
        })
    return trace


_MAX_EXHAUSTIVE_MODES = 16
_MAX_EXHAUSTIVE_STREAMS = 4


def exhaustive_select(modes: Sequence[EigenMode], max_size: int,
                      metric: Callable[[Sequence[EigenMode]], float]):
    """Best ordered eigenmode subset under ``metric`` by brute force.

    Enumerates every permutation of every subset of size 1..max_size,
    since ordering changes the output SNRs.  Guarded to small instances
    (<= 16 modes, max_size <= 4).  Orderings for which the metric raises
    ``ArithmeticError`` (e.g. rank-deficient selections) are skipped.

    Returns ``(best_modes, best_value)``.
    """
    modes = list(modes)
    if len(modes) > _MAX_EXHAUSTIVE_MODES or max_size > _MAX_EXHAUSTIVE_STREAMS:
        raise SizeGuardError(
            f"exhaustive search limited to {_MAX_EXHAUSTIVE_MODES} modes and "
            f"{_MAX_EXHAUSTIVE_STREAMS} streams, got {len(modes)} modes, "
            f"max_size={max_size}")
    if max_size < 1:
        raise DomainError("max_size must be >= 1")
    best_value = -math.inf
    best = None
    for size in range(1, max_size + 1):
        for ordered in itertools.permutations(modes, size):
            try:
                value = metric(ordered)
            except ArithmeticError:
                continue
            if value > best_value:
                best_value = value
                best = list(ordered)
    if best is None:
        raise DomainError("metric failed on every candidate ordering")
    return best, best_value


def exhaustive_zfbf(lam, w, max_streams: int, total_power: float,
                    equal_power: bool = False):
    """Kernel-backed exhaustive ZFBF search over eigenmode arrays.

    Fast twin of :func:`exhaustive_select` with the ZFBF sum-rate metric;
    returns ``(best_rate, mode_indices)``.
    """
    lam = np.ascontiguousarray(lam, dtype=np.float64)
    w = np.ascontiguousarray(w, dtype=np.complex128)
    if lam.shape[0] > _MAX_EXHAUSTIVE_MODES or max_streams > _MAX_EXHAUSTIVE_STREAMS:
        raise SizeGuardError(
            f"exhaustive search limited to {_MAX_EXHAUSTIVE_MODES} modes and "
            f"{_MAX_EXHAUSTIVE_STREAMS} streams")
    rate, count, picked = backend.kernels.exhaustive_zfbf_core(
        lam, w, max_streams, float(total_power), bool(equal_power))
    return float(rate), picked[:count]
