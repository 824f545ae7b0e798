"""Pure-numpy implementations of the hot kernels.

These are the fallback path selected with ``MIMOBC_BACKEND=numpy``; see
:mod:`mimobc._kernels_numba` for the jitted twins.  Both modules expose the
same four functions with identical signatures and semantics:

* ``sus_core``            -- greedy semi-orthogonal selection over eigenmodes
* ``waterfill_core``      -- exact water-filling power allocation
* ``tri_lower_inverse``   -- forward-substitution inverse of a lower factor
* ``exhaustive_zfbf_core``-- best ordered subset under the ZFBF sum rate

Delta schedule codes shared by both backends: 0 = fixed constant,
1 = 1/ln(K), 2 = 1/ln(candidate count) floored at 1/ln(K).
"""

import math

import numpy as np

DELTA_FIXED = 0
DELTA_INV_LOG_K = 1
DELTA_ADAPTIVE = 2

_LN2 = math.log(2.0)
_DIAG_EPS = 1e-12


def _delta_for(kind, fixed, num_users, candidates):
    if kind == DELTA_FIXED:
        return fixed
    if kind == DELTA_INV_LOG_K:
        return 1.0 / math.log(num_users)
    # adaptive; a candidate count below 2 never drives a pruning decision
    return max(1.0 / math.log(max(candidates, 2)), 1.0 / math.log(num_users))


def sus_core(lam, W, owner, delta_kind, delta_fixed, num_users, max_streams,
             exclude_user):
    """Run greedy semi-orthogonal selection over eigenmode rows.

    Parameters
    ----------
    lam : (n_modes,) float64
        Eigenmode power gains.
    W : (n_modes, M) complex128
        Rows are the conjugated direction vectors (``v^H``), unit norm.
    owner : (n_modes,) int64
        User index of each mode, used only when ``exclude_user`` is set.
    delta_kind, delta_fixed, num_users
        Semi-orthogonality schedule (see module docstring).
    max_streams : int
        Upper limit on the number of selected streams (<= M).
    exclude_user : bool
        Drop all remaining modes of a user once one of its modes is picked.

    Returns
    -------
    sel, beta, Q, counts, deltas
        Selected mode indices in pick order, their residual energies,
        the orthonormal basis rows, the candidate-set size at each
        iteration, and the threshold in force at each iteration.
    """
    n_modes, M = W.shape
    alive = np.ones(n_modes, dtype=np.bool_)
    res_sq = np.ones(n_modes, dtype=np.float64)

    sel = np.empty(max_streams, dtype=np.int64)
    beta = np.empty(max_streams, dtype=np.float64)
    Q = np.zeros((max_streams, M), dtype=np.complex128)
    counts = np.empty(max_streams, dtype=np.int64)
    deltas = np.empty(max_streams, dtype=np.float64)

    counts[0] = n_modes
    deltas[0] = _delta_for(delta_kind, delta_fixed, num_users, n_modes)
    best = int(np.argmax(lam))
    norm_sq = float(np.real(np.vdot(W[best], W[best])))
    sel[0] = best
    beta[0] = norm_sq
    Q[0] = W[best] / math.sqrt(norm_sq)

    n_sel = 1
    while n_sel < max_streams:
        prev = sel[n_sel - 1]
        alive[prev] = False
        if exclude_user:
            alive &= owner != owner[prev]

        proj_sq = np.abs(W @ np.conj(Q[n_sel - 1])) ** 2
        res_sq -= proj_sq
        alive &= proj_sq < deltas[n_sel - 1]

        count = int(np.count_nonzero(alive))
        if count == 0:
            break
        counts[n_sel] = count
        deltas[n_sel] = _delta_for(delta_kind, delta_fixed, num_users, count)

        gains = np.where(alive, lam * res_sq, -1.0)
        best = int(np.argmax(gains))

        # modified Gram-Schmidt on the winner only
        r = W[best].copy()
        for i in range(n_sel):
            r -= (r @ np.conj(Q[i])) * Q[i]
        b = float(np.real(np.vdot(r, r)))
        if b < 1e-14:
            break
        sel[n_sel] = best
        beta[n_sel] = b
        Q[n_sel] = r / math.sqrt(b)
        n_sel += 1

    return (sel[:n_sel], beta[:n_sel], Q[:n_sel], counts[:n_sel],
            deltas[:n_sel])


def waterfill_core(gains, total):
    """Exact water-filling: p_i = max(0, mu - 1/g_i) with sum(p) = total."""
    inv = 1.0 / gains
    order = np.argsort(inv, kind="stable")
    inv_sorted = inv[order]
    prefix = np.cumsum(inv_sorted)
    n = gains.shape[0]
    mu = 0.0
    for k in range(n, 0, -1):
        mu = (total + prefix[k - 1]) / k
        if mu >= inv_sorted[k - 1]:
            break
    powers = np.maximum(mu - inv, 0.0)
    return powers


def tri_lower_inverse(L):
    """Invert a lower-triangular matrix by forward substitution."""
    n = L.shape[0]
    T = np.zeros((n, n), dtype=np.complex128)
    for i in range(n):
        T[i, i] = 1.0 / L[i, i]
        for j in range(i):
            acc = 0.0 + 0.0j
            for k in range(j, i):
                acc += L[i, k] * T[k, j]
            T[i, j] = -acc / L[i, i]
    return T


def _zfbf_rate_at_depth(lam_sel, T, depth, total_power, equal_power):
    cols = T[: depth + 1, : depth + 1]
    col_norm_sq = np.sum(np.abs(cols) ** 2, axis=0)
    gains = lam_sel[: depth + 1] / col_norm_sq
    if equal_power:
        powers = np.full(depth + 1, total_power / (depth + 1))
    else:
        powers = waterfill_core(gains, total_power)
    return float(np.sum(np.log1p(powers * gains)) / _LN2)


def exhaustive_zfbf_core(lam, W, max_streams, total_power, equal_power):
    """Best ordered eigenmode subset (sizes 1..max_streams) under ZFBF.

    Enumerates every ordered subset depth-first, keeping an incremental
    Gram-Schmidt basis and triangular inverse along the search path.
    Candidates whose residual energy falls below 1e-12 are skipped as
    rank deficient.  Ties keep the lexicographically first subset.
    """
    n_modes, M = W.shape
    Q = np.zeros((max_streams, M), dtype=np.complex128)
    Lrow = np.zeros((max_streams, max_streams), dtype=np.complex128)
    T = np.zeros((max_streams, max_streams), dtype=np.complex128)
    lam_sel = np.zeros(max_streams, dtype=np.float64)
    choice = np.full(max_streams, -1, dtype=np.int64)
    used = np.zeros(n_modes, dtype=np.bool_)

    best_rate = -1.0
    best_count = 0
    best_modes = np.full(max_streams, -1, dtype=np.int64)

    def visit(depth):
        nonlocal best_rate, best_count
        for m in range(n_modes):
            if used[m]:
                continue
            w = W[m]
            r = w.copy()
            for i in range(depth):
                li = w @ np.conj(Q[i])
                Lrow[depth, i] = li
                r = r - li * Q[i]
            b = float(np.real(np.vdot(r, r)))
            if b < _DIAG_EPS:
                continue
            ldd = math.sqrt(b)
            Lrow[depth, depth] = ldd
            Q[depth] = r / ldd
            T[depth, depth] = 1.0 / ldd
            for j in range(depth):
                acc = 0.0 + 0.0j
                for k in range(j, depth):
                    acc += Lrow[depth, k] * T[k, j]
                T[depth, j] = -acc / ldd
            lam_sel[depth] = lam[m]
            choice[depth] = m

            rate = _zfbf_rate_at_depth(lam_sel, T, depth, total_power,
                                       equal_power)
            if rate > best_rate:
                best_rate = rate
                best_count = depth + 1
                best_modes[: depth + 1] = choice[: depth + 1]
            if depth + 1 < max_streams:
                used[m] = True
                visit(depth + 1)
                used[m] = False

    visit(0)
    return best_rate, best_count, best_modes[:best_count].copy()
