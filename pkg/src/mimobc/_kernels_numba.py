"""Numba-jitted twins of the hot kernels in :mod:`mimobc._kernels_numpy`.

Same four entry points, same signatures, loop-structured for nopython
compilation.  Selected by default when numba imports cleanly; set
``MIMOBC_BACKEND=numpy`` to force the fallback path instead.
"""

import math

import numpy as np
from numba import njit

DELTA_FIXED = 0
DELTA_INV_LOG_K = 1
DELTA_ADAPTIVE = 2

_LN2 = math.log(2.0)
_DIAG_EPS = 1e-12


@njit(cache=True)
def _delta_for(kind, fixed, num_users, candidates):
    if kind == DELTA_FIXED:
        return fixed
    if kind == DELTA_INV_LOG_K:
        return 1.0 / math.log(num_users)
    c = candidates
    if c < 2:
        c = 2
    d = 1.0 / math.log(c)
    d_floor = 1.0 / math.log(num_users)
    return d if d > d_floor else d_floor


@njit(cache=True)
def sus_core(lam, W, owner, delta_kind, delta_fixed, num_users, max_streams,
             exclude_user):
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

    best = 0
    best_val = lam[0]
    for m in range(1, n_modes):
        if lam[m] > best_val:
            best_val = lam[m]
            best = m

    norm_sq = 0.0
    for t in range(M):
        z = W[best, t]
        norm_sq += z.real * z.real + z.imag * z.imag
    sel[0] = best
    beta[0] = norm_sq
    inv_norm = 1.0 / math.sqrt(norm_sq)
    for t in range(M):
        Q[0, t] = W[best, t] * inv_norm

    n_sel = 1
    r = np.empty(M, dtype=np.complex128)
    while n_sel < max_streams:
        prev = sel[n_sel - 1]
        alive[prev] = False
        if exclude_user:
            prev_owner = owner[prev]
            for m in range(n_modes):
                if alive[m] and owner[m] == prev_owner:
                    alive[m] = False

        d_prev = deltas[n_sel - 1]
        count = 0
        for m in range(n_modes):
            if not alive[m]:
                continue
            xi = 0.0 + 0.0j
            for t in range(M):
                xi += W[m, t] * Q[n_sel - 1, t].conjugate()
            a = xi.real * xi.real + xi.imag * xi.imag
            res_sq[m] -= a
            if a >= d_prev:
                alive[m] = False
            else:
                count += 1
        if count == 0:
            break
        counts[n_sel] = count
        deltas[n_sel] = _delta_for(delta_kind, delta_fixed, num_users, count)

        best = -1
        best_val = -1.0
        for m in range(n_modes):
            if alive[m]:
                g = lam[m] * res_sq[m]
                if g > best_val:
                    best_val = g
                    best = m

        # modified Gram-Schmidt on the winner only
        for t in range(M):
            r[t] = W[best, t]
        for i in range(n_sel):
            xi = 0.0 + 0.0j
            for t in range(M):
                xi += r[t] * Q[i, t].conjugate()
            for t in range(M):
                r[t] -= xi * Q[i, t]
        b = 0.0
        for t in range(M):
            b += r[t].real * r[t].real + r[t].imag * r[t].imag
        if b < 1e-14:
            break
        sel[n_sel] = best
        beta[n_sel] = b
        inv_norm = 1.0 / math.sqrt(b)
        for t in range(M):
            Q[n_sel, t] = r[t] * inv_norm
        n_sel += 1

    return (sel[:n_sel], beta[:n_sel], Q[:n_sel].copy(), counts[:n_sel],
            deltas[:n_sel])


@njit(cache=True)
def waterfill_core(gains, total):
    n = gains.shape[0]
    inv = np.empty(n, dtype=np.float64)
    for i in range(n):
        inv[i] = 1.0 / gains[i]
    order = np.argsort(inv)
    prefix = 0.0
    mu = 0.0
    prefix_all = np.empty(n, dtype=np.float64)
    for k in range(n):
        prefix += inv[order[k]]
        prefix_all[k] = prefix
    for k in range(n, 0, -1):
        mu = (total + prefix_all[k - 1]) / k
        if mu >= inv[order[k - 1]]:
            break
    powers = np.empty(n, dtype=np.float64)
    for i in range(n):
        p = mu - inv[i]
        powers[i] = p if p > 0.0 else 0.0
    return powers


@njit(cache=True)
def tri_lower_inverse(L):
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


@njit(cache=True)
def _zfbf_rate_at_depth(lam_sel, T, depth, total_power, equal_power):
    d1 = depth + 1
    gains = np.empty(d1, dtype=np.float64)
    for i in range(d1):
        cn = 0.0
        for j in range(i, d1):
            z = T[j, i]
            cn += z.real * z.real + z.imag * z.imag
        gains[i] = lam_sel[i] / cn
    rate = 0.0
    if equal_power:
        p = total_power / d1
        for i in range(d1):
            rate += math.log1p(p * gains[i])
    else:
        powers = waterfill_core(gains, total_power)
        for i in range(d1):
            rate += math.log1p(powers[i] * gains[i])
    return rate / _LN2


@njit(cache=True)
def exhaustive_zfbf_core(lam, W, max_streams, total_power, equal_power):
    n_modes, M = W.shape
    Q = np.zeros((max_streams, M), dtype=np.complex128)
    Lrow = np.zeros((max_streams, max_streams), dtype=np.complex128)
    T = np.zeros((max_streams, max_streams), dtype=np.complex128)
    lam_sel = np.zeros(max_streams, dtype=np.float64)
    choice = np.full(max_streams, -1, dtype=np.int64)
    used = np.zeros(n_modes, dtype=np.bool_)
    pos = np.full(max_streams, -1, dtype=np.int64)
    r = np.empty(M, dtype=np.complex128)

    best_rate = -1.0
    best_count = 0
    best_modes = np.full(max_streams, -1, dtype=np.int64)

    depth = 0
    pos[0] = -1
    while depth >= 0:
        m = pos[depth] + 1
        while m < n_modes and used[m]:
            m += 1
        pos[depth] = m
        if m >= n_modes:
            depth -= 1
            if depth >= 0:
                used[choice[depth]] = False
            continue

        for t in range(M):
            r[t] = W[m, t]
        for i in range(depth):
            li = 0.0 + 0.0j
            for t in range(M):
                li += W[m, t] * Q[i, t].conjugate()
            Lrow[depth, i] = li
            for t in range(M):
                r[t] -= li * Q[i, t]
        b = 0.0
        for t in range(M):
            b += r[t].real * r[t].real + r[t].imag * r[t].imag
        if b < _DIAG_EPS:
            continue
        ldd = math.sqrt(b)
        Lrow[depth, depth] = ldd
        inv_norm = 1.0 / ldd
        for t in range(M):
            Q[depth, t] = r[t] * inv_norm
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
            for i in range(best_count):
                best_modes[i] = choice[i]
        if depth + 1 < max_streams:
            used[m] = True
            depth += 1
            pos[depth] = -1

    return best_rate, best_count, best_modes[:best_count].copy()
