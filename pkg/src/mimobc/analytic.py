"""Closed-form statistics of the selection process.

Everything here is deterministic math used to validate the Monte Carlo
side and to generate asymptotic curves:

* the largest-eigenvalue law of a complex Wishart matrix, with its
  coefficient table extracted by exact rational arithmetic;
* the probability that a user survives the semi-orthogonality pruning to
  iteration n, and the joint density of its squared basis projections;
* the distribution of the residual energy fraction of a surviving
  candidate (exact for n = 2, numeric and two-sided closed-form bounds
  in general) and the induced bounds on the effective gain distribution;
* tail expansions of those bounds, the extreme-value location terms they
  imply, and the resulting large-system sum-rate approximation.

Incomplete gamma/beta functions of positive integer order are evaluated
with exact finite sums; upper incomplete gammas of non-positive integer
order (which appear in the gain-distribution bounds) go through the
exponential-integral continuation.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy import integrate
from scipy import special as sc

from .errors import DomainError
from .selection import DeltaSchedule

CDF_KINDS = ("cdf", "bound_upper", "bound_lower")
CURVE_KINDS = ("pdf",) + CDF_KINDS + ("tail", "scaling")


# ---------------------------------------------------------------------------
# integer-order special functions
# ---------------------------------------------------------------------------

def integer_lower_gamma(a: int, y):
    """Lower incomplete gamma for integer a >= 1, by its exact finite sum."""
    if a < 1:
        raise DomainError("lower incomplete gamma needs integer order >= 1")
    y = np.asarray(y, dtype=np.float64)
    partial = np.zeros_like(y)
    term = np.ones_like(y)
    for k in range(a):
        if k > 0:
            term = term * y / k
        partial += term
    return math.factorial(a - 1) * (1.0 - np.exp(-y) * partial)


def integer_upper_gamma(a: int, y):
    """Upper incomplete gamma for any integer order.

    Orders >= 1 use the exact finite sum; order 0 is the exponential
    integral E1; negative orders use Gamma(a, y) = y^a * E_{1-a}(y).
    """
    y = np.asarray(y, dtype=np.float64)
    if a >= 1:
        partial = np.zeros_like(y)
        term = np.ones_like(y)
        for k in range(a):
            if k > 0:
                term = term * y / k
            partial += term
        return math.factorial(a - 1) * np.exp(-y) * partial
    if a == 0:
        return sc.exp1(y)
    return np.power(y, a) * sc.expn(1 - a, y)


def regularized_incomplete_beta(p, a: int, b: int):
    """Regularized incomplete beta I_p(a, b) for integer a, b >= 1."""
    if a < 1 or b < 1:
        raise DomainError("incomplete beta needs integer parameters >= 1")
    p = np.asarray(p, dtype=np.float64)
    n = a + b - 1
    total = np.zeros_like(p)
    for j in range(a, n + 1):
        total += math.comb(n, j) * p ** j * (1.0 - p) ** (n - j)
    return total


# ---------------------------------------------------------------------------
# largest eigenvalue of a complex Wishart matrix
# ---------------------------------------------------------------------------
#
# The cdf admits the determinant representation
#     F(x) = det[ gamma(q - p + i + j - 1, x) ]_{i,j=1..p} / normalization
# with integer-order lower incomplete gammas.  Expanding each entry as
# (a-1)! (1 - e^{-x} sum_{k<a} x^k / k!) turns the determinant into a sum
# sum_r e^{-r x} P_r(x) with rational polynomial coefficients; the pdf
# coefficients a_{r,s} fall out by differentiation.  Everything below runs
# in exact Fraction arithmetic, so the table is exact.

def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                if cb:
                    out[i + j] += ca * cb
    return out


def _poly_axpy(target, poly, scale):
    while len(target) < len(poly):
        target.append(Fraction(0))
    for i, c in enumerate(poly):
        target[i] += scale * c


def _ep_mul(x, y):
    out = {}
    for rx, px in x.items():
        for ry, py in y.items():
            key = rx + ry
            prod = _poly_mul(px, py)
            if key in out:
                _poly_axpy(out[key], prod, Fraction(1))
            else:
                out[key] = prod
    return out


def _ep_axpy(target, other, scale):
    for r, poly in other.items():
        if r in target:
            _poly_axpy(target[r], poly, scale)
        else:
            target[r] = [scale * c for c in poly]


def _lower_gamma_exp_poly(a: int):
    fact = Fraction(math.factorial(a - 1))
    tail = [-fact / Fraction(math.factorial(k)) for k in range(a)]
    return {0: [fact], 1: tail}


def _det_exp_poly(entries):
    p = len(entries)
    prev = {(): {0: [Fraction(1)]}}
    for row in range(p):
        cur = {}
        for cols, minor in prev.items():
            for j in range(p):
                if j in cols:
                    continue
                new_cols = tuple(sorted(cols + (j,)))
                pos = new_cols.index(j)
                sign = Fraction((-1) ** (row + pos))
                term = _ep_mul(minor, entries[row][j])
                if new_cols in cur:
                    _ep_axpy(cur[new_cols], term, sign)
                else:
                    cur[new_cols] = {r: [sign * c for c in poly]
                                     for r, poly in term.items()}
        prev = cur
    return prev[tuple(range(p))]


@dataclass(frozen=True)
class WishartSpec:
    """Largest-eigenvalue law of a complex Wishart matrix.

    ``coeffs[(r, s)]`` is the exact rational coefficient of
    ``x^s e^{-r x}`` in the pdf; the float arrays are the same table
    flattened for fast evaluation.
    """

    tx_antennas: int
    rx_antennas: int
    p: int
    q: int
    coeffs: dict
    _r: np.ndarray = field(repr=False, compare=False, default=None)
    _s: np.ndarray = field(repr=False, compare=False, default=None)
    _a: np.ndarray = field(repr=False, compare=False, default=None)

    @property
    def gain_exponent(self) -> int:
        """Polynomial degree M + N - 2 of the slowest-decaying pdf term."""
        return self.tx_antennas + self.rx_antennas - 2


_SPEC_CACHE = {}


def wishart_coefficients(tx_antennas: int, rx_antennas: int) -> WishartSpec:
    """Exact pdf coefficient table of the largest Wishart eigenvalue.

    Supports 1 <= antennas <= 8 on both sides; results are cached.
    """
    key = (tx_antennas, rx_antennas)
    if key in _SPEC_CACHE:
        return _SPEC_CACHE[key]
    if not (1 <= tx_antennas <= 8 and 1 <= rx_antennas <= 8):
        raise DomainError("supported antenna counts are 1..8")
    p = min(tx_antennas, rx_antennas)
    q = max(tx_antennas, rx_antennas)
    entries = [[_lower_gamma_exp_poly(q - p + i + j + 1)
                for j in range(p)] for i in range(p)]
    det = _det_exp_poly(entries)
    norm = Fraction(1)
    for k in range(1, p + 1):
        norm *= math.factorial(q - k) * math.factorial(p - k)
    cdf = {r: [c / norm for c in poly] for r, poly in det.items()}

    const = cdf.get(0, [Fraction(0)])
    if any(c != (Fraction(1) if i == 0 else Fraction(0))
           for i, c in enumerate(const)):
        raise AssertionError("cdf expansion lost its unit constant term")

    coeffs = {}
    for r, poly in cdf.items():
        if r == 0:
            continue
        # d/dx [P(x) e^{-rx}] = (P'(x) - r P(x)) e^{-rx}
        deriv = [Fraction(k + 1) * poly[k + 1] for k in range(len(poly) - 1)]
        deriv.append(Fraction(0))
        for s in range(len(poly)):
            val = deriv[s] - r * poly[s]
            if val != 0:
                coeffs[(r, s)] = val

    rr = np.array([k[0] for k in sorted(coeffs)], dtype=np.float64)
    ss = np.array([k[1] for k in sorted(coeffs)], dtype=np.float64)
    aa = np.array([float(coeffs[k]) for k in sorted(coeffs)],
                  dtype=np.float64)
    spec = WishartSpec(tx_antennas, rx_antennas, p, q, coeffs, rr, ss, aa)
    _SPEC_CACHE[key] = spec
    return spec


def max_eigenvalue_pdf(spec: WishartSpec, x):
    """Density sum a_{r,s} x^s e^{-r x}; zero for x < 0."""
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    out = np.zeros_like(x)
    ok = x >= 0
    xp = x[ok]
    if xp.size:
        out[ok] = np.sum(
            spec._a[None, :] * xp[:, None] ** spec._s[None, :]
            * np.exp(-spec._r[None, :] * xp[:, None]), axis=1)
    return float(out[0]) if scalar else out


def max_eigenvalue_cdf(spec: WishartSpec, x):
    """Distribution sum a_{r,s} r^{-(s+1)} gamma(s+1, r x); zero for x <= 0."""
    scalar = np.isscalar(x) or np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    out = np.zeros_like(x)
    pos = x > 0
    xp = x[pos]
    if xp.size:
        acc = np.zeros_like(xp)
        for (r, s), a in spec.coeffs.items():
            acc += float(a) / r ** (s + 1) * integer_lower_gamma(s + 1, r * xp)
        out[pos] = acc
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# semi-orthogonal survival probability and projection density
# ---------------------------------------------------------------------------

def _check_iteration(tx_antennas, iteration):
    if not 2 <= iteration <= tx_antennas:
        raise DomainError(
            f"iteration must lie in 2..{tx_antennas}, got {iteration}")


def _check_delta(tx_antennas, delta):
    if not 0.0 < delta < 1.0 / (tx_antennas - 1):
        raise DomainError(
            f"delta must lie in (0, 1/{tx_antennas - 1}), got {delta}")


def _candidate_probability_raw(tx_antennas, iteration, delta):
    m, n = tx_antennas, iteration
    total = 0.0
    for k in range(n - 1, m):
        inner = 0
        for i in range(1, n):
            inner += math.comb(n - 1, i) * (-1) ** i * i ** k
        total += math.comb(m - 1, k) * (-1) ** k * inner * delta ** k
    return total


def candidate_probability(tx_antennas: int, iteration: int,
                          delta: float) -> float:
    """Probability that an arbitrary user survives pruning to iteration n.

    Equals Pr(|v_1|^2 < delta, ..., |v_{n-1}|^2 < delta) for an isotropic
    unit vector v in C^M; closed-form double sum, exact up to rounding.
    For n = 2 it reduces to 1 - (1 - delta)^(M-1).
    """
    _check_iteration(tx_antennas, iteration)
    _check_delta(tx_antennas, delta)
    return _candidate_probability_raw(tx_antennas, iteration, delta)


def projection_joint_density(tx_antennas: int, iteration: int,
                             ts) -> float:
    """Joint density of the first n-1 squared coordinates of an isotropic
    unit vector in C^M at the point ``ts``; zero outside the simplex."""
    _check_iteration(tx_antennas, iteration)
    ts = np.asarray(ts, dtype=np.float64)
    if ts.shape != (iteration - 1,):
        raise DomainError(
            f"expected {iteration - 1} coordinates, got shape {ts.shape}")
    total = float(np.sum(ts))
    if np.any(ts < 0) or total > 1.0:
        return 0.0
    m, n = tx_antennas, iteration
    scale = math.gamma(m) / math.gamma(m - n + 1)
    return scale * (1.0 - total) ** (m - n)


def isotropic_coordinate_samples(tx_antennas: int, count: int,
                                 rng: np.random.Generator) -> np.ndarray:
    """Squared coordinates |v_i|^2 of isotropic unit vectors in C^M.

    The joint law is flat Dirichlet, so sampling is direct; columns are
    exchangeable and any n-1 of them follow the projection density above.
    """
    return rng.dirichlet(np.ones(tx_antennas), size=count)


# ---------------------------------------------------------------------------
# residual energy fraction of a surviving candidate
# ---------------------------------------------------------------------------

def _beta_support(x, iteration, delta):
    lo = 1.0 - (iteration - 1) * delta
    below = x <= lo
    above = x > 1.0
    mid = ~(below | above)
    return below, mid, above


def _beta_numeric_point(m, n, delta, x, mu):
    if n == 2:
        upper = min(delta, 1.0 - x)
        val, _ = integrate.quad(lambda t: (1.0 - t) ** (m - 2), 0.0, upper)
        scale = math.gamma(m) / math.gamma(m - 1)
        return 1.0 - scale * val / mu
    upper2 = min(delta, 1.0 - x)
    val, _ = integrate.dblquad(
        lambda t1, t2: (1.0 - t1 - t2) ** (m - 3),
        0.0, upper2,
        lambda t2: 0.0, lambda t2: min(delta, 1.0 - x - t2),
        epsabs=1e-12, epsrel=1e-10)
    scale = math.gamma(m) / math.gamma(m - 2)
    return 1.0 - scale * val / mu


def residual_fraction_cdf_mc(tx_antennas: int, iteration: int, delta: float,
                             x, rng: Optional[np.random.Generator] = None,
                             samples: int = 10 ** 6):
    """Monte Carlo estimate (value, standard error) of the residual cdf.

    Integrates the projection density by counting isotropic coordinate
    samples; used for iterations beyond the reach of quadrature.
    """
    _check_iteration(tx_antennas, iteration)
    _check_delta(tx_antennas, delta)
    if rng is None:
        rng = np.random.default_rng(0)
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    ts = isotropic_coordinate_samples(tx_antennas, samples, rng)
    ts = ts[:, : iteration - 1]
    inside = np.all(ts < delta, axis=1)
    sums = np.sum(ts, axis=1)
    mu = _candidate_probability_raw(tx_antennas, iteration, delta)
    below, mid, above = _beta_support(x, iteration, delta)
    value = np.where(above, 1.0, 0.0)
    err = np.zeros_like(value)
    for i in np.nonzero(mid)[0]:
        hits = np.mean(inside & (sums <= 1.0 - x[i]))
        value[i] = 1.0 - hits / mu
        err[i] = math.sqrt(max(hits * (1.0 - hits), 0.0) / samples) / mu
    if scalar:
        return float(value[0]), float(err[0])
    return value, err


def residual_fraction_cdf(tx_antennas: int, iteration: int, delta: float,
                          x, mode: str = "numeric",
                          rng: Optional[np.random.Generator] = None,
                          samples: int = 10 ** 6):
    """Cdf of the residual energy fraction of a candidate at iteration n.

    The fraction is ``1 - sum |v_i|^2`` over the n-1 pruned coordinates,
    conditioned on each |v_i|^2 < delta, so the support is
    (1 - (n-1) delta, 1].

    Modes
    -----
    ``exact_n2``
        Closed form, n = 2 only.
    ``numeric``
        Adaptive quadrature for n <= 3, Monte Carlo integration for
        n >= 4 (``samples`` draws, value only; use
        :func:`residual_fraction_cdf_mc` to get the standard error).
    ``bound_upper`` / ``bound_lower``
        Closed-form two-sided bounds; both collapse to the exact cdf at
        n = 2.  The lower bound may dip below zero near the left edge of
        the support (it is a bound, not a distribution).
    """
    _check_iteration(tx_antennas, iteration)
    _check_delta(tx_antennas, delta)
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    m, n = tx_antennas, iteration
    mu = _candidate_probability_raw(m, n, delta)
    below, mid, above = _beta_support(x, n, delta)
    out = np.where(above, 1.0, 0.0)

    if mode == "exact_n2":
        if n != 2:
            raise DomainError("exact_n2 mode requires iteration 2")
        base = (1.0 - delta) ** (m - 1)
        out[mid] = (x[mid] ** (m - 1) - base) / (1.0 - base)
    elif mode == "bound_upper":
        vals = np.array([
            _candidate_probability_raw(m, n, (1.0 - xi) / (n - 1))
            for xi in x[mid]])
        out[mid] = 1.0 - vals / mu
    elif mode == "bound_lower":
        out[mid] = 1.0 - regularized_incomplete_beta(
            1.0 - x[mid], n - 1, m - n + 1) / mu
    elif mode == "numeric":
        if n <= 3:
            out[mid] = [
                _beta_numeric_point(m, n, delta, xi, mu) for xi in x[mid]]
        else:
            value, _ = residual_fraction_cdf_mc(
                m, n, delta, x, rng=rng, samples=samples)
            out = np.atleast_1d(value)
    else:
        raise DomainError(f"unknown mode {mode!r}")
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# effective gain distribution bounds and tails
# ---------------------------------------------------------------------------

def effective_gain_cdf_bounds(spec: WishartSpec, iteration: int,
                              delta: float, x):
    """Two-sided closed-form bounds on the effective-gain cdf at iteration n.

    The effective gain of a surviving candidate is the product of its
    largest eigenvalue and its residual energy fraction; mixing the
    residual-fraction bounds through the eigenvalue density gives
    closed-form cdf bounds ``(lower, upper)``.  They coincide for n = 2.

    Evaluation involves cancelling incomplete-gamma differences; values
    for x below ~1e-3 are not guaranteed to be well conditioned.
    """
    m, nrx = spec.tx_antennas, spec.rx_antennas
    _check_iteration(m, iteration)
    _check_delta(m, delta)
    n = iteration
    t = 1.0 - (n - 1) * delta
    mu = _candidate_probability_raw(m, n, delta)

    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    lower = np.zeros_like(x)
    upper = np.zeros_like(x)
    pos = x > 0
    xp = x[pos]
    if xp.size:
        base = max_eigenvalue_cdf(spec, xp / t)

        s_upper = np.zeros_like(xp)
        for k in range(n - 1, m):
            inner = sum(math.comb(n - 1, i) * (-1) ** i * (i / (n - 1)) ** k
                        for i in range(1, n))
            a_k = math.comb(m - 1, k) * (-1) ** k * inner
            if a_k == 0:
                continue
            for (r, s), a_rs in spec.coeffs.items():
                total = np.zeros_like(xp)
                for j in range(k + 1):
                    diff = (integer_upper_gamma(j - k + s + 1, r * xp)
                            - integer_upper_gamma(j - k + s + 1, r * xp / t))
                    total += (math.comb(k, j) * r ** (k - j - s - 1)
                              * (-xp) ** (k - j) * diff)
                s_upper += a_k * float(a_rs) * total
        upper[pos] = base - s_upper / mu

        s_lower = np.zeros_like(xp)
        for k in range(0, m - n + 1):
            a_k = math.comb(m - 1, k) * (-1) ** k
            for (r, s), a_rs in spec.coeffs.items():
                total = np.zeros_like(xp)
                for j in range(m - k):
                    diff = (integer_upper_gamma(j + s - m + 2, r * xp)
                            - integer_upper_gamma(j + s - m + 2, r * xp / t))
                    total += (math.comb(m - k - 1, j) * r ** (m - j - s - 2)
                              * (-xp) ** (m - j - 1) * diff)
                s_lower += a_k * float(a_rs) * total
        lower[pos] = base - s_lower / mu

    if scalar:
        return float(lower[0]), float(upper[0])
    return lower, upper


def _tail_scales(tx_antennas, rx_antennas, iteration):
    m, nrx, n = tx_antennas, rx_antennas, iteration
    # 0^0 = 1 so the n = 1 case reduces to the plain eigenvalue tail
    power = 1.0 if n == 1 else float((n - 1) ** (n - 1))
    eps_upper = math.gamma(m - n + 1) * math.gamma(nrx) * power / math.gamma(n)
    eps_lower = math.gamma(m - n + 1) * math.gamma(nrx)
    return eps_upper, eps_lower


def effective_gain_tail_bounds(spec: WishartSpec, iteration: int,
                               delta: float, x):
    """Leading tail expansions of the effective-gain cdf bounds.

    Returns ``(upper_tail, lower_tail)`` matching the bound order of
    :func:`effective_gain_cdf_bounds` reversed: the first element expands
    the upper cdf bound, the second the lower one.  Both have the form
    ``1 - e^{-x} x^{M+N-n-1} / (mu * eps)`` and differ only in ``eps``.
    Meaningful for large x (>= 10 or so).
    """
    m, nrx, n = spec.tx_antennas, spec.rx_antennas, iteration
    if not 1 <= n <= m:
        raise DomainError(f"iteration must lie in 1..{m}")
    if n == 1:
        mu = 1.0
    else:
        _check_delta(m, delta)
        mu = _candidate_probability_raw(m, n, delta)
    eps_upper, eps_lower = _tail_scales(m, nrx, n)
    x = np.asarray(x, dtype=np.float64)
    core = np.exp(-x) * x ** (m + nrx - n - 1) / mu
    return 1.0 - core / eps_upper, 1.0 - core / eps_lower


@dataclass(frozen=True)
class ScalingLaws:
    """Extreme-value location terms and the sum-rate approximation.

    ``gain_scale_lower``/``gain_scale_upper`` bracket the selected gain at
    iteration n for K users; the snr fields are the same terms scaled by
    the per-stream power.  ``asymptotic_sum_rate`` is the large-K
    approximation ``sum_i log2(1 + rho (ln K + (M+N-i-1) ln ln K))``.
    """

    gain_scale_lower: float
    gain_scale_upper: float
    snr_scale_lower: float
    snr_scale_upper: float
    asymptotic_sum_rate: float


def _location_term(k_over_eps, exponent):
    log_k = math.log(k_over_eps)
    if log_k <= 1.0:
        raise DomainError("user count too small for the asymptotic form")
    return log_k + exponent * math.log(log_k)


def multiuser_scaling(tx_antennas: int, rx_antennas: int, iteration: int,
                      num_users: int, per_stream_power: float) -> ScalingLaws:
    """Growth laws of the selected gains and the asymptotic sum rate."""
    m, nrx, n = tx_antennas, rx_antennas, iteration
    if num_users < 3:
        raise DomainError("need at least 3 users")
    if not 1 <= n <= m:
        raise DomainError(f"iteration must lie in 1..{m}")
    eps_upper, eps_lower = _tail_scales(m, nrx, n)
    exponent = m + nrx - n - 1
    low = _location_term(num_users / eps_upper, exponent)
    high = _location_term(num_users / eps_lower, exponent)
    rho = per_stream_power
    rate = asymptotic_sum_rate(m, nrx, num_users, rho)
    return ScalingLaws(low, high, rho * low, rho * high, rate)


def asymptotic_sum_rate(tx_antennas: int, rx_antennas: int, num_users: int,
                        per_stream_power: float) -> float:
    """Large-system sum-rate approximation for the nonlinear scheme."""
    if num_users < 3:
        raise DomainError("need at least 3 users")
    log_k = math.log(num_users)
    loglog_k = math.log(log_k)
    total = 0.0
    for i in range(1, tx_antennas + 1):
        level = per_stream_power * (
            log_k + (tx_antennas + rx_antennas - i - 1) * loglog_k)
        total += math.log1p(level)
    return total / math.log(2.0)


# ---------------------------------------------------------------------------
# threshold design
# ---------------------------------------------------------------------------

def zfbf_snr_loss_bound(tx_antennas: int, delta: float) -> float:
    """Bound on the linear scheme's SNR loss factor for small thresholds.

    For small enough delta each linear-scheme stream SNR exceeds the
    nonlinear one divided by ``1 + e`` with
    ``e = (M-1)^4 delta / (1 - (M-1) delta)``.
    """
    m = tx_antennas
    if m == 1:
        return 0.0
    if not delta < 1.0 / (m - 1):
        raise DomainError(f"delta must be below 1/{m - 1}")
    return (m - 1) ** 4 * delta / (1.0 - (m - 1) * delta)


@dataclass(frozen=True)
class AdmissibilityReport:
    """Outcome of the threshold-schedule admissibility check."""

    admissible: bool
    magnitude_ok: bool
    slope_ok: bool
    delta_at_k: float
    delta_limit: float
    slope: float
    slope_limit: float


def delta_admissible(tx_antennas: int, num_users: int,
                     schedule) -> AdmissibilityReport:
    """Check a threshold schedule against the admissibility conditions.

    The threshold must stay below 1/(M-1) at the operating user count and
    must not decay as fast as K^(-1/(M-1)); the decay rate is measured by
    a log-log slope fit over a geometric K grid above ``num_users``.
    ``schedule`` may be a float, a callable K -> delta, or a
    :class:`DeltaSchedule`.
    """
    m = tx_antennas
    if isinstance(schedule, DeltaSchedule):
        if schedule.kind == "fixed":
            fn: Callable[[float], float] = lambda _k: schedule.value
        else:
            fn = lambda k: 1.0 / math.log(k)
    elif callable(schedule):
        fn = schedule
    else:
        const = float(schedule)
        fn = lambda _k: const

    delta_limit = math.inf if m == 1 else 1.0 / (m - 1)
    delta_at_k = float(fn(num_users))
    magnitude_ok = 0.0 < delta_at_k < delta_limit

    grid = np.array([num_users * 4 ** i for i in range(5)], dtype=np.float64)
    values = np.array([fn(k) for k in grid], dtype=np.float64)
    slope, _ = np.polyfit(np.log(grid), np.log(values), 1)
    slope_limit = 0.0 if m == 1 else -1.0 / (m - 1)
    slope_ok = bool(slope > slope_limit + 1e-9) if m > 1 else True

    return AdmissibilityReport(
        admissible=bool(magnitude_ok and slope_ok),
        magnitude_ok=bool(magnitude_ok),
        slope_ok=slope_ok,
        delta_at_k=delta_at_k,
        delta_limit=delta_limit,
        slope=float(slope),
        slope_limit=slope_limit,
    )


# ---------------------------------------------------------------------------
# tabulated curves
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AnalyticCurve:
    """One tabulated closed-form curve for export or plotting."""

    kind: str
    grid: np.ndarray
    values: np.ndarray
    params: dict

    def __post_init__(self):
        if self.kind not in CURVE_KINDS:
            raise DomainError(f"unknown curve kind {self.kind!r}")
        if len(self.grid) != len(self.values):
            raise DomainError("grid and values must have matching length")
