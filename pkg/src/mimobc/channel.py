"""Rayleigh-fading channel generation and eigenmode extraction.

Every user sees an independent flat-fading matrix whose entries are
i.i.d. circularly-symmetric complex Gaussian with unit variance (real and
imaginary parts each carry variance 1/2).  Eigenmodes are the singular
triplets of a user's matrix, ordered by decreasing power gain.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError


@dataclass(frozen=True)
class TrialStream:
    """Splittable random source keyed by (master_seed, trial, user).

    Each user draws from its own child stream, so realizations are
    reproducible under any parallel schedule of trials.
    """

    master_seed: int
    trial_index: int = 0

    def user_rng(self, user: int) -> np.random.Generator:
        seq = np.random.SeedSequence(
            (self.master_seed, self.trial_index, user))
        return np.random.default_rng(seq)


@dataclass(frozen=True)
class ChannelRealization:
    """One fading draw: per-user complex channel matrices.

    ``matrices[k]`` has shape (rx_antennas[k], tx_antennas); entries are
    dimensionless channel gains.
    """

    matrices: tuple
    tx_antennas: int
    rx_antennas: tuple

    @property
    def num_users(self) -> int:
        return len(self.matrices)


@dataclass(frozen=True)
class EigenMode:
    """One (user, eigen-index) channel direction.

    ``gain`` is the squared singular value; ``right_vector`` (length M)
    and ``left_vector`` (length N_k) are the unit-norm singular vectors,
    so ``H @ right_vector = sqrt(gain) * left_vector``.  Vector phase is
    unconstrained; downstream quantities only use squared projections.
    """

    user: int
    order: int
    gain: float
    right_vector: np.ndarray
    left_vector: np.ndarray


def generate_channels(tx_antennas: int, rx_counts: Sequence[int],
                      rng_stream: TrialStream) -> ChannelRealization:
    """Draw one i.i.d. Rayleigh-fading realization for all users.

    Parameters
    ----------
    tx_antennas : int
        Number of transmit antennas M (>= 1).
    rx_counts : sequence of int
        Receive antenna count per user, each >= 1.
    rng_stream : TrialStream
        Deterministic random source; identical streams give identical
        realizations.

    Returns
    -------
    ChannelRealization
    """
    if tx_antennas < 1:
        raise DimensionError(f"tx_antennas must be >= 1, got {tx_antennas}")
    rx_counts = tuple(int(n) for n in rx_counts)
    if not rx_counts or any(n < 1 for n in rx_counts):
        raise DimensionError(f"rx antenna counts must be >= 1, got {rx_counts}")

    matrices = []
    for user, n_rx in enumerate(rx_counts):
        rng = rng_stream.user_rng(user)
        h = draw_matrix(tx_antennas, n_rx, rng)
        h.setflags(write=False)
        matrices.append(h)
    return ChannelRealization(tuple(matrices), tx_antennas, rx_counts)


def draw_matrix(tx_antennas: int, rx_antennas: int,
                rng: np.random.Generator) -> np.ndarray:
    """One (rx, tx) matrix of unit-variance complex Gaussian entries."""
    shape = (rx_antennas, tx_antennas)
    return np.sqrt(0.5) * (rng.standard_normal(shape)
                           + 1j * rng.standard_normal(shape))


def draw_batch(tx_antennas: int, rx_antennas: int, count: int,
               rng: np.random.Generator) -> np.ndarray:
    """Stack of ``count`` i.i.d. matrices, shape (count, rx, tx)."""
    shape = (count, rx_antennas, tx_antennas)
    return np.sqrt(0.5) * (rng.standard_normal(shape)
                           + 1j * rng.standard_normal(shape))


def eigenmodes(channel: ChannelRealization, user: int):
    """Ordered eigenmodes of one user's channel.

    Returns min(N_k, M) modes with non-increasing gains.  SVD failures
    (``numpy.linalg.LinAlgError``) propagate to the caller.
    """
    if not 0 <= user < channel.num_users:
        raise DimensionError(f"user index {user} out of range")
    h = channel.matrices[user]
    u, s, vh = np.linalg.svd(h, full_matrices=False)
    return [
        EigenMode(user=user, order=j, gain=float(s[j]) ** 2,
                  right_vector=vh[j].conj(), left_vector=u[:, j])
        for j in range(s.shape[0])
    ]


def stack_channels(channel: ChannelRealization) -> np.ndarray:
    """(K, N, M) array view of a homogeneous realization."""
    n_set = set(channel.rx_antennas)
    if len(n_set) != 1:
        raise DimensionError("users have different antenna counts; "
                             "stacking requires a homogeneous realization")
    return np.stack(channel.matrices)


def principal_mode_arrays(h_stack: np.ndarray):
    """Principal eigenmode of each matrix in a (K, N, M) stack.

    Returns ``(lam, W, owner, order)`` where row ``W[k]`` is the
    conjugate-transposed principal direction of user k (the layout the
    selection kernels consume).
    """
    _, s, vh = np.linalg.svd(h_stack, full_matrices=False)
    lam = s[:, 0] ** 2
    w = np.ascontiguousarray(vh[:, 0, :])
    k = h_stack.shape[0]
    owner = np.arange(k, dtype=np.int64)
    order = np.zeros(k, dtype=np.int64)
    return lam, w, owner, order


def all_mode_arrays(h_stack: np.ndarray):
    """Every eigenmode of each matrix in a (K, N, M) stack.

    Modes are ordered by (user, eigen-index), which is also the argmax
    tie-break order used by the selection kernels.
    """
    _, s, vh = np.linalg.svd(h_stack, full_matrices=False)
    k, r, m = vh.shape
    lam = (s ** 2).reshape(k * r)
    w = np.ascontiguousarray(vh.reshape(k * r, m))
    owner = np.repeat(np.arange(k, dtype=np.int64), r)
    order = np.tile(np.arange(r, dtype=np.int64), k)
    return lam, w, owner, order
