"""Deterministic numeric substrate: seeded RNG streams, standardization,
dense least squares, and a finite-difference gradient oracle.

The random generator is pinned so golden values survive reimplementation:

* Uniform 64-bit source: SplitMix64 (Steele et al.), i.e. a Weyl sequence
  with increment 0x9E3779B97F4A7C15 passed through the murmur-style
  finalizer (30/27/31 shift-xor-multiply). Pure integer arithmetic, so the
  stream is bit-identical on every platform.
* Stream derivation: the initial Weyl state is
  ``mix(mix(master_seed) ^ mix(stream_id * GOLDEN + 1))``, which drops each
  stream at an effectively random position of the period-2^64 cycle.
* Floats: ``(u >> 11) * 2**-53`` in [0, 1).
* Normals: Marsaglia polar Box-Muller; the spare deviate is cached on the
  stream, so draws come in rejection-sampled pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    DegenerateDistributionError,
    DimensionError,
    InvalidParameterError,
    SingularSystemError,
)

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

# Rank tolerance for the least-squares solver, relative to the largest
# diagonal entry of the triangular factor.
RANK_TOLERANCE = 1e-10


def _mix64(z: int) -> int:
    z &= _MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return z ^ (z >> 31)


class RngStream:
    """One independently seeded SplitMix64 stream.

    Identical ``(master_seed, stream_id)`` pairs replay the same sequence;
    distinct stream ids land at unrelated positions of the generator cycle.
    A stream is single-owner mutable: use one stream per concurrent worker.
    """

    __slots__ = ("master_seed", "stream_id", "_state", "_spare")

    def __init__(self, master_seed: int, stream_id: int = 0):
        self.master_seed = int(master_seed)
        self.stream_id = int(stream_id)
        seed = _mix64(self.master_seed) ^ _mix64((self.stream_id * _GOLDEN + 1) & _MASK64)
        self._state = _mix64(seed)
        self._spare: float | None = None

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        return _mix64(self._state)

    def next_u64_array(self, n: int) -> np.ndarray:
        """Vectorized batch of ``n`` raw draws (same stream as next_u64)."""
        steps = np.arange(1, n + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            z = np.uint64(self._state) + steps * np.uint64(_GOLDEN)
            z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
            z = z ^ (z >> np.uint64(31))
        self._state = (self._state + n * _GOLDEN) & _MASK64
        return z

    def next_float(self) -> float:
        """Uniform draw in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def uniform(self, low: float, high: float) -> float:
        return low + (high - low) * self.next_float()

    def normal(self, mean: float = 0.0, stddev: float = 1.0) -> float:
        """One draw from N(mean, stddev^2); stddev 0 returns mean exactly."""
        if not stddev >= 0.0:
            raise InvalidParameterError(f"stddev must be >= 0, got {stddev}")
        if stddev == 0.0:
            return float(mean)
        if self._spare is not None:
            z, self._spare = self._spare, None
            return mean + stddev * z
        while True:
            u = 2.0 * self.next_float() - 1.0
            v = 2.0 * self.next_float() - 1.0
            s = u * u + v * v
            if 0.0 < s < 1.0:
                break
        scale = np.sqrt(-2.0 * np.log(s) / s)
        self._spare = v * scale
        return mean + stddev * (u * scale)

    def permutation(self, n: int) -> np.ndarray:
        """Deterministic random permutation of range(n).

        Implemented as an argsort of one raw draw per element; ties are
        broken by the stable sort and are vanishingly rare anyway.
        """
        if n < 0:
            raise InvalidParameterError(f"permutation length must be >= 0, got {n}")
        return np.argsort(self.next_u64_array(n), kind="stable")


def rng_new(master_seed: int, stream_id: int = 0) -> RngStream:
    """Create the stream identified by (master_seed, stream_id)."""
    return RngStream(master_seed, stream_id)


def sample_normal(rng: RngStream, mean: float, stddev: float) -> float:
    return rng.normal(mean, stddev)


@dataclass(frozen=True)
class Standardizer:
    """Affine map x -> (x - mean) / stddev with a strictly positive scale."""

    mean: float
    stddev: float

    def __post_init__(self):
        if not (np.isfinite(self.mean) and np.isfinite(self.stddev)):
            raise InvalidParameterError("standardizer moments must be finite")
        if not self.stddev > 0.0:
            raise DegenerateDistributionError(
                f"stddev must be > 0, got {self.stddev}"
            )

    def apply(self, values):
        return (np.asarray(values, dtype=np.float64) - self.mean) / self.stddev

    def invert(self, values):
        return np.asarray(values, dtype=np.float64) * self.stddev + self.mean


def fit_standardizer(values) -> Standardizer:
    """Fit mean and population (divide-by-n) standard deviation."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size < 2:
        raise InvalidParameterError("need a 1-D sample of length >= 2")
    if not np.all(np.isfinite(arr)):
        raise InvalidParameterError("values must be finite")
    mean = float(arr.mean())
    stddev = float(arr.std())
    if stddev == 0.0:
        raise DegenerateDistributionError("constant input has no scale")
    return Standardizer(mean=mean, stddev=stddev)


def solve_least_squares(X, y) -> np.ndarray:
    """Solve argmin ||X b - y||_2 by Householder QR with back substitution.

    Raises SingularSystemError when the smallest |R_ii| falls below
    RANK_TOLERANCE times the largest, i.e. X is numerically rank deficient.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise DimensionError(f"incompatible shapes {X.shape} and {y.shape}")
    n, p = X.shape
    if n < p:
        raise DimensionError(f"underdetermined system: {n} rows for {p} columns")
    q, r = np.linalg.qr(X)
    diag = np.abs(np.diag(r))
    if diag.min() < RANK_TOLERANCE * diag.max():
        raise SingularSystemError(
            f"rank-deficient design: |pivot| ratio {diag.min() / diag.max():.3e} "
            f"below {RANK_TOLERANCE:g}"
        )
    rhs = q.T @ y
    beta = np.zeros(p)
    for i in range(p - 1, -1, -1):
        beta[i] = (rhs[i] - r[i, i + 1 :] @ beta[i + 1 :]) / r[i, i]
    return beta


def finite_diff_gradient(
    f: Callable[[np.ndarray], float], theta, h: float = 1e-5
) -> np.ndarray:
    """Central-difference gradient (f(x+h e_i) - f(x-h e_i)) / 2h."""
    if not h > 0.0:
        raise InvalidParameterError(f"step size must be > 0, got {h}")
    theta = np.asarray(theta, dtype=np.float64)
    grad = np.zeros_like(theta)
    probe = theta.copy()
    for i in range(theta.size):
        probe[i] = theta[i] + h
        up = f(probe)
        probe[i] = theta[i] - h
        down = f(probe)
        probe[i] = theta[i]
        grad[i] = (up - down) / (2.0 * h)
    return grad
