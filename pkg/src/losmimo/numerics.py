"""Deterministic random streams, complex Gaussian sampling, and exact matrix builders.

Every random draw in the simulator flows through a RandomSource so that a run is
a pure function of (master_seed, stream layout).  Trial k owns stream k; anything
inside a trial that needs its own stream derives a child source with integer keys.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "RandomSource",
    "sample_cgauss",
    "RankDeficiencyError",
    "pinv",
    "HadamardConstructionError",
    "hadamard",
    "dft_matrix",
]


@dataclass(frozen=True)
class RandomSource:
    """Handle to one independent random stream.

    master_seed selects the whole experiment, stream_id selects the trial,
    subpath addresses draws inside a trial (channel, oscillators, data, noise).
    Two sources with different (stream_id, subpath) are statistically
    independent; the same triple always reproduces the same draws.
    """

    master_seed: int
    stream_id: int = 0
    subpath: tuple[int, ...] = field(default_factory=tuple)

    def derive(self, *keys: int) -> "RandomSource":
        """Child source for a sub-draw. Each distinct key tuple is a fresh stream."""
        return RandomSource(self.master_seed, self.stream_id, self.subpath + tuple(keys))

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this source's stream."""
        seq = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_id, *self.subpath))
        return np.random.Generator(np.random.PCG64(seq))


def sample_cgauss(rs: RandomSource, count, variance: float = 1.0) -> np.ndarray:
    """Circularly-symmetric complex Gaussian samples with the given total variance.

    count may be an int (vector) or a shape tuple.  variance 0 returns zeros.
    """
    if variance < 0:
        raise ValueError(f"variance must be >= 0, got {variance}")
    shape = (count,) if np.isscalar(count) else tuple(count)
    g = rs.generator()
    scale = math.sqrt(variance / 2.0)
    re = g.normal(0.0, scale, shape)
    im = g.normal(0.0, scale, shape)
    return re + 1j * im


class RankDeficiencyError(ValueError):
    """Matrix too ill-conditioned to invert for zero-forcing."""


def pinv(m: np.ndarray, cond_limit: float = 1e12) -> np.ndarray:
    """Moore-Penrose pseudoinverse via SVD.

    Raises RankDeficiencyError when the condition number exceeds cond_limit,
    instead of silently regularizing like np.linalg.pinv would.
    """
    m = np.asarray(m)
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    if s[-1] == 0.0 or s[0] / s[-1] > cond_limit:
        cond = math.inf if s[-1] == 0.0 else s[0] / s[-1]
        raise RankDeficiencyError(
            f"condition number {cond:.3e} exceeds limit {cond_limit:.3e}"
        )
    return (vh.conj().T / s) @ u.conj().T


class HadamardConstructionError(ValueError):
    """No Sylvester/Paley construction is known for the requested order."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _paley_block(q: int) -> np.ndarray:
    # Paley type I for prime q = 3 (mod 4): H = I + S is Hadamard of order q+1,
    # S built from the quadratic character chi on GF(q).
    residues = {(i * i) % q for i in range(1, q)}
    chi = np.zeros(q, dtype=np.int64)
    for a in range(1, q):
        chi[a] = 1 if a in residues else -1
    jm = np.subtract.outer(np.arange(q), np.arange(q)) % q
    qmat = chi[jm]
    h = np.ones((q + 1, q + 1), dtype=np.int64)
    h[1:, 0] = -1
    h[1:, 1:] = qmat + np.eye(q, dtype=np.int64)
    return h


def _paley_ok(n: int) -> bool:
    return n >= 4 and _is_prime(n - 1) and (n - 1) % 4 == 3


def _decompose(n: int, memo: dict) -> list[int] | None:
    """Factor n into block orders, each 2 or a Paley order, or None."""
    if n in memo:
        return memo[n]
    if n == 1:
        return []
    result = None
    if _paley_ok(n):
        result = [n]
    else:
        candidates = [d for d in range(4, n) if n % d == 0 and _paley_ok(d)]
        for d in sorted(candidates, reverse=True):
            rest = _decompose(n // d, memo)
            if rest is not None:
                result = [d] + rest
                break
        if result is None and n % 2 == 0:
            rest = _decompose(n // 2, memo)
            if rest is not None:
                result = [2] + rest
    memo[n] = result
    return result


def hadamard(n: int) -> np.ndarray:
    """Exact +/-1 integer Hadamard matrix of order n (H H^T = n I).

    Orders reachable as Kronecker products of the Sylvester doubling block and
    Paley type-I blocks: 1, 2, 4, 8, 12, 16, 20, 24, 32, 40, 48, 64, 80, 96, ...
    """
    if n < 1:
        raise ValueError(f"order must be >= 1, got {n}")
    if n == 1:
        return np.ones((1, 1), dtype=np.int64)
    if n > 2 and n % 4 != 0:
        raise HadamardConstructionError(
            f"no Hadamard matrix of order {n} exists (order must be 1, 2, or a multiple of 4)"
        )
    factors = _decompose(n, {})
    if factors is None:
        raise HadamardConstructionError(
            f"order {n} is not reachable by Sylvester/Paley constructions; "
            "use a DFT training matrix instead (build_frame(..., dft_training=True))"
        )
    h = np.ones((1, 1), dtype=np.int64)
    two = np.array([[1, 1], [1, -1]], dtype=np.int64)
    for f in factors:
        blk = two if f == 2 else _paley_block(f - 1)
        h = np.kron(h, blk)
    return h


def dft_matrix(n: int) -> np.ndarray:
    """Unit-modulus DFT matrix W with W^H W = n I; equals hadamard(2) at n=2."""
    if n < 1:
        raise ValueError(f"size must be >= 1, got {n}")
    k = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(k, k) / n)
