"""Seeded random bounded complexes.

The bit source is PCG64 (numpy's implementation, driven through its raw
128-bit state so that no seeding algorithm sits in between):

    s_{k+1} = s_k * 0x2360ED051FC65DA44385DF649FCCF645 + c   (mod 2^128)
    out_k   = rotr64((s_{k+1} >> 64) xor (s_{k+1} mod 2^64), s_{k+1} >> 122)

with ``s_0 = seed`` and ``c = 0x5851F42D4C957F2D14057B7EF767814F``.  Bounded
draws use rejection: ``r`` is redrawn while ``r >= 2^64 - (2^64 mod n)``, then
``r mod n`` is returned.

A complex is a direct sum of spheres ``S(n)`` and elementary pieces
``Z --m--> Z`` (``m = 1`` gives a disk) with each degree's basis changed by a
random unimodular matrix.  Over a PID every bounded free complex is
isomorphic to such a sum, so nothing is out of reach.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chain import ChainComplex, direct_sum, elementary, sphere
from .linalg import ZZ, Ring, identity

PCG_MULTIPLIER = 0x2360ED051FC65DA44385DF649FCCF645
PCG_INCREMENT = 0x5851F42D4C957F2D14057B7EF767814F
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MASK64 = (1 << 64) - 1


class Pcg64Stream:
    """PCG64 with the state set directly from the seed."""

    def __init__(self, seed: int):
        if not 0 <= seed <= MASK64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        self._bg = np.random.PCG64()
        self._bg.state = {
            "bit_generator": "PCG64",
            "state": {"state": seed, "inc": PCG_INCREMENT},
            "has_uint32": 0,
            "uinteger": 0,
        }

    def next_u64(self) -> int:
        return int(self._bg.random_raw())

    def below(self, n: int) -> int:
        """Uniform in ``0..n-1``."""
        if n <= 0:
            raise ValueError("empty range")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n

    def between(self, lo: int, hi: int) -> int:
        """Uniform in ``lo..hi`` inclusive."""
        return lo + self.below(hi - lo + 1)


def instance_seed(seed: int, index: int) -> int:
    """Seed of the ``index``-th instance of a batch: ``seed + index * 0x9E3779B97F4A7C15 mod 2^64``."""
    return (seed + index * GOLDEN_GAMMA) & MASK64


@dataclass(frozen=True)
class GeneratorParams:
    seed: int = 0
    max_degree: int = 3
    max_rank_per_degree: int = 3
    torsion_multipliers: tuple = (2, 3)
    ring: Ring = field(default=ZZ)

    def __post_init__(self):
        if not 0 <= self.seed <= MASK64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if not 0 <= self.max_degree <= 6:
            raise ValueError("max_degree must lie in 0..6")
        if not 1 <= self.max_rank_per_degree <= 6:
            raise ValueError("max_rank_per_degree must lie in 1..6")
        if any(int(m) < 1 for m in self.torsion_multipliers):
            raise ValueError("torsion multipliers must be positive")


def _unimodular_pair(rng: Pcg64Stream, r: int):
    """A random unimodular ``U`` and its inverse, built from elementary operations."""
    U, Ui = identity(r), identity(r)
    for _ in range(2 * r):
        op = rng.below(3)
        i, j = rng.below(r), rng.below(r)
        if op == 0 and i != j:
            c = rng.between(-2, 2)
            U[i, :] += c * U[j, :]          # row_i += c row_j
            Ui[:, j] -= c * Ui[:, i]        # inverse: col_j -= c col_i
        elif op == 1 and i != j:
            U[[i, j], :] = U[[j, i], :]
            Ui[:, [i, j]] = Ui[:, [j, i]]
        elif op == 2:
            U[i, :] *= -1
            Ui[:, i] *= -1
    return U, Ui


def generate_complex(params: GeneratorParams) -> ChainComplex:
    rng = Pcg64Stream(params.seed)
    top, cap = params.max_degree, params.max_rank_per_degree
    mults = (1,) + tuple(int(m) for m in params.torsion_multipliers)
    ranks = {n: 0 for n in range(top + 1)}
    pieces = []
    for _ in range(rng.between(1, 2 * (top + 1))):
        if top == 0 or rng.below(2) == 0:
            n = rng.between(0, top)
            if ranks[n] < cap:
                ranks[n] += 1
                pieces.append(sphere(n, ring=params.ring))
        else:
            n = rng.between(1, top)
            m = mults[rng.below(len(mults))]
            if ranks[n] < cap and ranks[n - 1] < cap:
                ranks[n] += 1
                ranks[n - 1] += 1
                pieces.append(elementary(n, m, ring=params.ring))
    X = direct_sum(*pieces) if pieces else ChainComplex({0: 0}, ring=params.ring, nonneg=True)
    lo, hi = 0, max(X.max_deg, 0)
    U, Ui = {}, {}
    for n in range(lo, hi + 1):
        U[n], Ui[n] = _unimodular_pair(rng, X.rank(n)) if X.rank(n) else (identity(0), identity(0))
    diffs = {n: params.ring.reduce(U[n - 1].dot(X.d(n)).dot(Ui[n])) for n in range(lo + 1, hi + 1)}
    return ChainComplex({n: X.rank(n) for n in range(lo, hi + 1)}, diffs, ring=params.ring,
                        nonneg=True, min_deg=lo, max_deg=hi)
