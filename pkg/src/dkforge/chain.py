"""Bounded chain complexes of finitely generated free modules.

A complex stores explicit degree bounds, a rank per degree and the
differential ``d_n : X_n -> X_{n-1}`` as an exact matrix.  Everything else in
the package (normalization, hom objects, model-structure predicates) is
eventually phrased in terms of the operations here.

Basis conventions, pinned because tests compare matrices:

* ``(X (x) Y)_n = (+)_i X_i (x) Y_{n-i}``, blocks ordered by ``i`` ascending,
  inside a block the Kronecker order ``a * rank(Y_{n-i}) + b``.
* ``HOM(X, Y)_n = (+)_i Hom(X_i, Y_{i+n})``, blocks by ``i`` ascending, inside
  a block matrix units in row-major order.
* ``cone(f)_n = X_{n-1} (+) Y_n`` with ``d(x, y) = (-dx, f x + dy)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    ZZ,
    AbelianGroupInvariants,
    Ring,
    as_matrix,
    block_diag,
    cokernel_invariants,
    identity,
    integer_rank,
    kernel_with_retraction,
    matrix_from_json,
    matrix_to_json,
    smith_normal_form,
    solve_linear,
    zeros,
)


class ComplexError(ValueError):
    """Raised for malformed complexes or maps; ``degree`` names the offending degree."""

    def __init__(self, message: str, degree: int | None = None):
        super().__init__(message)
        self.degree = degree


# ---------------------------------------------------------------------------
# complexes


class ChainComplex:
    """Bounded complex of free modules; immutable after construction.

    ``ranks`` maps degree -> rank (missing degrees are rank 0) and
    ``differentials`` maps degree ``n`` -> matrix ``rank(n-1) x rank(n)``.
    """

    __slots__ = ("ring", "min_deg", "max_deg", "_ranks", "_diffs", "nonneg")

    def __init__(self, ranks, differentials=None, ring: Ring = ZZ, nonneg: bool = False,
                 min_deg: int | None = None, max_deg: int | None = None, check: bool = True):
        ranks = {int(k): int(v) for k, v in dict(ranks).items()}
        nz = [k for k, v in ranks.items() if v]
        if min_deg is None:
            min_deg = min(nz) if nz else 0
        if max_deg is None:
            max_deg = max(nz) if nz else min_deg - 1
        for k in nz:
            if not (min_deg <= k <= max_deg):
                raise ComplexError(f"rank in degree {k} lies outside [{min_deg}, {max_deg}]", k)
        self.ring = ring
        self.min_deg = min_deg
        self.max_deg = max_deg
        self.nonneg = nonneg
        self._ranks = {k: ranks.get(k, 0) for k in range(min_deg, max_deg + 1)}
        diffs = {}
        for k, M in (differentials or {}).items():
            k = int(k)
            try:
                M = ring.reduce(as_matrix(M, self.rank(k - 1), self.rank(k)))
            except ValueError:
                raise ComplexError(f"differential shape mismatch in degree {k}", k) from None
            if M.shape != (self.rank(k - 1), self.rank(k)):
                raise ComplexError(
                    f"differential in degree {k} has shape {M.shape}, expected {(self.rank(k - 1), self.rank(k))}", k)
            if M.size:
                diffs[k] = M
        self._diffs = diffs
        if check:
            problem = validate_complex(self)
            if problem is not None:
                raise problem

    def rank(self, n: int) -> int:
        return self._ranks.get(n, 0)

    def d(self, n: int) -> np.ndarray:
        M = self._diffs.get(n)
        if M is None:
            return zeros(self.rank(n - 1), self.rank(n))
        return M

    @property
    def degrees(self) -> range:
        return range(self.min_deg, self.max_deg + 1)

    @property
    def ranks(self) -> dict:
        return dict(self._ranks)

    def total_rank(self) -> int:
        return sum(self._ranks.values())

    def is_zero(self) -> bool:
        return self.total_rank() == 0

    def __eq__(self, other):
        if not isinstance(other, ChainComplex):
            return NotImplemented
        lo = min(self.min_deg, other.min_deg)
        hi = max(self.max_deg, other.max_deg)
        if self.ring != other.ring:
            return False
        return all(self.rank(n) == other.rank(n) for n in range(lo, hi + 1)) and all(
            np.array_equal(self.d(n), other.d(n)) for n in range(lo, hi + 2))

    __hash__ = None

    def __repr__(self):
        body = ", ".join(f"{n}:{self.rank(n)}" for n in self.degrees)
        return f"ChainComplex({{{body}}}, ring={self.ring})"


def validate_complex(X: ChainComplex):
    """Return ``None`` if ``X`` is a valid complex, else a :class:`ComplexError`."""
    if X.nonneg and any(X.rank(n) for n in range(X.min_deg, 0)):
        bad = min(n for n in range(X.min_deg, 0) if X.rank(n))
        return ComplexError(f"non-negatively graded complex has rank {X.rank(bad)} in degree {bad}", bad)
    for n in range(X.min_deg, X.max_deg + 2):
        if X.d(n).shape != (X.rank(n - 1), X.rank(n)):
            return ComplexError(f"differential shape mismatch in degree {n}", n)
    for n in range(X.min_deg + 1, X.max_deg + 1):
        prod = X.ring.reduce(X.d(n - 1).dot(X.d(n)))
        if np.any(prod != 0):
            return ComplexError(f"d∘d is nonzero: d_{n - 1} d_{n} != 0 at degree {n}", n)
    return None


def zero_complex(ring: Ring = ZZ) -> ChainComplex:
    return ChainComplex({}, ring=ring, nonneg=True)


def sphere(n: int, rank: int = 1, ring: Ring = ZZ) -> ChainComplex:
    """``S(n)``: the free module of the given rank concentrated in degree ``n``."""
    return ChainComplex({n: rank}, ring=ring, nonneg=n >= 0)


def unit_complex(ring: Ring = ZZ) -> ChainComplex:
    return sphere(0, ring=ring)


def disk(n: int, ring: Ring = ZZ) -> ChainComplex:
    """``D(n)``: ``Z`` in degrees ``n`` and ``n-1`` joined by the identity."""
    return ChainComplex({n: 1, n - 1: 1}, {n: [[1]]}, ring=ring, nonneg=n >= 1)


def elementary(n: int, m: int, ring: Ring = ZZ) -> ChainComplex:
    """``Z --m--> Z`` in degrees ``n``, ``n-1``."""
    return ChainComplex({n: 1, n - 1: 1}, {n: [[m]]}, ring=ring, nonneg=n >= 1)


def direct_sum(*complexes: ChainComplex) -> ChainComplex:
    if not complexes:
        return zero_complex()
    ring = _common_ring(complexes)
    lo = min(X.min_deg for X in complexes)
    hi = max(X.max_deg for X in complexes)
    ranks = {n: sum(X.rank(n) for X in complexes) for n in range(lo, hi + 1)}
    diffs = {n: block_diag(*[X.d(n) for X in complexes]) for n in range(lo + 1, hi + 1)}
    return ChainComplex(ranks, diffs, ring=ring, nonneg=all(X.nonneg for X in complexes),
                        min_deg=lo, max_deg=hi, check=False)


def shift(X: ChainComplex, k: int) -> ChainComplex:
    """``X[k]_n = X_{n-k}`` with differential ``(-1)^k d``."""
    sgn = -1 if k % 2 else 1
    return ChainComplex({n + k: X.rank(n) for n in X.degrees},
                        {n + k: sgn * X.d(n) for n in range(X.min_deg + 1, X.max_deg + 1)},
                        ring=X.ring, nonneg=X.min_deg + k >= 0, min_deg=X.min_deg + k,
                        max_deg=X.max_deg + k, check=False)


def brutal_truncation(X: ChainComplex, top: int) -> ChainComplex:
    """Keep degrees ``<= top`` (a quotient complex; used to bound linear systems)."""
    hi = min(X.max_deg, top)
    return ChainComplex({n: X.rank(n) for n in range(X.min_deg, hi + 1)},
                        {n: X.d(n) for n in range(X.min_deg + 1, hi + 1)},
                        ring=X.ring, nonneg=X.nonneg, min_deg=X.min_deg,
                        max_deg=max(hi, X.min_deg - 1), check=False)


def _common_ring(objs) -> Ring:
    rings = {o.ring for o in objs}
    if len(rings) != 1:
        raise ComplexError(f"ring mismatch: {sorted(map(str, rings))}")
    return rings.pop()


# ---------------------------------------------------------------------------
# maps


class ChainMap:
    """Degree-0 map of complexes, ``components[n] : X_n -> Y_n``."""

    __slots__ = ("source", "target", "_comps")

    def __init__(self, source: ChainComplex, target: ChainComplex, components=None, check: bool = True):
        if source.ring != target.ring:
            raise ComplexError("ring mismatch between source and target")
        self.source = source
        self.target = target
        comps = {}
        for n, M in (components or {}).items():
            n = int(n)
            try:
                M = source.ring.reduce(as_matrix(M, target.rank(n), source.rank(n)))
            except ValueError:
                raise ComplexError(f"component shape mismatch in degree {n}", n) from None
            if M.shape != (target.rank(n), source.rank(n)):
                raise ComplexError(f"component in degree {n} has shape {M.shape}, "
                                   f"expected {(target.rank(n), source.rank(n))}", n)
            if M.size and np.any(M != 0):
                comps[n] = M
        self._comps = comps
        if check:
            problem = validate_map(self)
            if problem is not None:
                raise problem

    @property
    def ring(self) -> Ring:
        return self.source.ring

    def __getitem__(self, n: int) -> np.ndarray:
        M = self._comps.get(n)
        if M is None:
            return zeros(self.target.rank(n), self.source.rank(n))
        return M

    @property
    def degrees(self) -> range:
        return range(min(self.source.min_deg, self.target.min_deg),
                     max(self.source.max_deg, self.target.max_deg) + 1)

    def __eq__(self, other):
        if not isinstance(other, ChainMap):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and all(np.array_equal(self[n], other[n]) for n in self.degrees))

    __hash__ = None

    def __matmul__(self, other: "ChainMap") -> "ChainMap":
        return compose(self, other)

    def __add__(self, other: "ChainMap") -> "ChainMap":
        _check_parallel(self, other)
        return ChainMap(self.source, self.target,
                        {n: self[n] + other[n] for n in self.degrees}, check=False)

    def __sub__(self, other: "ChainMap") -> "ChainMap":
        _check_parallel(self, other)
        return ChainMap(self.source, self.target,
                        {n: self[n] - other[n] for n in self.degrees}, check=False)

    def __neg__(self) -> "ChainMap":
        return ChainMap(self.source, self.target, {n: -self[n] for n in self.degrees}, check=False)

    def scale(self, c: int) -> "ChainMap":
        return ChainMap(self.source, self.target, {n: c * self[n] for n in self.degrees}, check=False)

    def __repr__(self):
        return f"ChainMap({self.source!r} -> {self.target!r})"


def _check_parallel(f: ChainMap, g: ChainMap):
    if not (f.source == g.source and f.target == g.target):
        raise ComplexError("maps are not parallel")


def validate_map(f: ChainMap):
    X, Y = f.source, f.target
    for n in range(min(X.min_deg, Y.min_deg), max(X.max_deg, Y.max_deg) + 2):
        lhs = Y.d(n).dot(f[n])
        rhs = f[n - 1].dot(X.d(n))
        if np.any(f.ring.reduce(lhs - rhs) != 0):
            return ComplexError(f"chain map square fails in degree {n}", n)
    return None


def identity_map(X: ChainComplex) -> ChainMap:
    return ChainMap(X, X, {n: identity(X.rank(n)) for n in X.degrees}, check=False)


def zero_map(X: ChainComplex, Y: ChainComplex) -> ChainMap:
    return ChainMap(X, Y, {}, check=False)


def compose(g: ChainMap, f: ChainMap) -> ChainMap:
    """``g ∘ f``."""
    if not f.target == g.source:
        raise ComplexError("cannot compose: target of f differs from source of g")
    return ChainMap(f.source, g.target,
                    {n: f.ring.reduce(g[n].dot(f[n])) for n in f.source.degrees}, check=False)


def direct_sum_maps(*maps: ChainMap) -> ChainMap:
    S = direct_sum(*[f.source for f in maps])
    T = direct_sum(*[f.target for f in maps])
    lo, hi = min(S.min_deg, T.min_deg), max(S.max_deg, T.max_deg)
    return ChainMap(S, T, {n: block_diag(*[f[n] for f in maps]) for n in range(lo, hi + 1)}, check=False)


def is_isomorphism(f: ChainMap) -> bool:
    """Degreewise invertible over the coefficient ring."""
    from .linalg import is_unimodular

    for n in f.degrees:
        M = f[n]
        if M.shape[0] != M.shape[1]:
            return False
        if f.ring.is_integers:
            if not is_unimodular(M):
                return False
        elif solve_linear(M, identity(M.shape[0]), f.ring) is None:
            return False
    return True


def inverse_map(f: ChainMap) -> ChainMap:
    comps = {}
    for n in f.degrees:
        M = f[n]
        X = solve_linear(M, identity(M.shape[0]), f.ring) if M.shape[0] == M.shape[1] else None
        if X is None:
            raise ComplexError(f"map is not invertible in degree {n}", n)
        comps[n] = X
    return ChainMap(f.target, f.source, comps)


# ---------------------------------------------------------------------------
# tensor product


def tensor_offsets(X: ChainComplex, Y: ChainComplex, n: int) -> dict:
    """Offsets of the blocks ``X_i (x) Y_{n-i}`` inside ``(X (x) Y)_n``, keyed by ``i``."""
    out = {}
    pos = 0
    for i in X.degrees:
        j = n - i
        r = X.rank(i) * Y.rank(j)
        if r:
            out[i] = pos
            pos += r
    return out


def _tensor_range(X, Y):
    if X.is_zero() or Y.is_zero():
        lo = X.min_deg + Y.min_deg
        return lo, lo - 1
    return X.min_deg + Y.min_deg, X.max_deg + Y.max_deg


def tensor_complexes(X: ChainComplex, Y: ChainComplex) -> ChainComplex:
    """Koszul tensor product, ``d(x (x) y) = dx (x) y + (-1)^{|x|} x (x) dy``."""
    ring = _common_ring([X, Y])
    lo, hi = _tensor_range(X, Y)
    ranks = {n: sum(X.rank(i) * Y.rank(n - i) for i in X.degrees) for n in range(lo, hi + 1)}
    diffs = {}
    for n in range(lo + 1, hi + 1):
        D = zeros(ranks.get(n - 1, 0), ranks[n])
        src = tensor_offsets(X, Y, n)
        tgt = tensor_offsets(X, Y, n - 1)
        for i, c0 in src.items():
            j = n - i
            w = X.rank(i) * Y.rank(j)
            if i - 1 in tgt:
                r0 = tgt[i - 1]
                blk = np.kron(X.d(i), identity(Y.rank(j)))
                D[r0:r0 + blk.shape[0], c0:c0 + w] += blk
            if i in tgt:
                r0 = tgt[i]
                blk = np.kron(identity(X.rank(i)), Y.d(j))
                if i % 2:
                    blk = -blk
                D[r0:r0 + blk.shape[0], c0:c0 + w] += blk
        diffs[n] = ring.reduce(D)
    return ChainComplex(ranks, diffs, ring=ring, nonneg=X.nonneg and Y.nonneg,
                        min_deg=lo, max_deg=hi, check=False)


def tensor_maps(f: ChainMap, g: ChainMap) -> ChainMap:
    """``f (x) g`` (degree-0 maps, so no Koszul sign)."""
    S = tensor_complexes(f.source, g.source)
    T = tensor_complexes(f.target, g.target)
    comps = {}
    for n in S.degrees:
        M = zeros(T.rank(n), S.rank(n))
        so = tensor_offsets(f.source, g.source, n)
        to = tensor_offsets(f.target, g.target, n)
        for i, c0 in so.items():
            if i not in to:
                continue
            blk = np.kron(f[i], g[n - i])
            M[to[i]:to[i] + blk.shape[0], c0:c0 + blk.shape[1]] = blk
        comps[n] = M
    return ChainMap(S, T, comps, check=False)


def tensor_basis(X: ChainComplex, Y: ChainComplex, n: int) -> list:
    """Basis labels ``(i, a, b)`` of ``(X (x) Y)_n`` in storage order."""
    out = []
    for i in tensor_offsets(X, Y, n):
        for a in range(X.rank(i)):
            for b in range(Y.rank(n - i)):
                out.append((i, a, b))
    return out


def tensor_index(X: ChainComplex, Y: ChainComplex, i: int, a: int, j: int, b: int) -> int:
    off = tensor_offsets(X, Y, i + j)
    return off[i] + a * Y.rank(j) + b


def unitor_right(X: ChainComplex) -> ChainMap:
    """``X (x) Z[0] -> X``; the identity matrix in the pinned basis order."""
    T = tensor_complexes(X, unit_complex(X.ring))
    return ChainMap(T, X, {n: identity(X.rank(n)) for n in X.degrees})


def unitor_left(X: ChainComplex) -> ChainMap:
    T = tensor_complexes(unit_complex(X.ring), X)
    return ChainMap(T, X, {n: identity(X.rank(n)) for n in X.degrees})


def associator(X: ChainComplex, Y: ChainComplex, Z: ChainComplex) -> ChainMap:
    """Permutation ``(X (x) Y) (x) Z -> X (x) (Y (x) Z)``."""
    XY = tensor_complexes(X, Y)
    YZ = tensor_complexes(Y, Z)
    S = tensor_complexes(XY, Z)
    T = tensor_complexes(X, YZ)
    comps = {}
    for n in S.degrees:
        M = zeros(T.rank(n), S.rank(n))
        for col, (k, u, c) in enumerate(tensor_basis(XY, Z, n)):
            i, a, b = tensor_basis(X, Y, k)[u]
            j = k - i
            w = tensor_index(Y, Z, j, b, n - k, c)
            M[tensor_index(X, YZ, i, a, n - i, w), col] = 1
        comps[n] = M
    return ChainMap(S, T, comps)


def symmetry(X: ChainComplex, Y: ChainComplex) -> ChainMap:
    """``x (x) y -> (-1)^{|x||y|} y (x) x``."""
    S = tensor_complexes(X, Y)
    T = tensor_complexes(Y, X)
    comps = {}
    for n in S.degrees:
        M = zeros(T.rank(n), S.rank(n))
        for col, (i, a, b) in enumerate(tensor_basis(X, Y, n)):
            j = n - i
            M[tensor_index(Y, X, j, b, i, a), col] = -1 if (i * j) % 2 else 1
        comps[n] = M
    return ChainMap(S, T, comps)


# ---------------------------------------------------------------------------
# hom complex


def hom_offsets(X: ChainComplex, Y: ChainComplex, n: int) -> dict:
    """Offsets of ``Hom(X_i, Y_{i+n})`` inside ``HOM(X, Y)_n``, keyed by ``i``."""
    out = {}
    pos = 0
    for i in X.degrees:
        r = X.rank(i) * Y.rank(i + n)
        if r:
            out[i] = pos
            pos += r
    return out


def _hom_range(X, Y):
    if X.is_zero() or Y.is_zero():
        return 0, -1
    return Y.min_deg - X.max_deg, Y.max_deg - X.min_deg


def hom_complex(X: ChainComplex, Y: ChainComplex) -> ChainComplex:
    """``HOM(X, Y)`` with ``(df) = d∘f - (-1)^{|f|} f∘d``."""
    ring = _common_ring([X, Y])
    lo, hi = _hom_range(X, Y)
    ranks = {n: sum(X.rank(i) * Y.rank(i + n) for i in X.degrees) for n in range(lo, hi + 1)}
    diffs = {}
    for n in range(lo + 1, hi + 1):
        D = zeros(ranks.get(n - 1, 0), ranks[n])
        src = hom_offsets(X, Y, n)
        tgt = hom_offsets(X, Y, n - 1)
        sgn = -1 if n % 2 else 1
        for i, c0 in src.items():
            rows, cols = Y.rank(i + n), X.rank(i)
            w = rows * cols
            # f_i : X_i -> Y_{i+n}; d_Y f_i lands in component i of degree n-1
            if i in tgt:
                blk = np.kron(Y.d(i + n), identity(cols))
                D[tgt[i]:tgt[i] + blk.shape[0], c0:c0 + w] += blk
            # f_i d_X lands in component i+1
            if i + 1 in tgt:
                blk = np.kron(identity(rows), X.d(i + 1).T)
                D[tgt[i + 1]:tgt[i + 1] + blk.shape[0], c0:c0 + w] -= sgn * blk
        diffs[n] = ring.reduce(D)
    return ChainComplex(ranks, diffs, ring=ring, nonneg=lo >= 0, min_deg=lo, max_deg=hi, check=False)


def hom_element(X: ChainComplex, Y: ChainComplex, n: int, blocks: dict) -> np.ndarray:
    """Vector in ``HOM(X, Y)_n`` from blocks ``{i: matrix Y_{i+n} x X_i}``."""
    off = hom_offsets(X, Y, n)
    total = sum(X.rank(i) * Y.rank(i + n) for i in X.degrees)
    v = zeros(total, 1)
    for i, M in blocks.items():
        if i in off:
            M = as_matrix(M)
            v[off[i]:off[i] + M.size, 0] = M.reshape(-1)
    return v[:, 0]


def hom_blocks(X: ChainComplex, Y: ChainComplex, n: int, v) -> dict:
    """Inverse of :func:`hom_element`."""
    out = {}
    for i, o in hom_offsets(X, Y, n).items():
        r, c = Y.rank(i + n), X.rank(i)
        out[i] = np.asarray(v[o:o + r * c], dtype=object).reshape(r, c)
    return out


def precompose_hom(f: ChainMap, Y: ChainComplex) -> ChainMap:
    """``f^* : HOM(B, Y) -> HOM(A, Y)`` for ``f : A -> B``."""
    A, B = f.source, f.target
    S = hom_complex(B, Y)
    T = hom_complex(A, Y)
    comps = {}
    for n in sorted(set(S.degrees) | set(T.degrees)):
        M = zeros(T.rank(n), S.rank(n))
        so, to = hom_offsets(B, Y, n), hom_offsets(A, Y, n)
        for i, c0 in so.items():
            if i not in to:
                continue
            blk = np.kron(identity(Y.rank(i + n)), f[i].T)
            M[to[i]:to[i] + blk.shape[0], c0:c0 + blk.shape[1]] = blk
        comps[n] = M
    return ChainMap(S, T, comps, check=False)


def postcompose_hom(X: ChainComplex, g: ChainMap) -> ChainMap:
    """``g_* : HOM(X, A) -> HOM(X, B)`` for ``g : A -> B``."""
    A, B = g.source, g.target
    S = hom_complex(X, A)
    T = hom_complex(X, B)
    comps = {}
    for n in sorted(set(S.degrees) | set(T.degrees)):
        M = zeros(T.rank(n), S.rank(n))
        so, to = hom_offsets(X, A, n), hom_offsets(X, B, n)
        for i, c0 in so.items():
            if i not in to:
                continue
            blk = np.kron(g[i + n], identity(X.rank(i)))
            M[to[i]:to[i] + blk.shape[0], c0:c0 + blk.shape[1]] = blk
        comps[n] = M
    return ChainMap(S, T, comps, check=False)


# ---------------------------------------------------------------------------
# chain maps as a group


@dataclass(frozen=True)
class ChainMapGroup:
    """The group ``Hom_Ch(X, Y)`` as a lattice inside the concatenated component space.

    ``layout`` lists ``(degree, offset, rows, cols)``; ``basis`` has one column
    per generator and ``retraction @ basis = I``.
    """

    source: ChainComplex
    target: ChainComplex
    layout: tuple
    basis: np.ndarray
    retraction: np.ndarray
    dim: int = field(default=0)

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    @property
    def invariants(self) -> AbelianGroupInvariants:
        return AbelianGroupInvariants(self.rank, ())

    def to_map(self, vec) -> ChainMap:
        vec = np.asarray(vec, dtype=object).reshape(-1)
        comps = {}
        for n, off, r, c in self.layout:
            comps[n] = vec[off:off + r * c].reshape(r, c)
        return ChainMap(self.source, self.target, comps, check=False)

    def from_map(self, f: ChainMap) -> np.ndarray:
        return map_vector(self.layout, f)

    def element(self, k: int) -> ChainMap:
        return self.to_map(self.basis[:, k])

    def coordinates(self, f: ChainMap) -> np.ndarray:
        v = self.from_map(f)
        c = self.retraction.dot(v) if self.rank else zeros(0, 1)[:, 0]
        if not np.array_equal(self.basis.dot(c) if self.rank else np.zeros_like(v), v):
            raise ComplexError("map is not a chain map between these complexes")
        return c


def map_layout(X: ChainComplex, Y: ChainComplex) -> tuple:
    out = []
    off = 0
    for n in X.degrees:
        r, c = Y.rank(n), X.rank(n)
        if r * c:
            out.append((n, off, r, c))
            off += r * c
    return tuple(out)


def map_vector(layout, f: ChainMap) -> np.ndarray:
    total = sum(r * c for _, _, r, c in layout)
    v = np.empty(total, dtype=object)
    v.fill(0)
    for n, off, r, c in layout:
        v[off:off + r * c] = f[n].reshape(-1)
    return v


def chain_map_constraints(X: ChainComplex, Y: ChainComplex):
    """Matrix whose kernel is the set of chain maps ``X -> Y`` in :func:`map_layout` coordinates."""
    layout = map_layout(X, Y)
    pos = {n: (off, r, c) for n, off, r, c in layout}
    total = sum(r * c for _, _, r, c in layout)
    blocks = []
    for n in range(X.min_deg, X.max_deg + 1):
        # d_Y F_n - F_{n-1} d_X : X_n -> Y_{n-1}
        rows = Y.rank(n - 1) * X.rank(n)
        if not rows:
            continue
        R = zeros(rows, total)
        if n in pos:
            off, r, c = pos[n]
            R[:, off:off + r * c] += np.kron(Y.d(n), identity(c))
        if n - 1 in pos:
            off, r, c = pos[n - 1]
            R[:, off:off + r * c] -= np.kron(identity(r), X.d(n).T)
        blocks.append(R)
    if blocks:
        return layout, np.concatenate(blocks, axis=0)
    return layout, zeros(0, total)


def chain_map_group(X: ChainComplex, Y: ChainComplex) -> ChainMapGroup:
    """``Hom_Ch(X, Y)`` computed as the kernel of the chain-map constraint system."""
    ring = _common_ring([X, Y])
    layout, R = chain_map_constraints(X, Y)
    K, L = kernel_with_retraction(R, ring)
    return ChainMapGroup(X, Y, layout, K, L, R.shape[1])


# ---------------------------------------------------------------------------
# truncation, cone, homology


def truncate_nonneg(X: ChainComplex) -> ChainComplex:
    """Good truncation: degree 0 becomes ``ker d_0``, negative degrees are dropped."""
    return truncation_with_inclusion(X)[0]


def truncation_with_inclusion(X: ChainComplex):
    """``(tau X, inclusion tau X -> X)``."""
    if X.max_deg < 0:
        T = zero_complex(X.ring)
        return T, ChainMap(T, X, {}, check=False)
    K, L = kernel_with_retraction(X.d(0), X.ring)
    ranks = {0: K.shape[1]}
    ranks.update({n: X.rank(n) for n in range(1, X.max_deg + 1)})
    diffs = {n: X.d(n) for n in range(2, X.max_deg + 1)}
    if X.max_deg >= 1:
        d1 = X.d(1)
        diffs[1] = X.ring.reduce(L.dot(d1)) if K.shape[1] else zeros(0, X.rank(1))
    T = ChainComplex(ranks, diffs, ring=X.ring, nonneg=True, min_deg=0, max_deg=X.max_deg)
    comps = {0: K}
    comps.update({n: identity(X.rank(n)) for n in range(1, X.max_deg + 1)})
    return T, ChainMap(T, X, comps)


def mapping_cone(f: ChainMap) -> ChainComplex:
    """``cone(f)_n = X_{n-1} (+) Y_n``, ``d(x, y) = (-dx, f x + dy)``."""
    X, Y = f.source, f.target
    lo = min(X.min_deg + 1, Y.min_deg)
    hi = max(X.max_deg + 1, Y.max_deg)
    ranks = {n: X.rank(n - 1) + Y.rank(n) for n in range(lo, hi + 1)}
    diffs = {}
    for n in range(lo + 1, hi + 1):
        top = np.concatenate([-X.d(n - 1), zeros(X.rank(n - 2), Y.rank(n))], axis=1)
        bot = np.concatenate([f[n - 1], Y.d(n)], axis=1)
        diffs[n] = f.ring.reduce(np.concatenate([top, bot], axis=0))
    return ChainComplex(ranks, diffs, ring=f.ring, nonneg=lo >= 0, min_deg=lo, max_deg=hi, check=False)


def homology(X: ChainComplex) -> dict:
    """``{n: AbelianGroupInvariants}``; over a prime field only the dimension (as free rank)."""
    ring = X.ring
    if ring.modulus and not ring.is_field:
        raise ComplexError(f"homology is not supported over composite modulus {ring}")
    out = {}
    for n in X.degrees:
        K, L = kernel_with_retraction(X.d(n), ring)
        img = ring.reduce(L.dot(X.d(n + 1))) if K.shape[1] else zeros(0, X.rank(n + 1))
        if ring.is_integers:
            out[n] = cokernel_invariants(img)
        else:
            out[n] = AbelianGroupInvariants(K.shape[1] - integer_rank(img, ring), ())
    return out


def is_acyclic(X: ChainComplex) -> bool:
    return all(h.is_zero for h in homology(X).values())


def homology_table(X: ChainComplex) -> dict:
    return {n: str(h) for n, h in homology(X).items()}


def homology_equal(H1: dict, H2: dict) -> bool:
    keys = set(H1) | set(H2)
    zero = AbelianGroupInvariants()
    return all(H1.get(k, zero) == H2.get(k, zero) for k in keys)


# ---------------------------------------------------------------------------
# pushout-product


@dataclass(frozen=True)
class PushoutProduct:
    pushout: ChainComplex
    map: ChainMap
    cokernel_ranks: dict


def _is_split_mono(f: ChainMap) -> bool:
    for n in f.source.degrees:
        M = f[n]
        if M.shape[1] == 0:
            continue
        inv = cokernel_invariants(M)
        if inv.torsion or inv.free_rank != M.shape[0] - M.shape[1]:
            return False
    return True


def pushout_product(i: ChainMap, k: ChainMap) -> PushoutProduct:
    """``(a (x) y) ⊔_{a (x) x} (b (x) x) -> b (x) y`` for degreewise split monos ``i : a -> b``, ``k : x -> y``."""
    if not i.ring.is_integers:
        raise ComplexError("pushout_product is implemented over Z")
    for name, f in (("i", i), ("k", k)):
        if not _is_split_mono(f):
            raise ComplexError(f"{name} is not a degreewise split monomorphism")
    a, b, x, y = i.source, i.target, k.source, k.target
    ax = tensor_complexes(a, x)
    ay = tensor_complexes(a, y)
    bx = tensor_complexes(b, x)
    by = tensor_complexes(b, y)
    one_k = tensor_maps(identity_map(a), k)   # a(x)x -> a(x)y
    i_one = tensor_maps(i, identity_map(x))   # a(x)x -> b(x)x
    i_y = tensor_maps(i, identity_map(y))     # a(x)y -> b(x)y
    b_k = tensor_maps(identity_map(b), k)     # b(x)x -> b(x)y
    lo = min(ay.min_deg, bx.min_deg, ax.min_deg)
    hi = max(ay.max_deg, bx.max_deg, ax.max_deg)
    sections, projections, ranks = {}, {}, {}
    for n in range(lo, hi + 1):
        M = np.concatenate([one_k[n], -i_one[n]], axis=0)  # a(x)x -> a(x)y (+) b(x)x
        U, D, _ = smith_normal_form(M)
        r = sum(1 for t in range(min(D.shape)) if D[t, t] != 0)
        if any(abs(D[t, t]) != 1 for t in range(r)):
            raise ComplexError(f"pushout is not free in degree {n}", n)
        Uinv = solve_linear(U, identity(U.shape[0]))
        sections[n] = Uinv[:, r:]
        projections[n] = U[r:, :]
        ranks[n] = M.shape[0] - r
    diffs = {}
    for n in range(lo + 1, hi + 1):
        dsum = block_diag(ay.d(n), bx.d(n))
        diffs[n] = projections[n - 1].dot(dsum).dot(sections[n])
    P = ChainComplex(ranks, diffs, min_deg=lo, max_deg=hi, nonneg=lo >= 0)
    comps = {}
    for n in range(lo, hi + 1):
        joint = np.concatenate([i_y[n], b_k[n]], axis=1)
        comps[n] = joint.dot(sections[n])
    f = ChainMap(P, by, comps)
    coker = {}
    for n in by.degrees:
        coker[n] = by.rank(n) - integer_rank(f[n]) if f[n].size else by.rank(n)
    return PushoutProduct(P, f, coker)


# ---------------------------------------------------------------------------
# JSON


def complex_to_json(X: ChainComplex) -> dict:
    return {
        "ring": str(X.ring),
        "degrees": [{"deg": n, "rank": X.rank(n)} for n in X.degrees],
        "differentials": [{"deg": n, "matrix": matrix_to_json(X.d(n), X.ring)}
                          for n in range(X.min_deg + 1, X.max_deg + 1)
                          if X.d(n).size],
    }


def complex_from_json(doc: dict) -> ChainComplex:
    try:
        ring = Ring.parse(doc["ring"])
        degs = doc["degrees"]
        ranks = {int(e["deg"]): int(e["rank"]) for e in degs}
        diffs = {}
        for e in doc.get("differentials", []):
            M, r = matrix_from_json(e["matrix"])
            if r != ring:
                raise ComplexError(f"differential ring {r} differs from complex ring {ring}", int(e["deg"]))
            diffs[int(e["deg"])] = M
    except (KeyError, TypeError) as exc:
        raise ComplexError(f"malformed complex document: missing or bad field {exc}") from None
    for n, r in ranks.items():
        if r < 0:
            raise ComplexError(f"negative rank in degree {n}", n)
    lo = min(ranks) if ranks else 0
    hi = max(ranks) if ranks else -1
    for n, M in diffs.items():
        if M.shape != (ranks.get(n - 1, 0), ranks.get(n, 0)):
            raise ComplexError(f"differential shape mismatch in degree {n}", n)
    return ChainComplex(ranks, diffs, ring=ring, nonneg=lo >= 0, min_deg=lo, max_deg=hi)


def map_to_json(f: ChainMap) -> dict:
    return {
        "ring": str(f.ring),
        "source": complex_to_json(f.source),
        "target": complex_to_json(f.target),
        "components": [{"deg": n, "matrix": matrix_to_json(f[n], f.ring)} for n in f.degrees if f[n].size],
    }


def map_from_json(doc: dict) -> ChainMap:
    try:
        S = complex_from_json(doc["source"])
        T = complex_from_json(doc["target"])
        comps = {int(e["deg"]): matrix_from_json(e["matrix"])[0] for e in doc["components"]}
    except (KeyError, TypeError) as exc:
        raise ComplexError(f"malformed map document: missing or bad field {exc}") from None
    return ChainMap(S, T, comps)
