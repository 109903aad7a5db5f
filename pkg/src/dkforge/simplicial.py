"""Simplicial modules with exact structure maps, and normalization.

A simplicial operator ``alpha : [m] -> [n]`` is a nondecreasing tuple of
length ``m + 1`` with values in ``0..n``; the module sends it to a matrix
``A(alpha) : A_n -> A_m``.  Faces are ``d_i = A(delta_i)`` and degeneracies
``s_j = A(sigma_j)``.

Normalization uses ``N(A)_n = ∩_{i=1..n} ker d_i`` with differential ``d_0``.
For modules whose degeneracies send basis vectors to basis vectors (Γ of a
complex, free modules on simplicial sets, and tensor products of those) the
normalized basis is read off the nondegenerate basis vectors through the
projector ``P = (1 - s_0 d_1)(1 - s_1 d_2)...(1 - s_{n-1} d_n)``, which fixes
``N_n``, kills degenerate elements and is congruent to the identity modulo
them.  Other modules fall back to an explicit kernel computation.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .chain import ChainComplex, ChainMap
from .linalg import ZZ, Ring, as_matrix, identity, kernel_with_retraction, matrix_from_json, matrix_to_json, zeros


class LevelBoundError(ValueError):
    """A computation asked for a level above the module's level bound."""


class SimplicialError(ValueError):
    pass


# ---------------------------------------------------------------------------
# simplicial operators


def coface(i: int, n: int) -> tuple:
    """``delta_i : [n-1] -> [n]``, skipping ``i``."""
    return tuple(v if v < i else v + 1 for v in range(n))


def codegeneracy(j: int, n: int) -> tuple:
    """``sigma_j : [n+1] -> [n]``, hitting ``j`` twice."""
    return tuple(v if v <= j else v - 1 for v in range(n + 2))


def compose_ops(beta: tuple, alpha: tuple) -> tuple:
    """``beta ∘ alpha``."""
    return tuple(beta[a] for a in alpha)


def is_monotone(alpha) -> bool:
    return all(a <= b for a, b in zip(alpha, alpha[1:]))


def epi_mono(alpha: tuple):
    """Factor ``alpha = mu ∘ eta`` with ``eta`` surjective and ``mu`` injective."""
    image = sorted(set(alpha))
    where = {v: k for k, v in enumerate(image)}
    return tuple(where[a] for a in alpha), tuple(image)


@lru_cache(maxsize=None)
def monotone_maps(m: int, n: int) -> tuple:
    """All monotone ``[m] -> [n]``, lexicographic on value sequences."""
    return tuple(itertools.combinations_with_replacement(range(n + 1), m + 1))


@lru_cache(maxsize=None)
def surjections(n: int) -> tuple:
    """All monotone surjections out of ``[n]`` (onto any ``[k]``), lexicographic."""
    out = []
    for steps in itertools.product((0, 1), repeat=n):
        seq = [0]
        for s in steps:
            seq.append(seq[-1] + s)
        out.append(tuple(seq))
    return tuple(out)


def surjection_count(n: int, k: int) -> int:
    from math import comb

    return comb(n, k) if 0 <= k <= n else 0


def _repeat_positions(eta: tuple) -> tuple:
    return tuple(j for j in range(len(eta) - 1) if eta[j] == eta[j + 1])


def _check_alpha(alpha, n):
    alpha = tuple(int(a) for a in alpha)
    if not alpha or not is_monotone(alpha) or alpha[0] < 0 or alpha[-1] > n:
        raise SimplicialError(f"{alpha} is not a monotone map into [{n}]")
    return alpha


# ---------------------------------------------------------------------------
# base class


class SimplicialModule:
    """Levelwise free simplicial module.

    Subclasses implement ``rank`` and ``_structure_map``.  ``level_bound`` is
    ``None`` for modules defined at every level; ``normal_bound`` is a degree
    above which the normalization is known to vanish (``None`` if unknown).
    """

    ring: Ring = ZZ
    level_bound: int | None = None
    normal_bound: int | None = None

    def __init__(self):
        self._lock = threading.RLock()
        self._cache = {}

    def _cached(self, key, fn):
        with self._lock:
            if key not in self._cache:
                self._cache[key] = fn()
            return self._cache[key]

    def check_level(self, n: int):
        if n < 0:
            raise SimplicialError(f"negative level {n}")
        if self.level_bound is not None and n > self.level_bound:
            raise LevelBoundError(f"level {n} exceeds the level bound {self.level_bound}")

    def rank(self, n: int) -> int:
        raise NotImplementedError

    def structure_map(self, alpha, n: int) -> np.ndarray:
        """Matrix of ``A(alpha) : A_n -> A_m`` for ``alpha : [m] -> [n]``."""
        alpha = _check_alpha(alpha, n)
        self.check_level(n)
        self.check_level(len(alpha) - 1)
        return self._cached(("op", alpha, n), lambda: self._structure_map(alpha, n))

    def _structure_map(self, alpha: tuple, n: int) -> np.ndarray:
        return generic_structure_map(self, alpha, n)

    def face(self, i: int, n: int) -> np.ndarray:
        """``d_i : A_n -> A_{n-1}``."""
        if not 0 <= i <= n or n < 1:
            raise SimplicialError(f"face d_{i} undefined on level {n}")
        return self.structure_map(coface(i, n), n)

    def degeneracy(self, j: int, n: int) -> np.ndarray:
        """``s_j : A_n -> A_{n+1}``."""
        if not 0 <= j <= n:
            raise SimplicialError(f"degeneracy s_{j} undefined on level {n}")
        return self.structure_map(codegeneracy(j, n), n)

    def degeneracy_sets(self, n: int):
        """Per basis vector, a bitmask of ``j`` with the vector in ``s_j`` of a basis vector.

        ``None`` when degeneracies do not act on the basis by basis vectors.
        """
        return None


def generic_structure_map(A: SimplicialModule, alpha: tuple, n: int) -> np.ndarray:
    """``A(alpha)`` from faces and degeneracies via the epi-mono factorization."""
    eta, mu = epi_mono(alpha)
    k = len(mu) - 1
    M = identity(A.rank(n))
    missing = sorted(set(range(n + 1)) - set(mu), reverse=True)
    level = n
    for i in missing:
        M = A.face(i, level).dot(M)
        level -= 1
    for j in _repeat_positions(eta):
        M = A.degeneracy(j, level).dot(M)
        level += 1
    assert level == len(alpha) - 1 and k <= level
    return A.ring.reduce(M)


# ---------------------------------------------------------------------------
# concrete modules


class GammaModule(SimplicialModule):
    """``Γ(C)_n = (+)_{eta : [n] ->> [k]} C_k`` for a non-negatively graded complex ``C``."""

    def __init__(self, C: ChainComplex):
        super().__init__()
        if C.min_deg < 0 and any(C.rank(n) for n in range(C.min_deg, 0)):
            raise SimplicialError("Γ needs a non-negatively graded complex")
        self.complex = C
        self.ring = C.ring
        self.level_bound = None
        self.normal_bound = max(C.max_deg, 0)

    def summands(self, n: int):
        """``[(eta, k, offset)]`` for summands with nonzero rank, in basis order."""
        def build():
            out, pos = [], 0
            for eta in surjections(n):
                k = eta[-1]
                r = self.complex.rank(k)
                if r:
                    out.append((eta, k, pos))
                    pos += r
            return out, pos
        return self._cached(("summands", n), build)[0]

    def rank(self, n: int) -> int:
        self.check_level(n)
        return sum(surjection_count(n, k) * self.complex.rank(k) for k in range(0, n + 1))

    def summand_offset(self, n: int, eta: tuple):
        for e, k, off in self.summands(n):
            if e == eta:
                return off
        return None

    def _structure_map(self, alpha, n):
        m = len(alpha) - 1
        C = self.complex
        M = zeros(self.rank(m), self.rank(n))
        for eta, k, off in self.summands(n):
            comp = compose_ops(eta, alpha)
            eta2, mu = epi_mono(comp)
            j = len(mu) - 1
            if j == k:
                blk = identity(C.rank(k))
            elif j == k - 1 and mu[0] == 1:
                blk = C.d(k)
            else:
                continue
            if blk.shape[0] == 0:
                continue
            toff = self.summand_offset(m, eta2)
            M[toff:toff + blk.shape[0], off:off + blk.shape[1]] = blk
        return M

    def degeneracy_sets(self, n):
        out = []
        for eta, k, _ in self.summands(n):
            mask = 0
            for j in _repeat_positions(eta):
                mask |= 1 << j
            out.extend([mask] * self.complex.rank(k))
        return out

    def __repr__(self):
        return f"Γ({self.complex!r})"


class StandardSimplexModule(SimplicialModule):
    """``RΔ^N``: level ``m`` is free on the monotone maps ``[m] -> [N]``."""

    def __init__(self, N: int, ring: Ring = ZZ, level_bound: int | None = None):
        super().__init__()
        self.N = N
        self.ring = ring
        self.level_bound = level_bound
        self.normal_bound = N

    def rank(self, m: int) -> int:
        self.check_level(m)
        return len(monotone_maps(m, self.N))

    def index(self, m: int):
        return self._cached(("index", m), lambda: {f: i for i, f in enumerate(monotone_maps(m, self.N))})

    def _structure_map(self, alpha, n):
        m = len(alpha) - 1
        M = zeros(self.rank(m), self.rank(n))
        idx = self.index(m)
        for col, f in enumerate(monotone_maps(n, self.N)):
            M[idx[compose_ops(f, alpha)], col] = 1
        return M

    def degeneracy_sets(self, n):
        out = []
        for f in monotone_maps(n, self.N):
            mask = 0
            for j in _repeat_positions(f):
                mask |= 1 << j
            out.append(mask)
        return out

    def pushforward(self, beta: tuple, m: int) -> np.ndarray:
        """Level ``m`` of the map ``RΔ^k -> RΔ^N`` induced by ``beta : [k] -> [N]``: ``f -> beta ∘ f``."""
        k = len(beta) - 1
        src = monotone_maps(m, k)
        idx = self.index(m)
        M = zeros(self.rank(m), len(src))
        for col, f in enumerate(src):
            M[idx[compose_ops(beta, f)], col] = 1
        return M

    def __repr__(self):
        return f"RΔ^{self.N}"


def standard_simplex_module(n: int, up_to: int | None = None, ring: Ring = ZZ) -> StandardSimplexModule:
    return StandardSimplexModule(n, ring, up_to)


def constant_module(ring: Ring = ZZ) -> StandardSimplexModule:
    """``c(R)``, realized as ``RΔ^0``."""
    return StandardSimplexModule(0, ring)


class TensorModule(SimplicialModule):
    """Levelwise tensor product; structure maps are Kronecker products."""

    def __init__(self, A: SimplicialModule, B: SimplicialModule, level_bound: int | None = None):
        super().__init__()
        if A.ring != B.ring:
            raise SimplicialError("ring mismatch")
        self.left, self.right = A, B
        self.ring = A.ring
        bounds = [b for b in (A.level_bound, B.level_bound, level_bound) if b is not None]
        self.level_bound = min(bounds) if bounds else None
        if level_bound is not None:
            for X in (A, B):
                if X.level_bound is not None and X.level_bound < level_bound:
                    raise LevelBoundError(f"factor level bound {X.level_bound} below requested {level_bound}")
        if A.normal_bound is not None and B.normal_bound is not None:
            self.normal_bound = A.normal_bound + B.normal_bound
        else:
            self.normal_bound = None

    def rank(self, n):
        self.check_level(n)
        return self.left.rank(n) * self.right.rank(n)

    def _structure_map(self, alpha, n):
        return np.kron(self.left.structure_map(alpha, n), self.right.structure_map(alpha, n))

    def degeneracy_sets(self, n):
        a = self.left.degeneracy_sets(n)
        b = self.right.degeneracy_sets(n)
        if a is None or b is None:
            return None
        return [x & y for x in a for y in b]

    def __repr__(self):
        return f"({self.left!r} ⊗ {self.right!r})"


def tensor_levelwise(A: SimplicialModule, B: SimplicialModule, up_to: int | None = None) -> TensorModule:
    return TensorModule(A, B, up_to)


class LevelwiseModule(SimplicialModule):
    """Explicit faces and degeneracies up to ``level_bound``.

    ``faces[n][i] : A_n -> A_{n-1}`` for ``1 <= n <= L`` and
    ``degeneracies[n][j] : A_n -> A_{n+1}`` for ``0 <= n < L``.
    """

    def __init__(self, ranks, faces, degeneracies, ring: Ring = ZZ, certificate: dict | None = None,
                 normal_bound: int | None = None, check: bool = True):
        super().__init__()
        self.ring = ring
        self._ranks = [int(r) for r in ranks]
        self.level_bound = len(self._ranks) - 1
        self._faces = {}
        self._degens = {}
        L = self.level_bound
        for n in range(1, L + 1):
            for i in range(n + 1):
                self._faces[(i, n)] = ring.reduce(as_matrix(faces[n][i], self._ranks[n - 1], self._ranks[n]))
        for n in range(L):
            for j in range(n + 1):
                self._degens[(j, n)] = ring.reduce(as_matrix(degeneracies[n][j], self._ranks[n + 1], self._ranks[n]))
        self.normal_bound = normal_bound
        self.certificate = dict(certificate or {"level_bound": L})
        if check:
            problems = check_simplicial_identities(self)
            if problems:
                raise SimplicialError(problems[0])

    def rank(self, n):
        self.check_level(n)
        return self._ranks[n]

    def face(self, i, n):
        self.check_level(n)
        if (i, n) not in self._faces:
            raise SimplicialError(f"face d_{i} undefined on level {n}")
        return self._faces[(i, n)]

    def degeneracy(self, j, n):
        self.check_level(n + 1)
        if (j, n) not in self._degens:
            raise SimplicialError(f"degeneracy s_{j} undefined on level {n}")
        return self._degens[(j, n)]

    def _structure_map(self, alpha, n):
        return generic_structure_map(self, alpha, n)


def materialize(A: SimplicialModule, up_to: int, certificate: dict | None = None) -> LevelwiseModule:
    """Explicit levelwise copy of ``A`` through level ``up_to``."""
    faces = {n: [A.face(i, n) for i in range(n + 1)] for n in range(1, up_to + 1)}
    degens = {n: [A.degeneracy(j, n) for j in range(n + 1)] for n in range(up_to)}
    cert = {"level_bound": up_to}
    if A.normal_bound is not None:
        cert["normal_bound"] = A.normal_bound
    cert.update(certificate or {})
    nb = A.normal_bound if A.normal_bound is not None and A.normal_bound <= up_to else None
    return LevelwiseModule([A.rank(n) for n in range(up_to + 1)], faces, degens, A.ring, cert, nb, check=False)


def check_simplicial_identities(A: SimplicialModule, up_to: int | None = None) -> list:
    """All violated simplicial identities up to the given level (empty list when valid)."""
    L = A.level_bound if up_to is None else up_to
    if L is None:
        raise LevelBoundError("a level must be given for modules without a level bound")
    red = A.ring.reduce
    bad = []
    for n in range(2, L + 1):
        for j in range(n + 1):
            for i in range(j):
                if not np.array_equal(red(A.face(i, n - 1).dot(A.face(j, n))), red(A.face(j - 1, n - 1).dot(A.face(i, n)))):
                    bad.append(f"d_{i} d_{j} != d_{j - 1} d_{i} on level {n}")
    for n in range(0, L - 1):
        for j in range(n + 1):
            for i in range(j + 1):
                if not np.array_equal(red(A.degeneracy(i, n + 1).dot(A.degeneracy(j, n))),
                                      red(A.degeneracy(j + 1, n + 1).dot(A.degeneracy(i, n)))):
                    bad.append(f"s_{i} s_{j} != s_{j + 1} s_{i} on level {n}")
    for n in range(0, L):
        Id = identity(A.rank(n))
        for j in range(n + 1):
            s = A.degeneracy(j, n)
            for i in range(n + 2):
                lhs = red(A.face(i, n + 1).dot(s))
                if i < j:
                    rhs = red(A.degeneracy(j - 1, n - 1).dot(A.face(i, n))) if n >= 1 else None
                elif i in (j, j + 1):
                    rhs = Id
                else:
                    rhs = red(A.degeneracy(j, n - 1).dot(A.face(i - 1, n))) if n >= 1 else None
                if rhs is not None and not np.array_equal(lhs, rhs):
                    bad.append(f"d_{i} s_{j} identity fails on level {n}")
    return bad


# ---------------------------------------------------------------------------
# maps


class SimplicialMap:
    """Levelwise components ``f_n : A_n -> B_n`` for ``n <= up_to``."""

    def __init__(self, source: SimplicialModule, target: SimplicialModule, components: dict, up_to: int,
                 check: bool = False):
        self.source = source
        self.target = target
        self.up_to = up_to
        self._comps = {}
        for n in range(up_to + 1):
            M = components.get(n)
            if M is None:
                M = zeros(target.rank(n), source.rank(n))
            M = as_matrix(M, target.rank(n), source.rank(n))
            self._comps[n] = source.ring.reduce(M)
        if check:
            problems = check_simplicial_map(self)
            if problems:
                raise SimplicialError(problems[0])

    @property
    def ring(self):
        return self.source.ring

    def __getitem__(self, n):
        if n > self.up_to:
            raise LevelBoundError(f"map known only up to level {self.up_to}")
        return self._comps[n]

    def __matmul__(self, other: "SimplicialMap") -> "SimplicialMap":
        up = min(self.up_to, other.up_to)
        return SimplicialMap(other.source, self.target,
                             {n: self.ring.reduce(self[n].dot(other[n])) for n in range(up + 1)}, up)

    def __eq__(self, other):
        if not isinstance(other, SimplicialMap) or self.up_to != other.up_to:
            return False
        return all(np.array_equal(self[n], other[n]) for n in range(self.up_to + 1))

    __hash__ = None


def identity_simplicial_map(A: SimplicialModule, up_to: int) -> SimplicialMap:
    return SimplicialMap(A, A, {n: identity(A.rank(n)) for n in range(up_to + 1)}, up_to)


def check_simplicial_map(f: SimplicialMap) -> list:
    A, B = f.source, f.target
    red = f.ring.reduce
    bad = []
    for n in range(1, f.up_to + 1):
        for i in range(n + 1):
            if not np.array_equal(red(B.face(i, n).dot(f[n])), red(f[n - 1].dot(A.face(i, n)))):
                bad.append(f"map does not commute with d_{i} on level {n}")
    for n in range(f.up_to):
        for j in range(n + 1):
            if not np.array_equal(red(B.degeneracy(j, n).dot(f[n])), red(f[n + 1].dot(A.degeneracy(j, n)))):
                bad.append(f"map does not commute with s_{j} on level {n}")
    return bad


def eval_structure_map(A: SimplicialModule, alpha, n: int) -> np.ndarray:
    return A.structure_map(alpha, n)


# ---------------------------------------------------------------------------
# normalization


@dataclass(frozen=True)
class NormalizedLevel:
    """``inclusion : N_n -> A_n`` and ``projection : A_n -> N_n`` with ``projection ∘ inclusion = 1``."""

    inclusion: np.ndarray
    projection: np.ndarray

    @property
    def rank(self) -> int:
        return self.inclusion.shape[1]


def _projector_columns(A, n, X):
    """``P X`` for ``P = (1 - s_0 d_1) ... (1 - s_{n-1} d_n)``."""
    red = A.ring.reduce
    for j in range(n, 0, -1):
        X = red(X - A.degeneracy(j - 1, n - 1).dot(A.face(j, n).dot(X)))
    return X


def _projector_rows(A, n, R):
    """``R P``."""
    red = A.ring.reduce
    for j in range(1, n + 1):
        R = red(R - R.dot(A.degeneracy(j - 1, n - 1)).dot(A.face(j, n)))
    return R


def normalized_level(A: SimplicialModule, n: int, method: str = "auto") -> NormalizedLevel:
    """Basis data for ``N(A)_n``; ``method`` is ``"auto"``, ``"basis"`` or ``"kernel"``."""
    A.check_level(n)

    def build():
        r = A.rank(n)
        if n == 0:
            return NormalizedLevel(identity(r), identity(r))
        sets = A.degeneracy_sets(n) if method in ("auto", "basis") else None
        if method == "basis" and sets is None:
            raise SimplicialError("module has no basis-compatible degeneracies")
        if sets is not None:
            nondeg = [e for e, s in enumerate(sets) if s == 0]
            E = identity(r)
            inc = _projector_columns(A, n, E[:, nondeg])
            proj = _projector_rows(A, n, E[nondeg, :])
            return NormalizedLevel(inc, proj)
        faces = [A.face(i, n) for i in range(1, n + 1)]
        stacked = np.concatenate(faces, axis=0)
        K, L = kernel_with_retraction(stacked, A.ring)
        proj = _projector_rows(A, n, L) if L.shape[0] else zeros(0, r)
        return NormalizedLevel(K, proj)

    return A._cached(("normalized", n, method), build)


@dataclass(frozen=True)
class Normalization:
    complex: ChainComplex
    levels: dict  # n -> NormalizedLevel

    def inclusion(self, n):
        return self.levels[n].inclusion

    def projection(self, n):
        return self.levels[n].projection


def normalization(A: SimplicialModule, up_to: int | None = None, method: str = "auto") -> Normalization:
    """``N(A)`` through degree ``up_to`` (defaults to the module's normal bound)."""
    if up_to is None:
        up_to = A.normal_bound if A.normal_bound is not None else A.level_bound
        if up_to is None:
            raise LevelBoundError("normalization needs an explicit degree bound")
    A.check_level(up_to)

    def build():
        levels = {n: normalized_level(A, n, method) for n in range(up_to + 1)}
        ranks = {n: levels[n].rank for n in range(up_to + 1)}
        diffs = {}
        for n in range(1, up_to + 1):
            diffs[n] = A.ring.reduce(levels[n - 1].projection.dot(A.face(0, n)).dot(levels[n].inclusion))
        C = ChainComplex(ranks, diffs, ring=A.ring, nonneg=True, min_deg=0, max_deg=up_to, check=False)
        return Normalization(C, levels)

    return A._cached(("normalization", up_to, method), build)


def normalize(A: SimplicialModule, up_to: int | None = None, method: str = "auto") -> ChainComplex:
    return normalization(A, up_to, method).complex


def normalize_map(f: SimplicialMap, up_to: int | None = None) -> ChainMap:
    """``N(f)_n = proj_B ∘ f_n ∘ incl_A``."""
    up = f.up_to if up_to is None else up_to
    NA = normalization(f.source, up)
    NB = normalization(f.target, up)
    comps = {n: f.ring.reduce(NB.projection(n).dot(f[n]).dot(NA.inclusion(n))) for n in range(up + 1)}
    return ChainMap(NA.complex, NB.complex, comps, check=False)


def degenerate_quotient_ranks(A: SimplicialModule, up_to: int) -> dict:
    """Ranks of ``A_n / D_n`` with ``D_n`` the span of all degeneracy images (cross-check of ``N``)."""
    from .linalg import integer_rank

    out = {0: A.rank(0)}
    for n in range(1, up_to + 1):
        imgs = [A.degeneracy(j, n - 1) for j in range(n)]
        stacked = np.concatenate(imgs, axis=1) if imgs else zeros(A.rank(n), 0)
        out[n] = A.rank(n) - integer_rank(stacked, A.ring)
    return out


# ---------------------------------------------------------------------------
# JSON


def module_to_json(A: SimplicialModule, up_to: int | None = None) -> dict:
    from .chain import complex_to_json

    if isinstance(A, GammaModule) and up_to is None:
        return {"presentation": "gamma", "complex": complex_to_json(A.complex)}
    L = up_to if up_to is not None else A.level_bound
    if L is None:
        raise LevelBoundError("a level bound is needed to serialize this module")
    return {
        "presentation": "levelwise",
        "ring": str(A.ring),
        "level_bound": L,
        "levels": [{"level": n, "rank": A.rank(n)} for n in range(L + 1)],
        "faces": [{"level": n, "index": i, "matrix": matrix_to_json(A.face(i, n), A.ring)}
                  for n in range(1, L + 1) for i in range(n + 1)],
        "degeneracies": [{"level": n, "index": j, "matrix": matrix_to_json(A.degeneracy(j, n), A.ring)}
                         for n in range(L) for j in range(n + 1)],
    }


def module_from_json(doc: dict) -> SimplicialModule:
    from .chain import complex_from_json

    kind = doc.get("presentation")
    if kind == "gamma":
        return GammaModule(complex_from_json(doc["complex"]))
    if kind != "levelwise":
        raise SimplicialError(f"unknown presentation {kind!r}")
    try:
        ring = Ring.parse(doc["ring"])
        L = int(doc["level_bound"])
        ranks = [0] * (L + 1)
        for e in doc["levels"]:
            ranks[int(e["level"])] = int(e["rank"])
        faces = {n: [None] * (n + 1) for n in range(1, L + 1)}
        degens = {n: [None] * (n + 1) for n in range(L)}
        for e in doc["faces"]:
            faces[int(e["level"])][int(e["index"])] = matrix_from_json(e["matrix"])[0]
        for e in doc["degeneracies"]:
            degens[int(e["level"])][int(e["index"])] = matrix_from_json(e["matrix"])[0]
    except (KeyError, TypeError, IndexError) as exc:
        raise SimplicialError(f"malformed simplicial module document: {exc}") from None
    for n, fs in faces.items():
        if any(M is None for M in fs):
            raise SimplicialError(f"missing face map on level {n}")
    for n, ss in degens.items():
        if any(M is None for M in ss):
            raise SimplicialError(f"missing degeneracy map on level {n}")
    return LevelwiseModule(ranks, faces, degens, ring)
