"""The Dold–Kan equivalence between Ch≥0 and simplicial modules.

``gamma`` builds Γ(C); ``epsilon_iso`` is the natural isomorphism
``ε : NΓ(C) -> C`` obtained by projecting the normalized chains onto the
summand indexed by the identity surjection.  ``transport_hom`` computes both
hom groups of the equivalence independently and compares them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import (
    ChainComplex,
    ChainMap,
    chain_map_group,
    inverse_map,
    is_isomorphism,
)
from .linalg import (
    AbelianGroupInvariants,
    identity,
    is_unimodular,
    kernel_with_retraction,
    zeros,
)
from .simplicial import (
    GammaModule,
    SimplicialError,
    SimplicialMap,
    SimplicialModule,
    StandardSimplexModule,
    monotone_maps,
    normalization,
    normalize_map,
    surjections,
)


def gamma(C: ChainComplex) -> GammaModule:
    if any(C.rank(n) for n in range(C.min_deg, 0)):
        raise SimplicialError("Γ needs a non-negatively graded complex")
    return GammaModule(C)


def gamma_map(f: ChainMap, up_to: int) -> SimplicialMap:
    """``Γ(f)``: block diagonal over the surjection-indexed summands."""
    A, B = gamma(f.source), gamma(f.target)
    comps = {}
    for n in range(up_to + 1):
        M = zeros(B.rank(n), A.rank(n))
        for eta in surjections(n):
            k = eta[-1]
            so, to = A.summand_offset(n, eta), B.summand_offset(n, eta)
            if so is None or to is None:
                continue
            blk = f[k]
            M[to:to + blk.shape[0], so:so + blk.shape[1]] = blk
        comps[n] = M
    return SimplicialMap(A, B, comps, up_to)


def epsilon_map(C: ChainComplex, method: str = "auto") -> ChainMap:
    """``ε : NΓ(C) -> C``: inclusion into Γ(C) followed by projection onto the ``eta = id`` summand."""
    G = gamma(C)
    top = max(C.max_deg, 0)
    Nrm = normalization(G, top, method)
    comps = {}
    for n in range(top + 1):
        off = G.summand_offset(n, tuple(range(n + 1)))
        r = C.rank(n)
        if r == 0 or off is None:
            comps[n] = zeros(r, Nrm.complex.rank(n))
            continue
        comps[n] = Nrm.inclusion(n)[off:off + r, :]
    return ChainMap(Nrm.complex, C, comps)


def epsilon_iso(C: ChainComplex, method: str = "auto") -> ChainMap:
    """ε, verified to be a chain isomorphism (a failure is an internal defect)."""
    eps = epsilon_map(C, method)
    if not is_isomorphism(eps):
        raise ArithmeticError("ε: NΓ(C) -> C failed the invertibility check")
    return eps


def epsilon_inverse(C: ChainComplex, method: str = "auto") -> ChainMap:
    return inverse_map(epsilon_iso(C, method))


def homotopy_groups(A: SimplicialModule, up_to: int | None = None) -> dict:
    """``π_n(A) := H_n(N A)``."""
    from .chain import homology

    return homology(normalization(A, up_to).complex)


# ---------------------------------------------------------------------------
# maps into and out of Γ


def extend_from_gamma(E: ChainComplex, Y: SimplicialModule, g: ChainMap, up_to: int) -> SimplicialMap:
    """The simplicial map ``Γ(E) -> Y`` whose normalization is ``g ∘ ε`` for ``g : E -> N(Y)``.

    On the summand ``(eta, e)`` it is ``Y(eta)(incl(g(e)))``.
    """
    G = gamma(E)
    NY = normalization(Y, max(E.max_deg, 0))
    comps = {}
    for n in range(up_to + 1):
        M = zeros(Y.rank(n), G.rank(n))
        for eta, k, off in G.summands(n):
            lifted = NY.inclusion(k).dot(g[k])
            blk = Y.structure_map(eta, k).dot(lifted)
            M[:, off:off + E.rank(k)] = blk
        comps[n] = Y.ring.reduce(M)
    return SimplicialMap(G, Y, comps, up_to)


@dataclass(frozen=True)
class GammaYoneda:
    """``Φ_n : Γ(E)_n -> Hom_Ch(N(RΔ^n), E)`` in chain-map-group coordinates, with its inverse."""

    n: int
    group: object  # ChainMapGroup of N(RΔ^n) -> E
    matrix: np.ndarray
    inverse: np.ndarray


def gamma_yoneda(E: ChainComplex, n: int) -> GammaYoneda:
    """``Φ_n(x) = ε ∘ N(x̂)`` where ``x̂ : RΔ^n -> Γ(E)`` sends ``alpha`` to ``Γ(E)(alpha) x``."""
    from .linalg import solve_linear

    G = gamma(E)
    R = StandardSimplexModule(n)
    top = min(n, max(E.max_deg, 0) + 1)
    NR = normalization(R, n)
    from .chain import brutal_truncation

    S = brutal_truncation(NR.complex, top)
    grp = chain_map_group(S, E)
    eps = epsilon_iso(E)
    NG = normalization(G, max(E.max_deg, 0))
    cols = []
    for x in range(G.rank(n)):
        comps = {}
        for m in range(min(top, max(E.max_deg, 0)) + 1):
            alphas = monotone_maps(m, n)
            xhat = np.stack([G.structure_map(a, n)[:, x] for a in alphas], axis=1)
            comps[m] = eps[m].dot(NG.projection(m)).dot(xhat).dot(NR.inclusion(m))
        f = ChainMap(S, E, comps, check=False)
        cols.append(grp.coordinates(f))
    M = np.stack(cols, axis=1) if cols else zeros(grp.rank, 0)
    if M.shape[0] != M.shape[1] or not is_unimodular(M):
        raise ArithmeticError(f"Γ(E)_{n} -> Hom(N(RΔ^{n}), E) is not an isomorphism")
    inv = solve_linear(M, identity(M.shape[0]))
    return GammaYoneda(n, grp, M, inv)


def lift_to_gamma(X: SimplicialModule, E: ChainComplex, g: ChainMap, up_to: int) -> SimplicialMap:
    """The simplicial map ``X -> Γ(E)`` whose normalization is ``ε^{-1} ∘ g`` for ``g : N(X) -> E``.

    Level ``n`` sends ``x`` to ``Φ_n^{-1}(g ∘ N(x̂))``.
    """
    G = gamma(E)
    comps = {}
    for n in range(up_to + 1):
        Y = gamma_yoneda(E, n)
        S = Y.group.source
        top = S.max_deg
        NR = normalization(StandardSimplexModule(n), n)
        NX = normalization(X, min(top, up_to) if top >= 0 else 0)
        M = zeros(G.rank(n), X.rank(n))
        for x in range(X.rank(n)):
            comps_x = {}
            for m in range(top + 1):
                alphas = monotone_maps(m, n)
                xhat = np.stack([X.structure_map(a, n)[:, x] for a in alphas], axis=1)
                comps_x[m] = g[m].dot(NX.projection(m)).dot(xhat).dot(NR.inclusion(m))
            f = ChainMap(S, E, comps_x, check=False)
            M[:, x] = Y.inverse.dot(Y.group.coordinates(f))
        comps[n] = M
    return SimplicialMap(X, G, comps, up_to)


# ---------------------------------------------------------------------------
# hom-set transport


def simplicial_hom_constraints(A: SimplicialModule, B: SimplicialModule, level: int):
    """Linear system whose kernel is the group of simplicial maps truncated at ``level``."""
    layout, off = [], 0
    for n in range(level + 1):
        r, c = B.rank(n), A.rank(n)
        layout.append((n, off, r, c))
        off += r * c
    pos = {n: (o, r, c) for n, o, r, c in layout}
    rows = []
    for n in range(1, level + 1):
        for i in range(n + 1):
            dA, dB = A.face(i, n), B.face(i, n)
            R = zeros(B.rank(n - 1) * A.rank(n), off)
            o, r, c = pos[n]
            R[:, o:o + r * c] += np.kron(dB, identity(c))
            o, r, c = pos[n - 1]
            R[:, o:o + r * c] -= np.kron(identity(r), dA.T)
            rows.append(R)
    for n in range(level):
        for j in range(n + 1):
            sA, sB = A.degeneracy(j, n), B.degeneracy(j, n)
            R = zeros(B.rank(n + 1) * A.rank(n), off)
            o, r, c = pos[n]
            R[:, o:o + r * c] += np.kron(sB, identity(c))
            o, r, c = pos[n + 1]
            R[:, o:o + r * c] -= np.kron(identity(r), sA.T)
            rows.append(R)
    M = np.concatenate(rows, axis=0) if rows else zeros(0, off)
    return layout, M


@dataclass(frozen=True)
class SimplicialHomGroup:
    source: SimplicialModule
    target: SimplicialModule
    level: int
    layout: tuple
    basis: np.ndarray
    retraction: np.ndarray

    @property
    def rank(self):
        return self.basis.shape[1]

    @property
    def invariants(self):
        return AbelianGroupInvariants(self.rank, ())

    def element(self, k: int) -> SimplicialMap:
        return self.to_map(self.basis[:, k])

    def to_map(self, vec) -> SimplicialMap:
        vec = np.asarray(vec, dtype=object).reshape(-1)
        comps = {n: vec[o:o + r * c].reshape(r, c) for n, o, r, c in self.layout}
        return SimplicialMap(self.source, self.target, comps, self.level)

    def coordinates(self, f: SimplicialMap) -> np.ndarray:
        v = np.concatenate([f[n].reshape(-1) for n, _, _, _ in self.layout]) if self.layout else zeros(0, 1)[:, 0]
        c = self.retraction.dot(v)
        if not np.array_equal(self.basis.dot(c), v):
            raise SimplicialError("map is not simplicial")
        return c


def default_hom_level(A: SimplicialModule) -> int:
    """A level through which simplicial maps out of ``A`` are determined (skeletal bound + 1)."""
    if A.normal_bound is None:
        if A.level_bound is None:
            raise SimplicialError("no skeletal bound known for the source module")
        return A.level_bound
    return A.normal_bound + 1


def simplicial_hom_group(A: SimplicialModule, B: SimplicialModule, level: int | None = None) -> SimplicialHomGroup:
    """``Hom_sMod(A, B)`` by constraint solving on levels ``0..level``."""
    if level is None:
        level = default_hom_level(A)
    layout, M = simplicial_hom_constraints(A, B, level)
    K, L = kernel_with_retraction(M, A.ring)
    return SimplicialHomGroup(A, B, level, tuple(layout), K, L)


@dataclass(frozen=True)
class HomTransport:
    simplicial: SimplicialHomGroup
    chain: object  # ChainMapGroup N(A) -> N(B)
    comparison: np.ndarray  # columns: N of simplicial basis maps, in chain coordinates
    is_bijection: bool

    @property
    def simplicial_invariants(self):
        return self.simplicial.invariants

    @property
    def chain_invariants(self):
        return self.chain.invariants


def transport_hom(A: SimplicialModule, B: SimplicialModule, level: int | None = None) -> HomTransport:
    """``Hom_sMod(A, B)`` and ``Hom_Ch(NA, NB)``, each solved independently, plus the comparison ``f -> N(f)``."""
    sgrp = simplicial_hom_group(A, B, level)
    top = A.normal_bound if A.normal_bound is not None else sgrp.level
    NA = normalization(A, top).complex
    NB = normalization(B, top).complex
    cgrp = chain_map_group(NA, NB)
    cols = []
    for k in range(sgrp.rank):
        f = sgrp.element(k)
        cols.append(cgrp.coordinates(normalize_map(f, top)))
    M = np.stack(cols, axis=1) if cols else zeros(cgrp.rank, 0)
    ok = M.shape[0] == M.shape[1] and is_unimodular(M)
    return HomTransport(sgrp, cgrp, M, ok)


def gamma_normalization_iso(A: SimplicialModule, up_to: int) -> SimplicialMap:
    """``Γ(N A) -> A``, ``(eta, x) -> A(eta)(incl x)``; verified levelwise invertible."""
    top = A.normal_bound if A.normal_bound is not None else up_to
    NA = normalization(A, top).complex
    g = ChainMap(NA, NA, {n: identity(NA.rank(n)) for n in NA.degrees}, check=False)
    f = extend_from_gamma(NA, A, g, up_to)
    for n in range(up_to + 1):
        if not is_unimodular(f[n]):
            raise ArithmeticError(f"ΓN(A) -> A is not invertible on level {n}")
    return f
