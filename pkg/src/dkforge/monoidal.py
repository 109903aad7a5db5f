"""Alexander–Whitney and Eilenberg–Zilber maps, and the induced structures on Γ.

Both maps are defined on unnormalized chains by the usual formulas and then
restricted/corestricted to normalized chains through the explicit
inclusions and projections of :mod:`dkforge.simplicial`:

* ``AW(a (x) b) = Σ_{p+q=n} d_{p+1}...d_n a (x) d_0^p b``  (front face on the left)
* ``EZ(a (x) b) = Σ_{(μ,ν)} sign(μ,ν) s_ν a (x) s_μ b`` over ``(p,q)``-shuffles,
  ``μ`` a ``p``-subset of ``{0..n-1}`` in lexicographic order, ``ν`` its
  complement, ``s_ν = s_{ν_q} ... s_{ν_1}`` and ``sign = (-1)^{#{(i,j): μ_i > ν_j}}``.

With these choices ``AW ∘ EZ`` is the identity matrix.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .chain import (
    ChainComplex,
    ChainMap,
    compose,
    identity_map,
    tensor_complexes,
    tensor_maps,
    tensor_offsets,
)
from .dold_kan import epsilon_inverse, epsilon_iso, extend_from_gamma, gamma, lift_to_gamma
from .homotopy import GradedHomotopy, find_chain_homotopy
from .linalg import zeros
from .simplicial import SimplicialMap, SimplicialModule, TensorModule, normalization


def _resolve_bound(A, B, up_to):
    if up_to is not None:
        return up_to
    if A.normal_bound is None or B.normal_bound is None:
        raise ValueError("a degree bound is required for modules without a skeletal bound")
    return A.normal_bound + B.normal_bound


def shuffles(p: int, q: int):
    """``(μ, ν, sign)`` for all ``(p, q)``-shuffles, ``μ`` in lexicographic order."""
    n = p + q
    out = []
    for mu in itertools.combinations(range(n), p):
        nu = tuple(v for v in range(n) if v not in mu)
        inv = sum(1 for a in mu for b in nu if a > b)
        out.append((mu, nu, -1 if inv % 2 else 1))
    return out


def _degeneracy_operator(nu: tuple, n: int) -> tuple:
    """The surjection ``[n] ->> [n - len(nu)]`` whose module map is ``s_{ν_last} ... s_{ν_1}``."""
    out, v = [], 0
    for j in range(n + 1):
        out.append(v)
        if j not in nu:
            v += 1
    return tuple(out)


def _normalized_pieces(A, B, up_to):
    T = TensorModule(A, B)
    NA = normalization(A, min(up_to, A.normal_bound) if A.normal_bound is not None else up_to)
    NB = normalization(B, min(up_to, B.normal_bound) if B.normal_bound is not None else up_to)
    NT = normalization(T, up_to)
    return T, NA, NB, NT


def alexander_whitney(A: SimplicialModule, B: SimplicialModule, up_to: int | None = None) -> ChainMap:
    """``AW : N(A (x) B) -> N(A) (x) N(B)`` through degree ``up_to``."""
    up_to = _resolve_bound(A, B, up_to)
    T, NA, NB, NT = _normalized_pieces(A, B, up_to)
    tgt = tensor_complexes(NA.complex, NB.complex)
    comps = {}
    for n in range(up_to + 1):
        M = zeros(tgt.rank(n), NT.complex.rank(n))
        offs = tensor_offsets(NA.complex, NB.complex, n)
        for p, o in offs.items():
            q = n - p
            front = A.structure_map(tuple(range(p + 1)), n)
            back = B.structure_map(tuple(range(p, n + 1)), n)
            blk = np.kron(NA.projection(p).dot(front), NB.projection(q).dot(back)).dot(NT.inclusion(n))
            M[o:o + blk.shape[0], :] = blk
        comps[n] = A.ring.reduce(M)
    return ChainMap(NT.complex, _truncated(tgt, up_to), comps, check=False)


def eilenberg_zilber(A: SimplicialModule, B: SimplicialModule, up_to: int | None = None) -> ChainMap:
    """``EZ : N(A) (x) N(B) -> N(A (x) B)`` through degree ``up_to``."""
    up_to = _resolve_bound(A, B, up_to)
    T, NA, NB, NT = _normalized_pieces(A, B, up_to)
    src = tensor_complexes(NA.complex, NB.complex)
    comps = {}
    for n in range(up_to + 1):
        M = zeros(NT.complex.rank(n), src.rank(n))
        offs = tensor_offsets(NA.complex, NB.complex, n)
        for p, o in offs.items():
            q = n - p
            acc = None
            for mu, nu, sign in shuffles(p, q):
                sa = A.structure_map(_degeneracy_operator(nu, n), p).dot(NA.inclusion(p))
                sb = B.structure_map(_degeneracy_operator(mu, n), q).dot(NB.inclusion(q))
                term = sign * np.kron(sa, sb)
                acc = term if acc is None else acc + term
            blk = NT.projection(n).dot(acc)
            M[:, o:o + blk.shape[1]] = blk
        comps[n] = A.ring.reduce(M)
    return ChainMap(_truncated(src, up_to), NT.complex, comps, check=False)


def _truncated(X: ChainComplex, top: int) -> ChainComplex:
    from .chain import brutal_truncation

    return brutal_truncation(X, top)


def ez_aw_homotopy(A: SimplicialModule, B: SimplicialModule, up_to: int | None = None) -> GradedHomotopy:
    """A verified ``h`` with ``d h + h d = EZ ∘ AW - id`` on ``N(A (x) B)``.

    When ``up_to`` is below the skeletal bound, the identity is required only
    in degrees below ``up_to`` (the top degree of a truncation is not closed).
    """
    bound = _resolve_bound(A, B, None) if A.normal_bound is not None and B.normal_bound is not None else None
    top = _resolve_bound(A, B, up_to)
    aw = alexander_whitney(A, B, top)
    ez = eilenberg_zilber(A, B, top)
    ezaw = compose(ez, aw)
    idm = identity_map(aw.source)
    degrees = None if bound is not None and top >= bound else range(top)
    h = find_chain_homotopy(idm, ezaw, degrees)
    if h is None:
        raise ArithmeticError("no homotopy EZ∘AW ≃ id found; this contradicts the Eilenberg–Zilber theorem")
    return h


@dataclass(frozen=True)
class GammaMonoidal:
    lax: SimplicialMap     # ΓC (x) ΓD -> Γ(C (x) D)
    oplax: SimplicialMap   # Γ(C (x) D) -> ΓC (x) ΓD
    lax_normalized: ChainMap
    oplax_normalized: ChainMap


def gamma_monoidal_structures(C: ChainComplex, D: ChainComplex, up_to: int | None = None) -> GammaMonoidal:
    """Lax and oplax structures on Γ obtained as mates of AW and EZ.

    ``N(lax) = ε^{-1} (ε (x) ε) AW`` and ``N(oplax) = EZ (ε^{-1} (x) ε^{-1}) ε``;
    both are realized levelwise through ``lift_to_gamma`` / ``extend_from_gamma``.
    """
    GC, GD = gamma(C), gamma(D)
    E = tensor_complexes(C, D)
    top = max(C.max_deg, 0) + max(D.max_deg, 0)
    up = top if up_to is None else up_to
    X = TensorModule(GC, GD)
    aw = alexander_whitney(GC, GD, top)
    ez = eilenberg_zilber(GC, GD, top)
    eC, eD = epsilon_iso(C), epsilon_iso(D)
    ee = tensor_maps(eC, eD)
    ee = ChainMap(aw.target, E, {n: ee[n] for n in range(top + 1)}, check=False)
    g_lax = compose(ee, aw)  # N(X) -> C (x) D
    lax = lift_to_gamma(X, E, g_lax, up)
    inv = tensor_maps(epsilon_inverse(C), epsilon_inverse(D))
    inv = ChainMap(E, ez.source, {n: inv[n] for n in range(top + 1)}, check=False)
    g_oplax = compose(ez, inv)  # C (x) D -> N(X)
    oplax = extend_from_gamma(E, X, g_oplax, up)
    from .simplicial import normalize_map

    return GammaMonoidal(lax, oplax, normalize_map(lax, top), normalize_map(oplax, top))
