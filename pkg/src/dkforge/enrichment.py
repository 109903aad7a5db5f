"""The global and local enrichments of Ch≥0 over simplicial modules.

Every simplicial hom object here is a *hom model*: given a cosimplicial
family of complexes ``S_n`` and a bounded target ``T``, level ``n`` is the
free group ``Hom_Ch(S_n, T)`` (a saturated kernel, hence free) and
``alpha : [m] -> [n]`` acts by precomposition with ``S(alpha) : S_m -> S_n``.

* global ``HOM(ΓC, ΓD)``: ``S_n = N(ΓC (x) RΔ^n)``, ``T = N(ΓD)``
* local ``Γ(τ HOM(C, D))``: ``S_n = C (x) N(RΔ^n)``, ``T = D``
* ``Γ(E)`` itself: ``S_n = N(RΔ^n)``, ``T = E``

Sources are brutally truncated one degree above the top of ``T``; chain maps
into ``T`` do not see anything higher.  Chain maps from a non-negatively
graded complex into ``τ X`` and into ``X`` correspond bijectively, so
targets are used untruncated.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chain import (
    ChainComplex,
    ChainMap,
    brutal_truncation,
    chain_map_group,
    compose,
    hom_blocks,
    hom_complex,
    hom_offsets,
    identity_map,
    is_isomorphism,
    tensor_complexes,
    tensor_index,
    tensor_maps,
    tensor_offsets,
    truncate_nonneg,
    truncation_with_inclusion,
    unit_complex,
)
from .dold_kan import epsilon_inverse, epsilon_iso, gamma, gamma_yoneda
from .homotopy import find_chain_homotopy, is_quasi_iso
from .linalg import ZZ, identity, is_unimodular, zeros
from .monoidal import alexander_whitney, eilenberg_zilber
from .simplicial import (
    GammaModule,
    LevelBoundError,
    SimplicialMap,
    SimplicialModule,
    StandardSimplexModule,
    TensorModule,
    check_simplicial_map,
    constant_module,
    normalization,
    normalize,
    normalize_map,
)


class TorsionObstruction(ValueError):
    """A hom level would not be a free module (cannot happen over Z; kept as a guard)."""


# ---------------------------------------------------------------------------
# cosimplicial sources


class YonedaSource:
    """``n -> N(RΔ^n)``, truncated at ``top``."""

    def __init__(self, top: int, ring=ZZ):
        self.top = top
        self.ring = ring
        self._mods = {}

    def module(self, n):
        if n not in self._mods:
            self._mods[n] = StandardSimplexModule(n, self.ring)
        return self._mods[n]

    def _norm(self, n):
        return normalization(self.module(n), n)

    def complex(self, n: int) -> ChainComplex:
        return brutal_truncation(self._norm(n).complex, self.top)

    def map(self, alpha: tuple, n: int) -> ChainMap:
        m = len(alpha) - 1
        S, T = self.complex(m), self.complex(n)
        Rm, Rn = self._norm(m), self._norm(n)
        R = self.module(n)
        comps = {}
        for k in range(min(m, n, self.top) + 1):
            comps[k] = Rn.projection(k).dot(R.pushforward(alpha, k)).dot(Rm.inclusion(k))
        return ChainMap(S, T, comps, check=False)


class LocalSource:
    """``n -> C (x) N(RΔ^n)``, truncated at ``top``."""

    def __init__(self, C: ChainComplex, top: int):
        self.C = C
        self.top = top
        self.yoneda = YonedaSource(max(top, 0) + 1, C.ring)

    def complex(self, n):
        return brutal_truncation(tensor_complexes(self.C, self.yoneda.complex(n)), self.top)

    def map(self, alpha, n):
        m = len(alpha) - 1
        f = tensor_maps(identity_map(self.C), self.yoneda.map(alpha, n))
        S, T = self.complex(m), self.complex(n)
        return ChainMap(S, T, {k: f[k] for k in S.degrees}, check=False)


class GlobalSource:
    """``n -> N(A (x) RΔ^n)``, truncated at ``top``."""

    def __init__(self, A: SimplicialModule, top: int):
        self.A = A
        self.top = top
        self._mods = {}

    def module(self, n):
        if n not in self._mods:
            self._mods[n] = TensorModule(self.A, StandardSimplexModule(n, self.A.ring))
        return self._mods[n]

    def complex(self, n):
        return normalization(self.module(n), self.top).complex

    def map(self, alpha, n):
        m = len(alpha) - 1
        Sm, Sn = self.module(m), self.module(n)
        Nm, Nn = normalization(Sm, self.top), normalization(Sn, self.top)
        R = Sn.right
        comps = {}
        for k in range(self.top + 1):
            push = np.kron(identity(self.A.rank(k)), R.pushforward(alpha, k))
            comps[k] = Nn.projection(k).dot(push).dot(Nm.inclusion(k))
        return ChainMap(Nm.complex, Nn.complex, comps, check=False)


# ---------------------------------------------------------------------------
# hom models


class HomModel(SimplicialModule):
    """Level ``n`` = ``Hom_Ch(S_n, T)``; structure maps by precomposition."""

    def __init__(self, source, target: ChainComplex, level_bound: int, label: str = ""):
        super().__init__()
        self.source = source
        self.target = target
        self.ring = target.ring
        self.level_bound = level_bound
        self.normal_bound = None
        self.label = label
        if not self.ring.is_integers:
            raise TorsionObstruction("hom models are implemented over Z only")

    def group(self, n: int):
        self.check_level(n)
        return self._cached(("group", n), lambda: chain_map_group(self.source.complex(n), self.target))

    def rank(self, n):
        return self.group(n).rank

    def _structure_map(self, alpha, n):
        m = len(alpha) - 1
        Gm, Gn = self.group(m), self.group(n)
        Sa = self.source.map(alpha, n)
        pos_n = {k: (o, r, c) for k, o, r, c in Gn.layout}
        Pre = zeros(Gm.basis.shape[0], Gn.basis.shape[0])
        for k, o, r, c in Gm.layout:
            if k not in pos_n:
                continue
            o2, r2, c2 = pos_n[k]
            Pre[o:o + r * c, o2:o2 + r2 * c2] = np.kron(identity(r), Sa[k].T)
        if Gm.rank == 0 or Gn.rank == 0:
            return zeros(Gm.rank, Gn.rank)
        return Gm.retraction.dot(Pre).dot(Gn.basis)

    def element(self, n: int, k: int) -> ChainMap:
        return self.group(n).element(k)

    def __repr__(self):
        return f"HomModel({self.label})"


def transform_levels(src: HomModel, tgt: HomModel, fn, up_to: int, check: bool = True) -> SimplicialMap:
    """The levelwise map ``f -> fn(n, f)`` written in group coordinates."""
    comps = {}
    for n in range(up_to + 1):
        Gs, Gt = src.group(n), tgt.group(n)
        M = zeros(Gt.rank, Gs.rank)
        for k in range(Gs.rank):
            M[:, k] = Gt.coordinates(fn(n, Gs.element(k)))
        comps[n] = M
    f = SimplicialMap(src, tgt, comps, up_to)
    if check:
        problems = check_simplicial_map(f)
        if problems:
            raise ArithmeticError(problems[0])
    return f


def _top(T: ChainComplex) -> int:
    return max(T.max_deg, 0) + 1


def yoneda_model(E: ChainComplex, up_to: int, label: str = "") -> HomModel:
    """``Γ(τ E)`` in the form ``n -> Hom_Ch(N(RΔ^n), E)``."""
    return HomModel(YonedaSource(_top(E), E.ring), E, up_to, label or "Γ")


def local_model(C: ChainComplex, D: ChainComplex, up_to: int) -> HomModel:
    """``n -> Hom_Ch(C (x) N(RΔ^n), D)``."""
    return HomModel(LocalSource(C, _top(D)), D, up_to, "local")


def global_model(A: SimplicialModule, T: ChainComplex, up_to: int) -> HomModel:
    """``n -> Hom_Ch(N(A (x) RΔ^n), T)``, the transported form of ``HOM_sMod(A, Γ T)``."""
    return HomModel(GlobalSource(A, _top(T)), T, up_to, "global")


# ---------------------------------------------------------------------------
# enriched hom objects


@dataclass(frozen=True)
class EnrichedHomObject:
    flavor: str  # "global", "local" or "chain"
    carrier: object
    provenance: dict = field(default_factory=dict)


def internal_hom_simplicial(A: SimplicialModule, B: SimplicialModule, up_to: int) -> HomModel:
    """``HOM(A, B)_n = Hom_sMod(A (x) RΔ^n, B) ≅ Hom_Ch(N(A (x) RΔ^n), N B)``."""
    if B.normal_bound is None:
        raise LevelBoundError("target needs a skeletal bound to be normalized completely")
    NB = normalize(B, B.normal_bound)
    return global_model(A, NB, up_to)


def global_hom(C: ChainComplex, D: ChainComplex, up_to: int) -> EnrichedHomObject:
    H = internal_hom_simplicial(gamma(C), gamma(D), up_to)
    return EnrichedHomObject("global", H, {"C": C, "D": D, "level_bound": up_to, "source_truncation": _top(D)})


def local_hom(C: ChainComplex, D: ChainComplex, up_to: int) -> EnrichedHomObject:
    """``Γ τ HOM(C, D)`` as a Γ-presented module."""
    H = truncate_nonneg(hom_complex(C, D))
    return EnrichedHomObject("local", GammaModule(H), {"C": C, "D": D, "level_bound": up_to})


TENSOR_COTENSOR_KINDS = ("global_tensor", "global_cotensor", "local_tensor", "local_cotensor")


def tensor_cotensor_structures(C: ChainComplex, A: SimplicialModule, which: str,
                               up_to: int | None = None) -> ChainComplex:
    """The four (weak) tensoring and cotensoring formulas, computed literally.

    * ``global_tensor``   ``N(ΓC (x) A)``
    * ``global_cotensor`` ``N(HOM_sMod(A, ΓC))`` through level ``up_to``
    * ``local_tensor``    ``C (x) N(A)``
    * ``local_cotensor``  ``τ HOM(N(A), C)``
    """
    if which == "global_tensor":
        T = TensorModule(gamma(C), A)
        return normalize(T, T.normal_bound if up_to is None else up_to)
    if which == "global_cotensor":
        level = up_to if up_to is not None else _top(C)
        return normalize(internal_hom_simplicial(A, gamma(C), level), level)
    if which == "local_tensor":
        return tensor_complexes(C, normalize(A))
    if which == "local_cotensor":
        return truncate_nonneg(hom_complex(normalize(A), C))
    raise ValueError(f"unknown structure {which!r}; expected one of {TENSOR_COTENSOR_KINDS}")


# ---------------------------------------------------------------------------
# currying and symmetry of hom complexes


def uncurry(g: ChainMap, P: ChainComplex, W: ChainComplex) -> ChainMap:
    """``g : Z -> HOM(P, W)`` to ``f : P (x) Z -> W``, ``f(p (x) z) = (-1)^{|p||z|} g(z)(p)``."""
    Z = g.source
    PZ = tensor_complexes(P, Z)
    comps = {n: zeros(W.rank(n), PZ.rank(n)) for n in PZ.degrees}
    H = g.target
    for k in Z.degrees:
        if not (H.min_deg <= k <= H.max_deg):
            continue
        Gk = g[k]
        for z in range(Z.rank(k)):
            blocks = hom_blocks(P, W, k, Gk[:, z])
            for i, B in blocks.items():
                n = i + k
                if n not in comps:
                    continue
                sign = -1 if (i * k) % 2 else 1
                for p in range(P.rank(i)):
                    col = tensor_index(P, Z, i, p, k, z)
                    comps[n][:, col] = sign * B[:, p]
    return ChainMap(PZ, W, comps, check=False)


def curry(f: ChainMap, P: ChainComplex, Z: ChainComplex) -> ChainMap:
    """Inverse of :func:`uncurry`: ``f : P (x) Z -> W`` to ``Z -> HOM(P, W)``."""
    W = f.target
    H = hom_complex(P, W)
    comps = {}
    for k in Z.degrees:
        M = zeros(H.rank(k), Z.rank(k))
        off = hom_offsets(P, W, k)
        for z in range(Z.rank(k)):
            for i, o in off.items():
                sign = -1 if (i * k) % 2 else 1
                for p in range(P.rank(i)):
                    col = tensor_index(P, Z, i, p, k, z)
                    blk = f[i + k][:, col]
                    for w in range(W.rank(i + k)):
                        M[o + w * P.rank(i) + p, z] = sign * blk[w]
        comps[k] = M
    return ChainMap(Z, H, comps, check=False)


def _hom_basis(X, Y, n):
    """``[(i, row, col)]`` for ``HOM(X, Y)_n`` in storage order."""
    out = []
    for i in hom_offsets(X, Y, n):
        for r in range(Y.rank(i + n)):
            for c in range(X.rank(i)):
                out.append((i, r, c))
    return out


def tensor_hom_adjunction(X: ChainComplex, V: ChainComplex, Y: ChainComplex) -> ChainMap:
    """``φ : HOM(X (x) V, Y) -> HOM(V, HOM(X, Y))``, ``φ(f)(v)(x) = (-1)^{|v||x|} f(x (x) v)``."""
    XV = tensor_complexes(X, V)
    S = hom_complex(XV, Y)
    HXY = hom_complex(X, Y)
    T = hom_complex(V, HXY)
    comps = {}
    for k in S.degrees:
        M = zeros(T.rank(k), S.rank(k))
        toff = hom_offsets(V, HXY, k)
        for col, (i, r, c) in enumerate(_hom_basis(XV, Y, k)):
            a, xa, vb = _tensor_label(X, V, i, c)
            b = i - a
            inner = hom_offsets(X, Y, k + b)[a] + r * X.rank(a) + xa
            row = toff[b] + inner * V.rank(b) + vb
            M[row, col] = -1 if (a * b) % 2 else 1
        comps[k] = M
    return ChainMap(S, T, comps, check=False)


def hom_swap(X: ChainComplex, V: ChainComplex, Y: ChainComplex) -> ChainMap:
    """``ψ : HOM(X, HOM(V, Y)) -> HOM(V, HOM(X, Y))``, ``ψ(g)(v)(x) = (-1)^{|v||x|} g(x)(v)``."""
    HVY = hom_complex(V, Y)
    HXY = hom_complex(X, Y)
    S = hom_complex(X, HVY)
    T = hom_complex(V, HXY)
    comps = {}
    for k in S.degrees:
        M = zeros(T.rank(k), S.rank(k))
        toff = hom_offsets(V, HXY, k)
        for col, (a, r, xa) in enumerate(_hom_basis(X, HVY, k)):
            # r indexes HOM(V, Y)_{a+k}: a unit (b, y, vb)
            b, y, vb = _hom_basis(V, Y, a + k)[r]
            inner = hom_offsets(X, Y, k + b)[a] + y * X.rank(a) + xa
            row = toff[b] + inner * V.rank(b) + vb
            M[row, col] = -1 if (a * b) % 2 else 1
        comps[k] = M
    return ChainMap(S, T, comps, check=False)


def _tensor_label(X, V, n, idx):
    for a, o in tensor_offsets(X, V, n).items():
        w = X.rank(a) * V.rank(n - a)
        if o <= idx < o + w:
            return a, (idx - o) // V.rank(n - a), (idx - o) % V.rank(n - a)
    raise IndexError(idx)


def _restrict(f: ChainMap, S: ChainComplex, T: ChainComplex) -> ChainMap:
    return ChainMap(S, T, {k: f[k] for k in S.degrees if T.min_deg <= k <= T.max_deg}, check=False)


# ---------------------------------------------------------------------------
# comparison maps AW* and EZ*


@dataclass(frozen=True)
class ComparisonMaps:
    local: HomModel
    global_: HomModel
    aw_star: SimplicialMap
    ez_star: SimplicialMap
    level_bound: int
    source_truncation: int


def comparison_maps(C: ChainComplex, D: ChainComplex, up_to: int) -> ComparisonMaps:
    """``AW^* : local -> global`` and ``EZ^* : global -> local`` on levels ``0..up_to``."""
    top = _top(D)
    loc = local_model(C, D, up_to)
    glo = internal_hom_simplicial(gamma(C), gamma(D), up_to)
    GC = gamma(C)
    eps = epsilon_iso(C)
    eps_inv = epsilon_inverse(C)
    aw_pre, ez_pre = {}, {}
    for n in range(up_to + 1):
        R = StandardSimplexModule(n)
        aw = alexander_whitney(GC, R, top)
        ez = eilenberg_zilber(GC, R, top)
        NR = normalization(R, n).complex
        e1 = tensor_maps(eps, identity_map(NR))
        ei = tensor_maps(eps_inv, identity_map(NR))
        Sl = loc.source.complex(n)
        aw_pre[n] = compose(_restrict(e1, aw.target, Sl), aw)
        ez_pre[n] = compose(ez, _restrict(ei, Sl, ez.source))

    def aw_fn(n, f):
        return compose(f, aw_pre[n])

    def ez_fn(n, g):
        return compose(g, ez_pre[n])

    aws = transform_levels(loc, glo, aw_fn, up_to)
    ezs = transform_levels(glo, loc, ez_fn, up_to)
    return ComparisonMaps(loc, glo, aws, ezs, up_to, top)


@dataclass(frozen=True)
class ComparisonReport:
    ez_aw_identity: bool
    aw_ez_homotopy: object  # GradedHomotopy or None
    aw_quasi_iso: bool
    ez_quasi_iso: bool
    local_ranks: tuple
    global_ranks: tuple


def verify_comparison(cm: ComparisonMaps) -> ComparisonReport:
    L = cm.level_bound
    comp = cm.ez_star @ cm.aw_star
    ident = all(np.array_equal(comp[n], identity(cm.local.rank(n))) for n in range(L + 1))
    other = cm.aw_star @ cm.ez_star
    Nother = normalize_map(other, L)
    h = find_chain_homotopy(identity_map(Nother.source), Nother, degrees=range(L))
    degs = range(L)
    aq = bool(is_quasi_iso(normalize_map(cm.aw_star, L), degs))
    eq = bool(is_quasi_iso(normalize_map(cm.ez_star, L), degs))
    return ComparisonReport(ident, h, aq, eq,
                            tuple(cm.local.rank(n) for n in range(L + 1)),
                            tuple(cm.global_.rank(n) for n in range(L + 1)))


def local_identification(C: ChainComplex, D: ChainComplex, up_to: int) -> SimplicialMap:
    """``Γ τHOM(C, D) -> Hom_Ch(C (x) N(RΔ^•), D)``: Yoneda description of Γ, then uncurrying.

    Verified levelwise invertible and simplicial (a self-test of the working
    description of Γ used by the local hom model).
    """
    H = hom_complex(C, D)
    tH, inc = truncation_with_inclusion(H)
    G = GammaModule(tH)
    loc = local_model(C, D, up_to)
    comps = {}
    for n in range(up_to + 1):
        Y = gamma_yoneda(tH, n)
        Gt = loc.group(n)
        M = zeros(Gt.rank, G.rank(n))
        for x in range(G.rank(n)):
            phi = Y.group.to_map(Y.group.basis.dot(Y.matrix[:, x]))
            g = compose(inc, phi)
            f = uncurry(g, C, D)
            M[:, x] = Gt.coordinates(_restrict(f, loc.source.complex(n), D))
        if not is_unimodular(M):
            raise ArithmeticError(f"local identification fails to be invertible on level {n}")
        comps[n] = M
    f = SimplicialMap(G, loc, comps, up_to)
    problems = check_simplicial_map(f)
    if problems:
        raise ArithmeticError(problems[0])
    return f


# ---------------------------------------------------------------------------
# weak tensoring / cotensoring structure maps for the change of enrichment along Γ


def adjunction_comparison(A: SimplicialModule, V: ChainComplex, up_to: int) -> SimplicialMap:
    """``Γ HOM(N A, V) -> HOM_sMod(A, Γ V)``: uncurry, then precompose with AW."""
    NA = normalize(A)
    src = yoneda_model(hom_complex(NA, V), up_to)
    tgt = global_model(A, V, up_to)
    top = _top(V)

    def fn(n, g):
        R = StandardSimplexModule(n)
        aw = alexander_whitney(A, R, top)
        f = uncurry(g, NA, V)
        return compose(_restrict(f, aw.target, V), aw)

    return transform_levels(src, tgt, fn, up_to)


@dataclass(frozen=True)
class WeakStructureMaps:
    phi_tilde: SimplicialMap
    psi_tilde: SimplicialMap
    rho_tilde: ChainMap
    eta_tilde: ChainMap
    adjunction: SimplicialMap
    level_bound: int


def weak_structure_maps(x: ChainComplex, A: SimplicialModule, y: ChainComplex, up_to: int) -> WeakStructureMaps:
    """``φ̃_{A,x,y}``, ``ψ̃_{A,x,y}``, ``ρ̃_x``, ``η̃_x`` and the adjunction comparison."""
    NA = normalize(A)
    adj = adjunction_comparison(A, hom_complex(x, y), up_to)

    # φ̃: Γ HOM(x (x) NA, y) -> HOM_sMod(A, Γ HOM(x, y))
    phi = tensor_hom_adjunction(x, NA, y)
    src_phi = yoneda_model(hom_complex(tensor_complexes(x, NA), y), up_to)
    mid = adj.source

    def phi_fn(n, g):
        h = compose(phi, g)
        return _restrict(h, mid.source.complex(n), mid.target)

    step = transform_levels(src_phi, mid, phi_fn, up_to)
    phi_tilde = adj @ step

    # ψ̃: Γ HOM(x, HOM(NA, y)) -> HOM_sMod(A, Γ HOM(x, y))
    psi = hom_swap(x, NA, y)
    src_psi = yoneda_model(hom_complex(x, hom_complex(NA, y)), up_to)

    def psi_fn(n, g):
        h = compose(psi, g)
        return _restrict(h, mid.source.complex(n), mid.target)

    step2 = transform_levels(src_psi, mid, psi_fn, up_to)
    psi_tilde = adj @ step2

    return WeakStructureMaps(phi_tilde, psi_tilde, rho_tilde(x), eta_tilde(x), adj, up_to)


def rho_tilde(x: ChainComplex) -> ChainMap:
    """``x (x) N(c Z) -> x (x) Z[0] -> x``; an isomorphism because ``N(c Z) = Z[0]`` with ``ε = 1``."""
    c = constant_module(x.ring)
    Nc = normalize(c, 0)
    eps = ChainMap(Nc, unit_complex(x.ring), {0: identity(1)})
    f = tensor_maps(identity_map(x), eps)
    rho = ChainMap(f.target, x, {n: identity(x.rank(n)) for n in x.degrees})
    out = compose(rho, f)
    if not is_isomorphism(out):
        raise ArithmeticError("ρ̃ is not an isomorphism")
    return out


def eta_tilde(x: ChainComplex) -> ChainMap:
    """``x -> τ HOM(Z[0], x) -> τ HOM(N(c Z), x)``; the identity matrix in the pinned bases."""
    Nc = normalize(constant_module(x.ring), 0)
    T = truncate_nonneg(hom_complex(Nc, x))
    out = ChainMap(x, T, {n: identity(x.rank(n)) for n in x.degrees if n >= 0})
    if not is_isomorphism(out):
        raise ArithmeticError("η̃ is not an isomorphism")
    return out


def unit_model_identification(x: ChainComplex, y: ChainComplex, up_to: int) -> SimplicialMap:
    """Canonical ``Γ HOM(x, y) -> HOM_sMod(c Z, Γ HOM(x, y))`` (``c Z (x) RΔ^n = RΔ^n`` on the nose)."""
    V = hom_complex(x, y)
    src = yoneda_model(V, up_to)
    tgt = global_model(constant_module(x.ring), V, up_to)

    def fn(n, g):
        S = tgt.source.complex(n)
        return ChainMap(S, V, {k: g[k] for k in S.degrees}, check=False)

    return transform_levels(src, tgt, fn, up_to)


def rho_star_model(x: ChainComplex, y: ChainComplex, up_to: int) -> SimplicialMap:
    """``Γ HOM(x, y) -> Γ HOM(x (x) N(c Z), y)`` induced by ``ρ̃_x``."""
    from .chain import precompose_hom

    rho = rho_tilde(x)
    pre = precompose_hom(rho, y)
    src = yoneda_model(hom_complex(x, y), up_to)
    tgt = yoneda_model(hom_complex(rho.source, y), up_to)
    return transform_levels(src, tgt, lambda n, g: compose(pre, g), up_to)


def psi_at_unit_matches_aw_star(C: ChainComplex, D: ChainComplex, up_to: int):
    """Return ``(ψ̃_{ΓC,Z[0],D}, AW^* ∘ ι)`` where ``ι`` is the canonical identification of the sources."""
    U = unit_complex(C.ring)
    w = weak_structure_maps(U, gamma(C), D, up_to)
    cm = comparison_maps(C, D, up_to)
    src = w.psi_tilde.source
    loc = cm.local
    NA = normalize(gamma(C))

    def iota(n, g):
        # HOM(Z[0], HOM(NΓC, D)) is HOM(NΓC, D) in the pinned basis; ε = 1 identifies NΓC with C
        W = hom_complex(NA, D)
        g2 = ChainMap(g.source, W, {k: g[k] for k in g.source.degrees}, check=False)
        f = uncurry(g2, C, D)
        return _restrict(f, loc.source.complex(n), D)

    ident = transform_levels(src, loc, iota, up_to)
    return w.psi_tilde, cm.aw_star @ ident, cm
