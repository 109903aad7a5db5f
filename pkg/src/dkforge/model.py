"""Instance-level model-category checks on Ch≥0(Z) and sMod(Z).

Conventions (projective structure on Ch≥0):

* cofibration: degreewise mono with free cokernel, degree 0 included
* fibration: surjective in every degree ``>= 1``; every object is fibrant
* weak equivalence: quasi-isomorphism

``std_smod`` classifies a simplicial map through its normalization and
``hurewicz`` uses chain homotopy equivalences as weak equivalences.  Hurewicz
fibrations are not implemented; their flags are ``None``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chain import (
    ChainComplex,
    ChainMap,
    ComplexError,
    chain_map_group,
    complex_to_json,
    compose,
    direct_sum,
    disk,
    hom_complex,
    homology,
    identity_map,
    map_to_json,
    postcompose_hom,
    precompose_hom,
    pushout_product,
    sphere,
    tensor_maps,
    truncate_nonneg,
    truncation_with_inclusion,
    unit_complex,
    unitor_right,
    zero_complex,
    zero_map,
)
from .dold_kan import epsilon_iso, gamma, gamma_map
from .enrichment import global_model, weak_structure_maps
from .homotopy import _homotopy_layout, find_chain_homotopy, is_homotopy_equivalence, is_quasi_iso
from .linalg import (
    AbelianGroupInvariants,
    block_diag,
    cokernel_invariants,
    identity,
    integer_rank,
    kernel_with_retraction,
    matrix_to_json,
    smith_normal_form,
    zeros,
)
from .serialize import content_hash
from .simplicial import SimplicialMap, SimplicialModule, normalization, normalize_map

STRUCTURES = ("proj_ch", "std_smod", "hurewicz")


@dataclass(frozen=True)
class MapClassification:
    is_cofibration: bool | None
    is_fibration: bool | None
    is_weak_equivalence: bool
    is_hurewicz_weq: bool | None
    evidence: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "is_cofibration": self.is_cofibration,
            "is_fibration": self.is_fibration,
            "is_weak_equivalence": self.is_weak_equivalence,
            "is_hurewicz_weq": self.is_hurewicz_weq,
            "evidence": self.evidence,
        }


@dataclass(frozen=True)
class VerificationReport:
    check: str
    inputs: dict
    passed: bool
    certificates: dict = field(default_factory=dict)

    def __bool__(self):
        return self.passed

    def to_json(self) -> dict:
        return {"check": self.check, "inputs": self.inputs, "pass": self.passed, "certificates": self.certificates}


def _hash(x) -> str:
    if isinstance(x, ChainComplex):
        return content_hash(complex_to_json(x))
    return content_hash(map_to_json(x))


def _require_integers(f):
    if not f.ring.is_integers:
        raise ComplexError(f"model-structure checks are implemented over Z, got {f.ring}")


# ---------------------------------------------------------------------------
# classification


def _cofibration_evidence(f: ChainMap):
    ok, ev = True, {}
    for n in sorted(set(f.source.degrees) | set(f.target.degrees)):
        M = f[n]
        mono = M.shape[1] == 0 or integer_rank(M) == M.shape[1]
        coker = cokernel_invariants(M) if M.shape[0] else AbelianGroupInvariants(0, ())
        ev[str(n)] = {"mono": mono, "cokernel": str(coker)}
        ok = ok and mono and not coker.torsion
    return ok, ev


def _fibration_evidence(f: ChainMap, degrees=None):
    ok, ev = True, {}
    degs = degrees if degrees is not None else range(1, max(f.source.max_deg, f.target.max_deg) + 1)
    for n in degs:
        M = f[n]
        coker = cokernel_invariants(M) if M.shape[0] else AbelianGroupInvariants(0, ())
        ev[str(n)] = str(coker)
        ok = ok and coker.is_zero
    return ok, ev


def classify_chain_map(f: ChainMap, hurewicz: bool = False, degrees=None) -> MapClassification:
    """Projective classification of ``f``; ``degrees`` limits fibration and weq checks (truncated data)."""
    _require_integers(f)
    cof, cev = _cofibration_evidence(f)
    fib_degs = None if degrees is None else [n for n in degrees if n >= 1]
    fib, fev = _fibration_evidence(f, fib_degs)
    q = is_quasi_iso(f, degrees)
    ev = {"cokernels": cev, "fibration_cokernels": fev, "cone_homology": {str(k): v for k, v in sorted(q.cone_homology.items())}}
    hw = None
    if hurewicz:
        he = is_homotopy_equivalence(f)
        hw = he.holds
        if he.holds:
            ev["homotopy_inverse"] = map_to_json(he.inverse)
            ev["left_homotopy"] = he.left_homotopy.to_json()
            ev["right_homotopy"] = he.right_homotopy.to_json()
        return MapClassification(None, None, q.holds, hw, ev)
    return MapClassification(cof, fib, q.holds, hw, ev)


def classify_map(f, structure: str = "proj_ch") -> MapClassification:
    if structure not in STRUCTURES:
        raise ValueError(f"unknown structure {structure!r}")
    if isinstance(f, SimplicialMap):
        up = _normal_bound(f)
        f = normalize_map(f, up)
    elif structure == "std_smod":
        raise TypeError("std_smod classifies simplicial maps")
    return classify_chain_map(f, hurewicz=structure == "hurewicz")


def _normal_bound(f: SimplicialMap) -> int:
    bounds = [A.normal_bound for A in (f.source, f.target)]
    if any(b is None for b in bounds):
        return f.up_to
    return min(max(bounds), f.up_to)


# ---------------------------------------------------------------------------
# pushout-product


def generating_cofibrations(top: int = 3) -> list:
    """``0 -> S(0)`` and ``S(n-1) -> D(n)`` for ``1 <= n <= top``."""
    out = [("0->S(0)", zero_map(zero_complex(), sphere(0)))]
    for n in range(1, top + 1):
        S, D = sphere(n - 1), disk(n)
        out.append((f"S({n - 1})->D({n})", ChainMap(S, D, {n - 1: identity(1)})))
    return out


def generating_acyclic_cofibrations(top: int = 3) -> list:
    return [(f"0->D({n})", zero_map(zero_complex(), disk(n))) for n in range(1, top + 1)]


def check_pushout_product_instance(i: ChainMap, k: ChainMap) -> VerificationReport:
    ci, ck = classify_map(i), classify_map(k)
    if not (ci.is_cofibration and ck.is_cofibration):
        raise ValueError("pushout-product check needs cofibrations as inputs")
    pp = pushout_product(i, k)
    c = classify_map(pp.map)
    acyclic_needed = ci.is_weak_equivalence or ck.is_weak_equivalence
    ok = bool(c.is_cofibration) and (c.is_weak_equivalence or not acyclic_needed)
    return VerificationReport(
        "pushout_product",
        {"i": _hash(i), "k": _hash(k)},
        ok,
        {
            "cokernel_ranks": {str(n): r for n, r in sorted(pp.cokernel_ranks.items())},
            "acyclic_required": acyclic_needed,
            "classification": c.to_json(),
        },
    )


# ---------------------------------------------------------------------------
# unit axiom


def standard_unit_replacement():
    """``Q1 = Z[0] (+) D(1)`` with the projection ``q : Q1 -> Z[0]``."""
    Q = direct_sum(unit_complex(), disk(1))
    q = ChainMap(Q, unit_complex(), {0: [[1, 0]]})
    return Q, q


def dold_kan_unit_replacement():
    """``F(Q1_W)`` for ``Q1_W = Γ(Z[0] (+) D(1))``: ``N Γ Q1`` with ``q ∘ ε``."""
    Q, q = standard_unit_replacement()
    e = epsilon_iso(Q)
    Nq = normalize_map(gamma_map(q, 1), 1)
    return e.source, compose(q, e), Nq


def check_unit_axiom_instance(x: ChainComplex, Q=None, hurewicz: bool = False) -> VerificationReport:
    """``x (x) Q1 -> x (x) Z[0] = x`` is a weak equivalence (homotopy equivalence under Hurewicz)."""
    if Q is None:
        Q = standard_unit_replacement()
    Q1, q = Q
    if not classify_map(zero_map(zero_complex(), x)).is_cofibration:
        raise ValueError("x is not cofibrant")
    cq = classify_map(q)
    if not cq.is_weak_equivalence or not classify_map(zero_map(zero_complex(), Q1)).is_cofibration:
        raise ValueError("Q is not a cofibrant replacement of the unit")
    f = compose(unitor_right(x), tensor_maps(identity_map(x), q))
    c = classify_chain_map(f, hurewicz=hurewicz)
    ok = c.is_hurewicz_weq if hurewicz else c.is_weak_equivalence
    return VerificationReport(
        "unit_axiom_hurewicz" if hurewicz else "unit_axiom",
        {"x": _hash(x), "q": _hash(q)},
        bool(ok),
        {"map": map_to_json(f), "classification": c.to_json()},
    )


# ---------------------------------------------------------------------------
# pullback-power (SM7)


@dataclass(frozen=True)
class DegreewisePullback:
    complex: ChainComplex
    inclusions: dict  # n -> K_n, columns span the pullback inside X_n (+) Y_n
    retractions: dict


def pullback_of_complexes(u: ChainMap, v: ChainMap) -> DegreewisePullback:
    """``X x_Z Y`` for ``u : X -> Z``, ``v : Y -> Z`` as kernels of ``[u, -v]``."""
    X, Y = u.source, v.source
    lo = min(X.min_deg, Y.min_deg)
    hi = max(X.max_deg, Y.max_deg)
    K, L, ranks = {}, {}, {}
    for n in range(lo, hi + 1):
        M = np.concatenate([u[n], -v[n]], axis=1)
        if M.shape[0] == 0:
            K[n], L[n] = identity(M.shape[1]), identity(M.shape[1])
        else:
            K[n], L[n] = kernel_with_retraction(M)
        ranks[n] = K[n].shape[1]
    diffs = {}
    for n in range(lo + 1, hi + 1):
        dsum = block_diag(X.d(n), Y.d(n))
        img = dsum.dot(K[n])
        D = L[n - 1].dot(img) if ranks[n - 1] else zeros(0, ranks[n])
        if ranks[n - 1] and not np.array_equal(K[n - 1].dot(D), img):
            raise ArithmeticError(f"pullback is not a subcomplex in degree {n}")
        diffs[n] = D
    P = ChainComplex(ranks, diffs, min_deg=lo, max_deg=hi, nonneg=lo >= 0)
    return DegreewisePullback(P, K, L)


def _into_pullback(pb: DegreewisePullback, f: ChainMap, g: ChainMap) -> ChainMap:
    """The map ``W -> X x_Z Y`` induced by ``f : W -> X`` and ``g : W -> Y``."""
    comps = {}
    for n in f.source.degrees:
        joint = np.concatenate([f[n], g[n]], axis=0)
        if pb.complex.rank(n) == 0:
            continue
        c = pb.retractions[n].dot(joint)
        if not np.array_equal(pb.inclusions[n].dot(c), joint):
            raise ArithmeticError(f"maps do not agree over the base in degree {n}")
        comps[n] = c
    return ChainMap(f.source, pb.complex, comps)


def _tau_map(f: ChainMap) -> ChainMap:
    S, iS = truncation_with_inclusion(f.source)
    T, iT = truncation_with_inclusion(f.target)
    comps = {}
    for n in S.degrees:
        img = f[n].dot(iS[n])
        if n == 0 and T.rank(0):
            _, L = kernel_with_retraction(f.target.d(0))
            comps[0] = L.dot(img)
        else:
            comps[n] = img
    return ChainMap(S, T, comps)


def pullback_power_chain(i: ChainMap, p: ChainMap) -> ChainMap:
    """``τHOM(b, x) -> τHOM(a, x) x_{τHOM(a, y)} τHOM(b, y)`` for ``i : a -> b``, ``p : x -> y``."""
    a, b = i.source, i.target
    x, y = p.source, p.target
    i_x = precompose_hom(i, x)        # HOM(b,x) -> HOM(a,x)
    p_a = postcompose_hom(a, p)       # HOM(a,x) -> HOM(a,y)
    i_y = precompose_hom(i, y)        # HOM(b,y) -> HOM(a,y)
    p_b = postcompose_hom(b, p)       # HOM(b,x) -> HOM(b,y)
    u, v = _tau_map(p_a), _tau_map(i_y)
    pb = pullback_of_complexes(u, v)
    return _into_pullback(pb, _tau_map(i_x), _tau_map(p_b))


class PullbackModule(SimplicialModule):
    """Levelwise pullback of ``u : X -> Z <- Y : v`` through level ``up_to``."""

    def __init__(self, u: SimplicialMap, v: SimplicialMap, up_to: int):
        super().__init__()
        self.u, self.v = u, v
        self.ring = u.ring
        self.level_bound = up_to
        self.normal_bound = None
        self.K, self.L = {}, {}
        for n in range(up_to + 1):
            M = np.concatenate([u[n], -v[n]], axis=1)
            if M.shape[0] == 0:
                self.K[n] = self.L[n] = identity(M.shape[1])
            else:
                self.K[n], self.L[n] = kernel_with_retraction(M)

    def rank(self, n):
        self.check_level(n)
        return self.K[n].shape[1]

    def _structure_map(self, alpha, n):
        m = len(alpha) - 1
        if self.rank(m) == 0 or self.rank(n) == 0:
            return zeros(self.rank(m), self.rank(n))
        both = block_diag(self.u.source.structure_map(alpha, n), self.v.source.structure_map(alpha, n))
        return self.L[m].dot(both).dot(self.K[n])


def _gamma_source_map(i: ChainMap, src_a, src_b, n: int) -> ChainMap:
    """``N(Γi (x) 1) : N(Γa (x) RΔ^n) -> N(Γb (x) RΔ^n)`` through the sources' truncation degree."""
    top = src_a.top
    gi = gamma_map(i, top)
    Ma, Mb = src_a.module(n), src_b.module(n)
    Na, Nb = normalization(Ma, top), normalization(Mb, top)
    R = Ma.right
    comps = {k: Nb.projection(k).dot(np.kron(gi[k], identity(R.rank(k)))).dot(Na.inclusion(k))
             for k in range(top + 1)}
    return ChainMap(Na.complex, Nb.complex, comps, check=False)


def pullback_power_gamma(i: ChainMap, p: ChainMap, up_to: int = 3):
    """The pullback-power map for the global homs ``HOM(Γ-, Γ-)`` in sMod, through level ``up_to``."""
    from .enrichment import transform_levels

    a, b = i.source, i.target
    x, y = p.source, p.target
    Ga, Gb = gamma(a), gamma(b)
    top = max(x.max_deg, y.max_deg, 0) + 1
    Nx = normalize_map(gamma_map(p, top), top)  # N Γ p = p under ε = 1
    W = _sized_global(Gb, Nx.source, up_to, top)
    X = _sized_global(Ga, Nx.source, up_to, top)
    Y = _sized_global(Gb, Nx.target, up_to, top)
    Z = _sized_global(Ga, Nx.target, up_to, top)

    def pre(src, tgt):
        return lambda n, f: compose(f, _gamma_source_map(i, tgt.source, src.source, n))

    def post(src, tgt):
        return lambda n, f: compose(Nx, f)

    i_x = transform_levels(W, X, pre(W, X), up_to)
    p_a = transform_levels(X, Z, post(X, Z), up_to)
    i_y = transform_levels(Y, Z, pre(Y, Z), up_to)
    p_b = transform_levels(W, Y, post(W, Y), up_to)
    P = PullbackModule(p_a, i_y, up_to)
    comps = {}
    for n in range(up_to + 1):
        joint = np.concatenate([i_x[n], p_b[n]], axis=0)
        if P.rank(n) == 0:
            comps[n] = zeros(0, W.rank(n))
            continue
        c = P.L[n].dot(joint)
        if not np.array_equal(P.K[n].dot(c), joint):
            raise ArithmeticError(f"level {n}: maps do not agree over the base")
        comps[n] = c
    return SimplicialMap(W, P, comps, up_to)


def _sized_global(A, T, up_to, top):
    from .enrichment import GlobalSource, HomModel

    return HomModel(GlobalSource(A, top), T, up_to, "global")


def check_sm7_instance(i: ChainMap, p: ChainMap, enrichment_side: str = "chain_internal",
                       up_to: int = 3) -> VerificationReport:
    """The pullback-power of a cofibration and a fibration is a fibration (acyclic if either input is)."""
    ci, cp = classify_map(i), classify_map(p)
    if not ci.is_cofibration:
        raise ValueError("i is not a cofibration")
    if not cp.is_fibration:
        raise ValueError("p is not a fibration")
    acyclic = ci.is_weak_equivalence or cp.is_weak_equivalence
    if enrichment_side == "chain_internal":
        f = pullback_power_chain(i, p)
        c = classify_chain_map(f)
        cert = {"map": map_to_json(f)}
    elif enrichment_side == "after_gamma":
        g = pullback_power_gamma(i, p, up_to)
        f = normalize_map(g, up_to)
        # N through level L is exact in degrees <= L; homology only below L
        c = classify_chain_map(f, degrees=range(up_to))
        cert = {"level_bound": up_to, "normalized_map": map_to_json(f),
                "level_ranks": [g.target.rank(n) for n in range(up_to + 1)]}
        fib_ok, fev = _fibration_evidence(f, range(1, up_to + 1))
        c = MapClassification(c.is_cofibration, fib_ok, c.is_weak_equivalence, None,
                              {**c.evidence, "fibration_cokernels": fev})
    else:
        raise ValueError(f"unknown enrichment side {enrichment_side!r}")
    ok = bool(c.is_fibration) and (c.is_weak_equivalence or not acyclic)
    cert.update({"acyclic_required": acyclic, "classification": c.to_json()})
    return VerificationReport(f"sm7_{enrichment_side}", {"i": _hash(i), "p": _hash(p)}, ok, cert)


def standard_fibration() -> ChainMap:
    """``D(1) -> S(1)``, the identity in degree 1 (surjective, not a weak equivalence)."""
    return ChainMap(disk(1), sphere(1), {1: identity(1)})


# ---------------------------------------------------------------------------
# π0 of the mapping space


def homotopy_classes(x: ChainComplex, y: ChainComplex):
    """``[x, y]`` as chain maps modulo null-homotopic ones.

    Returns ``(invariants, group, generators)``: ``generators`` pairs each
    nontrivial SNF generator (a chain map) with its order (0 for infinite).
    """
    G = chain_map_group(x, y)
    hl, total = _homotopy_layout(x, y)
    cols = []
    for n, off, r, c in hl:
        for t in range(r * c):
            vec = zeros(total, 1)[:, 0]
            vec[off + t] = 1
            h = np.asarray(vec[off:off + r * c], dtype=object).reshape(r, c)
            comps = {}
            for m in G.source.degrees:
                comps[m] = zeros(y.rank(m), x.rank(m))
            if n in comps:
                comps[n] = comps[n] + y.d(n + 1).dot(h)
            if n + 1 in comps:
                comps[n + 1] = comps[n + 1] + h.dot(x.d(n + 1))
            cols.append(G.coordinates(ChainMap(x, y, comps, check=False)))
    B = np.stack(cols, axis=1) if cols else zeros(G.rank, 0)
    inv = cokernel_invariants(B) if G.rank else AbelianGroupInvariants(0, ())
    gens = []
    if G.rank:
        U, D, _ = smith_normal_form(B) if B.shape[1] else (identity(G.rank), B, None)
        from .linalg import solve_linear

        Uinv = solve_linear(U, identity(G.rank))
        for t in range(G.rank):
            d = abs(int(D[t, t])) if t < min(D.shape) else 0
            if d == 1:
                continue
            gens.append((G.to_map(G.basis.dot(Uinv[:, t])), d))
    return inv, G, gens


def pi0_global_level(x: ChainComplex, y: ChainComplex) -> AbelianGroupInvariants:
    """``π_0 HOM(Γx, Γy) = level 0 / (d_0 - d_1)(level 1)``."""
    H = global_model(gamma(x), y, 1)
    if H.rank(0) == 0:
        return AbelianGroupInvariants(0, ())
    M = H.face(0, 1) - H.face(1, 1)
    return cokernel_invariants(M)


def check_pi0_mapping_space_instance(x: ChainComplex, y: ChainComplex) -> VerificationReport:
    inv, G, gens = homotopy_classes(x, y)
    h0 = homology(truncate_nonneg(hom_complex(x, y))).get(0, AbelianGroupInvariants(0, ()))
    g0 = pi0_global_level(x, y)
    # certify each generator's order with the homotopy solver
    witnesses = []
    solver_ok = True
    zero = zero_map(x, y)
    for f, d in gens:
        nonnull = find_chain_homotopy(zero, f) is None
        mult = None if d == 0 else find_chain_homotopy(zero, f.scale(d))
        ok = nonnull and (d == 0 or mult is not None)
        solver_ok = solver_ok and ok
        witnesses.append({"generator": map_to_json(f), "order": d, "not_null": nonnull,
                          "order_homotopy": None if mult is None else mult.to_json()})
    ok = inv == h0 == g0 and solver_ok
    return VerificationReport(
        "pi0_mapping_space",
        {"x": _hash(x), "y": _hash(y)},
        bool(ok),
        {"homotopy_classes": str(inv), "h0_truncated_hom": str(h0), "pi0_global_hom": str(g0),
         "chain_map_rank": G.rank, "generators": witnesses, "y_fibrant": True},
    )


# ---------------------------------------------------------------------------
# weak tensoring maps and the combined checklist


def check_weak_structure_instance(x: ChainComplex, C: ChainComplex, y: ChainComplex,
                                  up_to: int = 3) -> VerificationReport:
    """``N(φ̃)`` and ``N(ψ̃)`` are quasi-isomorphisms below ``up_to``; ``ρ̃`` is an isomorphism."""
    w = weak_structure_maps(x, gamma(C), y, up_to)
    degs = range(up_to)
    qphi = is_quasi_iso(normalize_map(w.phi_tilde, up_to), degs)
    qpsi = is_quasi_iso(normalize_map(w.psi_tilde, up_to), degs)
    from .chain import is_isomorphism

    rho_iso = is_isomorphism(w.rho_tilde)
    eta_iso = is_isomorphism(w.eta_tilde)
    ok = qphi.holds and qpsi.holds and rho_iso and eta_iso
    return VerificationReport(
        "weak_structure_maps",
        {"x": _hash(x), "C": _hash(C), "y": _hash(y)},
        ok,
        {"level_bound": up_to, "phi_quasi_iso": qphi.holds, "psi_quasi_iso": qpsi.holds,
         "rho_iso": rho_iso, "eta_iso": eta_iso,
         "phi_levels": [matrix_to_json(w.phi_tilde[n]) for n in range(up_to + 1)],
         "psi_levels": [matrix_to_json(w.psi_tilde[n]) for n in range(up_to + 1)]},
    )


def check_weak_model_instance(x: ChainComplex, y: ChainComplex, up_to: int = 3) -> list:
    """Checklist for the Γ-changed enrichment on one ``(x, y)`` pair."""
    reports = [check_pi0_mapping_space_instance(x, y), check_weak_structure_instance(x, unit_complex(), y, up_to)]
    i = zero_map(zero_complex(), x)
    reports.append(check_sm7_instance(i, standard_fibration(), "after_gamma", up_to))
    return reports
