import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dkforge.chain import (
    chain_map_group,
    compose,
    hom_complex,
    homology,
    homology_equal,
    identity_map,
    is_isomorphism,
    sphere,
    tensor_complexes,
    unit_complex,
)
from dkforge.dold_kan import gamma, simplicial_hom_group
from dkforge.enrichment import (
    TENSOR_COTENSOR_KINDS,
    comparison_maps,
    curry,
    eta_tilde,
    global_hom,
    hom_swap,
    internal_hom_simplicial,
    local_hom,
    local_identification,
    psi_at_unit_matches_aw_star,
    rho_star_model,
    rho_tilde,
    tensor_cotensor_structures,
    tensor_hom_adjunction,
    uncurry,
    unit_model_identification,
    verify_comparison,
    weak_structure_maps,
)
from dkforge.homotopy import is_quasi_iso
from dkforge.linalg import identity
from dkforge.simplicial import check_simplicial_identities, check_simplicial_map, constant_module, normalize, normalize_map
from strategies import GRID, GRID_NAMES, GRID_PAIRS, small_complexes

L = 3


def _levels(M, up_to):
    return [M.rank(n) for n in range(up_to + 1)]


def _some_map(X, Y, coeffs):
    G = chain_map_group(X, Y)
    c = np.array([coeffs[k % len(coeffs)] for k in range(G.rank)], dtype=object)
    return G.to_map(G.basis.dot(c) if G.rank else np.zeros(G.basis.shape[0], dtype=object))


def test_internal_hom_examples():
    c = constant_module()
    B = gamma(GRID["S(1)+S(0)"])
    H = internal_hom_simplicial(c, B, L)
    assert _levels(H, L) == _levels(B, L)
    assert check_simplicial_identities(H, L) == []
    assert internal_hom_simplicial(c, c, L).rank(0) == 1
    assert _levels(internal_hom_simplicial(gamma(sphere(1)), c, L), L) == [0] * (L + 1)


def test_global_hom_examples():
    Z, S1 = unit_complex(), sphere(1)
    assert _levels(global_hom(Z, Z, L).carrier, L) == [1] * (L + 1)
    assert _levels(global_hom(S1, Z, L).carrier, L) == [0] * (L + 1)
    assert str(global_hom(S1, S1, L).carrier.group(0).invariants) == "Z"


def test_local_hom_examples():
    Z, S1 = unit_complex(), sphere(1)
    D = GRID["S(1)+S(0)"]
    assert _levels(local_hom(Z, D, L).carrier, L) == _levels(gamma(D), L)
    assert _levels(local_hom(S1, Z, L).carrier, L) == [0] * (L + 1)


@pytest.mark.parametrize("x,y", GRID_PAIRS)
def test_underlying_sets_agree(x, y):
    C, D = GRID[x], GRID[y]
    hom_ch = chain_map_group(C, D).invariants
    g0 = global_hom(C, D, 1).carrier.group(0).invariants
    loc = local_hom(C, D, 1).carrier
    assert g0 == hom_ch == simplicial_hom_group(gamma(C), gamma(D)).invariants
    assert loc.rank(0) == hom_ch.free_rank


def test_tensor_cotensor_units():
    C = GRID["S(1)+S(0)"]
    c = constant_module()
    assert tensor_cotensor_structures(C, c, "global_tensor").ranks == C.ranks
    assert tensor_cotensor_structures(C, c, "local_tensor") == C
    A = gamma(GRID["D(1)"])
    Z = unit_complex()
    NA = normalize(A)
    assert tensor_cotensor_structures(Z, A, "local_tensor") == NA
    assert tensor_cotensor_structures(Z, A, "global_tensor") == normalize(A, 1)
    with pytest.raises(ValueError):
        tensor_cotensor_structures(C, c, "bogus")


def test_global_and_local_tensor_differ_on_ranks():
    S1 = sphere(1)
    A = gamma(S1)
    g = tensor_cotensor_structures(S1, A, "global_tensor")
    loc = tensor_cotensor_structures(S1, A, "local_tensor")
    assert homology_equal(homology(g), homology(loc))
    assert g.ranks != loc.ranks
    assert g.rank(2) == 2 and loc.rank(2) == 1


@pytest.mark.parametrize("which", TENSOR_COTENSOR_KINDS)
def test_tensor_cotensor_homology_agree_across_flavors(which):
    C, A = GRID["Z-2->Z"], gamma(GRID["S(1)"])
    flavor, kind = which.split("_")
    other = ("local" if flavor == "global" else "global") + "_" + kind
    X = tensor_cotensor_structures(C, A, which, 2)
    Y = tensor_cotensor_structures(C, A, other, 2)
    top = 1 if kind == "cotensor" else 2
    HX, HY = homology(X), homology(Y)
    assert all(str(HX.get(n, "0")) == str(HY.get(n, "0")) for n in range(top))


@given(small_complexes(max_degree=2, max_rank=2), small_complexes(max_degree=1, max_rank=2),
       small_complexes(max_degree=2, max_rank=2))
def test_adjunction_and_swap_are_chain_isos(X, V, Y):
    phi = tensor_hom_adjunction(X, V, Y)
    psi = hom_swap(X, V, Y)
    from dkforge.chain import validate_map

    assert validate_map(phi) is None and is_isomorphism(phi)
    assert validate_map(psi) is None and is_isomorphism(psi)


@given(small_complexes(max_degree=2, max_rank=2), small_complexes(max_degree=2, max_rank=2),
       small_complexes(max_degree=2, max_rank=2), st.lists(st.integers(-2, 2), min_size=1, max_size=4))
def test_curry_uncurry_inverse(P, Z, W, coeffs):
    H = hom_complex(P, W)
    g = _some_map(Z, H, coeffs)
    f = uncurry(g, P, W)
    from dkforge.chain import validate_map

    assert validate_map(f) is None
    assert curry(f, P, Z) == g


@pytest.mark.parametrize("x,y", GRID_PAIRS)
def test_comparison_on_grid(x, y):
    cm = comparison_maps(GRID[x], GRID[y], L)
    assert check_simplicial_map(cm.aw_star) == [] and check_simplicial_map(cm.ez_star) == []
    r = verify_comparison(cm)
    assert r.ez_aw_identity and r.aw_ez_homotopy is not None and r.aw_quasi_iso and r.ez_quasi_iso


def test_comparison_unit_is_identity():
    D = GRID["S(1)+S(0)"]
    cm = comparison_maps(unit_complex(), D, L)
    for n in range(L + 1):
        assert np.array_equal(cm.aw_star[n], identity(cm.local.rank(n)))
        assert np.array_equal(cm.ez_star[n], identity(cm.global_.rank(n)))


def test_negative_witness_rank_gap():
    gaps = []
    for x, y in GRID_PAIRS:
        r = verify_comparison(comparison_maps(GRID[x], GRID[y], L))
        if r.local_ranks != r.global_ranks:
            gaps.append((x, y))
    assert ("S(1)", "S(2)") in gaps
    r = verify_comparison(comparison_maps(sphere(1), sphere(2), L))
    assert r.local_ranks == (0, 1, 2, 3) and r.global_ranks == (0, 2, 5, 9)


@pytest.mark.parametrize("x,y", [("S(1)", "S(1)"), ("S(1)+S(0)", "Z-2->Z"), ("D(1)", "S(2)")])
def test_local_identification_is_simplicial_iso(x, y):
    f = local_identification(GRID[x], GRID[y], L)
    assert check_simplicial_map(f) == []


@pytest.mark.parametrize("x,y", GRID_PAIRS)
def test_psi_at_unit_equals_aw_star(x, y):
    psi, aw_iota, _ = psi_at_unit_matches_aw_star(GRID[x], GRID[y], L)
    assert all(np.array_equal(psi[n], aw_iota[n]) for n in range(L + 1))


@pytest.mark.parametrize("x", GRID_NAMES)
def test_rho_eta_are_isos(x):
    X = GRID[x]
    assert is_isomorphism(rho_tilde(X)) and is_isomorphism(eta_tilde(X))


@pytest.mark.parametrize("x,y", [("S(1)", "S(1)"), ("S(1)+S(0)", "D(1)"), ("Z-2->Z", "S(2)")])
def test_unitality_triangle(x, y):
    X, Y = GRID[x], GRID[y]
    w = weak_structure_maps(X, constant_module(), Y, L)
    lhs = w.phi_tilde @ rho_star_model(X, Y, L)
    assert lhs == unit_model_identification(X, Y, L)


@settings(max_examples=8)
@given(small_complexes(max_degree=1, max_rank=2), st.sampled_from(GRID_NAMES),
       small_complexes(max_degree=1, max_rank=2))
def test_phi_psi_quasi_iso_seeded(x, a, y):
    w = weak_structure_maps(x, gamma(GRID[a]), y, L)
    assert check_simplicial_map(w.phi_tilde) == [] and check_simplicial_map(w.psi_tilde) == []
    degs = range(L)
    assert is_quasi_iso(normalize_map(w.phi_tilde, L), degs)
    assert is_quasi_iso(normalize_map(w.psi_tilde, L), degs)


def test_rho_tilde_example():
    X = GRID["S(1)+S(0)"]
    r = rho_tilde(X)
    assert r.source == tensor_complexes(X, unit_complex())
    assert compose(r, identity_map(r.source)) == r
