import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dkforge.chain import (
    ChainMap,
    ComplexError,
    chain_map_group,
    direct_sum,
    direct_sum_maps,
    disk,
    elementary,
    hom_complex,
    identity_map,
    precompose_hom,
    sphere,
    tensor_complexes,
    truncate_nonneg,
    unit_complex,
    zero_complex,
    zero_map,
)
from dkforge.dold_kan import gamma_map
from dkforge.homotopy import find_chain_homotopy, is_quasi_iso
from dkforge.linalg import Ring
from dkforge.model import (
    STRUCTURES,
    check_pi0_mapping_space_instance,
    check_pushout_product_instance,
    check_sm7_instance,
    check_unit_axiom_instance,
    check_weak_model_instance,
    classify_map,
    dold_kan_unit_replacement,
    generating_acyclic_cofibrations,
    generating_cofibrations,
    homotopy_classes,
    standard_fibration,
)
from strategies import GRID, GRID_NAMES, GRID_PAIRS, small_complexes

GENS = generating_cofibrations()
ACYC = generating_acyclic_cofibrations()


def _some_map(X, Y, coeffs):
    G = chain_map_group(X, Y)
    c = np.array([coeffs[k % len(coeffs)] for k in range(G.rank)], dtype=object)
    return G.to_map(G.basis.dot(c) if G.rank else np.zeros(G.basis.shape[0], dtype=object))


def test_classification_examples():
    c = classify_map(zero_map(zero_complex(), sphere(0)))
    assert c.is_cofibration and not c.is_weak_equivalence
    Z = unit_complex()
    c = classify_map(ChainMap(Z, Z, {0: [[2]]}))
    assert not c.is_cofibration and not c.is_weak_equivalence
    assert c.evidence["cokernels"]["0"]["cokernel"] == "Z/2"
    c = classify_map(zero_map(disk(1), zero_complex()))
    assert c.is_fibration and c.is_weak_equivalence


def test_classify_rejects():
    Z6 = unit_complex(Ring(6))
    with pytest.raises(ComplexError):
        classify_map(identity_map(Z6))
    with pytest.raises(ValueError):
        classify_map(identity_map(sphere(0)), "bogus")
    with pytest.raises(TypeError):
        classify_map(identity_map(sphere(0)), "std_smod")


def test_std_smod_classifies_through_normalization():
    f = ChainMap(direct_sum(unit_complex(), disk(1)), unit_complex(), {0: [[1, 0]]})
    c = classify_map(gamma_map(f, 2), "std_smod")
    assert c.is_weak_equivalence and c.is_fibration


def test_hurewicz_flags():
    f = ChainMap(direct_sum(unit_complex(), disk(1)), unit_complex(), {0: [[1, 0]]})
    c = classify_map(f, "hurewicz")
    assert c.is_hurewicz_weq and c.is_weak_equivalence
    assert c.is_cofibration is None and c.is_fibration is None
    assert "homotopy_inverse" in c.evidence


@given(small_complexes(max_degree=2, max_rank=2), small_complexes(max_degree=2, max_rank=2),
       st.lists(st.integers(-2, 2), min_size=1, max_size=4))
def test_hurewicz_implies_weq(X, Y, coeffs):
    f = _some_map(X, Y, coeffs)
    c = classify_map(f, "hurewicz")
    if c.is_hurewicz_weq:
        assert c.is_weak_equivalence
    assert c.is_hurewicz_weq == c.is_weak_equivalence  # bounded free complexes


@given(small_complexes(max_degree=2, max_rank=2), small_complexes(max_degree=2, max_rank=2),
       st.lists(st.integers(-2, 2), min_size=1, max_size=4), st.integers(1, 3))
def test_disk_sum_stability(X, Y, coeffs, n):
    f = _some_map(X, Y, coeffs)
    g = direct_sum_maps(f, identity_map(disk(n)))
    a, b = classify_map(f), classify_map(g)
    assert (a.is_cofibration, a.is_fibration, a.is_weak_equivalence) == \
        (b.is_cofibration, b.is_fibration, b.is_weak_equivalence)


WEQS = [
    ("proj", ChainMap(direct_sum(unit_complex(), disk(1)), unit_complex(), {0: [[1, 0]]})),
    ("incl", ChainMap(unit_complex(), direct_sum(unit_complex(), disk(1)), {0: [[1], [0]]})),
    ("0->D(2)", zero_map(zero_complex(), disk(2))),
]


@pytest.mark.parametrize("name,f", WEQS)
@pytest.mark.parametrize("z", GRID_NAMES)
def test_enriched_whitehead_direction(name, f, z):
    assert classify_map(f).is_weak_equivalence
    fstar = precompose_hom(f, GRID[z])
    assert is_quasi_iso(fstar)


@pytest.mark.parametrize("x,y", GRID_PAIRS)
def test_tensor_cofibrant_and_hom_fibrant(x, y):
    X, Y = GRID[x], GRID[y]
    assert classify_map(zero_map(zero_complex(), tensor_complexes(X, Y))).is_cofibration
    H = truncate_nonneg(hom_complex(X, Y))
    assert classify_map(zero_map(H, zero_complex())).is_fibration


@pytest.mark.parametrize("a", [k for k, _ in GENS + ACYC])
@pytest.mark.parametrize("b", [k for k, _ in GENS])
def test_pushout_products(a, b):
    maps = dict(GENS + ACYC)
    rep = check_pushout_product_instance(maps[a], maps[b])
    assert rep.passed
    assert rep.certificates["acyclic_required"] == a.startswith("0->D")


def test_pushout_product_requires_cofibrations():
    Z = unit_complex()
    with pytest.raises(ValueError):
        check_pushout_product_instance(ChainMap(Z, Z, {0: [[2]]}), GENS[0][1])


@pytest.mark.parametrize("x", GRID_NAMES)
def test_unit_axiom(x):
    assert check_unit_axiom_instance(GRID[x])
    rep = check_unit_axiom_instance(GRID[x], hurewicz=True)
    assert rep and "homotopy_inverse" in rep.certificates["classification"]["evidence"]
    Q, q, _ = dold_kan_unit_replacement()
    assert check_unit_axiom_instance(GRID[x], (Q, q))


def test_unit_axiom_trivial_replacement():
    Z = unit_complex()
    assert check_unit_axiom_instance(GRID["S(1)"], (Z, identity_map(Z)))


@pytest.mark.parametrize("side", ["chain_internal", "after_gamma"])
@pytest.mark.parametrize("i", [k for k, _ in GENS + ACYC])
def test_sm7(side, i):
    rep = check_sm7_instance(dict(GENS + ACYC)[i], standard_fibration(), side)
    assert rep.passed


def test_sm7_trivial_and_rejects():
    z = zero_complex()
    assert check_sm7_instance(zero_map(z, z), zero_map(z, z))
    Z = unit_complex()
    with pytest.raises(ValueError):
        check_sm7_instance(GENS[0][1], ChainMap(sphere(1), sphere(1), {1: [[2]]}))
    with pytest.raises(ValueError):
        check_sm7_instance(ChainMap(Z, Z, {0: [[2]]}), standard_fibration())


def test_sm7_with_zero_source_is_postcomposition():
    rep = check_sm7_instance(zero_map(zero_complex(), GRID["S(1)+S(0)"]), standard_fibration())
    assert rep.passed and not rep.certificates["acyclic_required"]


def test_pi0_examples():
    S1 = sphere(1)
    rep = check_pi0_mapping_space_instance(S1, S1)
    assert rep and rep.certificates["homotopy_classes"] == "Z"
    rep = check_pi0_mapping_space_instance(sphere(0), elementary(1, 2))
    assert rep and rep.certificates["homotopy_classes"] == rep.certificates["h0_truncated_hom"] == "Z/2"


def test_pi0_brute_force_classes():
    """Maps ``S(0) -> (Z --2--> Z)`` with coefficient in -4..4 fall into exactly two homotopy classes."""
    X, Y = sphere(0), elementary(1, 2)
    maps = [ChainMap(X, Y, {0: [[a]]}) for a in range(-4, 5)]
    reps = []
    for f in maps:
        if not any(find_chain_homotopy(f, g) is not None for g in reps):
            reps.append(f)
    assert len(reps) == 2
    inv, _, gens = homotopy_classes(X, Y)
    assert str(inv) == "Z/2" and [d for _, d in gens] == [2]


@pytest.mark.parametrize("x,y", GRID_PAIRS)
def test_pi0_grid(x, y):
    assert check_pi0_mapping_space_instance(GRID[x], GRID[y])


@pytest.mark.parametrize("x,y", [("S(1)", "S(1)"), ("S(1)+S(0)", "Z-2->Z"), ("D(1)", "S(2)")])
def test_weak_model_checklist(x, y):
    assert all(check_weak_model_instance(GRID[x], GRID[y]))


def test_structure_names():
    assert STRUCTURES == ("proj_ch", "std_smod", "hurewicz")
