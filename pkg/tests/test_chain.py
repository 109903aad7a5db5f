import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from dkforge.chain import (
    ChainComplex,
    ChainMap,
    ComplexError,
    associator,
    chain_map_group,
    complex_from_json,
    complex_to_json,
    compose,
    direct_sum,
    disk,
    elementary,
    hom_complex,
    homology,
    identity_map,
    is_acyclic,
    map_from_json,
    map_to_json,
    mapping_cone,
    pushout_product,
    shift,
    sphere,
    symmetry,
    tensor_complexes,
    tensor_maps,
    truncate_nonneg,
    unit_complex,
    unitor_left,
    unitor_right,
    validate_complex,
    zero_complex,
)
from dkforge.linalg import identity
from strategies import GRID, GRID_NAMES, small_complexes


def _oracle_homology(X):
    """``H_n`` from sympy: free rank ``dim ker d_n - rank d_{n+1}``, torsion the invariant factors of ``d_{n+1}``."""
    out = {}
    for n in X.degrees:
        dn, dn1 = X.d(n), X.d(n + 1)
        rk_n = sympy.Matrix(dn.tolist()).rank() if dn.size else 0
        if dn1.size:
            D = sympy_snf(sympy.Matrix(dn1.tolist()), domain=sympy.ZZ)
            fac = [abs(int(D[i, i])) for i in range(min(D.shape)) if D[i, i] != 0]
        else:
            fac = []
        free = X.rank(n) - rk_n - len(fac)
        tors = sorted(f for f in fac if f != 1)
        out[n] = "0" if free == 0 and not tors else " + ".join(
            (["Z"] if free == 1 else [f"Z^{free}"] if free else []) + [f"Z/{t}" for t in tors])
    return out


def _random_map(X, Y, coeffs):
    G = chain_map_group(X, Y)
    if not G.rank:
        return G.to_map(np.zeros(G.basis.shape[0], dtype=object))
    c = np.array([coeffs[k % len(coeffs)] for k in range(G.rank)], dtype=object)
    return G.to_map(G.basis.dot(c))


def test_validate_examples():
    assert validate_complex(sphere(3)) is None
    with pytest.raises(ComplexError) as exc:
        ChainComplex({0: 1, 1: 1, 2: 1}, {1: [[1]], 2: [[1]]})
    assert exc.value.degree == 2
    with pytest.raises(ComplexError) as exc:
        ChainComplex({-1: 1, 0: 1}, nonneg=True)
    assert exc.value.degree == -1
    with pytest.raises(ComplexError):
        ChainComplex({0: 1, 1: 2}, {1: [[1, 0, 0]]})


def test_tensor_examples():
    S = tensor_complexes(sphere(1), sphere(2))
    assert S.ranks == {3: 1}
    DD = tensor_complexes(disk(1), disk(1))
    assert DD.ranks == {0: 1, 1: 2, 2: 1}
    assert DD.d(2).tolist() == [[1], [-1]]
    assert DD.d(1).tolist() == [[1, 1]]


def test_hom_examples():
    X = GRID["S(1)+S(0)"]
    assert hom_complex(unit_complex(), X) == X
    H = hom_complex(sphere(1), sphere(0))
    assert H.ranks == {-1: 1}
    HD = hom_complex(disk(1), sphere(0))
    assert HD.ranks == {-1: 1, 0: 1}
    assert abs(HD.d(0)[0, 0]) == 1
    assert is_acyclic(HD)


def test_truncation_examples():
    X = GRID["Z-2->Z"]
    assert truncate_nonneg(X) == X
    assert truncate_nonneg(shift(disk(1), -1)).is_zero()
    assert truncate_nonneg(hom_complex(sphere(1), unit_complex())).is_zero()


def test_homology_examples():
    assert {n: str(h) for n, h in homology(sphere(2)).items()} == {2: "Z"}
    assert {n: str(h) for n, h in homology(elementary(1, 2)).items()} == {0: "Z/2", 1: "0"}
    assert is_acyclic(disk(1))


def test_cone_examples():
    Z = unit_complex()
    C = mapping_cone(identity_map(Z))
    assert C.ranks == {0: 1, 1: 1} and is_acyclic(C)
    X = GRID["S(1)+S(0)"]
    assert mapping_cone(ChainMap(zero_complex(), X, {})) == X
    two = ChainMap(Z, Z, {0: [[2]]})
    assert str(homology(mapping_cone(two))[0]) == "Z/2"


def test_pushout_product_examples():
    Z, z = unit_complex(), zero_complex()
    u = ChainMap(z, Z, {})
    pp = pushout_product(u, u)
    assert pp.pushout.is_zero() and pp.map.target.ranks == {0: 1}
    sd = ChainMap(sphere(0), disk(1), {0: [[1]]})
    pp = pushout_product(u, sd)
    assert pp.pushout.ranks == {0: 1} and pp.map.target.ranks == {0: 1, 1: 1}
    pp = pushout_product(sd, sd)
    assert pp.cokernel_ranks == {0: 0, 1: 0, 2: 1}
    assert pp.map.target.ranks == {0: 1, 1: 2, 2: 1}


def test_pushout_product_rejects_nonsplit():
    Z = unit_complex()
    with pytest.raises(ComplexError):
        pushout_product(ChainMap(Z, Z, {0: [[2]]}), ChainMap(Z, Z, {0: [[1]]}))


@given(small_complexes(), small_complexes())
def test_tensor_is_valid_complex(X, Y):
    T = tensor_complexes(X, Y)
    assert validate_complex(T) is None
    assert validate_complex(hom_complex(X, Y)) is None


@given(small_complexes())
def test_unit_laws(X):
    for u in (unitor_left(X), unitor_right(X)):
        assert all(np.array_equal(u[n], identity(X.rank(n))) for n in X.degrees)


@given(small_complexes(max_degree=2, max_rank=2), small_complexes(max_degree=2, max_rank=2),
       small_complexes(max_degree=2, max_rank=2))
def test_associator_conjugates_differentials(X, Y, Z):
    a = associator(X, Y, Z)   # ChainMap validates the square
    for n in a.source.degrees:
        M = a[n]
        assert np.array_equal(M.dot(M.T), identity(M.shape[0]))


@given(small_complexes(max_degree=2), small_complexes(max_degree=2))
def test_symmetry_involution(X, Y):
    s = compose(symmetry(Y, X), symmetry(X, Y))
    assert s == identity_map(tensor_complexes(X, Y))


@given(small_complexes())
def test_homology_matches_sympy(X):
    assert {n: str(h) for n, h in homology(X).items()} == _oracle_homology(X)


@given(small_complexes(), st.integers(-3, 3))
def test_truncation_idempotent_and_shift(X, k):
    assert truncate_nonneg(X) == X
    Y = shift(X, k)
    T = truncate_nonneg(Y)
    assert truncate_nonneg(T) == T
    H, HT = homology(Y), homology(T)
    assert all(str(HT[n]) == str(H.get(n, "0")) for n in HT)


@given(small_complexes(max_degree=2, max_rank=2), small_complexes(max_degree=2, max_rank=2),
       st.lists(st.integers(-3, 3), min_size=1, max_size=4))
def test_cone_acyclic_iff_homology_iso(X, Y, coeffs):
    f = _random_map(X, Y, coeffs)
    HX, HY = homology(X), homology(Y)
    acyclic = is_acyclic(mapping_cone(f))
    if acyclic:
        degs = set(HX) | set(HY)
        assert all(str(HX.get(n, "0")) == str(HY.get(n, "0")) for n in degs)
    if X == Y:
        assert is_acyclic(mapping_cone(identity_map(X)))


@pytest.mark.parametrize("x", GRID_NAMES)
@pytest.mark.parametrize("v", GRID_NAMES)
def test_hom_set_adjunction(x, v):
    X, V, Y = GRID[x], GRID[v], GRID["S(1)+S(0)"]
    lhs = chain_map_group(tensor_complexes(X, V), Y).invariants
    rhs = chain_map_group(V, hom_complex(X, Y)).invariants
    assert lhs == rhs


@given(small_complexes(), st.integers(-2, 2))
def test_complex_json_round_trip(X, k):
    X = shift(X, k)
    doc = complex_to_json(X)
    assert complex_from_json(doc) == X
    assert complex_to_json(complex_from_json(doc)) == doc


def test_map_json_round_trip_and_rejects():
    f = tensor_maps(identity_map(disk(1)), ChainMap(sphere(0), disk(1), {0: [[1]]}))
    doc = map_to_json(f)
    assert map_from_json(doc) == f and map_to_json(map_from_json(doc)) == doc
    doc["components"][0]["matrix"]["entries"] = []
    with pytest.raises(ComplexError):
        map_from_json(doc)


def test_direct_sum_ranks():
    X = direct_sum(sphere(1), sphere(0), disk(2))
    assert X.ranks == {0: 1, 1: 2, 2: 1}
