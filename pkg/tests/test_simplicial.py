import itertools
from math import comb

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dkforge.chain import homology, homology_equal, sphere
from dkforge.dold_kan import gamma
from dkforge.linalg import identity, integer_rank
from dkforge.simplicial import (
    LevelBoundError,
    LevelwiseModule,
    SimplicialError,
    check_simplicial_identities,
    compose_ops,
    constant_module,
    degenerate_quotient_ranks,
    eval_structure_map,
    materialize,
    module_from_json,
    module_to_json,
    monotone_maps,
    normalize,
    standard_simplex_module,
    surjections,
    tensor_levelwise,
)
from strategies import GRID, GRID_PAIRS, small_complexes


def _brute_surjections(n, k):
    return sum(1 for f in itertools.product(range(k + 1), repeat=n + 1)
               if all(a <= b for a, b in zip(f, f[1:])) and set(f) == set(range(k + 1)))


def test_structure_map_examples():
    G = gamma(sphere(1))
    for A in (G, constant_module(), standard_simplex_module(2)):
        for n in range(3):
            d0s0 = A.face(0, n + 1).dot(A.degeneracy(0, n))
            assert np.array_equal(d0s0, identity(A.rank(n)))
            s0 = A.degeneracy(0, n)
            assert integer_rank(s0) == A.rank(n)
    assert G.face(0, 1).shape == (0, 1) and G.face(1, 1).shape == (0, 1)


def test_structure_map_rejects():
    A = standard_simplex_module(1)
    with pytest.raises(SimplicialError):
        eval_structure_map(A, (1, 0), 1)
    B = standard_simplex_module(1, up_to=2)
    with pytest.raises(LevelBoundError):
        B.rank(3)


def test_standard_simplex_examples():
    assert all(standard_simplex_module(0).rank(m) == 1 for m in range(5))
    assert [standard_simplex_module(1).rank(m) for m in range(5)] == [m + 2 for m in range(5)]
    assert [standard_simplex_module(n).rank(0) for n in range(5)] == [n + 1 for n in range(5)]
    N = normalize(standard_simplex_module(1), 2)
    assert N.ranks == {0: 2, 1: 1, 2: 0}
    assert sorted(N.d(1)[:, 0].tolist()) == [-1, 1]


def test_normalize_constant():
    assert normalize(constant_module(), 4).ranks == {0: 1, 1: 0, 2: 0, 3: 0, 4: 0}


def test_tensor_examples():
    G = gamma(sphere(1))
    T = tensor_levelwise(G, G)
    assert T.rank(2) == 4
    c = constant_module()
    A = gamma(GRID["S(1)+S(0)"])
    CA = tensor_levelwise(c, A)
    for n in range(4):
        assert CA.rank(n) == A.rank(n)
        for i in range(n + 1):
            if n:
                assert np.array_equal(CA.face(i, n), A.face(i, n))


@pytest.mark.parametrize("n", range(6))
def test_surjection_enumeration(n):
    for k in range(n + 1):
        assert sum(1 for e in surjections(n) if e[-1] == k) == comb(n, k) == _brute_surjections(n, k)
    assert list(surjections(n)) == sorted(surjections(n))
    assert len(monotone_maps(n, 2)) == comb(n + 3, 2)


@given(small_complexes(max_degree=2, max_rank=2))
def test_gamma_functorial_on_all_operators(C):
    """``A(beta ∘ alpha) = A(alpha) A(beta)`` for every composable pair through level 3."""
    A = gamma(C)
    for m, k, n in itertools.product(range(3), range(3), range(3)):
        for alpha in monotone_maps(m, k):
            for beta in monotone_maps(k, n):
                lhs = A.structure_map(compose_ops(beta, alpha), n)
                rhs = A.structure_map(alpha, k).dot(A.structure_map(beta, n))
                assert np.array_equal(lhs, rhs)


@given(small_complexes(max_degree=2, max_rank=2))
def test_materialized_module_matches(C):
    A = gamma(C)
    M = materialize(A, 4)
    assert check_simplicial_identities(M) == []
    for alpha in monotone_maps(2, 4):
        assert np.array_equal(M.structure_map(alpha, 4), A.structure_map(alpha, 4))


@given(small_complexes(max_degree=3, max_rank=3))
def test_basis_and_kernel_normalization_agree(C):
    A = gamma(C)
    top = max(C.max_deg, 0) + 1
    Nb = normalize(A, top, method="basis")
    Nk = normalize(A, top, method="kernel")
    assert Nb.ranks == Nk.ranks == degenerate_quotient_ranks(A, top)
    assert homology_equal(homology(Nb), homology(Nk))
    assert Nb.rank(0) == A.rank(0)


@given(small_complexes(max_degree=2, max_rank=2))
def test_homology_stable_in_bound(C):
    A = gamma(C)
    b = max(C.max_deg, 0)
    H1 = homology(normalize(A, b + 1))
    H2 = homology(normalize(A, b + 3))
    assert all(str(H1[n]) == str(H2[n]) for n in range(b + 1))


@pytest.mark.parametrize("x,y", GRID_PAIRS)
def test_tensor_normalization_pigeonhole_bound(x, y):
    C, D = GRID[x], GRID[y]
    p, q = max(C.max_deg, 0), max(D.max_deg, 0)
    T = tensor_levelwise(gamma(C), gamma(D))
    N = normalize(T, p + q + 2, method="kernel")
    assert all(N.rank(n) == 0 for n in range(p + q + 1, p + q + 3))


def test_levelwise_rejects_bad_identities():
    good = materialize(standard_simplex_module(1), 2)
    doc = module_to_json(good)
    assert module_to_json(module_from_json(doc)) == doc
    faces = {1: [good.face(0, 1), good.face(0, 1)], 2: [good.face(i, 2) for i in range(3)]}
    degens = {0: [good.degeneracy(0, 0)], 1: [good.degeneracy(j, 1) for j in range(2)]}
    with pytest.raises(SimplicialError):
        LevelwiseModule([good.rank(n) for n in range(3)], faces, degens)


@given(st.integers(0, 3), st.integers(0, 4))
def test_standard_simplex_identities(N, L):
    assert check_simplicial_identities(standard_simplex_module(N), L) == []
