import pytest
from hypothesis import given
from hypothesis import strategies as st

from dkforge.chain import complex_to_json, homology, validate_complex
from dkforge.generate import (
    GeneratorParams,
    Pcg64Stream,
    generate_complex,
    instance_seed,
)
from dkforge.linalg import Ring
from strategies import seeds

M128 = (1 << 128) - 1
MULT = 0x2360ED051FC65DA44385DF649FCCF645
INC = 0x5851F42D4C957F2D14057B7EF767814F


def _oracle_stream(seed):
    """Pure-integer PCG64 (XSL-RR 128/64) from the recurrence written in the docs."""
    s = seed
    while True:
        s = (s * MULT + INC) & M128
        x = ((s >> 64) ^ s) & ((1 << 64) - 1)
        r = s >> 122
        yield ((x >> r) | (x << (64 - r))) & ((1 << 64) - 1)


def test_pcg_frozen_values():
    rng = Pcg64Stream(42)
    assert [rng.next_u64() for _ in range(3)] == [4647963831255307162, 17096482257289067021, 9005068463966194610]


@given(seeds)
def test_pcg_matches_oracle(seed):
    rng, ref = Pcg64Stream(seed), _oracle_stream(seed)
    assert [rng.next_u64() for _ in range(20)] == [next(ref) for _ in range(20)]


@given(seeds, st.integers(1, 1000))
def test_bounded_draw_is_rejection_sampling(seed, n):
    rng, ref = Pcg64Stream(seed), _oracle_stream(seed)
    limit = (1 << 64) - ((1 << 64) % n)
    for _ in range(10):
        r = next(ref)
        while r >= limit:
            r = next(ref)
        assert rng.below(n) == r % n


def test_instance_seed():
    assert instance_seed(42, 0) == 42
    assert instance_seed(0, 1) == 0x9E3779B97F4A7C15
    assert instance_seed((1 << 64) - 1, 1) == 0x9E3779B97F4A7C14


@pytest.mark.parametrize("kwargs", [{"seed": -1}, {"seed": 1 << 64}, {"max_degree": 7},
                                    {"max_rank_per_degree": 0}, {"max_rank_per_degree": 7},
                                    {"torsion_multipliers": (0,)}])
def test_params_reject(kwargs):
    with pytest.raises(ValueError):
        GeneratorParams(**kwargs)


@given(seeds, st.integers(0, 6), st.integers(1, 6))
def test_generated_complexes_valid_and_bounded(seed, top, cap):
    p = GeneratorParams(seed=seed, max_degree=top, max_rank_per_degree=cap)
    C = generate_complex(p)
    assert validate_complex(C) is None
    assert C.min_deg >= 0 and C.max_deg <= top
    assert all(C.rank(n) <= cap for n in C.degrees)
    assert complex_to_json(generate_complex(p)) == complex_to_json(C)


@given(seeds, st.sampled_from([2, 3, 5]))
def test_generator_over_prime_field(seed, p):
    C = generate_complex(GeneratorParams(seed=seed, ring=Ring(p)))
    assert C.ring == Ring(p) and validate_complex(C) is None


def test_torsion_sweep():
    hits = 0
    for seed in range(100):
        H0 = homology(generate_complex(GeneratorParams(seed=seed)))[0]
        if set(H0.torsion) & {2, 3}:
            hits += 1
    assert hits > 0
