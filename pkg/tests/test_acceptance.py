"""One test per acceptance criterion; every test prints a PASS/FAIL line."""

import subprocess
import sys

from dkforge.chain import chain_map_group, compose, identity_map, sphere, tensor_complexes
from dkforge.checks import (
    compare_enrichments_report,
    dold_kan_key,
    run_axiom_key,
    run_dold_kan_key,
)
from dkforge.dold_kan import gamma, transport_hom
from dkforge.homotopy import verify_homotopy
from dkforge.model import generating_acyclic_cofibrations, generating_cofibrations
from dkforge.monoidal import alexander_whitney, eilenberg_zilber, ez_aw_homotopy
from dkforge.simplicial import TensorModule, normalize
from strategies import GRID, GRID_NAMES, GRID_PAIRS, report_acceptance

BOUND = 3
GENS = [k for k, _ in generating_cofibrations()]
ACYC = [k for k, _ in generating_acyclic_cofibrations()]


def test_criterion_01_dold_kan_equivalence():
    reps = [run_dold_kan_key(dold_kan_key(42, j)) for j in range(200)]
    bad = [r["instance"] for r in reps if not r["pass"]]
    assert report_acceptance(1, "ε iso and H(C) = H(NΓC) on 200 seeded complexes", not bad,
                             f"{200 - len(bad)}/200")


def test_criterion_02_strict_retraction():
    bad = []
    for x, y in GRID_PAIRS:
        A, B = gamma(GRID[x]), gamma(GRID[y])
        aw, ez = alexander_whitney(A, B), eilenberg_zilber(A, B)
        if compose(aw, ez) != identity_map(ez.source):
            bad.append((x, y))
    assert report_acceptance(2, "AW ∘ EZ = id on the 6x6 grid", not bad, f"{36 - len(bad)}/36")


def test_criterion_03_homotopy_retract():
    bad = []
    for x, y in GRID_PAIRS:
        A, B = gamma(GRID[x]), gamma(GRID[y])
        aw, ez = alexander_whitney(A, B), eilenberg_zilber(A, B)
        h = ez_aw_homotopy(A, B)
        if not verify_homotopy(h, identity_map(aw.source), compose(ez, aw)):
            bad.append((x, y))
    assert report_acceptance(3, "dh + hd = EZ ∘ AW - id found and re-verified on the grid", not bad,
                             f"{36 - len(bad)}/36")


def test_criterion_04_non_isomorphism_witness():
    G = gamma(sphere(1))
    lhs = normalize(TensorModule(G, G), 2).rank(2)
    NG = normalize(G)
    rhs = tensor_complexes(NG, NG).rank(2)
    assert report_acceptance(4, "rank N(ΓS1 ⊗ ΓS1)_2 = 2, rank (NΓS1 ⊗ NΓS1)_2 = 1", (lhs, rhs) == (2, 1),
                             f"{lhs} vs {rhs}")


def test_criterion_05_enrichment_comparison():
    bad = []
    for x, y in GRID_PAIRS:
        rep = compare_enrichments_report(GRID[x], GRID[y], BOUND)
        ok = rep["ez_aw_identity"] and rep["aw_ez_homotopy"]["found"] and rep["psi_unit_equals_aw_star"]
        if not ok:
            bad.append((x, y))
    assert report_acceptance(5, "EZ* ∘ AW* = id, AW* ∘ EZ* ≃ id, ψ̃ at unit = AW*", not bad,
                             f"{36 - len(bad)}/36 at level bound {BOUND}")


def test_criterion_06_hom_set_transport():
    bad = []
    for x, y in GRID_PAIRS:
        t = transport_hom(gamma(GRID[x]), gamma(GRID[y]))
        direct = chain_map_group(GRID[x], GRID[y]).invariants
        if not (t.simplicial_invariants == t.chain_invariants == direct and t.is_bijection):
            bad.append((x, y))
    assert report_acceptance(6, "Hom_sMod(ΓC, ΓD) ≅ Hom_Ch(C, D) on the grid", not bad, f"{36 - len(bad)}/36")


def test_criterion_07_pushout_product():
    keys = [f"pushout_product|{a}|{b}" for a in GENS + ACYC for b in GENS]
    reps = [run_axiom_key(k) for k in keys]
    acyclic_ok = all(r["certificates"]["classification"]["is_weak_equivalence"]
                     for r in reps if r["certificates"]["acyclic_required"])
    ok = all(r["pass"] for r in reps) and acyclic_ok
    assert report_acceptance(7, "pushout-products are cofibrations, acyclic when a factor is", ok,
                             f"{sum(r['pass'] for r in reps)}/{len(reps)}")


def test_criterion_08_unit_axiom():
    reps = [run_axiom_key(f"{kind}|{x}") for kind in ("unit", "unit_hurewicz") for x in GRID_NAMES]
    inverses = all("homotopy_inverse" in r["certificates"]["classification"]["evidence"]
                   for r in reps if r["check"] == "unit_axiom_hurewicz")
    ok = all(r["pass"] for r in reps) and inverses
    assert report_acceptance(8, "x ⊗ (Z[0] ⊕ D(1)) -> x: quasi-iso and homotopy equivalence", ok,
                             f"{sum(r['pass'] for r in reps)}/{len(reps)}")


def test_criterion_09_pi0_mapping_space():
    reps = [run_axiom_key(f"pi0|{x}|{y}") for x, y in GRID_PAIRS]
    agree = all(r["certificates"]["homotopy_classes"] == r["certificates"]["h0_truncated_hom"] for r in reps)
    ok = agree and all(r["pass"] for r in reps)
    assert report_acceptance(9, "[x, y] = H_0(τ HOM(x, y)) on the grid", ok,
                             f"{sum(r['pass'] for r in reps)}/{len(reps)}")


def test_criterion_10_sm7():
    keys = [f"sm7_{side}|{i}" for side in ("chain_internal", "after_gamma") for i in GENS + ACYC]
    reps = [run_axiom_key(k) for k in keys]
    fib = all(r["certificates"]["classification"]["is_fibration"] for r in reps)
    ok = fib and all(r["pass"] for r in reps)
    assert report_acceptance(10, "pullback-power with p = D(1) -> S(1) is a fibration on both sides", ok,
                             f"{sum(r['pass'] for r in reps)}/{len(reps)}")


def test_criterion_11_weak_structure_maps():
    keys = [f"weak_structure|{x}|{c}|{y}|{BOUND}" for x in GRID_NAMES for c in GRID_NAMES for y in GRID_NAMES]
    reps = [run_axiom_key(k) for k in keys]
    rho = all(r["certificates"]["rho_iso"] for r in reps)
    ok = rho and all(r["pass"] for r in reps)
    assert report_acceptance(11, "N(φ̃), N(ψ̃) quasi-isos and ρ̃ iso on all grid triples", ok,
                             f"{sum(r['pass'] for r in reps)}/{len(reps)}")


def test_criterion_12_determinism():
    argv = [sys.executable, "-m", "dkforge", "check", "dold-kan", "--seed", "42", "--count", "50"]
    a = subprocess.run(argv, capture_output=True)
    b = subprocess.run(argv, capture_output=True)
    ok = a.returncode == b.returncode == 0 and a.stdout == b.stdout and len(a.stdout.splitlines()) == 50
    assert report_acceptance(12, "check dold-kan --seed 42 --count 50 is byte-identical across runs", ok,
                             f"{len(a.stdout)} bytes, exit {a.returncode}")
