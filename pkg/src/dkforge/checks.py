"""Named verification grids and per-instance reports used by the CLI and the acceptance suite.

Every task is identified by a string key; workers rebuild their inputs from
the key so that only strings cross process boundaries.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .chain import (
    ChainComplex,
    chain_map_group,
    complex_to_json,
    direct_sum,
    disk,
    homology,
    homology_equal,
    is_isomorphism,
    sphere,
    unit_complex,
)
from .dold_kan import epsilon_map, gamma, transport_hom
from .enrichment import comparison_maps, psi_at_unit_matches_aw_star, verify_comparison
from .generate import GeneratorParams, generate_complex, instance_seed
from .linalg import ZZ, Ring
from .model import (
    VerificationReport,
    check_pi0_mapping_space_instance,
    check_pushout_product_instance,
    check_sm7_instance,
    check_unit_axiom_instance,
    check_weak_structure_instance,
    generating_acyclic_cofibrations,
    generating_cofibrations,
    standard_fibration,
)
from .serialize import content_hash
from .simplicial import normalization


def grid() -> dict:
    """The six test complexes ``Z[0], S(1), S(2), D(1), Z --2--> Z, S(1) (+) S(0)``."""
    return {
        "Z[0]": unit_complex(),
        "S(1)": sphere(1),
        "S(2)": sphere(2),
        "D(1)": disk(1),
        "Z-2->Z": ChainComplex({0: 1, 1: 1}, {1: [[2]]}),
        "S(1)+S(0)": direct_sum(sphere(1), sphere(0)),
    }


def thread_count() -> int:
    raw = os.environ.get("DKFORGE_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"DKFORGE_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"DKFORGE_THREADS must be a positive integer, got {raw!r}")
    return n


def run_tasks(fn, keys, threads: int | None = None) -> list:
    """``[fn(key) for key in sorted(keys)]``, fanned out over processes when allowed."""
    keys = sorted(keys)
    threads = thread_count() if threads is None else threads
    if threads <= 1 or len(keys) <= 1:
        return [fn(k) for k in keys]
    with ProcessPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, keys))


# ---------------------------------------------------------------------------
# Dold–Kan


def check_dold_kan_instance(C: ChainComplex) -> VerificationReport:
    """``ε : NΓC -> C`` is an isomorphism and ``H(C) = H(NΓC)``; ``NΓC`` is rebuilt by the kernel route."""
    eps = epsilon_map(C)
    iso = is_isomorphism(eps)
    top = max(C.max_deg, 0)
    NG = normalization(gamma(C), top, method="kernel").complex
    HC, HN = homology(C), homology(NG)
    same = homology_equal(HC, HN)
    return VerificationReport(
        "dold_kan",
        {"C": content_hash(complex_to_json(C))},
        bool(iso and same),
        {"epsilon_iso": bool(iso), "homology": {str(n): str(h) for n, h in sorted(HC.items())},
         "homology_normalized": {str(n): str(h) for n, h in sorted(HN.items())},
         "normalized_ranks": {str(n): r for n, r in sorted(NG.ranks.items())}},
    )


def dold_kan_key(seed: int, index: int, ring: Ring = ZZ) -> str:
    return f"dold_kan/{index:06d}/{seed}/{ring}"


def run_dold_kan_key(key: str) -> dict:
    _, index, seed, ring = key.split("/", 3)
    params = GeneratorParams(seed=instance_seed(int(seed), int(index)), ring=Ring.parse(ring))
    C = generate_complex(params)
    rep = check_dold_kan_instance(C).to_json()
    rep["instance"] = key
    rep["seed"] = params.seed
    return rep


# ---------------------------------------------------------------------------
# enrichment comparison


def compare_enrichments_report(C: ChainComplex, D: ChainComplex, bound: int = 3) -> dict:
    cm = comparison_maps(C, D, bound)
    r = verify_comparison(cm)
    psi, aw_iota, _ = psi_at_unit_matches_aw_star(C, D, bound)
    psi_ok = all(np.array_equal(psi[n], aw_iota[n]) for n in range(bound + 1))
    t = transport_hom(gamma(C), gamma(D))
    hom_ch = chain_map_group(C, D).invariants
    out = {
        "pair": {"C": content_hash(complex_to_json(C)), "D": content_hash(complex_to_json(D))},
        "bounds": {"level_bound": bound, "source_truncation": cm.source_truncation,
                   "homotopy_degrees": list(range(bound))},
        "ez_aw_identity": r.ez_aw_identity,
        "aw_ez_homotopy": {"found": r.aw_ez_homotopy is not None,
                           "homotopy": None if r.aw_ez_homotopy is None else r.aw_ez_homotopy.to_json()},
        "aw_quasi_iso": r.aw_quasi_iso,
        "ez_quasi_iso": r.ez_quasi_iso,
        "psi_unit_equals_aw_star": psi_ok,
        "level_ranks": {"local": list(r.local_ranks), "global": list(r.global_ranks)},
        "hom_invariants": {"chain_maps": str(hom_ch), "simplicial_maps": str(t.simplicial_invariants),
                           "global_level0": str(cm.global_.group(0).invariants),
                           "local_level0": str(cm.local.group(0).invariants)},
    }
    out["pass"] = bool(r.ez_aw_identity and r.aw_ez_homotopy is not None and r.aw_quasi_iso
                       and r.ez_quasi_iso and psi_ok and t.is_bijection)
    return out


# ---------------------------------------------------------------------------
# axioms grid


def axiom_keys(bound: int = 3) -> list:
    names = list(grid())
    gens = [k for k, _ in generating_cofibrations()]
    acyc = [k for k, _ in generating_acyclic_cofibrations()]
    keys = []
    keys += [f"pushout_product|{a}|{b}" for a in gens + acyc for b in gens]
    keys += [f"unit|{x}" for x in names] + [f"unit_hurewicz|{x}" for x in names]
    keys += [f"sm7_{side}|{a}" for side in ("chain_internal", "after_gamma") for a in gens + acyc]
    keys += [f"pi0|{x}|{y}" for x in names for y in names]
    keys += [f"weak_structure|{x}|{c}|{y}|{bound}" for x in names for c in names for y in names]
    return keys


def run_axiom_key(key: str) -> dict:
    kind, *args = key.split("|")
    G = grid()
    cofs = dict(generating_cofibrations() + generating_acyclic_cofibrations())
    if kind == "pushout_product":
        rep = check_pushout_product_instance(cofs[args[0]], cofs[args[1]])
    elif kind == "unit":
        rep = check_unit_axiom_instance(G[args[0]])
    elif kind == "unit_hurewicz":
        rep = check_unit_axiom_instance(G[args[0]], hurewicz=True)
    elif kind.startswith("sm7_"):
        rep = check_sm7_instance(cofs[args[0]], standard_fibration(), kind[4:])
    elif kind == "pi0":
        rep = check_pi0_mapping_space_instance(G[args[0]], G[args[1]])
    elif kind == "weak_structure":
        rep = check_weak_structure_instance(G[args[0]], G[args[1]], G[args[2]], int(args[3]))
    else:
        raise ValueError(f"unknown task {key!r}")
    out = rep.to_json()
    out["instance"] = key
    return out
