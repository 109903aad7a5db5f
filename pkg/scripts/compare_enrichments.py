"""Level ranks of the local and global hom objects over the 6x6 grid.

The rank gap between the two columns is the instance-level shadow of the
local enrichment failing to be tensored: AW* is a homotopy equivalence but
not an isomorphism.

    python3 scripts/compare_enrichments.py --bound 3
"""

import argparse

from dkforge.checks import compare_enrichments_report, grid


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--bound", type=int, default=3)
    args = ap.parse_args()

    G = grid()
    print(f"{'C':<10} {'D':<10} {'local ranks':<18} {'global ranks':<22} {'Hom_Ch':<6} "
          f"{'EZ*AW*=1':<9} {'AW*EZ*~1':<9} {'psi=AW*':<8}")
    gaps = 0
    for x, C in G.items():
        for y, D in G.items():
            r = compare_enrichments_report(C, D, args.bound)
            loc, glo = r["level_ranks"]["local"], r["level_ranks"]["global"]
            gaps += loc != glo
            print(f"{x:<10} {y:<10} {str(loc):<18} {str(glo):<22} {r['hom_invariants']['chain_maps']:<6} "
                  f"{str(r['ez_aw_identity']):<9} {str(r['aw_ez_homotopy']['found']):<9} "
                  f"{str(r['psi_unit_equals_aw_star']):<8}")
    print(f"{gaps} of {len(G) ** 2} pairs have differing level ranks")


if __name__ == "__main__":
    main()
