"""Run the full axiom grid and print a pass count per check kind.

    python3 scripts/run_grid.py --bound 3 [--out reports.jsonl]
"""

import argparse
import collections
import time

from dkforge.checks import axiom_keys, run_axiom_key, run_tasks
from dkforge.serialize import canonical_dumps


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--bound", type=int, default=3)
    ap.add_argument("--out", default=None, help="write every report as JSON lines")
    args = ap.parse_args()

    t0 = time.perf_counter()
    reports = run_tasks(run_axiom_key, axiom_keys(args.bound))
    elapsed = time.perf_counter() - t0

    tally = collections.defaultdict(lambda: [0, 0])
    for r in reports:
        kind = r["instance"].split("|", 1)[0]
        tally[kind][0] += r["pass"]
        tally[kind][1] += 1
    width = max(len(k) for k in tally)
    for kind, (ok, n) in sorted(tally.items()):
        print(f"{kind:<{width}}  {ok:4d}/{n:<4d}")
    print(f"total {sum(r['pass'] for r in reports)}/{len(reports)} in {elapsed:.1f}s")
    failed = [r["instance"] for r in reports if not r["pass"]]
    for key in failed:
        print("FAILED", key)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.writelines(canonical_dumps(r) + "\n" for r in reports)


if __name__ == "__main__":
    main()
