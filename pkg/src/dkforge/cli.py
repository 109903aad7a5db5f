"""Command-line interface.

Exit codes: 0 success (all checks pass), 1 a check failed, 2 input error.
Every command writes canonical JSON (sorted keys, no floats) unless noted;
``check`` commands write one report per line, sorted by instance key.
"""

from __future__ import annotations

import argparse
import sys

from .chain import (
    ComplexError,
    hom_complex,
    homology,
    map_to_json,
    tensor_complexes,
    truncate_nonneg,
)
from .checks import (
    axiom_keys,
    compare_enrichments_report,
    dold_kan_key,
    run_axiom_key,
    run_dold_kan_key,
    run_tasks,
)
from .dold_kan import gamma
from .generate import GeneratorParams, generate_complex
from .linalg import ZZ, Ring
from .monoidal import alexander_whitney, eilenberg_zilber
from .serialize import DocumentError, canonical_dumps, content_hash, document_kind, read_document, serialize
from .simplicial import LevelBoundError, SimplicialError, module_to_json, normalize

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _common(p):
    p.add_argument("--in", dest="inputs", action="append", default=[], metavar="FILE",
                   help="input document (repeat for binary commands)")
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bound", type=int, default=None, help="level or degree bound")
    p.add_argument("--ring", default=None, help="coefficient ring: Z or Z/m")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dkforge", description="Exact Dold–Kan and enrichment computations.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, text in [
        ("validate", "validate a complex, map, module or matrix document"),
        ("homology", "homology of a complex (text lines; --json for JSON)"),
        ("tensor", "tensor product of two complexes"),
        ("hom", "hom complex HOM(first, second)"),
        ("truncate", "good truncation to non-negative degrees"),
        ("normalize", "normalized chains of a simplicial module"),
        ("gamma", "Γ of a complex (levelwise up to --bound, else the Γ presentation)"),
        ("aw", "Alexander–Whitney map of two simplicial modules"),
        ("ez", "Eilenberg–Zilber map of two simplicial modules"),
        ("compare-enrichments", "compare the local and global enrichments on a pair"),
        ("generate", "seeded random complex"),
    ]:
        p = sub.add_parser(name, help=text)
        _common(p)
        if name == "homology":
            p.add_argument("--json", action="store_true")
        if name == "compare-enrichments":
            p.add_argument("--c", required=True, metavar="FILE")
            p.add_argument("--d", required=True, metavar="FILE")
        if name == "generate":
            p.add_argument("--max-degree", type=int, default=3)
            p.add_argument("--max-rank", type=int, default=3)
            p.add_argument("--torsion", default="2,3", help="comma-separated multipliers")
    p = sub.add_parser("check", help="run a verification grid")
    p.add_argument("target", choices=["dold-kan", "axioms"])
    _common(p)
    p.add_argument("--count", type=int, default=50)
    return parser


def _ring(args):
    if args.ring is None:
        return None
    try:
        return Ring.parse(args.ring)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _inputs(args, count, expect=None):
    if len(args.inputs) != count:
        raise InputError(f"{args.command} needs exactly {count} --in file(s)")
    values = [read_document(path, expect)[1] for path in args.inputs]
    ring = _ring(args)
    if ring is not None:
        for v in values:
            if v.ring != ring:
                raise InputError(f"input ring {v.ring} differs from --ring {ring}")
    return values


def _emit(args, text: str):
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(args, doc):
    _emit(args, canonical_dumps(doc) + "\n")


def _stream(args, reports) -> int:
    _emit(args, "".join(canonical_dumps(r) + "\n" for r in reports))
    return EXIT_OK if all(r["pass"] for r in reports) else EXIT_FAIL


def run_command(argv) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except (InputError, DocumentError, ComplexError, SimplicialError, LevelBoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def _dispatch(args) -> int:
    cmd = args.command
    if cmd == "validate":
        if len(args.inputs) != 1:
            raise InputError("validate needs exactly one --in file")
        doc, _ = read_document(args.inputs[0])  # parsing runs every validation
        _json(args, {"command": "validate", "kind": document_kind(doc), "valid": True, "hash": content_hash(doc)})
        return EXIT_OK
    if cmd == "homology":
        (X,) = _inputs(args, 1, "complex")
        H = homology(X)
        if args.json:
            _json(args, {"command": "homology", "homology": {str(n): str(h) for n, h in sorted(H.items())}})
        else:
            _emit(args, "".join(f"H_{n}: {h}\n" for n, h in sorted(H.items())))
        return EXIT_OK
    if cmd in ("tensor", "hom"):
        X, Y = _inputs(args, 2, "complex")
        _json(args, serialize(tensor_complexes(X, Y) if cmd == "tensor" else hom_complex(X, Y)))
        return EXIT_OK
    if cmd == "truncate":
        (X,) = _inputs(args, 1, "complex")
        _json(args, serialize(truncate_nonneg(X)))
        return EXIT_OK
    if cmd == "normalize":
        (A,) = _inputs(args, 1, "module")
        _json(args, serialize(normalize(A, args.bound)))
        return EXIT_OK
    if cmd == "gamma":
        (X,) = _inputs(args, 1, "complex")
        if X.min_deg < 0:
            raise InputError("Γ needs a non-negatively graded complex")
        _json(args, module_to_json(gamma(X), args.bound))
        return EXIT_OK
    if cmd in ("aw", "ez"):
        A, B = _inputs(args, 2, "module")
        f = (alexander_whitney if cmd == "aw" else eilenberg_zilber)(A, B, args.bound)
        _json(args, map_to_json(f))
        return EXIT_OK
    if cmd == "compare-enrichments":
        C = read_document(args.c, "complex")[1]
        D = read_document(args.d, "complex")[1]
        for X in (C, D):
            if X.min_deg < 0 or not X.ring.is_integers:
                raise InputError("compare-enrichments needs non-negatively graded complexes over Z")
        rep = compare_enrichments_report(C, D, 3 if args.bound is None else args.bound)
        _json(args, rep)
        return EXIT_OK if rep["pass"] else EXIT_FAIL
    if cmd == "generate":
        try:
            torsion = tuple(int(t) for t in args.torsion.split(",") if t.strip())
            params = GeneratorParams(seed=args.seed, max_degree=args.max_degree,
                                     max_rank_per_degree=args.max_rank, torsion_multipliers=torsion,
                                     ring=_ring(args) or ZZ)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        _json(args, serialize(generate_complex(params)))
        return EXIT_OK
    if cmd == "check":
        return _check(args)
    raise InputError(f"unknown command {cmd!r}")


def _check(args) -> int:
    try:
        if args.target == "dold-kan":
            ring = _ring(args) or ZZ
            if ring.modulus and not ring.is_field:
                raise InputError("check dold-kan compares homology; use Z or a prime modulus")
            if args.count < 0 or not 0 <= args.seed < 2 ** 64:
                raise InputError("--count must be >= 0 and --seed a 64-bit unsigned integer")
            keys = [dold_kan_key(args.seed, j, ring) for j in range(args.count)]
            return _stream(args, run_tasks(run_dold_kan_key, keys))
        bound = 3 if args.bound is None else args.bound
        return _stream(args, run_tasks(run_axiom_key, axiom_keys(bound)))
    except ValueError as exc:
        if isinstance(exc, (DocumentError, ComplexError, SimplicialError)):
            raise
        raise InputError(str(exc)) from None


def main(argv=None) -> int:
    return run_command(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    raise SystemExit(main())
