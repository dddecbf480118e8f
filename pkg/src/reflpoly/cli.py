"""Command-line front end (``reflpoly``).

Exit codes: 0 when every row succeeded, 2 when some row carries an error,
1 for usage or parse errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .census import all_rank4_diagrams, analyze, census_classes, census_tsv, run_census
from .coset import (DEFAULT_MAX_COSETS, Overflow, PresentationSyntaxError, enumerate_cosets, load_presentation,
                    parse_word_text, shipped_presentations, validate_against_matrix)
from .diagram import DiagramError, enumerate_basic_systems, parse_schlafli, parse_system, reflection_generators
from .fp import FieldCtx, is_prime
from .matgroup import BsgsGroup
from .polytope import self_dual

EXIT_OK, EXIT_USAGE, EXIT_ROW_ERROR = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class UsageError(Exception):
    pass


def _prime(text: str) -> int:
    p = int(text)
    if p < 3 or not is_prime(p):
        raise argparse.ArgumentTypeError(f"{text} is not an odd prime")
    return p


def _primes(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        if "-" in part:
            lo, hi = map(int, part.split("-"))
            out.extend(q for q in range(max(lo, 3), hi + 1) if is_prime(q))
        else:
            out.append(_prime(part))
    return sorted(set(out))


def _emit(obj, as_json: bool, text: str) -> None:
    if as_json:
        print(json.dumps(obj, indent=2))
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_analyze(args) -> int:
    rep = analyze(parse_system(args.system), args.p, check_cgroup=not args.no_cgroup)
    d = rep.to_dict()
    lines = [f"{rep.system}  p={rep.p}"]
    if rep.error:
        lines.append(f"error: {rep.error}")
    else:
        f = rep.form
        lines += [f"generic: {rep.genericity['generic']}",
                  f"form: rad_dim={f['rad_dim']} disc={f['disc']:+d} epsilon={f['epsilon']:+d}",
                  f"order: {rep.order}",
                  f"group: {rep.named['name']}" + "".join(f"  [{n}]" for n in rep.named["notes"])]
        if rep.cgroup is not None:
            cg = rep.cgroup
            lines.append("string C-group: " + ("yes" if cg["is_cgroup"] else
                         f"no (range {cg['failing_range']}, |meet|={cg['intersection_order']}"
                         f" vs |middle|={cg['middle_order']})"))
        if rep.polytope:
            pt = rep.polytope
            lines += [f"schlafli: {pt['schlafli_realized']}", f"face counts: {pt['face_counts']}",
                      f"petrie: {pt['petrie']}", f"self-dual: {pt['self_dual']}"]
            if pt["facet_id"]:
                lines += [f"facet: {pt['facet_id']}", f"vertex-figure: {pt['vfig_id']}"]
    _emit(d, args.json, "\n".join(lines))
    return EXIT_ROW_ERROR if rep.error else EXIT_OK


def cmd_census(args) -> int:
    if args.schlafli.upper() == "ALL":
        diagrams = all_rank4_diagrams()
    else:
        diagrams = [parse_schlafli(s) for s in args.schlafli.split(";")]
    rows = run_census(diagrams, args.primes, threads=args.threads, per_class=not args.all_systems,
                      infinity_ratio_one=args.infinity_ratio_one)
    if args.json:
        out = json.dumps([r.to_dict() for r in rows], indent=2) + "\n"
    else:
        out = census_tsv(rows)
    if args.output:
        Path(args.output).write_text(out)
    else:
        sys.stdout.write(out)
    return EXIT_ROW_ERROR if any(r.report.error for r in rows) else EXIT_OK


def cmd_basic_systems(args) -> int:
    diagram = parse_schlafli(args.schlafli)
    systems = enumerate_basic_systems(diagram, identify_reversal=args.identify_reversal,
                                      infinity_ratio_one=args.infinity_ratio_one)
    if args.p:
        classes = census_classes(systems, args.p)
        obj = [[str(s) for s in c] for c in classes]
        text = "\n".join("  ".join(c) for c in obj)
    else:
        obj = [str(s) for s in systems]
        text = "\n".join(obj)
    _emit(obj, args.json, text)
    return EXIT_OK


def cmd_tc(args) -> int:
    shipped = shipped_presentations()
    if args.presentation in shipped:
        pres = shipped[args.presentation]
    else:
        pres = load_presentation(args.presentation)
    subs = [parse_word_text(w) for w in args.sub] if args.sub else None
    obj = {"presentation": args.presentation}
    try:
        obj["index"] = enumerate_cosets(pres, subs, args.max_cosets)
        if args.validate:
            if "system" not in pres.meta or "p" not in pres.meta:
                raise UsageError("presentation has no '# system:' and '# p:' header to validate against")
            system, ctx = parse_system(pres.meta["system"]), FieldCtx(int(pres.meta["p"]))
            obj["matrix_order"] = BsgsGroup(reflection_generators(system, ctx), ctx.p).order
            obj["valid"] = validate_against_matrix(pres, system, ctx, args.max_cosets)
    except Overflow as exc:
        obj["error"] = f"Overflow: {exc}"
    text = "  ".join(f"{k}={v}" for k, v in obj.items())
    _emit(obj, args.json, text)
    return EXIT_ROW_ERROR if "error" in obj or obj.get("valid") is False else EXIT_OK


def cmd_dual_check(args) -> int:
    system = parse_system(args.system)
    gens = reflection_generators(system, FieldCtx(args.p))
    verdict = self_dual(gens, method=args.method, budget=args.budget)
    obj = {"system": str(system), "p": args.p, "method": args.method,
           "self_dual": verdict}
    _emit(obj, args.json, f"{system} p={args.p}: " + {True: "self-dual", False: "not self-dual",
                                                       None: "unresolved"}[verdict])
    return EXIT_ROW_ERROR if verdict is None else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="reflpoly", description="Reflection groups over GF(p) and their regular polytopes.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="analyze one basic system at one prime")
    a.add_argument("system", help="e.g. '[4,4,3]@1,2,1,1'")
    a.add_argument("-p", type=_prime, required=True)
    a.add_argument("--no-cgroup", action="store_true", help="skip the intersection-property test")
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("census", help="analyze every census class of some diagrams")
    c.add_argument("schlafli", help="'[6,6,3]', several separated by ';', or ALL for every rank-4 diagram")
    c.add_argument("--primes", type=_primes, default=[3, 5, 7, 11, 13], help="e.g. 3,5,7 or 3-13")
    c.add_argument("--threads", type=int, default=None, help="worker threads (default: CPU count)")
    c.add_argument("--all-systems", action="store_true", help="one row per basic system instead of per class")
    c.add_argument("--infinity-ratio-one", action="store_true",
                   help="also allow equal labels across infinite branches")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_census)

    b = sub.add_parser("basic-systems", help="list basic systems of a diagram")
    b.add_argument("schlafli")
    b.add_argument("-p", type=_prime, help="group the systems into census classes mod p")
    b.add_argument("--identify-reversal", action="store_true")
    b.add_argument("--infinity-ratio-one", action="store_true")
    b.set_defaults(func=cmd_basic_systems)

    t = sub.add_parser("tc", help="Todd-Coxeter coset enumeration")
    t.add_argument("presentation", help="presentation file, or the name of a shipped one")
    t.add_argument("--sub", action="append", help="subgroup generator word, e.g. '(1)'; repeatable")
    t.add_argument("--max-cosets", type=int, default=DEFAULT_MAX_COSETS)
    t.add_argument("--validate", action="store_true", help="compare with the matrix group named in the header")
    t.set_defaults(func=cmd_tc)

    d = sub.add_parser("dual-check", help="decide self-duality of a system at a prime")
    d.add_argument("system")
    d.add_argument("-p", type=_prime, required=True)
    d.add_argument("--method", choices=("auto", "fast", "graph"), default="auto")
    d.add_argument("--budget", type=int, default=10 ** 7)
    d.set_defaults(func=cmd_dual_check)

    for sp in (a, c, b, t, d):
        sp.add_argument("--json", action="store_true", help="machine-readable output")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DiagramError, PresentationSyntaxError, UsageError, OSError, ValueError) as exc:
        print(f"reflpoly: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
