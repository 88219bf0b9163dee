"""Command-line entry point ``homdist``.

Exit codes: 0 success, 1 usage, 2 parse error, 3 precondition violated,
4 solver did not converge, 5 suite assertion or internal invariant failed.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from fractions import Fraction

from . import distances as dist
from .errors import ConvergenceError, HomdistError, PreconditionError
from .generators import three_part_graph, gen_gnp, gen_regular
from .graphs import as_weighted, parse_graph, parse_weighted, serialize_graph, serialize_weighted
from .homomorphism import brute_force_hom, density, hom_tree
from .inversion import invert, verify_inversion
from .overlays import write_certificate
from .refinement import DEFAULT_TOL, color_refine, path_spectrum, quotient
from .suites import SUITES, run_suite

log = logging.getLogger("homdist")

KINDS = {
    "tree-spec": dist.tree_dist_spectral,
    "tree-cut": dist.tree_dist_cutnorm,
    "path-spec": dist.path_dist_spectral,
    "cut": dist.cut_distance_upper,
    "color": dist.color_distance,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load(path: str, weighted: bool | None = None):
    """Graph file, or a weighted-graph JSON file (detected by a leading brace)."""
    text = _read(path)
    if weighted is None:
        weighted = text.lstrip().startswith("{")
    return parse_weighted(text) if weighted else parse_graph(text)


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _rational(q) -> str:
    q = Fraction(q)
    return f"{q} ({float(q):.12g})"


# --- subcommands ---------------------------------------------------------------------

def cmd_hom(args) -> int:
    pattern = parse_graph(_read(args.pattern))
    target = _load(args.target, True if args.weighted else None)
    weighted = target if not hasattr(target, "adjacency") else as_weighted(target)
    count = hom_tree(pattern, weighted) if pattern.is_tree() else brute_force_hom(pattern, weighted)
    print(_rational(density(pattern, target, count) if args.density else count))
    return 0


def cmd_refine(args) -> int:
    g = parse_graph(_read(args.graph))
    coloring = color_refine(g)
    print(f"colors {coloring.num_colors} rounds {coloring.rounds}")
    print(" ".join(map(str, coloring.colors)))
    if args.quotient:
        _write(args.quotient, serialize_weighted(quotient(g, coloring)))
    if args.spectrum:
        spec = path_spectrum(g, args.tol)
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["lambda_hat", "w_hat"])
        for lam, wt in spec.entries:
            w.writerow([repr(lam), repr(wt)])
    return 0


def cmd_dist(args) -> int:
    g, h = _load(args.g), _load(args.h)
    if args.kind != "cut" and not (hasattr(g, "adjacency") and hasattr(h, "adjacency")):
        raise PreconditionError(f"--kind {args.kind} needs two graph files")
    opts = dist.SolverOptions(tol=args.tol, max_iters=args.max_iters, restarts=args.restarts,
                              seed=args.seed, spectrum_tol=args.spectrum_tol)
    try:
        report = KINDS[args.kind](g, h, opts)
    except ConvergenceError as exc:
        payload = {"error": str(exc), "diagnostics": exc.diagnostics, "kind": args.kind, "seed": args.seed}
        print(json.dumps(payload, indent=2, default=str))
        return exc.exit_code
    if args.cert:
        write_certificate(report.certificate, args.cert)
    if args.json:
        print(report.to_json())
    else:
        exact = f" exact={report.exact_value}" if report.exact_value is not None else ""
        print(f"{report.objective_kind} value={report.value!r}{exact} bound={report.bound} "
              f"iterations={report.iterations}")
    return 0


def cmd_invert(args) -> int:
    h = _load(args.weighted, True)
    g, plan = invert(h, args.n)
    _write(args.output, serialize_graph(g))
    if args.verify:
        out = verify_inversion(h, args.n)
        out = {k: (str(v) if isinstance(v, Fraction) else v) for k, v in out.items()}
        out["achieved_float"] = float(Fraction(out["achieved"]))
        out["bound_float"] = float(Fraction(out["bound"]))
        if args.json:
            print(json.dumps(out, indent=2), file=sys.stderr if args.output in (None, "-") else sys.stdout)
        else:
            print(f"achieved {out['achieved']} <= bound {out['bound']}",
                  file=sys.stderr if args.output in (None, "-") else sys.stdout)
    return 0


def cmd_verify(args) -> int:
    names = SUITES if args.suite == "all" else [args.suite]
    summary = []
    for name in names:
        res = run_suite(name, args.seed, args.out)
        summary.append({"suite": name, "seed": args.seed, "passed": res.passed,
                        "rows": len(res.rows), "csv": res.path, "failures": res.failures})
        if not args.json:
            print(f"{name}: {'PASS' if res.passed else 'FAIL'} ({len(res.rows)} rows) -> {res.path}")
            for line in res.failures:
                print(f"  {line}")
    if args.json:
        print(json.dumps(summary, indent=2))
    return 0 if all(s["passed"] for s in summary) else 5


def cmd_gen(args) -> int:
    if args.model == "gnp":
        g = gen_gnp(args.n, args.p, args.seed)
    elif args.model == "regular":
        g = gen_regular(args.n, args.d, args.seed)
    else:
        g = three_part_graph(args.n)
    _write(args.output, serialize_graph(g))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="homdist", description="Homomorphism-based graph distances.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("hom", help="homomorphism count or density")
    s.add_argument("--pattern", required=True)
    s.add_argument("--target", required=True)
    s.add_argument("--weighted", action="store_true", help="target is a weighted-graph JSON file")
    s.add_argument("--density", action="store_true")
    s.set_defaults(func=cmd_hom)

    s = sub.add_parser("refine", help="color refinement, quotient and path spectrum")
    s.add_argument("graph")
    s.add_argument("--quotient", metavar="OUT")
    s.add_argument("--spectrum", action="store_true")
    s.add_argument("--tol", type=float, default=DEFAULT_TOL)
    s.set_defaults(func=cmd_refine)

    s = sub.add_parser("dist", help="distance upper bound with certificate")
    s.add_argument("--kind", choices=sorted(KINDS), required=True)
    s.add_argument("g")
    s.add_argument("h")
    s.add_argument("--tol", type=float, default=1e-6)
    s.add_argument("--max-iters", type=int, default=5000)
    s.add_argument("--restarts", type=int, default=3)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--spectrum-tol", type=float, default=DEFAULT_TOL)
    s.add_argument("--cert", metavar="OUT.csv")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_dist)

    s = sub.add_parser("invert", help="graph whose quotient approximates a weighted graph")
    s.add_argument("weighted")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("-o", "--output")
    s.add_argument("--verify", action="store_true")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_invert)

    s = sub.add_parser("verify", help="run an experiment suite")
    s.add_argument("--suite", choices=list(SUITES) + ["all"], required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default=".")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("gen", help="generate a graph")
    s.add_argument("--model", choices=["gnp", "regular", "fig1"], required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--p", type=float, default=0.5)
    s.add_argument("--d", type=int, default=2)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except HomdistError as exc:
        print(f"homdist: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"homdist: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
