"""Command line entry point: ``ambitoric <command> ...``.

Exit codes: 0 all requested verdicts hold, 1 a verdict fails, 2 parse or
usage error, 3 degenerate input, 4 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import itertools
import logging
import sys

from .builder import PD_PARAMETERS
from .errors import AmbitoricError, MalformedInputError
from .exact_algebra import parse_rational
from .reporter import EXPECTABLE, emit, run_calabi, run_check, run_classify, run_pd, table_experiment

log = logging.getLogger("ambitoric")

COEFF_HELP = (
    "Quartic coefficients are given in DESCENDING powers: 'A: a0 a1 a2 a3 a4' means "
    "a0 z^4 + a1 z^3 + a2 z^2 + a3 z + a4. Quadratics (q, p) are 'c0 c1 c2' meaning "
    "c0 z^2 + 2 c1 z + c2 (the middle entry is half the linear coefficient)."
)


def _rational_list(text: str, count: int, what: str) -> list:
    parts = [t for t in text.replace(",", " ").split()]
    if len(parts) != count:
        raise MalformedInputError(f"{what} needs {count} values, got {len(parts)}")
    out = []
    for i, tok in enumerate(parts, start=1):
        try:
            out.append(parse_rational(tok))
        except MalformedInputError as exc:
            raise MalformedInputError(f"{what}: bad value {tok!r} at position {i}") from exc
    return out


def _positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ambitoric",
        description="Exact construction and curvature checks for ambitoric Kahler metrics.",
        epilog=COEFF_HELP + " The environment variable AMBITORIC_DEGREE_CAP bounds intermediate degrees.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="build a spec and run every applicable check", epilog=COEFF_HELP)
    p.add_argument("file")
    p.add_argument("--expect", choices=EXPECTABLE, help="exit 0 iff this verdict holds")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("classify", help="classification verdicts only", epilog=COEFF_HELP)
    p.add_argument("file")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("curvature", help="print a curvature tensor of g+ or g-", epilog=COEFF_HELP)
    p.add_argument("file")
    p.add_argument("--tensor", choices=("ricci", "scalar", "weyl", "bach"), required=True)
    p.add_argument("--metric", choices=("plus", "minus", "zero"), default="plus")

    p = sub.add_parser("table", help="randomized table vs oracle experiment")
    p.add_argument("--type", dest="form_type", choices=("parabolic", "hyperbolic", "elliptic"), required=True)
    p.add_argument("--trials", type=_positive_int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csc", action="store_true", help="also test the printed CSC conditions")
    p.add_argument("--witness-dir", default=".", help="where a failing instance is written")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("pd", help="Plebanski-Demianski family as a hyperbolic CSC metric")
    p.add_argument("--params", required=True, help="h,kappa,sigma,delta,gamma,epsilon,lambda")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("calabi", help="Calabi-type classification flags")
    p.add_argument("--V", required=True, help="v0,v1,v2,v3,v4 (descending, z^4 first)")
    p.add_argument("--k", required=True)
    p.add_argument("--json", action="store_true")
    return parser


def _curvature_text(args) -> str:
    from .builder import build
    from .reporter import parse_spec_file
    from .tensors import bach, weyl

    model = build(parse_spec_file(args.file))
    g = {"plus": model.gplus, "minus": model.gminus, "zero": model.g0}[args.metric]
    coords = g.chart.coords
    if args.tensor == "scalar":
        return f"s = {g.curvature.scalar}\n"
    if args.tensor == "ricci":
        comps = g.curvature.ricci
        lines = [f"Ric[{coords[a]},{coords[b]}] = {comps[a, b]}"
                 for a in range(g.n) for b in range(a, g.n) if comps[a, b]]
    elif args.tensor == "weyl":
        comps = weyl(g).comps
        lines = [f"W[{','.join(coords[i] for i in idx)}] = {comps[idx]}"
                 for idx in _index_iter(g.n, 4) if comps[idx] and idx[0] < idx[1] and idx[2] < idx[3]]
    else:
        comps = bach(g).comps
        lines = [f"B[{coords[a]},{coords[b]}] = {comps[a, b]}"
                 for a in range(g.n) for b in range(a, g.n) if comps[a, b]]
    return "\n".join(lines or ["0"]) + "\n"


def _index_iter(n, rank):
    return itertools.product(range(n), repeat=rank)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    fmt = "json" if getattr(args, "json", False) else "text"
    log.info("ambitoric %s", args.command)
    try:
        if args.command == "check":
            report, code = run_check(args.file, args.expect)
        elif args.command == "classify":
            report = run_classify(args.file)
            code = 0
        elif args.command == "curvature":
            sys.stdout.write(_curvature_text(args))
            return 0
        elif args.command == "table":
            report = table_experiment(args.form_type, args.trials, args.seed, args.witness_dir, csc=args.csc)
            code = 0 if report.all_hold else 1
        elif args.command == "pd":
            params = _rational_list(args.params, len(PD_PARAMETERS), "--params")
            report = run_pd(params)
            code = 0 if report.all_hold else 1
        else:
            V = _rational_list(args.V, 5, "--V")
            k = parse_rational(args.k.strip())
            report = run_calabi(V, k)
            code = 0
    except AmbitoricError as exc:
        print(f"ambitoric: error: {exc}", file=sys.stderr)
        return exc.exit_code
    sys.stdout.buffer.write(emit(report, fmt))
    sys.stdout.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
