"""Command-line driver: proving, interpolation, countermodels, verification.

Exit codes: 0 success (prove: derivable), 1 refutable / failed verification,
2 malformed input or flags, 3 modal-depth violation on S5 interpolation.
"""

from __future__ import annotations

import argparse
import json
import sys

from .formulas import Formula, ParseError, parse_formula, print_formula
from .harness import SUITES, Bounds, gen_corpus, run_suite
from .interpolation import ap, ap_traced, exists_p, forall_p, format_trace
from .models import model_to_dot, model_to_json
from .multiformulas import (
    Lab,
    mlabels,
    parse_multiformula,
    print_multiformula,
    simplify,
    to_scnf,
    to_sdnf,
)
from .prover import Derivable, countermodel, format_countermodel, prove
from .s5 import (
    HDerivable,
    ModalDepthError,
    ap_s5,
    countermodel_s5,
    exists_p_s5,
    forall_p_s5,
    hyper_of,
    parse_hypersequent,
    print_hypersequent,
    prove_s5,
)
from .sequents import interpret, parse_sequent, print_sequent, sequent_of

LOGICS = ("K", "D", "T", "S5")


def _read_input(args) -> str:
    if args.file:
        with open(args.file, encoding="utf-8") as handle:
            return handle.read().strip()
    if args.input is None:
        raise ParseError("no input given (pass text or --file)", 0)
    return args.input


def _single_formula(text: str) -> Formula | None:
    try:
        return parse_formula(text)
    except ParseError:
        return None


def cmd_prove(args) -> int:
    text = _read_input(args)
    if args.logic == "S5":
        h = parse_hypersequent(text)
        outcome = prove_s5(h)
        if isinstance(outcome, HDerivable):
            print("DERIVABLE")
            print(outcome.tree.to_text())
            return 0
        print("REFUTABLE")
        model, interp = countermodel_s5(outcome.witness)
    else:
        g = parse_sequent(text)
        outcome = prove(g, args.logic)
        if isinstance(outcome, Derivable):
            print("DERIVABLE")
            print(outcome.tree.to_text())
            return 0
        print("REFUTABLE")
        model, interp = countermodel(outcome.witness, args.logic)
    if args.format == "dot":
        print(model_to_dot(model))
    else:
        print(model_to_json(model))
        print(format_countermodel(model, interp))
    return 1


def cmd_interpolate(args) -> int:
    text = _read_input(args)
    atom = args.forall or args.exists
    f = _single_formula(text)
    post = (lambda m: m) if args.raw else simplify

    if args.exists and f is None:
        print("error: --exists requires a single-formula input", file=sys.stderr)
        return 2

    if args.logic == "S5":
        if f is not None:
            h = hyper_of(f)
        else:
            h = parse_hypersequent(text)
        if args.exists:
            eta = exists_p_s5(f, atom)
            print(print_multiformula(Lab((1,), eta)))
            print(print_formula(eta))
            return 0
        m = post(ap_s5(h, atom))
        print(print_multiformula(m))
        if f is not None:
            print(print_formula(forall_p_s5(f, atom)))
        return 0

    if args.exists:
        eta = exists_p(f, atom, args.logic)
        print(print_multiformula(Lab((1,), eta)))
        print(print_formula(eta))
        return 0

    g = sequent_of(f) if f is not None else parse_sequent(text)
    if args.trace:
        trace = ap_traced(g, atom, args.logic)
        print(format_trace(trace))
        m = post(trace.root)
    else:
        m = post(ap(g, atom, args.logic))
    print(print_multiformula(m))
    if f is not None:
        print(print_formula(forall_p(f, atom, args.logic)))
    return 0


def cmd_countermodel(args) -> int:
    text = _read_input(args)
    if args.logic == "S5":
        outcome = prove_s5(parse_hypersequent(text))
        if isinstance(outcome, HDerivable):
            print("DERIVABLE (no countermodel)")
            return 1
        model, interp = countermodel_s5(outcome.witness)
    else:
        outcome = prove(parse_sequent(text), args.logic)
        if isinstance(outcome, Derivable):
            print("DERIVABLE (no countermodel)")
            return 1
        model, interp = countermodel(outcome.witness, args.logic)
    if args.format == "dot":
        print(model_to_dot(model))
    else:
        print(model_to_json(model))
        print(format_countermodel(model, interp))
    return 0


def cmd_verify(args) -> int:
    bounds = Bounds(*(int(x) for x in args.bounds.split(",")))
    corpus = gen_corpus(args.seed, bounds)
    report = run_suite(args.suite, corpus)
    if args.format == "json":
        print(report.to_json())
    else:
        print(report.to_text())
    return 0 if report.passed else 1


def cmd_normalize(args) -> int:
    text = _read_input(args)
    if args.to == "nnf":
        print(print_formula(parse_formula(text)))
    elif args.to == "iota":
        print(print_formula(interpret(parse_sequent(text))))
    elif args.to in ("sdnf", "scnf"):
        m = parse_multiformula(text)
        convert = to_sdnf if args.to == "sdnf" else to_scnf
        print(print_multiformula(convert(m, mlabels(m))))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modalint",
        description="Decide validity and compute uniform interpolants in K, D, T, and S5.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, logic=True):
        p.add_argument("input", nargs="?", help="formula / sequent / hypersequent text")
        p.add_argument("--file", help="read the input from a file")
        p.add_argument("--format", choices=("text", "json", "dot"), default="text")
        if logic:
            p.add_argument("--logic", choices=LOGICS, required=True)

    p = sub.add_parser("prove", help="decide derivability; print proof or countermodel")
    add_common(p)
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("interpolate", help="compute a uniform interpolant")
    add_common(p)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--forall", metavar="ATOM", help="universal interpolant for ATOM")
    group.add_argument("--exists", metavar="ATOM", help="existential interpolant for ATOM")
    p.add_argument("--raw", action="store_true", help="skip interpolant simplification")
    p.add_argument("--trace", action="store_true", help="print the rewrite log")
    p.set_defaults(func=cmd_interpolate)

    p = sub.add_parser("countermodel", help="print a falsifying model if one exists")
    add_common(p)
    p.set_defaults(func=cmd_countermodel)

    p = sub.add_parser("verify", help="run a property suite on a generated corpus")
    p.add_argument("--suite", choices=SUITES, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--bounds",
        default="3,2,4",
        help="max connectives, max atoms, max worlds (comma separated)",
    )
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("normalize", help="print NNF / sequent reading / normal forms")
    add_common(p, logic=False)
    p.add_argument("--to", choices=("nnf", "iota", "sdnf", "scnf"), required=True)
    p.set_defaults(func=cmd_normalize)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except ModalDepthError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ParseError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
