"""Command-line entry point: ``reliamis <subcommand> ...``.

Exit status is 0 on success, 1 when a check finds problems (``check``,
``roundtrip``, ``leq`` without a witness) and 2 on errors.  Errors are
reported on stderr as ``error: <category>: <message>``.
"""
from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

from .errors import ReliaMisError
from .galois import abstract_model, check_roundtrip_props, concretize_props
from .io import (
    dump_matrix_file,
    dump_model_file,
    export_dot,
    parse_matrix_file,
    parse_model_file,
    parse_script_file,
)
from .mis import evaluate_at, evaluate_reliability
from .ops import apply_script, format_op
from .oracle import TrialConfig, monte_carlo_reliability
from .order import Relation, generalizes
from .props import check_well_formed

EXIT_FAIL = 1
EXIT_ERROR = 2


def _read(path: str) -> str:
    return sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _model(path):
    return parse_model_file(_read(path))


def _assignment(items):
    out = {}
    for item in items or ():
        name, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"expected name=value, got {item!r}")
        out[name] = value
    return out


def cmd_check(args):
    report = check_well_formed(_model(args.model))
    if report.ok:
        print("well-formed")
        return 0
    for v in report.violations:
        print(f"{v.rule}: {v.message}")
    return EXIT_FAIL


def cmd_normalize(args):
    _write(args.output, dump_model_file(_model(args.model)))
    return 0


def cmd_apply(args):
    ops = parse_script_file(_read(args.script))
    _write(args.output, dump_model_file(apply_script(ops, _model(args.model))))
    return 0


def cmd_eval(args):
    m = abstract_model(_model(args.model))
    if args.at:
        assignment = dict(m.components)
        assignment.update(_assignment(args.at))
        print(evaluate_at(m, assignment))
    else:
        print(evaluate_reliability(m))
    return 0


def cmd_abstract(args):
    m = abstract_model(_model(args.model))
    if args.dot:
        _write(args.dot, export_dot(m, numeric=args.numeric))
    if args.matrix or not args.dot:
        _write(args.matrix or "-", dump_matrix_file(m))
    return 0


def cmd_concretize(args):
    _write(args.output, dump_model_file(concretize_props(parse_matrix_file(_read(args.matrix)))))
    return 0


def cmd_roundtrip(args):
    rep = check_roundtrip_props(_model(args.model), args.depth)
    print(f"p:                {rep.lhs}")
    print(f"gamma(alpha(p)):  {rep.rhs}")
    print(f"{'holds' if rep.holds else 'FAILS'}: {rep.relation_checked}")
    for op in rep.witness:
        print(f"  {format_op(op)}")
    return 0 if rep.holds else EXIT_FAIL


def cmd_leq(args):
    v = generalizes(_model(args.p), _model(args.q), args.depth, literal=args.literal)
    print(f"{v.relation.value} (depth searched: {v.depth_searched})")
    for op in v.witness or ():
        print(f"  {format_op(op)}")
    return EXIT_FAIL if v.relation is Relation.NOT_LEQ_WITHIN_BOUND else 0


def cmd_simulate(args):
    m = abstract_model(_model(args.model))
    cfg = TrialConfig.from_env(args.trials, args.seed, _assignment(args.at) or None)
    if cfg.assignment:
        cfg = TrialConfig(cfg.trials, cfg.seed, {**dict(m.components), **cfg.assignment})
    print(monte_carlo_reliability(m, cfg, workers=args.workers))
    return 0


def cmd_repl(args):
    from .repl import run

    initial = _model(args.model) if args.model else None
    run(initial)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="reliamis", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.set_defaults(func=func)
        return sp

    sp = add("check", cmd_check, "report well-formedness violations")
    sp.add_argument("model")
    sp = add("normalize", cmd_normalize, "print the canonical form of a model file")
    sp.add_argument("model")
    sp.add_argument("-o", "--output", default="-")
    sp = add("apply", cmd_apply, "apply an operator script to a model")
    sp.add_argument("script")
    sp.add_argument("model")
    sp.add_argument("-o", "--output", default="-")
    sp = add("eval", cmd_eval, "exact reliability of the abstracted chain")
    sp.add_argument("model")
    sp.add_argument("--at", action="append", metavar="NAME=P", help="override a component reliability")
    sp = add("abstract", cmd_abstract, "build the Markov chain of a property set")
    sp.add_argument("model")
    sp.add_argument("--dot", metavar="OUT", help="write a DOT graph")
    sp.add_argument("--matrix", metavar="OUT", help="write the matrix file")
    sp.add_argument("--numeric", action="store_true", help="numeric edge labels in DOT")
    sp = add("concretize", cmd_concretize, "recover a property set from a matrix file")
    sp.add_argument("matrix")
    sp.add_argument("-o", "--output", default="-")
    sp = add("roundtrip", cmd_roundtrip, "check p <= gamma(alpha(p))")
    sp.add_argument("model")
    sp.add_argument("--depth", type=int, default=3)
    sp = add("leq", cmd_leq, "search for a generalization script from p to q")
    sp.add_argument("p")
    sp.add_argument("q")
    sp.add_argument("--depth", type=int, default=3)
    sp.add_argument("--literal", action="store_true", help="require equal canonical forms")
    sp = add("simulate", cmd_simulate, "Monte Carlo estimate of the reliability")
    sp.add_argument("model")
    sp.add_argument("--trials", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=None, help="defaults to $RELIAMIS_SEED, then 0")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--at", action="append", metavar="NAME=P")
    sp = add("repl", cmd_repl, "interactive refinement session")
    sp.add_argument("model", nargs="?")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except ReliaMisError as exc:
        print(f"error: {exc.category}: {exc}", file=sys.stderr)
    except OSError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
    except ValueError as exc:
        print(f"error: invalid-argument: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
