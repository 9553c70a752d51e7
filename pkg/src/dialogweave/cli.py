"""Command-line front end.

Exit codes: 0 success; 1 semantic negative (REJECTED / NOT-MEMBER /
DIFFER); 2 usage, syntax, or validation errors.  Expression and episode
arguments are literal text, or ``@path`` to read a file.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import miner
from .episodes import DEFAULT_CAP, EnumerationCapExceeded, difference_witness, enumerate_episodes
from .machine import membership, print_context, trace_path
from .simplify import canonicalize
from .staging import Advanced, stage
from .syntax import (
    DialogSyntaxError,
    ValidationFailure,
    parse_episode,
    parse_expr,
    parse_spec_file,
    parse_utterance,
    print_episode,
    print_expr,
    print_spec_file,
    print_utterance,
    Utterance,
)
from .expr import DialogExpr


def _read_arg(text: str) -> str:
    if text.startswith("@"):
        return Path(text[1:]).read_text(encoding="utf-8")
    return text


def _parse_expr_arg(text: str) -> DialogExpr:
    return parse_expr(_read_arg(text), origin=text if text.startswith("@") else "<arg>")


def _fmt_path(path: tuple[int, ...]) -> str:
    return "root" if not path else ".".join(str(i) for i in path)


def cmd_parse(args) -> int:
    expr = _parse_expr_arg(args.expr)
    print(print_expr(expr))
    return 0


def cmd_canon(args) -> int:
    expr = _parse_expr_arg(args.expr)
    trace = canonicalize(expr)
    if args.trace:
        for step in trace.steps:
            print(
                f"{step.rule} @ {_fmt_path(step.path)} | "
                f"{print_expr(step.before)} => {print_expr(step.after)}",
                file=sys.stderr,
            )
    print(print_expr(trace.result))
    return 0


def cmd_stage(args) -> int:
    expr = _parse_expr_arg(args.expr)
    utt = parse_utterance(_read_arg(args.utterance))
    outcome = stage(expr, utt)
    if isinstance(outcome, Advanced):
        print(print_expr(outcome.next))
        return 0
    print(f"REJECTED: {outcome.reason}")
    return 1


def cmd_run(args) -> int:
    expr = _parse_expr_arg(args.expr)
    ep = parse_episode(_read_arg(args.episode))
    ok = membership(expr, ep, strict=args.strict_complete)
    if args.trace:
        path = trace_path(expr, ep)
        for state in path or []:
            stack = ", ".join(print_context(c) for c in state.stack) or "(empty)"
            pending = " ".join(_set_str(u) for u in state.pending) or "(empty)"
            print(
                f"stack: [{stack}] | current: {print_expr(state.current)} | input: {pending}",
                file=sys.stderr,
            )
    print("MEMBER" if ok else "NOT-MEMBER")
    return 0 if ok else 1


def _set_str(u: frozenset) -> str:
    return print_utterance(Utterance(u))


def cmd_enum(args) -> int:
    expr = _parse_expr_arg(args.expr)
    spec = enumerate_episodes(expr, cap=args.cap)
    sys.stdout.write(print_spec_file(spec))
    return 0


def cmd_equiv(args) -> int:
    left = _parse_expr_arg(args.left)
    right = _parse_expr_arg(args.right)
    witness = difference_witness(left, right, cap=args.cap)
    if witness is None:
        print("EQUIVALENT")
        return 0
    print(f"DIFFER: {print_episode(witness)}")
    return 1


def cmd_mine(args) -> int:
    text = sys.stdin.read() if args.spec == "-" else _read_arg(args.spec)
    spec = parse_spec_file(text, origin=args.spec)
    exprs = miner.mine(spec, cap=args.cap)
    for e in exprs:
        print(print_expr(e))
    return 0


def cmd_gen(args) -> int:
    for i in range(args.count):
        cfg = miner.GenConfig(
            solicitations=args.names, arrow_prob=args.arrow_prob, seed=args.seed + i
        )
        print(print_expr(miner.generate_random(cfg)))
    return 0


def cmd_eval(args) -> int:
    cfg = miner.GenConfig(
        solicitations=args.names, arrow_prob=args.arrow_prob, seed=args.seed
    )
    report = miner.run_experiment(cfg, args.n, cap=args.cap)
    print(report.to_text())
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(json.dumps(report.to_dict(), indent=2) + "\n")
        (out / "histogram_l1.csv").write_text(report.histogram_csv("L1"))
        (out / "histogram_l2.csv").write_text(report.histogram_csv("L2"))
        print(f"report written to {out}/", file=sys.stderr)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import build_app

    uvicorn.run(build_app(strict_complete=args.strict_complete), host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dialogweave", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("parse", cmd_parse, "parse an expression and echo its printed form")
    sp.add_argument("expr")

    sp = add("canon", cmd_canon, "print the canonical form")
    sp.add_argument("expr")
    sp.add_argument("--trace", action="store_true", help="print rewrite steps to stderr")

    sp = add("stage", cmd_stage, "stage one utterance against an arrow-free expression")
    sp.add_argument("expr")
    sp.add_argument("utterance")

    sp = add("run", cmd_run, "check an episode for membership")
    sp.add_argument("expr")
    sp.add_argument("episode")
    sp.add_argument("--trace", action="store_true", help="print the reduction path to stderr")
    sp.add_argument("--strict-complete", action="store_true",
                    help="require every surviving state to complete")

    sp = add("enum", cmd_enum, "enumerate the episode set (.eps to stdout)")
    sp.add_argument("expr")
    sp.add_argument("--cap", type=int, default=DEFAULT_CAP)

    sp = add("equiv", cmd_equiv, "episode-set equality of two expressions")
    sp.add_argument("left")
    sp.add_argument("right")
    sp.add_argument("--cap", type=int, default=DEFAULT_CAP)

    sp = add("mine", cmd_mine, "compress a .eps file into a union of expressions")
    sp.add_argument("spec", help="@file, literal text, or - for stdin")
    sp.add_argument("--cap", type=int, default=DEFAULT_CAP)

    sp = add("gen", cmd_gen, "generate random weaving dialogs")
    sp.add_argument("--count", type=int, default=1)
    sp.add_argument("--names", type=int, default=5)
    sp.add_argument("--arrow-prob", type=float, default=0.5)
    sp.add_argument("--seed", type=int, default=0)

    sp = add("eval", cmd_eval, "run the generate/enumerate/mine experiment")
    sp.add_argument("--n", type=int, default=100)
    sp.add_argument("--names", type=int, default=5)
    sp.add_argument("--arrow-prob", type=float, default=0.5)
    sp.add_argument("--seed", type=int, default=7)
    sp.add_argument("--cap", type=int, default=DEFAULT_CAP)
    sp.add_argument("--out", help="directory for report.json and histogram CSVs")

    sp = add("serve", cmd_serve, "start the stateless HTTP facade")
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--port", type=int, default=8585)
    sp.add_argument("--strict-complete", action="store_true")

    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors already
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except (DialogSyntaxError, ValidationFailure, EnumerationCapExceeded, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
