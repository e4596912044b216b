"""Command-line front end.

Exit codes: 0 success, 1 check failure or stuck normalisation, 2 unreadable
or unparsable input, 3 internal invariant breach.

Commands run on a worker thread with a large stack, so that deep deductions
do not run into the interpreter's recursion limit.
"""
from __future__ import annotations

import argparse
import json
import sys
import threading

from .analysis import scan, subformula_report
from .generator import GeneratorParams, generate
from .kernel import MODES, SYSTEMS, KernelError, SystemConfig, check
from .normalizer import InvariantError, atomize_nc, describe_stuck, normalize
from .textio import ParseError, dumps, parse, pretty, trace_to_json

OK, FAILED, BAD_INPUT, INTERNAL = 0, 1, 2, 3


def _where(path) -> str:
    return "/".join(map(str, path)) or "root"


def _config(args) -> SystemConfig:
    modes = {}
    if getattr(args, "nc", None):
        modes["nc"] = args.nc
    if getattr(args, "red", None):
        modes["reductio"] = args.red
    return SystemConfig.named(args.system, **modes)


def _load(path):
    text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    return parse(text)


def _checked(args):
    """Parse and check the input file; returns ``(deduction, cfg)`` or an exit code."""
    d = _load(args.file)
    cfg = _config(args)
    report = check(d, cfg)
    if not report.ok:
        for v in report.violations:
            print(f"{args.file}: {v}", file=sys.stderr)
        return FAILED
    return d, cfg


def cmd_check(args):
    got = _checked(args)
    if isinstance(got, int):
        return got
    print("ok")
    return OK


def cmd_analyze(args):
    got = _checked(args)
    if isinstance(got, int):
        return got
    d, _ = got
    a = scan(d)
    if args.json:
        out = {
            "redexes": [{"kind": r.kind, "position": list(r.position), "formula": str(r.formula),
                         "degree": r.degree, "effectiveDegree": r.effective_degree}
                        for r in a.items],
            "segments": [{"positions": [list(p) for p in s.positions], "formula": str(s.formula),
                          "length": s.length, "maximal": s.maximal} for s in a.segments],
            "rank": 0 if a.rank().zero else [a.rank().degree, a.rank().l],
            "normal": a.normal,
            "subformulaViolations": [{"position": list(v.position), "formula": str(v.formula)}
                                     for v in subformula_report(d)],
        }
        print(json.dumps(out, ensure_ascii=False))
        return OK
    for r in a.items:
        print(f"{r.kind}\t{_where(r.position)}\t{r.formula}\t{r.effective_degree}")
    for s in a.segments:
        flag = "maximal" if s.maximal else "plain"
        path = " ".join(_where(p) for p in s.positions)
        print(f"segment\t{path}\t{s.formula}\t{flag}")
    print(f"rank\t{a.rank()}")
    return OK


def cmd_normalize(args):
    got = _checked(args)
    if isinstance(got, int):
        return got
    d, cfg = got
    result, trace = normalize(d, cfg, args.max_steps, debug=args.debug)
    if args.trace_json:
        with open(args.trace_json, "w", encoding="utf-8") as fh:
            fh.write(trace_to_json(trace) + "\n")
    print(pretty(result) if args.pretty else dumps(result))
    print(f"{trace.outcome} after {len(trace.steps)} step(s)", file=sys.stderr)
    if trace.outcome == "stuck":
        for r in trace.stuck:
            print(f"{args.file}: stuck: {describe_stuck(r)}", file=sys.stderr)
        return FAILED
    if trace.outcome == "stepLimit":
        print(f"{args.file}: step limit {args.max_steps} reached", file=sys.stderr)
        return FAILED
    return OK


def cmd_atomize(args):
    got = _checked(args)
    if isinstance(got, int):
        return got
    d, _ = got
    try:
        out = atomize_nc(d)
    except KernelError as exc:
        print(f"{args.file}: {exc}", file=sys.stderr)
        return FAILED
    print(pretty(out) if args.pretty else dumps(out))
    return OK


def cmd_generate(args):
    cfg = _config(args)
    d = generate(GeneratorParams(args.seed, args.max_nodes, cfg, args.bias, args.max_degree))
    print(pretty(d) if args.pretty else dumps(d))
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bnd", description="Check, analyse and normalise bilateral deductions.")
    sub = p.add_subparsers(dest="command", required=True)

    def system_flags(q):
        q.add_argument("--system", default="B", choices=sorted(SYSTEMS))
        q.add_argument("--nc", choices=MODES, help="non-contradiction mode")
        q.add_argument("--red", choices=MODES, help="reductio mode")

    def file_command(name, func, help_text):
        q = sub.add_parser(name, help=help_text)
        q.add_argument("file", help="a .bnd file, or - for standard input")
        system_flags(q)
        q.set_defaults(func=func)
        return q

    file_command("check", cmd_check, "check a deduction")
    q = file_command("analyze", cmd_analyze, "list maximal formulas, segments and the rank")
    q.add_argument("--json", action="store_true")
    q = file_command("normalize", cmd_normalize, "normalise with the reduction strategy")
    q.add_argument("--max-steps", type=int, default=100000)
    q.add_argument("--trace-json", metavar="PATH")
    q.add_argument("--pretty", action="store_true")
    q.add_argument("--debug", action="store_true", help="check every intermediate deduction")
    q = file_command("atomize", cmd_atomize, "restrict non-contradiction to atomic premises")
    q.add_argument("--pretty", action="store_true")
    q = sub.add_parser("generate", help="print a random deduction")
    q.add_argument("--seed", type=int, required=True)
    q.add_argument("--max-nodes", type=int, required=True)
    q.add_argument("--bias", type=float, default=0.5, help="redex bias in [0, 1]")
    q.add_argument("--max-degree", type=int, default=2)
    q.add_argument("--pretty", action="store_true")
    system_flags(q)
    q.set_defaults(func=cmd_generate)
    return p


STACK_BYTES = 512 * 1024 * 1024
RECURSION_LIMIT = 1_000_000


def _run(args) -> int:
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"{getattr(args, 'file', '-')}: parse error: {exc}", file=sys.stderr)
        return BAD_INPUT
    except OSError as exc:
        print(f"{getattr(args, 'file', '-')}: {exc}", file=sys.stderr)
        return BAD_INPUT
    except InvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return INTERNAL
    except RecursionError:
        print("internal error: deduction too deep for the available stack", file=sys.stderr)
        return INTERNAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    result = []
    old_limit, old_size = sys.getrecursionlimit(), threading.stack_size()
    sys.setrecursionlimit(max(old_limit, RECURSION_LIMIT))
    try:
        threading.stack_size(STACK_BYTES)
        worker = threading.Thread(target=lambda: result.append(_run(args)))
        worker.start()
        worker.join()
    finally:
        threading.stack_size(old_size)
        sys.setrecursionlimit(old_limit)
    return result[0] if result else INTERNAL
