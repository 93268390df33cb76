"""Command line: ``reduce`` a term, ``check`` a property suite, ``gen`` a corpus.

Exit status is 0 when a run reaches its final state (or a suite passes), 2
when the fuel runs out, and 1 for usage and parse errors or a failing suite.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional, Sequence, TextIO

from .checks import SUITES, run_suite
from .estimators import run_machine
from .generate import gen_terms
from .pools import TEMPLATES, Job
from .syntax import HoleName, ParseError, parse, pretty, term_size, tidy
from .trace import FINAL, Trace
from .validation import MACHINES

EXIT_OK, EXIT_ERROR, EXIT_FUEL = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lamexam", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("reduce", help="run a machine on a term read from FILE or standard input")
    r.add_argument("file", nargs="?", help="term file; '--' starts a line comment")
    r.add_argument("--machine", choices=MACHINES, default="exam")
    r.add_argument("--template", choices=sorted(TEMPLATES), default="stack")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--fuel", type=int, default=10_000)
    r.add_argument("--trace", choices=("none", "labels", "full"), default="none")
    r.add_argument("--format", choices=("text", "records"), default="text")

    c = sub.add_parser("check", help="run a property suite on generated terms")
    c.add_argument("--suite", choices=SUITES, required=True)
    c.add_argument("--count", type=int, default=100)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--size", type=int, default=12)
    c.add_argument("--fuel", type=int, default=500)
    c.add_argument("--format", choices=("text", "records"), default="text")

    g = sub.add_parser("gen", help="print a seeded corpus of random terms")
    g.add_argument("--count", type=int, default=10)
    g.add_argument("--size", type=int, default=10)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--mode", choices=("closed", "open"), default="closed")
    g.add_argument("--format", choices=("text", "records"), default="text")
    return p


def prompt_chooser(stdin: TextIO, stderr: TextIO):
    """Bind the interactive template to a prompt on ``stderr`` answered on ``stdin``."""

    def choose(jobs: Sequence[Job]) -> HoleName:
        by_text = {str(j.name): j.name for j in jobs}
        by_text.update({str(j.name.id): j.name for j in jobs})
        while True:
            for j in jobs:
                stderr.write(f"{j.name}: {pretty(j.term)} | {len(j.stack)}\n")
            stderr.write("select> ")
            stderr.flush()
            line = stdin.readline()
            if not line:
                raise EOFError("no selection on standard input")
            pick = by_text.get(line.strip())
            if pick is not None:
                return pick
            stderr.write(f"not a job name: {line.strip()!r}\n")

    return choose


def _render_text(trace: Trace, detail: str) -> List[str]:
    lines = []
    if detail != "none":
        for i, step in enumerate(trace.steps, 1):
            who = f" {step.job}" if step.job is not None else ""
            if detail == "full" and step.snapshot is not None:
                cells = " | ".join(step.snapshot.values())
                lines.append(f"{i:>4}  {cells} || {step.label}{who}")
            else:
                lines.append(f"{i:>4}  {step.label}{who}")
        if detail == "full" and trace.final_snapshot is not None:
            lines.append("      " + " | ".join(trace.final_snapshot.values()))
    result = pretty(tidy(trace.result)) if trace.result is not None else "-"
    lines.append(f"result: {result}")
    lines.append(f"outcome: {trace.outcome}")
    lines.append(f"beta: {trace.beta_count}")
    lines.append(f"overhead: {trace.overhead_count}")
    return lines


def cmd_reduce(args, stdin: TextIO, stdout: TextIO, stderr: TextIO) -> int:
    if args.file:
        with open(args.file, encoding="utf-8") as f:
            text = f.read()
    elif args.machine == "exam" and args.template == "interactive":
        stderr.write("lamexam: the interactive template reads choices from standard input; give the term as FILE\n")
        return EXIT_ERROR
    else:
        text = stdin.read()
    term = parse(text)
    chooser = prompt_chooser(stdin, stderr) if args.template == "interactive" else None
    trace = run_machine(
        term, args.machine, args.template, args.seed, args.fuel,
        snapshots=args.trace == "full", chooser=chooser,
    )
    if args.format == "records":
        stdout.write(trace.dumps())
    else:
        stdout.write("\n".join(_render_text(trace, args.trace)) + "\n")
    return EXIT_OK if trace.outcome == FINAL else EXIT_FUEL


def cmd_check(args, stdout: TextIO) -> int:
    report = run_suite(args.suite, count=args.count, seed=args.seed, size=args.size, fuel=args.fuel)
    if args.format == "records":
        stdout.write(json.dumps({
            "suite": report.suite,
            "ok": report.ok,
            "cases": report.cases,
            "skipped": report.skipped,
            "failures": [
                {"term": pretty(f.term), "message": f.message,
                 "trace": f.trace.to_records() if f.trace is not None else None}
                for f in report.failures
            ],
        }, ensure_ascii=False) + "\n")
    else:
        stdout.write(report.summary() + "\n")
        if report.failures and report.failures[0].trace is not None:
            stdout.write(report.failures[0].trace.dumps())
    return EXIT_OK if report.ok else EXIT_ERROR


def cmd_gen(args, stdout: TextIO) -> int:
    for t in gen_terms(args.count, args.size, seed=args.seed, mode=args.mode):
        if args.format == "records":
            stdout.write(json.dumps({"term": pretty(t), "size": term_size(t)}, ensure_ascii=False) + "\n")
        else:
            stdout.write(pretty(t) + "\n")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None, stdin: TextIO = None, stdout: TextIO = None,
         stderr: TextIO = None) -> int:
    stdin, stdout, stderr = stdin or sys.stdin, stdout or sys.stdout, stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_ERROR
    for flag in ("fuel", "count", "seed", "size"):
        if getattr(args, flag, 0) < 0:
            stderr.write(f"lamexam: --{flag} must not be negative\n")
            return EXIT_ERROR
    try:
        if args.command == "reduce":
            return cmd_reduce(args, stdin, stdout, stderr)
        if args.command == "check":
            return cmd_check(args, stdout)
        if args.size < 1:
            stderr.write("lamexam: --size must be at least 1\n")
            return EXIT_ERROR
        return cmd_gen(args, stdout)
    except ParseError as e:
        stderr.write(f"lamexam: parse error: {e}\n")
        return EXIT_ERROR
    except (OSError, EOFError, ValueError) as e:
        stderr.write(f"lamexam: {e}\n")
        return EXIT_ERROR


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
