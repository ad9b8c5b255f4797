"""Command-line front end: `forlog run | repl | translate`."""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from typing import TextIO

from .builtins import InputSource
from .engine import Machine, Solution
from .errors import ExecutionError, ForlogError, ParseError
from .reader import SourceUnit, parse_goal, parse_program
from .terms import Goal, Program
from .translate import eliminate_foralls, format_term, pretty_print

EXIT_YES, EXIT_NO, EXIT_ERROR = 0, 1, 2


@dataclass
class Config:
    files: list[str] = field(default_factory=list)
    query: str | None = None
    occurs_check: bool = False
    max_solutions: int | None = None
    depth_limit: int | None = None
    trace: bool = False
    input_script: str | None = None


class _Sink:
    """Output stream wrapper remembering whether the last text ended a line."""

    def __init__(self, stream: TextIO):
        self.stream = stream
        self.at_line_start = True

    def write(self, text: str) -> None:
        if text:
            self.stream.write(text)
            self.at_line_start = text.endswith("\n")

    def flush(self) -> None:
        self.stream.flush()

    def end_line(self) -> None:
        if not self.at_line_start:
            self.write("\n")


def load(files: list[str]) -> SourceUnit:
    merged = SourceUnit(",".join(files))
    for path in files:
        with open(path, encoding="utf-8") as f:
            text = f.read()
        try:
            unit = parse_program(text, origin=path)
        except ParseError as e:
            raise ParseError(f"{path}: {e.message}", e.line, e.column, e.found) from e
        merged.clauses.extend(unit.clauses)
        merged.queries.extend(unit.queries)
    return merged


def _machine(program: Program, cfg: Config, out, inp) -> Machine:
    return Machine(
        program,
        out=out,
        inp=inp,
        occurs_check=cfg.occurs_check,
        depth_limit=cfg.depth_limit,
        trace=cfg.trace,
    )


def _answer_lines(s: Solution, m: Machine) -> list[str]:
    return [f"{name} = {format_term(t, m.var_name)}" for name, t in s.answer.items()]


def _input_source(cfg: Config, stdin: TextIO) -> InputSource:
    if cfg.input_script is None:
        return InputSource(stdin)
    with open(cfg.input_script, encoding="utf-8") as f:
        return InputSource(f.read())


def cmd_run(cfg: Config, stdout: TextIO | None = None, stderr: TextIO | None = None,
            stdin: TextIO | None = None) -> int:
    stdout, stderr, stdin = stdout or sys.stdout, stderr or sys.stderr, stdin or sys.stdin
    out = _Sink(stdout)
    try:
        unit = load(cfg.files)
        queries = [parse_goal(cfg.query)] if cfg.query is not None else unit.queries
        program = Program(unit.clauses)
        inp = _input_source(cfg, stdin)
        status = EXIT_YES
        for q in queries:
            if _run_one(program, q, cfg, out, inp) == EXIT_NO:
                status = EXIT_NO
        return status
    except (ForlogError, OSError) as e:
        out.end_line()
        out.flush()
        stderr.write(f"error: {e}\n")
        return EXIT_ERROR


def _run_one(program: Program, q: Goal, cfg: Config, out: _Sink, inp: InputSource) -> int:
    m = _machine(program, cfg, out, inp)
    solutions, _ = m.run(q, cfg.max_solutions)
    out.end_line()
    if not solutions:
        out.write("no\n")
        return EXIT_NO
    for i, s in enumerate(solutions):
        if i:
            out.write(";\n")
        for line in _answer_lines(s, m):
            out.write(line + "\n")
    out.write("yes\n")
    return EXIT_YES


def cmd_translate(cfg: Config, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    stdout, stderr = stdout or sys.stdout, stderr or sys.stderr
    try:
        unit = load(cfg.files)
    except (ForlogError, OSError) as e:
        stderr.write(f"error: {e}\n")
        return EXIT_ERROR
    tu = eliminate_foralls(Program(unit.clauses), unit.queries)
    stdout.write(pretty_print(tu.translated, tu.queries))
    return EXIT_YES


def cmd_repl(cfg: Config, stdin: TextIO | None = None, stdout: TextIO | None = None,
             stderr: TextIO | None = None) -> int:
    """Interactive loop: one goal per line, `;` asks for the next answer."""
    stdin, stdout, stderr = stdin or sys.stdin, stdout or sys.stdout, stderr or sys.stderr
    try:
        program = Program(load(cfg.files).clauses)
        inp = _input_source(cfg, stdin)
    except (ForlogError, OSError) as e:
        stderr.write(f"error: {e}\n")
        return EXIT_ERROR
    out = _Sink(stdout)
    while True:
        out.write("?- ")
        out.flush()
        out.at_line_start = True  # answers may follow the prompt directly
        line = stdin.readline()
        if not line:
            out.write("\n")
            return EXIT_YES
        text = line.strip()
        if text.startswith("?-"):
            text = text[2:].strip()
        if not text:
            continue
        if text in ("halt", "halt."):
            return EXIT_YES
        try:
            goal = parse_goal(text)
        except ParseError as e:
            out.end_line()
            stderr.write(f"syntax error: {e}\n")
            continue
        m = _machine(program, cfg, out, inp)
        _repl_answers(m, goal, stdin, out, stderr)


def _repl_answers(m: Machine, goal: Goal, stdin: TextIO, out: _Sink, stderr: TextIO) -> None:
    gen = m.solve(goal)
    try:
        for s in gen:
            out.end_line()
            lines = _answer_lines(s, m)
            if not lines:
                out.write("yes\n")
                return
            out.write("\n".join(lines) + " ")
            out.flush()
            reply = stdin.readline()
            out.end_line()
            if reply.strip() != ";":
                out.write("yes\n")
                return
        out.end_line()
        out.write("no\n")
    except ExecutionError as e:
        out.end_line()
        stderr.write(f"error: {e}\n")
    finally:
        gen.close()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("files", nargs="*", help="program files (.fl)")
    common.add_argument("--occurs-check", action="store_true", help="unify with occurs check")
    common.add_argument("--max-solutions", type=int, metavar="N")
    common.add_argument("--depth-limit", type=int, metavar="N", help="abort deeper derivations")
    common.add_argument("--trace", action="store_true", help="log predicate calls to stderr")
    common.add_argument("--input", dest="input_script", metavar="FILE", help="script for read/1")

    parser = argparse.ArgumentParser(prog="forlog", description="Horn clauses with bounded-quantifier loops")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", parents=[common], help="run a query or the file's ?- queries")
    run.add_argument("-q", "--query", help="goal to solve instead of embedded queries")
    sub.add_parser("repl", parents=[common], help="interactive top level")
    sub.add_parser("translate", parents=[common], help="print the loop-free translation")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = Config(
        files=args.files,
        query=getattr(args, "query", None),
        occurs_check=args.occurs_check,
        max_solutions=args.max_solutions,
        depth_limit=args.depth_limit,
        trace=args.trace,
        input_script=args.input_script,
    )
    if args.command == "run":
        return cmd_run(cfg)
    if args.command == "repl":
        return cmd_repl(cfg)
    return cmd_translate(cfg)


if __name__ == "__main__":
    sys.exit(main())
