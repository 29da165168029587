"""Command-line driver: ``mool check|run|explore|fmt FILE``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from mool.diagnostics import Diagnostic, render_json
from mool.explore import DEFAULT_MAX_STATES, explore
from mool.parser import parse_program
from mool.pretty import pretty_print
from mool.runtime import DEFAULT_MAX_STEPS, run
from mool.typecheck import check_program
from mool.usage import COMPONENTWISE, VARIANT_MODES

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_FAULT = 2
EXIT_USAGE = 64
EXIT_NOINPUT = 66


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", type=Path, help="MOOL source file")
    common.add_argument("--json", action="store_true", help="diagnostics as JSON on stderr")
    common.add_argument("--strict-core", action="store_true",
                        help="reject constructs outside the core calculus")
    common.add_argument("--variant-subtyping", choices=VARIANT_MODES, default=COMPONENTWISE,
                        help="rule used for subtyping against variant usages")

    exec_opts = argparse.ArgumentParser(add_help=False)
    exec_opts.add_argument("--unsafe", action="store_true",
                           help="execute even if the program does not type-check")

    p = _Parser(prog="mool", description="MOOL checker and interpreter")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("check", parents=[common], help="type-check a program")
    r = sub.add_parser("run", parents=[common, exec_opts], help="run a program")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    r.add_argument("--trace", action="store_true", help="print one line per step to stderr")
    e = sub.add_parser("explore", parents=[common, exec_opts],
                       help="check every interleaving of a small program")
    e.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES)
    e.add_argument("--max-depth", type=int, default=None)
    sub.add_parser("fmt", parents=[common], help="pretty-print a program")
    return p


def load(source: str, file: str, strict_core: bool = False,
         variant_mode: str = COMPONENTWISE, typecheck: bool = True):
    """Parse and (optionally) check; returns the program and all diagnostics."""
    program, diags = parse_program(source, file)
    if program is None or any(d.severity == "error" for d in diags):
        return None, diags
    if typecheck:
        diags = diags + check_program(program, variant_mode, strict_core)
    return program, diags


def _report(diags: list[Diagnostic], as_json: bool) -> None:
    if as_json:
        print(render_json(diags), file=sys.stderr)
        return
    for d in diags:
        print(d.render(), file=sys.stderr)


def _errors(diags) -> bool:
    return any(d.severity == "error" for d in diags)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        source = args.file.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as err:
        print(f"mool: cannot read {args.file}: {err}", file=sys.stderr)
        return EXIT_NOINPUT
    file = str(args.file)
    typecheck = args.command != "fmt"
    program, diags = load(source, file, args.strict_core, args.variant_subtyping, typecheck)

    match args.command:
        case "check":
            _report(diags, args.json)
            return EXIT_REJECTED if _errors(diags) else EXIT_OK
        case "fmt":
            if program is None:
                _report(diags, args.json)
                return EXIT_REJECTED
            sys.stdout.write(pretty_print(program))
            return EXIT_OK

    if program is None or (_errors(diags) and not args.unsafe):
        _report(diags, args.json)
        return EXIT_REJECTED
    if args.command == "run":
        on_event = (lambda ev: print(ev, file=sys.stderr)) if args.trace else None
        result = run(program, args.seed, args.max_steps, on_event=on_event,
                     on_print=lambda text: print(text, flush=True))
        if result.ok:
            return EXIT_OK
        fault = Diagnostic("error", result.code, result.message)
        if args.json:
            _report([fault], True)
        else:
            print(f"{file}: error[{fault.code}]: {fault.message} "
                  f"(after {result.state.steps} steps)", file=sys.stderr)
        return EXIT_FAULT

    report = explore(program, args.max_states, args.max_depth)
    print(f"states: {report.states}  terminal: {report.terminals}  "
          f"violations: {len(report.violations)}")
    for v in report.violations:
        print(v.render())
        for line in v.trace:
            print(f"  {line}")
    return EXIT_OK if report.ok else EXIT_FAULT


if __name__ == "__main__":
    sys.exit(main())
