"""Command-line front end: ``lwlite check|run|core|repl|test``."""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import syntax as S
from .core import print_value
from .errors import EvalError, LwError
from .golden import check_file, corpus_files
from .session import Session, is_ground
from .types import normalize_print

EXIT_OK, EXIT_ERRORS, EXIT_IO, EXIT_EVAL = 0, 1, 2, 3


@dataclass
class CliConfig:
    command: str
    paths: list[str] = field(default_factory=list)
    verbose: bool = False


def _read(path: str, err) -> str | None:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        print(f"{path}: cannot read file: {exc}", file=err)
        return None


def _check(path: str, out, err):
    """Returns (session, result, source) or an exit status."""
    source = _read(path, err)
    if source is None:
        return EXIT_IO
    session = Session()
    try:
        res = session.check(source)
    except LwError as exc:
        print(exc.render(source, path), file=err)
        return EXIT_ERRORS
    for d in res.diagnostics:
        print(d.error.render(source, path) if d.error else d.message, file=err)
    return session, res, source


def cmd_check(path: str, out=None, err=None) -> int:
    out, err = out or sys.stdout, err or sys.stderr
    r = _check(path, out, err)
    if isinstance(r, int):
        return r
    _, res, _ = r
    for b in res.bindings:
        print(f"{S.fmt_name(b.name)} : {normalize_print(b.scheme)}", file=out)
    return EXIT_OK if res.ok else EXIT_ERRORS


def cmd_run(path: str, out=None, err=None) -> int:
    out, err = out or sys.stdout, err or sys.stderr
    r = _check(path, out, err)
    if isinstance(r, int):
        return r
    session, res, _ = r
    if not res.ok:
        return EXIT_ERRORS
    try:
        ran = session.run(res)
    except (EvalError, RecursionError) as exc:
        msg = exc.render(None, path) if isinstance(exc, LwError) else f"{path}: runtime error: {exc}"
        print(msg, file=err)
        return EXIT_EVAL
    for name, value, sc in ran:
        if is_ground(sc):
            print(f"{S.fmt_name(name)} = {print_value(value)}", file=out)
    return EXIT_OK


def cmd_core(path: str, out=None, err=None) -> int:
    out, err = out or sys.stdout, err or sys.stderr
    r = _check(path, out, err)
    if isinstance(r, int):
        return r
    _, res, _ = r
    out.write(S.print_program(S.Program(tuple(res.core))))
    return EXIT_OK if res.ok else EXIT_ERRORS


def cmd_test(directory: str, out=None, err=None, verbose: bool = False) -> int:
    out, err = out or sys.stdout, err or sys.stderr
    d = Path(directory)
    if not d.is_dir():
        print(f"{directory}: corpus directory not found", file=err)
        return EXIT_IO
    start = time.perf_counter()
    passed = failed = 0
    for path in corpus_files(d):
        report = check_file(path)
        for msg in report.errors:
            print(f"ERROR {msg}", file=out)
            failed += 1
        for o in report.outcomes:
            if o.ok:
                passed += 1
                if verbose:
                    print(o.render(str(path)), file=out)
            else:
                failed += 1
                print(o.render(str(path)), file=out)
    elapsed = time.perf_counter() - start
    print(f"{passed} passed, {failed} failed in {elapsed:.2f}s", file=out)
    return EXIT_OK if failed == 0 else EXIT_ERRORS


REPL_HELP = """\
  :t e      show the type of e
  :core e   show the translation of e
  :q        quit
  items (let ..., overload ...) extend the session; bare expressions are evaluated"""


class Repl:
    def __init__(self, out=None):
        self.session = Session()
        self.out = out or sys.stdout

    def feed(self, line: str) -> bool:
        """Process one input; returns False when the session should end."""
        line = line.strip()
        if not line:
            return True
        out = self.out
        try:
            if line in (":q", ":quit"):
                return False
            if line in (":h", ":help"):
                print(REPL_HELP, file=out)
            elif line.startswith(":t "):
                print(self.session.show_type(line[3:]), file=out)
            elif line.startswith(":core "):
                print(S.print_expr(self.session.core_of(line[6:])), file=out)
            elif line.startswith(":"):
                print(f"unknown command {line.split()[0]}; :h for help", file=out)
            elif line.startswith(("let ", "overload ", "let\t")) and not _is_let_in(line):
                self._items(line)
            else:
                self._items(f"let it = {line}", show_values_only=True)
        except LwError as exc:
            print(exc.render(line, "<repl>"), file=out)
        except RecursionError:
            print("<repl>: runtime error: recursion too deep", file=out)
        return True

    def _items(self, source: str, show_values_only: bool = False):
        res = self.session.check(source)
        for d in res.diagnostics:
            print(d.error.render(source, "<repl>") if d.error else d.message, file=self.out)
        if not res.ok:
            return
        ran = self.session.run(res)
        for (name, value, sc) in ran:
            shown = S.fmt_name(name)
            text = f"{shown} : {normalize_print(sc)}"
            if is_ground(sc):
                text += f" = {print_value(value)}"
            print(text if not show_values_only else
                  (f"{print_value(value)} : {normalize_print(sc)}"), file=self.out)

    def run(self, inp=None):
        inp = inp or sys.stdin
        interactive = inp.isatty()
        while True:
            if interactive:
                self.out.write("lw> ")
                self.out.flush()
            line = inp.readline()
            if not line or not self.feed(line):
                break


def _is_let_in(line: str) -> bool:
    try:
        S.parse_program(line)
        return False
    except LwError:
        return True


def cmd_repl(inp=None, out=None) -> int:
    Repl(out).run(inp)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lwlite", description="lw-lite type checker and interpreter")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (("check", "print the inferred type of every binding"),
                        ("run", "evaluate a program and print ground values"),
                        ("core", "print the translated core program")):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("path")
    sub.add_parser("repl", help="interactive session")
    tp = sub.add_parser("test", help="check golden expectations in a corpus directory")
    tp.add_argument("path")
    tp.add_argument("-v", "--verbose", action="store_true", help="also list passing checks")
    return p


def parse_args(argv: list[str] | None = None) -> CliConfig:
    args = build_parser().parse_args(argv)
    path = getattr(args, "path", None)
    return CliConfig(args.command, [path] if path else [], getattr(args, "verbose", False))


def main(argv: list[str] | None = None) -> int:
    config = parse_args(argv)
    # the evaluator and the inferencer recurse over the term structure
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 6000))
    commands = {"check": cmd_check, "run": cmd_run, "core": cmd_core}
    if config.command in commands:
        return commands[config.command](config.paths[0])
    if config.command == "repl":
        return cmd_repl()
    return cmd_test(config.paths[0], verbose=config.verbose)


if __name__ == "__main__":
    sys.exit(main())
