"""Command-line driver and REPL.

Commands: check / norm / eq over definition files, plus an interactive REPL.
All top-level judgments live in the initial stack (one empty world).  The
modal flavor comes from --flavor, else a #flavor pragma, else s4.

Exit codes: 0 success, 1 check/eq failure, 2 I/O or parse errors.  Reports
are plain text, one finding per line, `LOC: KIND: message`.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

from .evaluator import EvalError
from .readback import ReadbackError, nbe
from .surface import Definition, ParseError, SourceFile, parse_core, parse_file, print_term
from .syntax import EMPTY_STACK, Flavor, Term
from .typecheck import CheckError, TypeValue, check, infer_universe
from .evaluator import evaluate
from .readback import initial_env

DEFAULT_FLAVOR = Flavor.S4


@dataclass
class Command:
    kind: str  # check | norm | eq | repl
    path: str | None = None
    name: str | None = None
    other: str | None = None
    flavor: Flavor | None = None  # flag override; wins over pragma


def _resolve_flavor(command: Command, source: SourceFile | None) -> Flavor:
    if command.flavor is not None:
        return command.flavor
    if source is not None and source.flavor is not None:
        return source.flavor
    return DEFAULT_FLAVOR


def _load(path: str, out) -> SourceFile | None:
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        print(f"{path}: io-error: {exc}", file=out)
        return None
    try:
        return parse_file(text)
    except ParseError as exc:
        print(f"{path}:{exc.line}:{exc.col}: parse-error: {exc.args[0].split(': ', 1)[-1]}", file=out)
        return None


def _check_definition(defn: Definition, flavor: Flavor, path: str, out) -> bool:
    loc = f"{path}:{defn.line}:{defn.col}"
    try:
        infer_universe(EMPTY_STACK, defn.ty, flavor)
        expected = TypeValue(evaluate(defn.ty, initial_env(EMPTY_STACK)), initial_env(EMPTY_STACK))
        check(EMPTY_STACK, defn.body, expected, flavor)
        return True
    except CheckError as exc:
        print(f"{loc}: {exc.kind}: {exc.message} (in '{defn.name}')", file=out)
        return False
    except (EvalError, ReadbackError) as exc:
        print(f"{loc}: evaluation-error: {exc} (in '{defn.name}')", file=out)
        return False


def _normalize(defn: Definition) -> Term:
    return nbe(EMPTY_STACK, defn.body, defn.ty)


def run(command: Command, out=None) -> int:
    out = out if out is not None else sys.stdout
    if command.kind == "repl":
        return _repl(command, out)
    source = _load(command.path, out)
    if source is None:
        return 2
    flavor = _resolve_flavor(command, source)
    if command.kind == "check":
        ok = True
        for defn in source.defs:
            ok = _check_definition(defn, flavor, command.path, out) and ok
        return 0 if ok else 1
    if command.kind == "norm":
        defn = source.lookup(command.name)
        if defn is None:
            print(f"{command.path}: unknown-definition: {command.name!r}", file=out)
            return 2
        if not _check_definition(defn, flavor, command.path, out):
            return 1
        print(print_term(_normalize(defn)), file=out)
        return 0
    if command.kind == "eq":
        left = source.lookup(command.name)
        right = source.lookup(command.other)
        missing = command.name if left is None else (command.other if right is None else None)
        if missing is not None:
            print(f"{command.path}: unknown-definition: {missing!r}", file=out)
            return 2
        for defn in (left, right):
            if not _check_definition(defn, flavor, command.path, out):
                return 1
        if _normalize(left) == _normalize(right):
            print("equal", file=out)
            return 0
        print("distinct", file=out)
        return 1
    raise ValueError(f"unknown command {command.kind!r}")


def _split_top_colon(text: str, where) -> tuple[str, str]:
    depth = 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == ":" and depth == 0:
            return text[:i], text[i + 1 :]
    raise ParseError(f"expected ': TYPE' in {where}", 1, 1)


def _repl(command: Command, out) -> int:
    flavor = command.flavor if command.flavor is not None else DEFAULT_FLAVOR
    interactive = sys.stdin.isatty()
    if interactive:
        print("mint repl; :check t : T, :norm t : T, :eq t1 t2 : T, :flavor F, :quit", file=out)
    while True:
        if interactive:
            out.write("mint> ")
            out.flush()
        line = sys.stdin.readline()
        if not line:
            return 0
        line = line.strip()
        if not line:
            continue
        try:
            if line == ":quit":
                return 0
            if line.startswith(":flavor"):
                flavor = Flavor.parse(line[len(":flavor") :].strip())
                print(f"flavor {flavor.value}", file=out)
            elif line.startswith(":check"):
                term_text, ty_text = _split_top_colon(line[len(":check") :], ":check")
                _repl_check(term_text, ty_text, flavor)
                print("ok", file=out)
            elif line.startswith(":norm"):
                term_text, ty_text = _split_top_colon(line[len(":norm") :], ":norm")
                term, ty = _repl_check(term_text, ty_text, flavor)
                print(print_term(nbe(EMPTY_STACK, term, ty)), file=out)
            elif line.startswith(":eq"):
                rest, ty_text = _split_top_colon(line[len(":eq") :], ":eq")
                ty = parse_core(ty_text)
                lhs_text, rhs_text = _split_two_aterms(rest)
                lhs = parse_core(lhs_text)
                rhs = parse_core(rhs_text)
                infer_universe(EMPTY_STACK, ty, flavor)
                env = initial_env(EMPTY_STACK)
                expected = TypeValue(evaluate(ty, env), env)
                check(EMPTY_STACK, lhs, expected, flavor)
                check(EMPTY_STACK, rhs, expected, flavor)
                same = nbe(EMPTY_STACK, lhs, ty) == nbe(EMPTY_STACK, rhs, ty)
                print("equal" if same else "distinct", file=out)
            else:
                print(f"repl: unknown-command: {line.split()[0]!r}", file=out)
        except (ParseError, CheckError, EvalError, ReadbackError) as exc:
            kind = getattr(exc, "kind", "parse-error")
            message = getattr(exc, "message", None) or str(exc)
            print(f"repl: {kind}: {message}", file=out)


def _repl_check(term_text: str, ty_text: str, flavor: Flavor) -> tuple[Term, Term]:
    term = parse_core(term_text)
    ty = parse_core(ty_text)
    infer_universe(EMPTY_STACK, ty, flavor)
    env = initial_env(EMPTY_STACK)
    check(EMPTY_STACK, term, TypeValue(evaluate(ty, env), env), flavor)
    return term, ty


def _split_two_aterms(text: str) -> tuple[str, str]:
    """Split ':eq t1 t2' operands: two atomic terms (parenthesize compound
    terms)."""
    text = text.strip()
    if text.startswith("("):
        depth = 0
        for i, ch in enumerate(text):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
                if depth == 0:
                    return text[: i + 1], text[i + 1 :]
        raise ParseError("unbalanced parentheses in :eq", 1, 1)
    parts = text.split(None, 1)
    if len(parts) != 2:
        raise ParseError(":eq expects two terms", 1, 1)
    return parts[0], parts[1]


def main(argv: list[str] | None = None) -> None:
    parser = argparse.ArgumentParser(
        prog="mint",
        description="Type-check and normalize modal dependent type theory programs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_flavor(p):
        p.add_argument("--flavor", choices=["k", "t", "k4", "s4"], help="modal flavor override")

    p_check = sub.add_parser("check", help="type-check every definition in a file")
    p_check.add_argument("file")
    add_flavor(p_check)

    p_norm = sub.add_parser("norm", help="print the normal form of a definition")
    p_norm.add_argument("file")
    p_norm.add_argument("--def", dest="name", required=True, metavar="NAME")
    add_flavor(p_norm)

    p_eq = sub.add_parser("eq", help="compare the normal forms of two definitions")
    p_eq.add_argument("file")
    p_eq.add_argument("name")
    p_eq.add_argument("other")
    add_flavor(p_eq)

    p_repl = sub.add_parser("repl", help="interactive prompt")
    add_flavor(p_repl)

    args = parser.parse_args(argv)
    flavor = Flavor.parse(args.flavor) if getattr(args, "flavor", None) else None
    if args.command == "check":
        command = Command("check", path=args.file, flavor=flavor)
    elif args.command == "norm":
        command = Command("norm", path=args.file, name=args.name, flavor=flavor)
    elif args.command == "eq":
        command = Command("eq", path=args.file, name=args.name, other=args.other, flavor=flavor)
    else:
        command = Command("repl", flavor=flavor)
    sys.exit(run(command))
