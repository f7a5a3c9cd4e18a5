"""Surface syntax: lexer, parser, and printer.

Grammar (comments run from `--` to end of line):

    file  := {pragma | decl}
    pragma:= "#flavor" IDENT ";"
    decl  := "def" IDENT ":" term ":=" term ";"
    term  := "fn" IDENT "." term
           | "(" IDENT ":" term ")" "->" term
           | "box" aterm
           | "unbox" NAT aterm
           | "rec" "(" IDENT "." term ")" term "(" IDENT IDENT "." term ")" aterm
           | app ["->" term]
    app   := app aterm | aterm
    aterm := IDENT | "Ty" NAT | "Nat" | "zero" | "succ" aterm | "[]" aterm
           | "(" term ")"

`[]` is the box type former; a non-dependent arrow desugars to a Π with an
unused binder.  Identifiers resolve against the binders of the current world
only; anything else must be a previously defined name, which is inlined.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .syntax import (
    App,
    BoxIntro,
    BoxTy,
    Comp,
    CtxStack,
    Ext,
    Flavor,
    Id,
    Lam,
    ModalExt,
    NatElim,
    NatTy,
    Pi,
    Sub,
    Subst,
    Succ,
    Term,
    Unbox,
    Univ,
    Var,
    Wk,
    Zero,
)

KEYWORDS = frozenset({"def", "fn", "box", "unbox", "rec", "zero", "succ", "Nat", "Ty"})


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {message}")


@dataclass(frozen=True)
class Token:
    kind: str  # ident | nat | kw | sym | pragma | eof
    text: str
    line: int
    col: int


def lex(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("--", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if ch == "#":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            if word != "#flavor":
                raise ParseError(f"unknown pragma {word!r}", start_line, start_col)
            tokens.append(Token("pragma", word, start_line, start_col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = "kw" if word in KEYWORDS else "ident"
            tokens.append(Token(kind, word, start_line, start_col))
            col += j - i
            i = j
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("nat", text[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        for sym in (":=", "->", "[]"):
            if text.startswith(sym, i):
                tokens.append(Token("sym", sym, start_line, start_col))
                i += len(sym)
                col += len(sym)
                break
        else:
            if ch in "():.;":
                tokens.append(Token("sym", ch, start_line, start_col))
                i += 1
                col += 1
            else:
                raise ParseError(f"unexpected character {ch!r}", start_line, start_col)
    tokens.append(Token("eof", "", line, col))
    return tokens


@dataclass
class Definition:
    name: str
    ty: Term
    body: Term
    line: int
    col: int


@dataclass
class SourceFile:
    """Ordered definitions with earlier names already inlined."""

    defs: list[Definition] = field(default_factory=list)
    flavor: Flavor | None = None

    def lookup(self, name: str) -> Definition | None:
        for d in self.defs:
            if d.name == name:
                return d
        return None


class _Parser:
    def __init__(self, tokens: list[Token], inlinable: dict[str, Term] | None = None):
        self.tokens = tokens
        self.pos = 0
        self.inlinable = inlinable if inlinable is not None else {}

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        self.pos += 1
        return tok

    def fail(self, message: str) -> ParseError:
        tok = self.peek()
        return ParseError(message, tok.line, tok.col)

    def expect_sym(self, sym: str) -> Token:
        tok = self.peek()
        if tok.kind != "sym" or tok.text != sym:
            raise self.fail(f"expected {sym!r}, found {tok.text or 'end of input'!r}")
        return self.next()

    def expect_kw(self, kw: str) -> Token:
        tok = self.peek()
        if tok.kind != "kw" or tok.text != kw:
            raise self.fail(f"expected {kw!r}, found {tok.text or 'end of input'!r}")
        return self.next()

    def expect_ident(self) -> Token:
        tok = self.peek()
        if tok.kind != "ident":
            raise self.fail(f"expected an identifier, found {tok.text or 'end of input'!r}")
        return self.next()

    def expect_nat(self) -> int:
        tok = self.peek()
        if tok.kind != "nat":
            raise self.fail(f"expected a number, found {tok.text or 'end of input'!r}")
        self.next()
        return int(tok.text)

    def at_sym(self, sym: str, ahead: int = 0) -> bool:
        tok = self.peek(ahead)
        return tok.kind == "sym" and tok.text == sym

    def at_kw(self, kw: str, ahead: int = 0) -> bool:
        tok = self.peek(ahead)
        return tok.kind == "kw" and tok.text == kw

    def at_step_group(self) -> bool:
        # "(" IDENT IDENT "." never starts a term; it is rec's step binder.
        return (
            self.at_sym("(")
            and self.peek(1).kind == "ident"
            and self.peek(2).kind == "ident"
            and self.at_sym(".", 3)
        )

    # Terms are parsed against a stack of per-world binder name lists; only
    # the names of the current (last) world are addressable.

    def term(self, worlds: list[list[str]]) -> Term:
        if self.at_kw("fn"):
            self.next()
            name = self.expect_ident().text
            self.expect_sym(".")
            body = self.term(_bind(worlds, name))
            return Lam(body)
        if self.at_sym("(") and self.peek(1).kind == "ident" and self.at_sym(":", 2):
            self.next()
            name = self.expect_ident().text
            self.expect_sym(":")
            dom = self.term(worlds)
            self.expect_sym(")")
            self.expect_sym("->")
            cod = self.term(_bind(worlds, name))
            return Pi(dom, cod)
        if self.at_kw("box"):
            self.next()
            return BoxIntro(self.aterm(worlds + [[]]))
        if self.at_kw("unbox"):
            self.next()
            level = self.expect_nat()
            return Unbox(level, self.aterm(_truncate_names(worlds, level)))
        if self.at_kw("rec"):
            return self.rec_term(worlds)
        head = self.app(worlds)
        if self.at_sym("->"):
            self.next()
            cod = self.term(_bind(worlds, "_"))
            return Pi(head, cod)
        return head

    def rec_term(self, worlds: list[list[str]]) -> Term:
        self.expect_kw("rec")
        self.expect_sym("(")
        motive_name = self.expect_ident().text
        self.expect_sym(".")
        motive = self.term(_bind(worlds, motive_name))
        self.expect_sym(")")
        base = self.term(worlds)
        self.expect_sym("(")
        step_x = self.expect_ident().text
        step_y = self.expect_ident().text
        self.expect_sym(".")
        step = self.term(_bind(_bind(worlds, step_x), step_y))
        self.expect_sym(")")
        scrutinee = self.aterm(worlds)
        return NatElim(motive, base, step, scrutinee)

    def app(self, worlds: list[list[str]]) -> Term:
        term = self.aterm(worlds)
        while self.starts_aterm() and not self.at_step_group():
            term = App(term, self.aterm(worlds))
        return term

    def starts_aterm(self) -> bool:
        tok = self.peek()
        if tok.kind == "ident":
            return True
        if tok.kind == "kw" and tok.text in ("Ty", "Nat", "zero", "succ"):
            return True
        if tok.kind == "sym" and tok.text in ("(", "[]"):
            return True
        return False

    def aterm(self, worlds: list[list[str]]) -> Term:
        tok = self.peek()
        if tok.kind == "ident":
            self.next()
            return self.resolve(tok, worlds)
        if tok.kind == "kw":
            if tok.text == "Ty":
                self.next()
                return Univ(self.expect_nat())
            if tok.text == "Nat":
                self.next()
                return NatTy()
            if tok.text == "zero":
                self.next()
                return Zero()
            if tok.text == "succ":
                self.next()
                return Succ(self.aterm(worlds))
        if tok.kind == "sym" and tok.text == "[]":
            self.next()
            return BoxTy(self.aterm(worlds + [[]]))
        if tok.kind == "sym" and tok.text == "(":
            self.next()
            inner = self.term(worlds)
            self.expect_sym(")")
            return inner
        raise self.fail(f"expected a term, found {tok.text or 'end of input'!r}")

    def resolve(self, tok: Token, worlds: list[list[str]]) -> Term:
        current = worlds[-1]
        for depth, name in enumerate(reversed(current)):
            if name == tok.text:
                return Var(depth)
        if tok.text in self.inlinable:
            return self.inlinable[tok.text]
        raise ParseError(f"unknown identifier {tok.text!r}", tok.line, tok.col)


def _bind(worlds: list[list[str]], name: str) -> list[list[str]]:
    return worlds[:-1] + [worlds[-1] + [name]]


def _truncate_names(worlds: list[list[str]], n: int) -> list[list[str]]:
    if n == 0:
        return worlds
    if n >= len(worlds):
        # The unbox level escapes the stack: names are unreachable; typing
        # will reject the term, but it stays parseable if its body is closed.
        return [[]]
    return worlds[:-n]


def parse_core(text: str, inlinable: dict[str, Term] | None = None) -> Term:
    """Parse a single closed term (over the initial stack)."""
    parser = _Parser(lex(text), inlinable)
    term = parser.term([[]])
    if parser.peek().kind != "eof":
        raise parser.fail(f"trailing input {parser.peek().text!r}")
    return term


def parse_file(text: str) -> SourceFile:
    """Parse an ordered definition file, inlining earlier names.

    References are replaced by the nbe-normal form of the referenced
    definition (falling back to its raw body when normalization fails, which
    only happens for definitions the checker rejects anyway).
    """
    from .evaluator import EvalError
    from .readback import ReadbackError, nbe
    from .syntax import EMPTY_STACK

    parser = _Parser(lex(text))
    source = SourceFile()
    inline_forms: dict[str, Term] = {}
    raw: dict[str, tuple[Term, Term]] = {}
    while parser.peek().kind != "eof":
        if parser.peek().kind == "pragma":
            pragma = parser.next()
            name = parser.expect_ident()
            parser.expect_sym(";")
            if source.flavor is not None:
                raise ParseError("duplicate flavor pragma", pragma.line, pragma.col)
            try:
                source.flavor = Flavor.parse(name.text)
            except ValueError as exc:
                raise ParseError(str(exc), name.line, name.col) from None
            continue
        head = parser.expect_kw("def")
        name_tok = parser.expect_ident()
        if name_tok.text in raw:
            raise ParseError(
                f"duplicate definition {name_tok.text!r}", name_tok.line, name_tok.col
            )
        parser.expect_sym(":")
        parser.inlinable = inline_forms
        ty = parser.term([[]])
        parser.expect_sym(":=")
        body = parser.term([[]])
        parser.expect_sym(";")
        source.defs.append(Definition(name_tok.text, ty, body, head.line, head.col))
        raw[name_tok.text] = (ty, body)
        try:
            inline_forms[name_tok.text] = nbe(EMPTY_STACK, body, ty)
        except (EvalError, ReadbackError, RecursionError):
            inline_forms[name_tok.text] = body
    return source


# ---------------------------------------------------------------------------
# Printing

_TERM, _APP, _ATOM = 0, 1, 2


class _NameGen:
    def __init__(self, taken: set[str]):
        self.taken = set(taken)
        self.counter = 0

    def fresh(self) -> str:
        while True:
            name = f"x{self.counter}"
            self.counter += 1
            if name not in self.taken:
                self.taken.add(name)
                return name


def print_term(term: Term, worlds: list[list[str]] | None = None) -> str:
    """Render a term in the surface grammar.

    Sub-free terms whose free variables are covered by `worlds` re-parse to
    the same term.  Out-of-scope variables render as #k and Sub nodes use a
    bracket notation; both are for diagnostics only.
    """
    worlds = worlds if worlds is not None else [[]]
    gen = _NameGen({name for world in worlds for name in world})
    return _print(term, worlds, gen, _TERM)


def _parens(text: str, own: int, required: int) -> str:
    return f"({text})" if own < required else text


def _print(term: Term, worlds: list[list[str]], gen: _NameGen, level: int) -> str:
    match term:
        case Var(index):
            current = worlds[-1]
            if 0 <= index < len(current):
                return current[-1 - index]
            return f"#{index}"
        case Univ(i):
            return f"Ty {i}"
        case NatTy():
            return "Nat"
        case Zero():
            return "zero"
        case Succ(arg):
            return f"succ {_print(arg, worlds, gen, _ATOM)}"
        case BoxTy(inner):
            return f"[] {_print(inner, worlds + [[]], gen, _ATOM)}"
        case Lam(body):
            name = gen.fresh()
            text = f"fn {name}. {_print(body, _bind(worlds, name), gen, _TERM)}"
            return _parens(text, _TERM, level)
        case Pi(dom, cod):
            if _uses_var0(cod):
                name = gen.fresh()
                dom_text = _print(dom, worlds, gen, _TERM)
                cod_text = _print(cod, _bind(worlds, name), gen, _TERM)
                return _parens(f"({name} : {dom_text}) -> {cod_text}", _TERM, level)
            dom_text = _print(dom, worlds, gen, _APP)
            cod_text = _print(cod, _bind(worlds, "_"), gen, _TERM)
            return _parens(f"{dom_text} -> {cod_text}", _TERM, level)
        case App(fn, arg):
            text = f"{_print(fn, worlds, gen, _APP)} {_print(arg, worlds, gen, _ATOM)}"
            return _parens(text, _APP, level)
        case BoxIntro(body):
            text = f"box {_print(body, worlds + [[]], gen, _ATOM)}"
            return _parens(text, _TERM, level)
        case Unbox(n, body):
            text = f"unbox {n} {_print(body, _truncate_names(worlds, n), gen, _ATOM)}"
            return _parens(text, _TERM, level)
        case NatElim(motive, base, step, scrutinee):
            x = gen.fresh()
            motive_text = _print(motive, _bind(worlds, x), gen, _TERM)
            base_text = _print(base, worlds, gen, _TERM)
            sx = gen.fresh()
            sy = gen.fresh()
            step_text = _print(step, _bind(_bind(worlds, sx), sy), gen, _TERM)
            scrutinee_text = _print(scrutinee, worlds, gen, _ATOM)
            text = f"rec ({x}. {motive_text}) {base_text} ({sx} {sy}. {step_text}) {scrutinee_text}"
            return _parens(text, _TERM, level)
        case Sub(inner, subst, _):
            return f"{_print(inner, worlds, gen, _ATOM)}[{print_subst(subst)}]"
    raise TypeError(f"not a term: {term!r}")


def print_subst(subst: Subst) -> str:
    """Diagnostic rendering of an explicit substitution."""
    match subst:
        case Id():
            return "I"
        case Wk():
            return "wk"
        case Ext(base, term):
            return f"{print_subst(base)}, {print_term(term)}"
        case ModalExt(base, offset):
            return f"^{offset}({print_subst(base)})"
        case Comp(outer, inner):
            return f"({print_subst(outer)} o {print_subst(inner)})"
    raise TypeError(f"not a substitution: {subst!r}")


def _uses_var0(term: Term, depth: int = 0) -> bool:
    """Does the binder a term sits under get referenced?  Variables cannot
    cross worlds, so box/unbox positions never see it."""
    match term:
        case Var(index):
            return index == depth
        case Succ(arg):
            return _uses_var0(arg, depth)
        case Pi(dom, cod):
            return _uses_var0(dom, depth) or _uses_var0(cod, depth + 1)
        case Lam(body):
            return _uses_var0(body, depth + 1)
        case App(fn, arg):
            return _uses_var0(fn, depth) or _uses_var0(arg, depth)
        case NatElim(motive, base, step, scrutinee):
            return (
                _uses_var0(motive, depth + 1)
                or _uses_var0(base, depth)
                or _uses_var0(step, depth + 2)
                or _uses_var0(scrutinee, depth)
            )
        case Unbox(n, body):
            # unbox 0 stays in the same world; any higher level leaves it.
            return n == 0 and _uses_var0(body, depth)
        case BoxTy(_) | BoxIntro(_):
            return False
        case Sub(_, _, _):
            return True  # conservative: keep the binder printable
        case _:
            return False


def describe_term(term: Term) -> str:
    return print_term(term)
