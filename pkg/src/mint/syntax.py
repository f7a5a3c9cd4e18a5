"""Core term language of Mint: a Kripke-style modal dependent type theory.

Terms are indexed with de Bruijn indices that address the *topmost* context
of a context stack; lower worlds are reached through box/unbox, never through
variables.  Explicit substitutions are part of the term syntax and are
eliminated by evaluation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


class Flavor(enum.Enum):
    """Modal flavor: which unbox levels (and modal offsets) are permitted.

    K admits exactly level 1, T adds level 0, K4 admits all positive levels,
    S4 admits every natural.  Level 1 is permitted in every flavor.
    """

    K = "k"
    T = "t"
    K4 = "k4"
    S4 = "s4"

    def allows(self, level: int) -> bool:
        if level < 0:
            return False
        match self:
            case Flavor.K:
                return level == 1
            case Flavor.T:
                return level <= 1
            case Flavor.K4:
                return level >= 1
            case Flavor.S4:
                return True
        raise AssertionError(self)

    @classmethod
    def parse(cls, name: str) -> Flavor:
        try:
            return cls(name.lower())
        except ValueError:
            raise ValueError(f"unknown flavor {name!r}; expected one of k, t, k4, s4") from None


class Term:
    """Base class of core terms.  All variants are frozen dataclasses."""

    __slots__ = ()


class Subst:
    """Base class of explicit unified substitutions."""

    __slots__ = ()


@dataclass(frozen=True)
class Var(Term):
    """de Bruijn index into the topmost context of the current stack."""

    index: int


@dataclass(frozen=True)
class Univ(Term):
    level: int


@dataclass(frozen=True)
class NatTy(Term):
    pass


@dataclass(frozen=True)
class Zero(Term):
    pass


@dataclass(frozen=True)
class Succ(Term):
    arg: Term


@dataclass(frozen=True)
class NatElim(Term):
    """Eliminator for Nat: motive under one binder, step under two."""

    motive: Term
    base: Term
    step: Term
    scrutinee: Term


@dataclass(frozen=True)
class Pi(Term):
    dom: Term
    cod: Term  # under one binder


@dataclass(frozen=True)
class Lam(Term):
    body: Term  # under one binder


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term


@dataclass(frozen=True)
class BoxTy(Term):
    inner: Term  # formed one world up


@dataclass(frozen=True)
class BoxIntro(Term):
    body: Term  # one world up


@dataclass(frozen=True)
class Unbox(Term):
    level: int
    body: Term


@dataclass(frozen=True)
class Sub(Term):
    """Explicit substitution application t[σ].

    `annot` is the codomain stack the checker verifies σ against; it is
    ignored by evaluation and may be None on oracle-produced nodes, which the
    checker rejects.
    """

    term: Term
    subst: Subst
    annot: "CtxStack | None" = None


@dataclass(frozen=True)
class Id(Subst):
    pass


@dataclass(frozen=True)
class Wk(Subst):
    """Drop the top binding of the topmost context."""

    pass


@dataclass(frozen=True)
class Ext(Subst):
    base: Subst
    term: Term


@dataclass(frozen=True)
class ModalExt(Subst):
    """⇑ⁿσ: cross into a fresh empty world, absorbing n domain worlds."""

    base: Subst
    offset: int


@dataclass(frozen=True)
class Comp(Subst):
    """σ ∘ δ, applied as t[σ][δ]: σ is the outer (first) substitution."""

    outer: Subst
    inner: Subst


class TruncationRangeError(ValueError):
    """Raised when a stack truncation would empty or overrun the stack."""


@dataclass(frozen=True)
class CtxStack:
    """Nonempty stack of typing contexts, one per world; topmost last.

    Each context is a tuple of types; the innermost binder is last, so the
    type of `Var 0` is the final entry of `worlds[-1]`.
    """

    worlds: tuple[tuple[Term, ...], ...]

    def __post_init__(self) -> None:
        if len(self.worlds) == 0:
            raise TruncationRangeError("a context stack must contain at least one world")

    def __len__(self) -> int:
        return len(self.worlds)

    @property
    def top(self) -> tuple[Term, ...]:
        return self.worlds[-1]

    def push_world(self) -> CtxStack:
        return CtxStack(self.worlds + ((),))

    def push_binding(self, ty: Term) -> CtxStack:
        return CtxStack(self.worlds[:-1] + (self.worlds[-1] + (ty,),))

    def pop_binding(self) -> CtxStack:
        if not self.worlds[-1]:
            raise TruncationRangeError("topmost context has no binding to drop")
        return CtxStack(self.worlds[:-1] + (self.worlds[-1][:-1],))

    def lengths(self) -> tuple[int, ...]:
        """The number stack this context stack determines."""
        return tuple(len(w) for w in self.worlds)


EMPTY_STACK = CtxStack(((),))


def stack_truncate(stack: CtxStack, n: int) -> CtxStack:
    """Drop the topmost n worlds; defined only for n < |stack|."""
    if n < 0 or n >= len(stack):
        raise TruncationRangeError(f"cannot truncate a stack of {len(stack)} world(s) by {n}")
    if n == 0:
        return stack
    return CtxStack(stack.worlds[:-n])


class NfClass(enum.Enum):
    NF = "nf"
    NE = "ne"
    NEITHER = "neither"


def _is_nf(t: Term) -> bool:
    return classify_nf(t) in (NfClass.NF, NfClass.NE)


def _is_ne(t: Term) -> bool:
    return classify_nf(t) is NfClass.NE


def classify_nf(t: Term) -> NfClass:
    """Purely syntactic classification against the normal/neutral grammars.

    Neutral terms are reported as NE even though the normal grammar includes
    them; Sub nodes are never normal.
    """
    match t:
        case Var(_):
            return NfClass.NE
        case App(fn, arg):
            return NfClass.NE if _is_ne(fn) and _is_nf(arg) else NfClass.NEITHER
        case Unbox(_, body):
            return NfClass.NE if _is_ne(body) else NfClass.NEITHER
        case NatElim(motive, base, step, scrutinee):
            parts_nf = _is_nf(motive) and _is_nf(base) and _is_nf(step)
            return NfClass.NE if parts_nf and _is_ne(scrutinee) else NfClass.NEITHER
        case NatTy() | Univ(_) | Zero():
            return NfClass.NF
        case Succ(arg):
            return NfClass.NF if _is_nf(arg) else NfClass.NEITHER
        case Pi(dom, cod):
            return NfClass.NF if _is_nf(dom) and _is_nf(cod) else NfClass.NEITHER
        case Lam(body):
            return NfClass.NF if _is_nf(body) else NfClass.NEITHER
        case BoxTy(inner):
            return NfClass.NF if _is_nf(inner) else NfClass.NEITHER
        case BoxIntro(body):
            return NfClass.NF if _is_nf(body) else NfClass.NEITHER
        case Sub(_, _, _):
            return NfClass.NEITHER
    raise TypeError(f"not a term: {t!r}")


def num_from_int(n: int) -> Term:
    t: Term = Zero()
    for _ in range(n):
        t = Succ(t)
    return t


def int_from_num(t: Term) -> int | None:
    n = 0
    while isinstance(t, Succ):
        n += 1
        t = t.arg
    return n if isinstance(t, Zero) else None
