"""Syntax-directed operations on explicit unified substitutions.

Truncation offset and truncation are total on raw syntax; well-typedness is
the checker's business.  Both follow the clause-per-constructor definitions
of the explicit substitution calculus.
"""

from __future__ import annotations

from .syntax import Comp, Ext, Id, ModalExt, Sub, Subst, Term, Var, Wk


def trunc_offset(subst: Subst, n: int) -> int:
    """Total number of domain worlds dropped when truncating `subst` by n."""
    if n < 0:
        raise ValueError("truncation offset expects a natural number")
    if n == 0:
        return 0
    match subst:
        case Id() | Wk():
            return n
        case Ext(base, _):
            return trunc_offset(base, n)
        case ModalExt(base, offset):
            return offset + trunc_offset(base, n - 1)
        case Comp(outer, inner):
            return trunc_offset(inner, trunc_offset(outer, n))
    raise TypeError(f"not a substitution: {subst!r}")


def truncate(subst: Subst, n: int) -> Subst:
    """Drop n local substitutions, regardless of the offsets they carry."""
    if n < 0:
        raise ValueError("truncation expects a natural number")
    if n == 0:
        return subst
    match subst:
        case Id():
            return Id()
        case Wk():
            return Id()
        case Ext(base, _):
            return truncate(base, n)
        case ModalExt(base, _):
            return truncate(base, n - 1)
        case Comp(outer, inner):
            return Comp(truncate(outer, n), truncate(inner, trunc_offset(outer, n)))
    raise TypeError(f"not a substitution: {subst!r}")


def q_lift(subst: Subst) -> Subst:
    """q(σ) = (σ ∘ wk), x/x — push a substitution under one local binder."""
    return Ext(Comp(subst, Wk()), Var(0))


def mot_subst(weaken_by: int, below: int) -> Subst:
    """The modal transformation {weaken_by/below} as a substitution.

    Weakening-free instance: all inserted worlds are empty, so the result is
    `below` unit modal extensions wrapped around ⇑^weaken_by I⃗.  With
    below = 0 this is exactly the β-rule substitution for unbox.
    """
    if weaken_by < 0 or below < 0:
        raise ValueError("modal transformation arguments must be naturals")
    subst: Subst = ModalExt(Id(), weaken_by)
    for _ in range(below):
        subst = ModalExt(subst, 1)
    return subst


def apply_subst(term: Term, subst: Subst) -> Term:
    """t[σ] as syntax: a Sub node with no codomain annotation."""
    return Sub(term, subst)
