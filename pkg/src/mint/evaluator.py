"""Evaluation of core terms and substitutions into the untyped domain.

The eliminator helpers (application, unbox, numeral recursion) are partial:
they get stuck on values no well-typed program produces.  Stuck cases and a
configurable fuel bound are reified as EvalError; well-typed inputs never
trigger either at desk scale.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass

from .domain import (
    Closure,
    Closure2,
    DApp,
    DBox,
    DBoxTy,
    DLam,
    DNat,
    DPi,
    DRec,
    DReflect,
    DSucc,
    DUniv,
    DUnbox,
    DVar,
    DZero,
    DomainValue,
    EnvShapeError,
    Envs,
    Reify,
    UMOT_ID,
    apply_umot,
    envs_bind,
    envs_drop,
    envs_ext,
    envs_lookup,
    envs_offset,
    envs_trunc,
    umot_lift,
)
from .syntax import (
    App,
    BoxIntro,
    BoxTy,
    Comp,
    Ext,
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

DEFAULT_FUEL = 10**6

# Deeply ill-typed terms can nest evaluation before fuel runs out.
sys.setrecursionlimit(max(sys.getrecursionlimit(), 30_000))


class EvalError(Exception):
    """A partial-function miss (stuck-*), unbound variable, or fuel burnout."""

    def __init__(self, kind: str, offending: object = None):
        self.kind = kind
        self.offending = offending
        detail = f": {offending!r}" if offending is not None else ""
        super().__init__(f"{kind}{detail}")


@dataclass
class Fuel:
    remaining: int = DEFAULT_FUEL

    def spend(self) -> None:
        self.remaining -= 1
        if self.remaining < 0:
            raise EvalError("fuel-exhausted")


def evaluate(term: Term, env: Envs, fuel: Fuel | None = None) -> DomainValue:
    fuel = fuel if fuel is not None else Fuel()
    return _eval(term, env, fuel)


def _eval(term: Term, env: Envs, fuel: Fuel) -> DomainValue:
    fuel.spend()
    match term:
        case Var(index):
            try:
                return envs_lookup(env, index)
            except EnvShapeError:
                raise EvalError("unbound-variable", term) from None
        case Univ(level):
            return DUniv(level)
        case NatTy():
            return DNat()
        case Zero():
            return DZero()
        case Succ(arg):
            return DSucc(_eval(arg, env, fuel))
        case NatElim(motive, base, step, scrutinee):
            return do_rec(
                Closure(motive, env),
                _eval(base, env, fuel),
                Closure2(step, env),
                _eval(scrutinee, env, fuel),
                env,
                fuel,
            )
        case Pi(dom, cod):
            return DPi(_eval(dom, env, fuel), Closure(cod, env))
        case Lam(body):
            return DLam(Closure(body, env))
        case App(fn, arg):
            return do_app(_eval(fn, env, fuel), _eval(arg, env, fuel), fuel)
        case BoxTy(inner):
            return DBoxTy(_eval(inner, envs_ext(env), fuel))
        case BoxIntro(body):
            return DBox(_eval(body, envs_ext(env), fuel))
        case Unbox(level, body):
            value = _eval(body, envs_trunc(env, level), fuel)
            return do_unbox(envs_offset(env, level), value, fuel)
        case Sub(inner, subst, _):
            return _eval(inner, _eval_subst(subst, env, fuel), fuel)
    raise TypeError(f"not a term: {term!r}")


def eval_subst(subst: Subst, env: Envs, fuel: Fuel | None = None) -> Envs:
    fuel = fuel if fuel is not None else Fuel()
    return _eval_subst(subst, env, fuel)


def _eval_subst(subst: Subst, env: Envs, fuel: Fuel) -> Envs:
    fuel.spend()
    match subst:
        case Id():
            return env
        case Wk():
            try:
                return envs_drop(env)
            except EnvShapeError:
                raise EvalError("unbound-variable", subst) from None
        case Ext(base, term):
            return envs_bind(_eval_subst(base, env, fuel), _eval(term, env, fuel))
        case ModalExt(base, offset):
            inner = _eval_subst(base, envs_trunc(env, offset), fuel)
            return envs_ext(inner, envs_offset(env, offset))
        case Comp(outer, inner):
            return _eval_subst(outer, _eval_subst(inner, env, fuel), fuel)
    raise TypeError(f"not a substitution: {subst!r}")


def do_app(fn: DomainValue, arg: DomainValue, fuel: Fuel | None = None) -> DomainValue:
    fuel = fuel if fuel is not None else Fuel()
    fuel.spend()
    match fn:
        case DLam(Closure(body, env)):
            return _eval(body, envs_bind(env, arg), fuel)
        case DReflect(DPi(dom, cod), neutral):
            result_ty = _close(cod, arg, fuel)
            return DReflect(result_ty, DApp(neutral, Reify(dom, arg)))
    raise EvalError("stuck-application", fn)


def do_unbox(level: int, value: DomainValue, fuel: Fuel | None = None) -> DomainValue:
    fuel = fuel if fuel is not None else Fuel()
    fuel.spend()
    match value:
        case DBox(inner):
            return apply_umot(inner, umot_lift(UMOT_ID, level))
        case DReflect(DBoxTy(inner_ty), neutral):
            shifted = apply_umot(inner_ty, umot_lift(UMOT_ID, level))
            return DReflect(shifted, DUnbox(level, neutral))
    raise EvalError("stuck-unbox", value)


def do_rec(
    motive: Closure,
    base: DomainValue,
    step: Closure2,
    scrutinee: DomainValue,
    env: Envs,
    fuel: Fuel | None = None,
) -> DomainValue:
    fuel = fuel if fuel is not None else Fuel()
    fuel.spend()
    match scrutinee:
        case DZero():
            return base
        case DSucc(pred):
            rec_pred = do_rec(motive, base, step, pred, env, fuel)
            return _eval(step.body, envs_bind(envs_bind(step.env, pred), rec_pred), fuel)
        case DReflect(DNat(), neutral):
            stuck_ty = _close(motive, scrutinee, fuel)
            return DReflect(stuck_ty, DRec(motive, base, step, neutral, env))
    raise EvalError("stuck-rec", scrutinee)


def _close(closure: Closure, value: DomainValue, fuel: Fuel) -> DomainValue:
    """Instantiate a one-binder closure at a value."""
    return _eval(closure.body, envs_bind(closure.env, value), fuel)


def close(closure: Closure, value: DomainValue, fuel: Fuel | None = None) -> DomainValue:
    return _close(closure, value, fuel if fuel is not None else Fuel())
