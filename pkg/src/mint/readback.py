"""Type-directed readback from the domain to βη-normal terms.

A number stack mirrors a context stack: one entry per world recording how
many variables that world binds, topmost last.  Domain variables carry
per-world levels; a level z under a top count n reads back as the de Bruijn
index n - z - 1.  Per the de Bruijn variant of the algorithm the index is
clamped to 0 if negative; a clamp firing on checker-approved input is an
internal-invariant failure, so clamps are counted for tests to observe.
"""

from __future__ import annotations

from .domain import (
    Closure,
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
    EMPTY_ENVS,
    Envs,
    Neutral,
    Reify,
    envs_bind,
    envs_ext,
)
from .evaluator import Fuel, close, do_app, do_unbox, evaluate
from .syntax import (
    App,
    BoxIntro,
    BoxTy,
    CtxStack,
    Lam,
    NatElim,
    NatTy,
    Pi,
    Succ,
    Term,
    Unbox,
    Univ,
    Var,
    Zero,
)

NumberStack = tuple[int, ...]


class ReadbackError(Exception):
    pass


CLAMP_EVENTS: list[tuple[NumberStack, int]] = []


def _bump_top(ns: NumberStack, by: int = 1) -> NumberStack:
    return ns[:-1] + (ns[-1] + by,)


def _ns_trunc(ns: NumberStack, k: int) -> NumberStack:
    if k >= len(ns):
        raise ReadbackError(f"number stack of {len(ns)} world(s) cannot drop {k}")
    return ns[: len(ns) - k]


def rb_nf(ns: NumberStack, normal: Reify, fuel: Fuel | None = None) -> Term:
    """Read a type-annotated value back to a normal term, η-expanding."""
    fuel = fuel if fuel is not None else Fuel()
    ty, value = normal.ty, normal.value
    match ty:
        case DUniv(_):
            return rb_ty(ns, value, fuel)
        case DReflect(_, _):
            match value:
                case DReflect(_, neutral):
                    return rb_ne(ns, neutral, fuel)
            raise ReadbackError(f"non-neutral value at a neutral type: {value!r}")
        case DNat():
            match value:
                case DZero():
                    return Zero()
                case DSucc(pred):
                    return Succ(rb_nf(ns, Reify(DNat(), pred), fuel))
                case DReflect(_, neutral):
                    return rb_ne(ns, neutral, fuel)
            raise ReadbackError(f"not a numeral or neutral at Nat: {value!r}")
        case DBoxTy(inner_ty):
            unboxed = do_unbox(1, value, fuel)
            return BoxIntro(rb_nf(ns + (0,), Reify(inner_ty, unboxed), fuel))
        case DPi(dom, cod):
            fresh = DReflect(dom, DVar(ns[-1]))
            body = do_app(value, fresh, fuel)
            body_ty = close(cod, fresh, fuel)
            return Lam(rb_nf(_bump_top(ns), Reify(body_ty, body), fuel))
    raise ReadbackError(f"not a type value: {ty!r}")


def rb_ne(ns: NumberStack, neutral: Neutral, fuel: Fuel | None = None) -> Term:
    fuel = fuel if fuel is not None else Fuel()
    match neutral:
        case DVar(level):
            index = ns[-1] - level - 1
            if index < 0:
                CLAMP_EVENTS.append((ns, level))
                index = 0
            return Var(index)
        case DApp(fn, arg):
            return App(rb_ne(ns, fn, fuel), rb_nf(ns, arg, fuel))
        case DUnbox(level, body):
            return Unbox(level, rb_ne(_ns_trunc(ns, level), body, fuel))
        case DRec(motive, base, step, scrutinee, _):
            fresh_nat = DReflect(DNat(), DVar(ns[-1]))
            motive_at_fresh = close(motive, fresh_nat, fuel)
            motive_tm = rb_ty(_bump_top(ns), motive_at_fresh, fuel)
            base_tm = rb_nf(ns, Reify(close(motive, DZero(), fuel), base), fuel)
            prev = DReflect(motive_at_fresh, DVar(ns[-1] + 1))
            step_val = evaluate(step.body, envs_bind(envs_bind(step.env, fresh_nat), prev), fuel)
            step_ty = close(motive, DSucc(fresh_nat), fuel)
            step_tm = rb_nf(_bump_top(ns, 2), Reify(step_ty, step_val), fuel)
            return NatElim(motive_tm, base_tm, step_tm, rb_ne(ns, scrutinee, fuel))
    raise ReadbackError(f"not a neutral: {neutral!r}")


def rb_ty(ns: NumberStack, ty: DomainValue, fuel: Fuel | None = None) -> Term:
    fuel = fuel if fuel is not None else Fuel()
    match ty:
        case DUniv(level):
            return Univ(level)
        case DNat():
            return NatTy()
        case DBoxTy(inner):
            return BoxTy(rb_ty(ns + (0,), inner, fuel))
        case DPi(dom, cod):
            fresh = DReflect(dom, DVar(ns[-1]))
            cod_at_fresh = close(cod, fresh, fuel)
            return Pi(rb_ty(ns, dom, fuel), rb_ty(_bump_top(ns), cod_at_fresh, fuel))
        case DReflect(_, neutral):
            return rb_ne(ns, neutral, fuel)
    raise ReadbackError(f"not a type value: {ty!r}")


def initial_env(stack: CtxStack, fuel: Fuel | None = None) -> Envs:
    """Reflect a context stack into an environment of fresh variables.

    Each world past the first enters with offset 1; each binding reflects its
    type, evaluated in the environment built so far, at its per-world level.
    """
    fuel = fuel if fuel is not None else Fuel()
    env = EMPTY_ENVS
    for world_index, world in enumerate(stack.worlds):
        if world_index > 0:
            env = envs_ext(env, 1)
        for level, ty in enumerate(world):
            env = envs_bind(env, DReflect(evaluate(ty, env, fuel), DVar(level)))
    return env


def nbe(stack: CtxStack, term: Term, ty: Term, fuel: Fuel | None = None) -> Term:
    """Normalize a term at a type over a context stack.

    Callers are expected to supply a well-typed judgment; on ill-typed input
    evaluation or readback errors propagate.
    """
    fuel = fuel if fuel is not None else Fuel()
    env = initial_env(stack, fuel)
    ty_value = evaluate(ty, env, fuel)
    value = evaluate(term, env, fuel)
    return rb_nf(stack.lengths(), Reify(ty_value, value), fuel)
