"""Bidirectional type checking over context stacks.

Conversion is decided by normalize-and-compare: type values are read back to
normal forms and compared syntactically, with cumulative universes admitted
at the outermost position only.  The modal flavor is enforced at every unbox
level and modal-extension offset.

Internally, synthesis and checking thread the context stack together with
its reflected initial environment; the environment always contains exactly
the reflected variables of the stack.
"""

from __future__ import annotations

from dataclasses import dataclass

from .domain import (
    DBoxTy,
    DNat,
    DPi,
    DReflect,
    DSucc,
    DUniv,
    DVar,
    DZero,
    DomainValue,
    Envs,
    Frame,
    UMOT_ID,
    apply_umot,
    envs_bind,
    envs_ext,
    envs_trunc,
    umot_lift,
)
from .evaluator import close, eval_subst, evaluate
from .readback import initial_env, rb_ty
from .surface import describe_term
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
    stack_truncate,
)

UNIVERSE_CAP = 64


@dataclass(frozen=True)
class TypeValue:
    """A semantic type: the evaluated type plus the environment it came from."""

    value: DomainValue
    env: Envs


class CheckError(Exception):
    KINDS = (
        "unbound-variable",
        "not-a-function",
        "not-a-box",
        "not-a-universe",
        "not-inferable",
        "flavor-violation",
        "universe-mismatch",
        "conversion-failure",
        "malformed-stack",
        "substitution-mismatch",
    )

    def __init__(
        self,
        kind: str,
        message: str,
        *,
        level: int | None = None,
        expected_nf: Term | None = None,
        got_nf: Term | None = None,
        loc: str | None = None,
    ):
        assert kind in self.KINDS, kind
        self.kind = kind
        self.message = message
        self.level = level
        self.expected_nf = expected_nf
        self.got_nf = got_nf
        self.loc = loc
        super().__init__(f"{kind}: {message}")


def _prefix_env(env: Envs, keep: int) -> Envs:
    frame0 = env.frame(0)
    return Envs((Frame(frame0.offset, frame0.locals[:keep]),) + env.frames[1:])


def check_stack(stack: CtxStack, flavor: Flavor = Flavor.S4) -> None:
    """Succeeds iff every type in every context checks at a universe formed
    over its prefix stack."""
    for world_index in range(len(stack)):
        world = stack.worlds[world_index]
        for binding_index in range(len(world)):
            prefix = CtxStack(stack.worlds[:world_index] + (world[:binding_index],))
            _infer_universe(prefix, initial_env(prefix), world[binding_index], flavor)


def infer(stack: CtxStack, term: Term, flavor: Flavor = Flavor.S4) -> TypeValue:
    return _infer(stack, initial_env(stack), term, flavor)


def check(stack: CtxStack, term: Term, expected: TypeValue, flavor: Flavor = Flavor.S4) -> None:
    _check(stack, initial_env(stack), term, expected.value, flavor)


def infer_universe(stack: CtxStack, ty: Term, flavor: Flavor = Flavor.S4) -> int:
    return _infer_universe(stack, initial_env(stack), ty, flavor)


def _infer(stack: CtxStack, env: Envs, term: Term, flavor: Flavor) -> TypeValue:
    match term:
        case Var(index):
            top = stack.top
            if index < 0 or index >= len(top):
                raise CheckError(
                    "unbound-variable",
                    f"index {index} exceeds the topmost context ({len(top)} bindings)",
                )
            position = len(top) - 1 - index
            prefix = _prefix_env(env, position)
            return TypeValue(evaluate(top[position], prefix), prefix)
        case Univ(level):
            if level < 0 or level > UNIVERSE_CAP:
                raise CheckError(
                    "universe-mismatch", f"universe level {level} outside [0, {UNIVERSE_CAP}]"
                )
            return TypeValue(DUniv(level + 1), env)
        case NatTy():
            return TypeValue(DUniv(0), env)
        case Zero():
            return TypeValue(DNat(), env)
        case Succ(arg):
            _check(stack, env, arg, DNat(), flavor)
            return TypeValue(DNat(), env)
        case Pi(dom, cod):
            dom_level = _infer_universe(stack, env, dom, flavor)
            fresh = DReflect(evaluate(dom, env), DVar(len(stack.top)))
            cod_level = _infer_universe(
                stack.push_binding(dom), envs_bind(env, fresh), cod, flavor
            )
            return TypeValue(DUniv(max(dom_level, cod_level)), env)
        case BoxTy(inner):
            level = _infer_universe(stack.push_world(), envs_ext(env), inner, flavor)
            return TypeValue(DUniv(level), env)
        case Lam(_):
            raise CheckError(
                "not-inferable", "an unannotated function can only be checked against a Π type"
            )
        case BoxIntro(body):
            inner = _infer(stack.push_world(), envs_ext(env), body, flavor)
            return TypeValue(DBoxTy(inner.value), env)
        case Unbox(level, body):
            if not flavor.allows(level):
                raise CheckError(
                    "flavor-violation",
                    f"unbox level {level} is not permitted in flavor {flavor.value}",
                    level=level,
                )
            if level >= len(stack):
                raise CheckError(
                    "malformed-stack",
                    f"unbox level {level} would escape a stack of {len(stack)} world(s)",
                )
            inner = _infer(stack_truncate(stack, level), envs_trunc(env, level), body, flavor)
            match inner.value:
                case DBoxTy(ty):
                    return TypeValue(apply_umot(ty, umot_lift(UMOT_ID, level)), env)
            raise CheckError("not-a-box", "unbox target does not have a box type")
        case App(fn, arg):
            fn_ty = _infer(stack, env, fn, flavor)
            match fn_ty.value:
                case DPi(dom, cod):
                    _check(stack, env, arg, dom, flavor)
                    return TypeValue(close(cod, evaluate(arg, env)), env)
            raise CheckError("not-a-function", "application head does not have a Π type")
        case NatElim(motive, base, step, scrutinee):
            fresh_nat = DReflect(DNat(), DVar(len(stack.top)))
            motive_stack = stack.push_binding(NatTy())
            motive_env = envs_bind(env, fresh_nat)
            _infer_universe(motive_stack, motive_env, motive, flavor)
            _check(stack, env, base, evaluate(motive, envs_bind(env, DZero())), flavor)
            motive_at_fresh = evaluate(motive, motive_env)
            step_stack = motive_stack.push_binding(motive)
            step_env = envs_bind(
                motive_env, DReflect(motive_at_fresh, DVar(len(stack.top) + 1))
            )
            step_expected = evaluate(motive, envs_bind(env, DSucc(fresh_nat)))
            _check(step_stack, step_env, step, step_expected, flavor)
            _check(stack, env, scrutinee, DNat(), flavor)
            result = evaluate(motive, envs_bind(env, evaluate(scrutinee, env)))
            return TypeValue(result, env)
        case Sub(inner, subst, annot):
            if annot is None:
                raise CheckError(
                    "substitution-mismatch",
                    "explicit substitution without a codomain annotation",
                )
            check_stack(annot, flavor)
            check_subst(stack, subst, annot, flavor)
            inner_ty = _infer(annot, initial_env(annot), inner, flavor)
            ty_nf = rb_ty(annot.lengths(), inner_ty.value)
            return TypeValue(evaluate(ty_nf, eval_subst(subst, env)), env)
    raise TypeError(f"not a term: {term!r}")


def _check(stack: CtxStack, env: Envs, term: Term, expected: DomainValue, flavor: Flavor) -> None:
    match term, expected:
        case Lam(body), DPi(dom, cod):
            fresh = DReflect(dom, DVar(len(stack.top)))
            dom_nf = rb_ty(stack.lengths(), dom)
            _check(
                stack.push_binding(dom_nf),
                envs_bind(env, fresh),
                body,
                close(cod, fresh),
                flavor,
            )
            return
        case Lam(_), _:
            raise CheckError(
                "not-a-function",
                f"a function cannot inhabit {describe_term(rb_ty(stack.lengths(), expected))}",
            )
        case BoxIntro(body), DBoxTy(inner):
            _check(stack.push_world(), envs_ext(env), body, inner, flavor)
            return
        case BoxIntro(_), _:
            raise CheckError(
                "not-a-box",
                f"box cannot inhabit {describe_term(rb_ty(stack.lengths(), expected))}",
            )
        case App(fn, arg), _:
            # β-spine rule: a λ-headed application checks against T by
            # inferring the argument and checking the head at Π(x:A). T[wk].
            # Sound because the expected type cannot mention the binder; it
            # fires only where plain synthesis fails.
            try:
                got = _infer(stack, env, term, flavor)
            except CheckError as exc:
                if exc.kind != "not-inferable":
                    raise
                arg_ty = _infer(stack, env, arg, flavor)
                expected_nf = rb_ty(stack.lengths(), expected)
                cod = Closure(Sub(expected_nf, Wk()), env)
                _check(stack, env, fn, DPi(arg_ty.value, cod), flavor)
                return
            _require_convertible(stack, got.value, expected)
            return
    got = _infer(stack, env, term, flavor)
    if not _convertible(stack, got.value, expected):
        lengths = stack.lengths()
        raise CheckError(
            "conversion-failure",
            f"expected {describe_term(rb_ty(lengths, expected))}, "
            f"got {describe_term(rb_ty(lengths, got.value))}",
            expected_nf=rb_ty(lengths, expected),
            got_nf=rb_ty(lengths, got.value),
        )


def _infer_universe(stack: CtxStack, env: Envs, ty: Term, flavor: Flavor) -> int:
    got = _infer(stack, env, ty, flavor)
    match got.value:
        case DUniv(level):
            return level
    raise CheckError("not-a-universe", f"{describe_term(ty)} is not a type")


def convertible(stack: CtxStack, got: TypeValue, expected: TypeValue) -> bool:
    """Directional conversion: universes are cumulative at the outermost
    position only, everything else compares by normal form."""
    return _convertible(stack, got.value, expected.value)


def _convertible(stack: CtxStack, got: DomainValue, expected: DomainValue) -> bool:
    match got, expected:
        case DUniv(i), DUniv(j):
            return i <= j
    lengths = stack.lengths()
    return rb_ty(lengths, got) == rb_ty(lengths, expected)


def terms_equal(stack: CtxStack, lhs: Term, rhs: Term, ty: Term) -> bool:
    """Term-level conversion, decided by comparing normal forms."""
    from .readback import nbe

    return nbe(stack, lhs, ty) == nbe(stack, rhs, ty)


def stacks_convertible(stack: CtxStack, other: CtxStack) -> bool:
    if stack.lengths() != other.lengths():
        return False
    for world_index in range(len(stack)):
        for binding_index in range(len(stack.worlds[world_index])):
            prefix = CtxStack(
                stack.worlds[:world_index] + (stack.worlds[world_index][:binding_index],)
            )
            env = initial_env(prefix)
            lengths = prefix.lengths()
            lhs = rb_ty(lengths, evaluate(stack.worlds[world_index][binding_index], env))
            rhs = rb_ty(lengths, evaluate(other.worlds[world_index][binding_index], env))
            if lhs != rhs:
                return False
    return True


def check_subst(
    stack: CtxStack, subst: Subst, codomain: CtxStack, flavor: Flavor = Flavor.S4
) -> None:
    """Check σ : stack ⇒ codomain, rule per rule."""
    match subst:
        case Id():
            if not stacks_convertible(stack, codomain):
                raise CheckError(
                    "substitution-mismatch", "identity substitution between distinct stacks"
                )
        case Wk():
            if not stack.top:
                raise CheckError(
                    "substitution-mismatch", "weakening requires a binding in the topmost context"
                )
            if not stacks_convertible(stack.pop_binding(), codomain):
                raise CheckError("substitution-mismatch", "weakening reaches the wrong stack")
        case Ext(base, term):
            if not codomain.top:
                raise CheckError(
                    "substitution-mismatch",
                    "extension substitution into a world without bindings",
                )
            binding_ty = codomain.top[-1]
            check_subst(stack, base, codomain.pop_binding(), flavor)
            env = initial_env(stack)
            expected = evaluate(binding_ty, eval_subst(base, env))
            _check(stack, env, term, expected, flavor)
        case ModalExt(base, offset):
            if not flavor.allows(offset):
                raise CheckError(
                    "flavor-violation",
                    f"modal extension offset {offset} is not permitted in flavor {flavor.value}",
                    level=offset,
                )
            if codomain.top or len(codomain) < 2:
                raise CheckError(
                    "substitution-mismatch",
                    "modal extension must target a freshly entered empty world",
                )
            if offset >= len(stack):
                raise CheckError(
                    "substitution-mismatch",
                    f"modal extension offset {offset} exceeds a stack of {len(stack)} world(s)",
                )
            check_subst(
                stack_truncate(stack, offset), base, stack_truncate(codomain, 1), flavor
            )
        case Comp(outer, inner):
            middle = infer_subst(stack, inner, flavor)
            check_subst(middle, outer, codomain, flavor)
        case _:
            raise TypeError(f"not a substitution: {subst!r}")


def infer_subst(stack: CtxStack, subst: Subst, flavor: Flavor = Flavor.S4) -> CtxStack:
    """Synthesize the codomain of a substitution where the syntax determines
    it; extension substitutions admit no synthesis (their binding type is not
    recoverable) and must be checked against an annotation."""
    match subst:
        case Id():
            return stack
        case Wk():
            if not stack.top:
                raise CheckError(
                    "substitution-mismatch", "weakening requires a binding in the topmost context"
                )
            return stack.pop_binding()
        case ModalExt(base, offset):
            if not flavor.allows(offset):
                raise CheckError(
                    "flavor-violation",
                    f"modal extension offset {offset} is not permitted in flavor {flavor.value}",
                    level=offset,
                )
            if offset >= len(stack):
                raise CheckError(
                    "substitution-mismatch",
                    f"modal extension offset {offset} exceeds a stack of {len(stack)} world(s)",
                )
            return infer_subst(stack_truncate(stack, offset), base, flavor).push_world()
        case Comp(outer, inner):
            return infer_subst(infer_subst(stack, inner, flavor), outer, flavor)
        case Ext(_, _):
            raise CheckError(
                "substitution-mismatch",
                "cannot synthesize the codomain of an extension substitution; "
                "check it against an annotation instead",
            )
    raise TypeError(f"not a substitution: {subst!r}")
