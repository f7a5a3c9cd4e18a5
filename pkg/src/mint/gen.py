"""Seeded random generators for well-typed terms, substitutions, and
semantic objects, plus instance templates for every registered equivalence
rule.

Generation is derivation-directed: stacks, terms, and substitutions are
built along the typing rules, so everything produced is well typed by
construction (tests additionally re-check samples).  Binding types are drawn
from a closed pool, which keeps them invariant under substitution and lets
templates reuse one type across stacks.
"""

from __future__ import annotations

import random
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
    DReflect,
    DSucc,
    DUniv,
    DUnbox,
    DVar,
    DZero,
    EMPTY_ENVS,
    Envs,
    Frame,
    Reify,
    UMoT,
)
from .substitution import mot_subst, q_lift
from .syntax import (
    App,
    BoxIntro,
    BoxTy,
    Comp,
    CtxStack,
    EMPTY_STACK,
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
    num_from_int,
    stack_truncate,
)

# Closed types only: well formed over any stack and invariant under any
# substitution up to conversion.
TYPE_POOL: tuple[Term, ...] = (
    NatTy(),
    BoxTy(NatTy()),
    BoxTy(BoxTy(NatTy())),
    Pi(NatTy(), NatTy()),
    BoxTy(Pi(NatTy(), NatTy())),
    Pi(NatTy(), BoxTy(NatTy())),
)


def pick_type(rng: random.Random) -> Term:
    return rng.choice(TYPE_POOL)


def allowed_levels(flavor: Flavor, bound: int) -> list[int]:
    """Unbox levels permitted by the flavor and strictly below `bound`."""
    return [n for n in range(bound) if flavor.allows(n)]


def gen_stack(
    rng: random.Random,
    max_worlds: int = 3,
    max_bindings: int = 2,
    allow_type_vars: bool = False,
) -> CtxStack:
    stack = EMPTY_STACK
    for _ in range(rng.randint(0, max_worlds - 1)):
        stack = stack.push_world()
    worlds = []
    for world in stack.worlds:
        bindings = list(world)
        for _ in range(rng.randint(0, max_bindings)):
            if allow_type_vars and rng.random() < 0.2:
                bindings.append(Univ(0))
            else:
                bindings.append(pick_type(rng))
        worlds.append(tuple(bindings))
    return CtxStack(tuple(worlds))


def _vars_of_type(stack: CtxStack, ty: Term) -> list[Term]:
    out = []
    top = stack.top
    for index in range(len(top)):
        if top[len(top) - 1 - index] == ty:
            out.append(Var(index))
    return out


def gen_term(
    rng: random.Random,
    stack: CtxStack,
    ty: Term,
    flavor: Flavor = Flavor.S4,
    size: int = 4,
) -> Term:
    """A term of the given closed type, checkable by construction: function
    heads and scrutinees are neutral, intro forms sit in checked positions."""
    leaves = _leaf_choices(rng, stack, ty, flavor)
    if size <= 0:
        return rng.choice(leaves)
    choices = []
    match ty:
        case NatTy():
            choices.append(lambda: Succ(gen_term(rng, stack, NatTy(), flavor, size - 1)))
            choices.append(lambda: _gen_natelim(rng, stack, ty, flavor, size))
        case BoxTy(inner):
            choices.append(
                lambda: BoxIntro(gen_term(rng, stack.push_world(), inner, flavor, size - 1))
            )
        case Pi(dom, cod):
            choices.append(
                lambda: Lam(gen_term(rng, stack.push_binding(dom), cod, flavor, size - 1))
            )
    choices.append(lambda: _gen_unbox(rng, stack, ty, flavor, size))
    choices.append(lambda: _gen_app(rng, stack, ty, flavor, size))
    choices.append(lambda: rng.choice(leaves))
    for _ in range(8):
        result = rng.choice(choices)()
        if result is not None:
            return result
    return rng.choice(leaves)


def _leaf_choices(rng, stack, ty, flavor) -> list[Term]:
    leaves = list(_vars_of_type(stack, ty))
    match ty:
        case NatTy():
            leaves.append(Zero())
            leaves.append(num_from_int(rng.randint(0, 3)))
        case BoxTy(inner):
            leaves.append(BoxIntro(_leaf_of(rng, stack.push_world(), inner, flavor)))
        case Pi(dom, cod):
            leaves.append(Lam(_leaf_of(rng, stack.push_binding(dom), cod, flavor)))
    if not leaves:
        leaves.append(_leaf_of(rng, stack, ty, flavor))
    return leaves


def _leaf_of(rng, stack, ty, flavor) -> Term:
    match ty:
        case NatTy():
            return Zero()
        case BoxTy(inner):
            return BoxIntro(_leaf_of(rng, stack.push_world(), inner, flavor))
        case Pi(dom, cod):
            return Lam(_leaf_of(rng, stack.push_binding(dom), cod, flavor))
    raise ValueError(f"no canonical inhabitant for {ty!r}")


def _gen_unbox(rng, stack, ty, flavor, size) -> Term | None:
    levels = allowed_levels(flavor, len(stack))
    if not levels:
        return None
    level = rng.choice(levels)
    inner_stack = stack_truncate(stack, level)
    boxed = gen_synth_term(rng, inner_stack, BoxTy(ty), flavor, size - 1)
    return Unbox(level, boxed) if boxed is not None else None


def _gen_app(rng, stack, ty, flavor, size) -> Term | None:
    dom = rng.choice((NatTy(), BoxTy(NatTy())))
    fn = _gen_neutral(rng, stack, Pi(dom, ty), flavor, size - 1)
    if fn is None:
        return None
    return App(fn, gen_term(rng, stack, dom, flavor, size - 1))


def gen_synth_term(rng, stack, ty, flavor, size) -> Term | None:
    """A term whose type the checker can synthesize: intro forms for Π are
    excluded, box bodies and unbox targets stay synthesizable themselves."""
    options = []
    variables = _vars_of_type(stack, ty)
    if variables:
        options.append(lambda: rng.choice(variables))
    match ty:
        case NatTy():
            options.append(lambda: num_from_int(rng.randint(0, 3)))
            if size > 0:
                options.append(lambda: Succ(gen_term(rng, stack, NatTy(), flavor, size - 1)))
                options.append(lambda: _gen_natelim(rng, stack, ty, flavor, size))
        case BoxTy(inner):
            if size > 0:
                def boxed():
                    body = gen_synth_term(rng, stack.push_world(), inner, flavor, size - 1)
                    return BoxIntro(body) if body is not None else None

                options.append(boxed)
    if size > 0:
        options.append(lambda: _gen_unbox(rng, stack, ty, flavor, size))
        options.append(lambda: _gen_app(rng, stack, ty, flavor, size))
    rng.shuffle(options)
    for option in options:
        result = option()
        if result is not None:
            return result
    return None


def _gen_natelim(rng, stack, ty, flavor, size) -> Term | None:
    scrutinee = gen_term(rng, stack, NatTy(), flavor, size - 1)
    base = gen_term(rng, stack, ty, flavor, size - 1)
    step_stack = stack.push_binding(NatTy()).push_binding(ty)
    step = gen_term(rng, step_stack, ty, flavor, size - 1)
    return NatElim(ty, base, step, scrutinee)


def _gen_neutral(rng, stack, ty, flavor, size) -> Term | None:
    """A synthesizing term of the given type: a variable, an unbox of one, or
    an application headed by one."""
    candidates = _vars_of_type(stack, ty)
    if candidates and (size <= 0 or rng.random() < 0.7):
        return rng.choice(candidates)
    if size > 0:
        levels = allowed_levels(flavor, len(stack))
        rng.shuffle(levels)
        for level in levels[:2]:
            inner = _gen_neutral(rng, stack_truncate(stack, level), BoxTy(ty), flavor, size - 1)
            if inner is not None:
                return Unbox(level, inner)
    return None


def gen_checked_term(
    rng: random.Random, flavor: Flavor = Flavor.S4, size: int = 4
) -> tuple[CtxStack, Term, Term]:
    """(stack, term, type): a random well-typed judgment."""
    stack = gen_stack(rng)
    ty = pick_type(rng)
    return stack, gen_term(rng, stack, ty, flavor, size), ty


def gen_subst_into(
    rng: random.Random,
    codomain: CtxStack,
    flavor: Flavor = Flavor.S4,
    budget: int = 3,
    ext_left_only: bool = False,
) -> tuple[Subst, CtxStack]:
    """(σ, domain) with σ : domain ⇒ codomain, built along the typing rules.

    With ext_left_only, no extension appears as the right component of a
    composition, so the result stays checkable by the syntax-directed
    codomain synthesis.
    """
    if budget <= 0:
        return Id(), codomain
    roll = rng.random()
    if roll < 0.3:
        return Id(), codomain
    if roll < 0.55 and codomain.top:
        binding_ty = codomain.top[-1]
        base, domain = gen_subst_into(
            rng, codomain.pop_binding(), flavor, budget - 1, ext_left_only
        )
        term = gen_term(rng, domain, binding_ty, flavor, 2)
        return Ext(base, term), domain
    if roll < 0.7 and not codomain.top and len(codomain) >= 2:
        levels = [n for n in allowed_levels(flavor, 4) if n > 0 or flavor.allows(0)]
        if levels:
            offset = rng.choice(levels)
            base, domain = gen_subst_into(
                rng, stack_truncate(codomain, 1), flavor, budget - 1, ext_left_only
            )
            for _ in range(offset):
                domain = domain.push_world()
            return ModalExt(base, offset), domain
    if roll < 0.85:
        outer, middle = gen_subst_into(rng, codomain, flavor, budget - 1, ext_left_only)
        inner, domain = gen_subst_into(
            rng, middle, flavor, budget - 1, ext_left_only
        )
        if ext_left_only and _mentions_ext(inner):
            return outer, middle
        return Comp(outer, inner), domain
    # weakening: the domain re-binds a fresh type on top
    extra = pick_type(rng)
    return Wk(), codomain.push_binding(extra)


def _mentions_ext(subst: Subst) -> bool:
    match subst:
        case Ext(_, _):
            return True
        case ModalExt(base, _):
            return _mentions_ext(base)
        case Comp(outer, inner):
            return _mentions_ext(outer) or _mentions_ext(inner)
        case _:
            return False


def gen_umot(rng: random.Random, max_len: int = 5, max_offset: int = 4) -> UMoT:
    return UMoT(tuple(rng.randint(0, max_offset) for _ in range(rng.randint(0, max_len))))


def gen_envs(rng: random.Random, depth: int = 3) -> Envs:
    """A structurally random environment (raw values; not typed)."""
    frames = tuple(
        Frame(
            rng.randint(0, 3),
            tuple(gen_domain_value(rng, depth - 1) for _ in range(rng.randint(0, 2))),
        )
        for _ in range(rng.randint(0, 3))
    )
    return Envs(frames)


def gen_domain_value(rng: random.Random, depth: int = 3):
    """A raw domain value for structural laws (functoriality under UMoTs)."""
    if depth <= 0:
        return rng.choice((DZero(), DNat(), DUniv(0), DReflect(DNat(), DVar(rng.randint(0, 2)))))
    roll = rng.randrange(8)
    if roll == 0:
        return DSucc(gen_domain_value(rng, depth - 1))
    if roll == 1:
        return DBox(gen_domain_value(rng, depth - 1))
    if roll == 2:
        return DBoxTy(gen_domain_value(rng, depth - 1))
    if roll == 3:
        return DPi(gen_domain_value(rng, depth - 1), Closure(NatTy(), gen_envs(rng, depth - 1)))
    if roll == 4:
        return DLam(Closure(Var(0), gen_envs(rng, depth - 1)))
    if roll == 5:
        return DReflect(DNat(), gen_neutral_value(rng, depth - 1))
    if roll == 6:
        return DReflect(
            DBoxTy(DNat()), DUnbox(rng.randint(0, 2), gen_neutral_value(rng, depth - 1))
        )
    return DZero()


def gen_neutral_value(rng: random.Random, depth: int = 2):
    if depth <= 0:
        return DVar(rng.randint(0, 2))
    roll = rng.randrange(3)
    if roll == 0:
        return DApp(
            gen_neutral_value(rng, depth - 1),
            Reify(DNat(), gen_domain_value(rng, depth - 1)),
        )
    if roll == 1:
        return DUnbox(rng.randint(0, 2), gen_neutral_value(rng, depth - 1))
    return DVar(rng.randint(0, 2))


# ---------------------------------------------------------------------------
# Instance templates for every registered equivalence rule.

@dataclass(frozen=True)
class RuleInstance:
    stack: CtxStack
    lhs: Term
    rhs: Term
    ty: Term


def _stack_with_worlds(base: CtxStack, n: int) -> CtxStack:
    for _ in range(n):
        base = base.push_world()
    return base


def _gen_subst(rng, flavor=Flavor.S4, budget: int = 2) -> tuple[CtxStack, Subst, CtxStack]:
    """(domain, σ, codomain) for a random codomain."""
    codomain = gen_stack(rng)
    subst, domain = gen_subst_into(rng, codomain, flavor, budget)
    return domain, subst, codomain


def rule_instance(name: str, rng: random.Random) -> RuleInstance:
    flavor = Flavor.S4
    match name:
        case "beta-pi":
            stack = gen_stack(rng)
            dom, cod = pick_type(rng), pick_type(rng)
            body = gen_term(rng, stack.push_binding(dom), cod, flavor, 2)
            arg = gen_term(rng, stack, dom, flavor, 2)
            lhs = App(Lam(body), arg)
            rhs = Sub(body, Ext(Id(), arg), stack.push_binding(dom))
            return RuleInstance(stack, lhs, rhs, cod)
        case "beta-box":
            base = gen_stack(rng)
            level = rng.choice([n for n in allowed_levels(flavor, 4) if True] or [1])
            stack = _stack_with_worlds(base, level)
            ty = pick_type(rng)
            body = gen_term(rng, base.push_world(), ty, flavor, 2)
            lhs = Unbox(level, BoxIntro(body))
            rhs = Sub(body, ModalExt(Id(), level), base.push_world())
            return RuleInstance(stack, lhs, rhs, ty)
        case "beta-zero":
            stack = gen_stack(rng)
            ty = pick_type(rng)
            base = gen_term(rng, stack, ty, flavor, 2)
            step = gen_term(rng, stack.push_binding(NatTy()).push_binding(ty), ty, flavor, 2)
            lhs = NatElim(ty, base, step, Zero())
            return RuleInstance(stack, lhs, base, ty)
        case "beta-succ":
            stack = gen_stack(rng)
            ty = pick_type(rng)
            base = gen_term(rng, stack, ty, flavor, 2)
            step_stack = stack.push_binding(NatTy()).push_binding(ty)
            step = gen_term(rng, step_stack, ty, flavor, 2)
            pred = gen_term(rng, stack, NatTy(), flavor, 2)
            lhs = NatElim(ty, base, step, Succ(pred))
            rhs = Sub(step, Ext(Ext(Id(), pred), NatElim(ty, base, step, pred)), step_stack)
            return RuleInstance(stack, lhs, rhs, ty)
        case "eta-pi":
            stack = gen_stack(rng)
            dom, cod = pick_type(rng), pick_type(rng)
            ty = Pi(dom, cod)
            term = gen_term(rng, stack, ty, flavor, 2)
            rhs = Lam(App(Sub(term, Wk(), stack), Var(0)))
            return RuleInstance(stack, term, rhs, ty)
        case "eta-box":
            stack = gen_stack(rng)
            inner = pick_type(rng)
            ty = BoxTy(inner)
            term = gen_term(rng, stack, ty, flavor, 2)
            return RuleInstance(stack, term, BoxIntro(Unbox(1, term)), ty)
        case "sub-id":
            stack = gen_stack(rng)
            ty = pick_type(rng)
            term = gen_term(rng, stack, ty, flavor, 2)
            return RuleInstance(stack, Sub(term, Id(), stack), term, ty)
        case "sub-comp":
            middle, outer, codomain = _gen_subst(rng)
            inner, domain = gen_subst_into(rng, middle, flavor, 2)
            term = gen_term(rng, codomain, NatTy(), flavor, 2)
            lhs = Sub(term, Comp(outer, inner), codomain)
            rhs = Sub(Sub(term, outer, codomain), inner, middle)
            return RuleInstance(domain, lhs, rhs, NatTy())
        case "sub-var-hit":
            domain, subst, codomain = _gen_subst(rng)
            ty = pick_type(rng)
            term = gen_term(rng, domain, ty, flavor, 2)
            lhs = Sub(Var(0), Ext(subst, term), codomain.push_binding(ty))
            return RuleInstance(domain, lhs, term, ty)
        case "sub-var-miss":
            base = gen_stack(rng)
            under, over = pick_type(rng), pick_type(rng)
            codomain = base.push_binding(under)
            subst, domain = gen_subst_into(rng, codomain, flavor, 2)
            term = gen_term(rng, domain, over, flavor, 1)
            lhs = Sub(Var(1), Ext(subst, term), codomain.push_binding(over))
            rhs = Sub(Var(0), subst, codomain)
            return RuleInstance(domain, lhs, rhs, under)
        case "sub-var-wk":
            stack = gen_stack(rng)
            ty = pick_type(rng)
            index = rng.randrange(len(stack.top) + 1)
            inner = CtxStack(
                stack.worlds[:-1]
                + ((stack.top[: len(stack.top) - index] + (ty,) + stack.top[len(stack.top) - index :]),)
            )
            extended = inner.push_binding(pick_type(rng))
            lhs = Sub(Var(index), Wk(), inner)
            return RuleInstance(extended, lhs, Var(index + 1), ty)
        case "sub-nat":
            domain, subst, codomain = _gen_subst(rng)
            return RuleInstance(domain, Sub(NatTy(), subst, codomain), NatTy(), Univ(0))
        case "sub-zero":
            domain, subst, codomain = _gen_subst(rng)
            return RuleInstance(domain, Sub(Zero(), subst, codomain), Zero(), NatTy())
        case "sub-succ":
            domain, subst, codomain = _gen_subst(rng)
            arg = gen_term(rng, codomain, NatTy(), flavor, 2)
            lhs = Sub(Succ(arg), subst, codomain)
            rhs = Succ(Sub(arg, subst, codomain))
            return RuleInstance(domain, lhs, rhs, NatTy())
        case "sub-univ":
            domain, subst, codomain = _gen_subst(rng)
            level = rng.randint(0, 2)
            lhs = Sub(Univ(level), subst, codomain)
            return RuleInstance(domain, lhs, Univ(level), Univ(level + 1))
        case "sub-pi":
            domain, subst, codomain = _gen_subst(rng)
            dom, cod = pick_type(rng), pick_type(rng)
            lhs = Sub(Pi(dom, cod), subst, codomain)
            rhs = Pi(
                Sub(dom, subst, codomain),
                Sub(cod, q_lift(subst), codomain.push_binding(dom)),
            )
            return RuleInstance(domain, lhs, rhs, Univ(0))
        case "sub-lam":
            domain, subst, codomain = _gen_subst(rng)
            dom, cod = pick_type(rng), pick_type(rng)
            body = gen_term(rng, codomain.push_binding(dom), cod, flavor, 2)
            lhs = Sub(Lam(body), subst, codomain)
            rhs = Lam(Sub(body, q_lift(subst), codomain.push_binding(dom)))
            return RuleInstance(domain, lhs, rhs, Pi(dom, cod))
        case "sub-app":
            domain, subst, codomain = _gen_subst(rng)
            dom = pick_type(rng)
            fn = _gen_neutral(rng, codomain, Pi(dom, NatTy()), flavor, 2) or Lam(
                _leaf_of(rng, codomain.push_binding(dom), NatTy(), flavor)
            )
            arg = gen_term(rng, codomain, dom, flavor, 2)
            lhs = Sub(App(fn, arg), subst, codomain)
            rhs = App(Sub(fn, subst, codomain), Sub(arg, subst, codomain))
            return RuleInstance(domain, lhs, rhs, NatTy())
        case "sub-natelim":
            domain, subst, codomain = _gen_subst(rng)
            ty = pick_type(rng)
            base = gen_term(rng, codomain, ty, flavor, 2)
            step_stack = codomain.push_binding(NatTy()).push_binding(ty)
            step = gen_term(rng, step_stack, ty, flavor, 2)
            scrutinee = gen_term(rng, codomain, NatTy(), flavor, 2)
            lhs = Sub(NatElim(ty, base, step, scrutinee), subst, codomain)
            rhs = NatElim(
                Sub(ty, q_lift(subst), codomain.push_binding(NatTy())),
                Sub(base, subst, codomain),
                Sub(step, q_lift(q_lift(subst)), step_stack),
                Sub(scrutinee, subst, codomain),
            )
            return RuleInstance(domain, lhs, rhs, ty)
        case "sub-boxty":
            domain, subst, codomain = _gen_subst(rng)
            inner = pick_type(rng)
            lhs = Sub(BoxTy(inner), subst, codomain)
            rhs = BoxTy(Sub(inner, ModalExt(subst, 1), codomain.push_world()))
            return RuleInstance(domain, lhs, rhs, Univ(0))
        case "sub-boxintro":
            domain, subst, codomain = _gen_subst(rng)
            inner = pick_type(rng)
            body = gen_term(rng, codomain.push_world(), inner, flavor, 2)
            lhs = Sub(BoxIntro(body), subst, codomain)
            rhs = BoxIntro(Sub(body, ModalExt(subst, 1), codomain.push_world()))
            return RuleInstance(domain, lhs, rhs, BoxTy(inner))
        case "sub-unbox":
            base_cod = gen_stack(rng)
            level = rng.randint(0, 2)
            codomain = _stack_with_worlds(base_cod, level)
            subst, domain = gen_subst_into(rng, codomain, flavor, 2)
            ty = pick_type(rng)
            boxed = gen_term(rng, base_cod, BoxTy(ty), flavor, 2)
            lhs = Sub(Unbox(level, boxed), subst, codomain)
            from .substitution import trunc_offset, truncate

            rhs = Unbox(
                trunc_offset(subst, level),
                Sub(boxed, truncate(subst, level), base_cod),
            )
            return RuleInstance(domain, lhs, rhs, ty)
        case "cat-id-left":
            domain, subst, codomain = _gen_subst(rng)
            term = gen_term(rng, codomain, NatTy(), flavor, 2)
            lhs = Sub(term, Comp(Id(), subst), codomain)
            rhs = Sub(term, subst, codomain)
            return RuleInstance(domain, lhs, rhs, NatTy())
        case "cat-id-right":
            domain, subst, codomain = _gen_subst(rng)
            term = gen_term(rng, codomain, NatTy(), flavor, 2)
            lhs = Sub(term, Comp(subst, Id()), codomain)
            rhs = Sub(term, subst, codomain)
            return RuleInstance(domain, lhs, rhs, NatTy())
        case "cat-assoc":
            codomain = gen_stack(rng)
            s3, mid2 = gen_subst_into(rng, codomain, flavor, 1)
            s2, mid1 = gen_subst_into(rng, mid2, flavor, 1)
            s1, domain = gen_subst_into(rng, mid1, flavor, 1)
            term = gen_term(rng, codomain, NatTy(), flavor, 2)
            lhs = Sub(term, Comp(Comp(s3, s2), s1), codomain)
            rhs = Sub(term, Comp(s3, Comp(s2, s1)), codomain)
            return RuleInstance(domain, lhs, rhs, NatTy())
        case "comp-ext":
            codomain = gen_stack(rng)
            ty = pick_type(rng)
            outer, middle = gen_subst_into(rng, codomain, flavor, 2)
            inner, domain = gen_subst_into(rng, middle, flavor, 2)
            term = gen_term(rng, middle, ty, flavor, 2)
            target = codomain.push_binding(ty)
            lhs = Sub(Var(0), Comp(Ext(outer, term), inner), target)
            rhs = Sub(Var(0), Ext(Comp(outer, inner), Sub(term, inner, middle)), target)
            return RuleInstance(domain, lhs, rhs, ty)
        case "comp-modal-ext":
            base_cod = gen_stack(rng)
            outer, mid_base = gen_subst_into(rng, base_cod, flavor, 2)
            offset = rng.randint(0, 2)
            middle = _stack_with_worlds(mid_base, offset)
            inner, domain = gen_subst_into(rng, middle, flavor, 2)
            codomain = base_cod.push_world()
            ty = pick_type(rng)
            body = gen_term(rng, base_cod, BoxTy(ty), flavor, 2)
            term = Unbox(1, body)
            from .substitution import trunc_offset, truncate

            lhs = Sub(term, Comp(ModalExt(outer, offset), inner), codomain)
            rhs = Sub(
                term,
                ModalExt(Comp(outer, truncate(inner, offset)), trunc_offset(inner, offset)),
                codomain,
            )
            return RuleInstance(domain, lhs, rhs, ty)
        case "ext-wk":
            codomain = gen_stack(rng)
            ty = pick_type(rng)
            subst, domain = gen_subst_into(rng, codomain, flavor, 2)
            term = gen_term(rng, domain, ty, flavor, 2)
            probe = gen_term(rng, codomain, NatTy(), flavor, 2)
            lhs = Sub(probe, Comp(Wk(), Ext(subst, term)), codomain)
            rhs = Sub(probe, subst, codomain)
            return RuleInstance(domain, lhs, rhs, NatTy())
        case "ext-eta":
            base = gen_stack(rng)
            ty = pick_type(rng)
            codomain = base.push_binding(ty)
            subst, domain = gen_subst_into(rng, codomain, flavor, 2)
            probe = gen_term(rng, codomain, NatTy(), flavor, 2)
            lhs = Sub(probe, subst, codomain)
            rhs = Sub(
                probe,
                Ext(Comp(Wk(), subst), Sub(Var(0), subst, codomain)),
                codomain,
            )
            return RuleInstance(domain, lhs, rhs, NatTy())
        case "modal-ext-eta":
            base = gen_stack(rng)
            codomain = base.push_world()
            subst, domain = gen_subst_into(rng, codomain, flavor, 2)
            probe = gen_term(rng, codomain, NatTy(), flavor, 2)
            from .substitution import trunc_offset, truncate

            lhs = Sub(probe, subst, codomain)
            rhs = Sub(
                probe,
                ModalExt(truncate(subst, 1), trunc_offset(subst, 1)),
                codomain,
            )
            return RuleInstance(domain, lhs, rhs, NatTy())
    raise ValueError(f"no instance template for rule {name!r}")


def mot_law_instances(max_weaken: int = 3, max_below: int = 2) -> list[RuleInstance]:
    """Instances of the modal-transformation composition laws, driven through
    mot_subst over weakening-free stacks (S4)."""
    out: list[RuleInstance] = []
    rng = random.Random(20240229)
    for k in range(max_weaken + 1):
        for kp in range(max_weaken + 1):
            for l in range(max_below + 1):
                for lp in range(max_below + 1):
                    instance = _mot_case(rng, k, kp, l, lp)
                    if instance is not None:
                        out.append(instance)
    return out


def _mot_case(rng, k: int, kp: int, l: int, lp: int) -> RuleInstance | None:
    base = EMPTY_STACK.push_world()  # slack below the affected worlds
    mid = _stack_with_worlds(base, 1 + l)  # codomain of {k/l}
    term = gen_term(rng, mid, NatTy(), Flavor.S4, 3)
    first = mot_subst(k, l)
    second = mot_subst(kp, lp)
    after_first = _stack_with_worlds(base, k + l)  # domain of {k/l}
    if lp < l:
        # {k/l} then {k'/l'} agrees with {k'/l'} then {k/l+k'-1}
        if l + kp - 1 < 0:
            return None
        final = _stack_with_worlds(base, k + l + kp - 1)
        lhs = Sub(Sub(term, first, mid), second, after_first)
        rhs = Sub(
            Sub(term, mot_subst(kp, lp), mid),
            mot_subst(k, l + kp - 1),
            _stack_with_worlds(base, kp + l - 1 + 1),
        )
        return RuleInstance(final, lhs, rhs, NatTy())
    if l <= lp < l + k:
        # {k/l} then {k'/l'} fuses into {k+k'-1/l}
        if k + kp - 1 < 0:
            return None
        final = _stack_with_worlds(base, k + kp - 1 + l)
        lhs = Sub(Sub(term, first, mid), second, after_first)
        rhs = Sub(term, mot_subst(k + kp - 1, l), mid)
        return RuleInstance(final, lhs, rhs, NatTy())
    return None
