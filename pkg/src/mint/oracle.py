"""Bounded declarative-equivalence oracle.

The registry holds one entry per (non-congruence) equivalence rule of the
declarative theory: β and η for Π/□/Nat, every substitution-application
rule, the categorical laws, and the substitution extensionality principles.
`rewrite_step` enumerates single-step rewrites at every position, so
congruence closure comes from the traversal rather than from extra rules.

`bounded_equiv` runs a meet-in-the-middle search over directed rewrites,
decomposing along shared head constructors and applying η only at comparison
roots, one layer per round.  It is sound but incomplete: Equiv verdicts carry
a replayable trace, Unknown promises nothing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .substitution import q_lift, trunc_offset, truncate
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


@dataclass(frozen=True)
class RewriteRule:
    """One declarative equivalence, with the orientation this kernel uses."""

    name: str
    kind: str  # beta | eta | subst-app | categorical | composition | extensionality
    equates: str
    orientation: str


_RULES = [
    RewriteRule("beta-pi", "beta", "(fn x. t) s ~ t[I, s/x]", "left-to-right"),
    RewriteRule("beta-box", "beta", "unbox n (box t) ~ t[^n(I)]", "left-to-right"),
    RewriteRule("beta-zero", "beta", "rec _ b _ zero ~ b", "left-to-right"),
    RewriteRule(
        "beta-succ", "beta", "rec M b u (succ t) ~ u[I, t/x, rec M b u t/y]", "left-to-right"
    ),
    RewriteRule("eta-pi", "eta", "t ~ fn x. t[wk] x", "expansion at comparison roots"),
    RewriteRule("eta-box", "eta", "t ~ box (unbox 1 t)", "expansion at comparison roots"),
    RewriteRule("sub-id", "subst-app", "t[I] ~ t", "left-to-right"),
    RewriteRule("sub-comp", "subst-app", "t[s o d] ~ t[s][d]", "left-to-right"),
    RewriteRule("sub-var-hit", "subst-app", "x0[s, t/x] ~ t", "left-to-right"),
    RewriteRule("sub-var-miss", "subst-app", "x(k+1)[s, t/x] ~ xk[s]", "left-to-right"),
    RewriteRule("sub-var-wk", "subst-app", "xk[wk] ~ x(k+1)", "left-to-right"),
    RewriteRule("sub-nat", "subst-app", "Nat[s] ~ Nat", "left-to-right"),
    RewriteRule("sub-zero", "subst-app", "zero[s] ~ zero", "left-to-right"),
    RewriteRule("sub-succ", "subst-app", "(succ t)[s] ~ succ (t[s])", "left-to-right"),
    RewriteRule(
        "sub-natelim",
        "subst-app",
        "(rec M b u t)[s] ~ rec M[q(s)] b[s] u[q(q(s))] t[s]",
        "left-to-right",
    ),
    RewriteRule("sub-univ", "subst-app", "Ty i[s] ~ Ty i", "left-to-right"),
    RewriteRule("sub-pi", "subst-app", "((x : S) -> T)[s] ~ (x : S[s]) -> T[q(s)]", "left-to-right"),
    RewriteRule("sub-lam", "subst-app", "(fn x. t)[s] ~ fn x. t[q(s)]", "left-to-right"),
    RewriteRule("sub-app", "subst-app", "(t u)[s] ~ t[s] u[s]", "left-to-right"),
    RewriteRule("sub-boxty", "subst-app", "([] T)[s] ~ [] (T[^1(s)])", "left-to-right"),
    RewriteRule("sub-boxintro", "subst-app", "(box t)[s] ~ box (t[^1(s)])", "left-to-right"),
    RewriteRule(
        "sub-unbox", "subst-app", "(unbox n t)[s] ~ unbox L(s,n) (t[s|n])", "left-to-right"
    ),
    RewriteRule("cat-id-left", "categorical", "I o s ~ s", "left-to-right"),
    RewriteRule("cat-id-right", "categorical", "s o I ~ s", "left-to-right"),
    RewriteRule("cat-assoc", "categorical", "(a o b) o c ~ a o (b o c)", "left-to-right"),
    RewriteRule("comp-ext", "composition", "(s, t/x) o d ~ (s o d), t[d]/x", "left-to-right"),
    RewriteRule(
        "comp-modal-ext",
        "composition",
        "^n(s) o d ~ ^L(d,n)(s o d|n)",
        "left-to-right",
    ),
    RewriteRule("ext-wk", "composition", "wk o (s, t/x) ~ s", "left-to-right"),
    RewriteRule(
        "ext-eta",
        "extensionality",
        "s ~ (wk o s), x0[s]/x",
        "expansion at comparison roots",
    ),
    RewriteRule(
        "modal-ext-eta",
        "extensionality",
        "s ~ ^L(s,1)(s|1)",
        "expansion at comparison roots",
    ),
]

REGISTRY: dict[str, RewriteRule] = {rule.name: rule for rule in _RULES}


@dataclass(frozen=True)
class TraceStep:
    """One replayable rewrite over whole terms.

    forward=True rewrites before→after by the named rule; forward=False
    records a right-hand-side step, i.e. after→before rewrites by the rule.
    """

    rule: str
    before: Term
    after: Term
    forward: bool = True


@dataclass(frozen=True)
class EquivVerdict:
    status: str  # "equiv" | "unknown"
    trace: tuple[TraceStep, ...] = ()

    @property
    def is_equiv(self) -> bool:
        return self.status == "equiv"


UNKNOWN = EquivVerdict("unknown")


def strip_annotations(term: Term) -> Term:
    """Erase checker annotations from Sub nodes; the declarative theory and
    the rewriter do not see them."""
    return _strip(term)


def _strip(node):
    match node:
        case Sub(t, s, _):
            return Sub(_strip(t), _strip(s), None)
        case Succ(a):
            return Succ(_strip(a))
        case NatElim(m, b, u, t):
            return NatElim(_strip(m), _strip(b), _strip(u), _strip(t))
        case Pi(d, c):
            return Pi(_strip(d), _strip(c))
        case Lam(b):
            return Lam(_strip(b))
        case App(f, a):
            return App(_strip(f), _strip(a))
        case BoxTy(i):
            return BoxTy(_strip(i))
        case BoxIntro(b):
            return BoxIntro(_strip(b))
        case Unbox(n, b):
            return Unbox(n, _strip(b))
        case Ext(s, t):
            return Ext(_strip(s), _strip(t))
        case ModalExt(s, n):
            return ModalExt(_strip(s), n)
        case Comp(o, i):
            return Comp(_strip(o), _strip(i))
        case _:
            return node


def _root_term_rewrites(term: Term) -> list[tuple[str, Term]]:
    out: list[tuple[str, Term]] = []
    match term:
        case App(Lam(body), arg):
            out.append(("beta-pi", Sub(body, Ext(Id(), arg))))
        case Unbox(level, BoxIntro(body)):
            out.append(("beta-box", Sub(body, ModalExt(Id(), level))))
        case NatElim(_, base, _, Zero()):
            out.append(("beta-zero", base))
        case NatElim(motive, base, step, Succ(pred)):
            rec_pred = NatElim(motive, base, step, pred)
            out.append(("beta-succ", Sub(step, Ext(Ext(Id(), pred), rec_pred))))
    match term:
        case Sub(inner, subst, _):
            match subst:
                case Id():
                    out.append(("sub-id", inner))
                case Comp(outer_s, inner_s):
                    out.append(("sub-comp", Sub(Sub(inner, outer_s), inner_s)))
            match inner, subst:
                case Var(0), Ext(_, replacement):
                    out.append(("sub-var-hit", replacement))
                case Var(k), Ext(base, _) if k > 0:
                    out.append(("sub-var-miss", Sub(Var(k - 1), base)))
                case Var(k), Wk():
                    out.append(("sub-var-wk", Var(k + 1)))
                case NatTy(), _:
                    out.append(("sub-nat", NatTy()))
                case Zero(), _:
                    out.append(("sub-zero", Zero()))
                case Succ(arg), _:
                    out.append(("sub-succ", Succ(Sub(arg, subst))))
                case NatElim(motive, base, step, scrutinee), _:
                    out.append(
                        (
                            "sub-natelim",
                            NatElim(
                                Sub(motive, q_lift(subst)),
                                Sub(base, subst),
                                Sub(step, q_lift(q_lift(subst))),
                                Sub(scrutinee, subst),
                            ),
                        )
                    )
                case Univ(i), _:
                    out.append(("sub-univ", Univ(i)))
                case Pi(dom, cod), _:
                    out.append(("sub-pi", Pi(Sub(dom, subst), Sub(cod, q_lift(subst)))))
                case Lam(body), _:
                    out.append(("sub-lam", Lam(Sub(body, q_lift(subst)))))
                case App(fn, arg), _:
                    out.append(("sub-app", App(Sub(fn, subst), Sub(arg, subst))))
                case BoxTy(inner_ty), _:
                    out.append(("sub-boxty", BoxTy(Sub(inner_ty, ModalExt(subst, 1)))))
                case BoxIntro(body), _:
                    out.append(("sub-boxintro", BoxIntro(Sub(body, ModalExt(subst, 1)))))
                case Unbox(level, body), _:
                    out.append(
                        (
                            "sub-unbox",
                            Unbox(
                                trunc_offset(subst, level),
                                Sub(body, truncate(subst, level)),
                            ),
                        )
                    )
    return out


def _root_subst_rewrites(subst: Subst) -> list[tuple[str, Subst]]:
    out: list[tuple[str, Subst]] = []
    match subst:
        case Comp(Id(), rest):
            out.append(("cat-id-left", rest))
        case Comp(rest, Id()):
            out.append(("cat-id-right", rest))
    match subst:
        case Comp(Comp(a, b), c):
            out.append(("cat-assoc", Comp(a, Comp(b, c))))
        case Comp(Ext(base, term), delta):
            out.append(("comp-ext", Ext(Comp(base, delta), Sub(term, delta))))
        case Comp(ModalExt(base, offset), delta):
            out.append(
                (
                    "comp-modal-ext",
                    ModalExt(Comp(base, truncate(delta, offset)), trunc_offset(delta, offset)),
                )
            )
        case Comp(Wk(), Ext(base, _)):
            out.append(("ext-wk", base))
    return out


def _root_term_expansions(term: Term) -> list[tuple[str, Term]]:
    return [
        ("eta-pi", Lam(App(Sub(term, Wk()), Var(0)))),
        ("eta-box", BoxIntro(Unbox(1, term))),
    ]


def _root_subst_expansions(subst: Subst) -> list[tuple[str, Subst]]:
    return [
        ("ext-eta", Ext(Comp(Wk(), subst), Sub(Var(0), subst))),
        ("modal-ext-eta", ModalExt(truncate(subst, 1), trunc_offset(subst, 1))),
    ]


def _children(node):
    match node:
        case Succ(a):
            return (a,)
        case NatElim(m, b, u, t):
            return (m, b, u, t)
        case Pi(d, c):
            return (d, c)
        case Lam(b):
            return (b,)
        case App(f, a):
            return (f, a)
        case BoxTy(i):
            return (i,)
        case BoxIntro(b):
            return (b,)
        case Unbox(_, b):
            return (b,)
        case Sub(t, s, _):
            return (t, s)
        case Ext(s, t):
            return (s, t)
        case ModalExt(s, _):
            return (s,)
        case Comp(o, i):
            return (o, i)
        case _:
            return ()


def _rebuild(node, children):
    match node:
        case Succ(_):
            return Succ(*children)
        case NatElim(_, _, _, _):
            return NatElim(*children)
        case Pi(_, _):
            return Pi(*children)
        case Lam(_):
            return Lam(*children)
        case App(_, _):
            return App(*children)
        case BoxTy(_):
            return BoxTy(*children)
        case BoxIntro(_):
            return BoxIntro(*children)
        case Unbox(n, _):
            return Unbox(n, *children)
        case Sub(_, _, annot):
            return Sub(children[0], children[1], annot)
        case Ext(_, _):
            return Ext(*children)
        case ModalExt(_, n):
            return ModalExt(children[0], n)
        case Comp(_, _):
            return Comp(*children)
    raise TypeError(f"no children to rebuild in {node!r}")


def _same_scaffold(a, b) -> bool:
    """Same constructor and same non-child payload (indices, levels, offsets)."""
    if type(a) is not type(b):
        return False
    match a, b:
        case Var(i), Var(j):
            return i == j
        case Univ(i), Univ(j):
            return i == j
        case Unbox(n, _), Unbox(m, _):
            return n == m
        case ModalExt(_, n), ModalExt(_, m):
            return n == m
        case _:
            return True


def _positional(node, root_rules) -> list[tuple[str, object]]:
    """All single-step rewrites of `node`: root rules here plus lifted child
    rewrites at every position."""
    out = list(root_rules(node))
    kids = _children(node)
    for index, child in enumerate(kids):
        child_rules = (
            _root_subst_rewrites if isinstance(child, Subst) else _root_term_rewrites
        )
        for name, rewritten in _positional(child, child_rules):
            rebuilt = _rebuild(node, kids[:index] + (rewritten,) + kids[index + 1 :])
            out.append((name, rebuilt))
    return out


def rewrite_step(term: Term) -> list[tuple[RewriteRule, Term]]:
    """All single-step rewrites of a term at any position (set semantics;
    deterministic order, duplicates removed)."""
    seen: set[tuple[str, Term]] = set()
    out: list[tuple[RewriteRule, Term]] = []
    for name, result in _positional(term, _root_term_rewrites):
        key = (name, result)
        if key not in seen:
            seen.add(key)
            out.append((REGISTRY[name], result))
    return out


def expansion_step(term: Term) -> list[tuple[RewriteRule, Term]]:
    """All single-step η/extensionality expansions at any position; used to
    replay traces, not to drive the search."""
    out: list[tuple[RewriteRule, Term]] = []

    def visit(node, wrap):
        expander = _root_subst_expansions if isinstance(node, Subst) else _root_term_expansions
        for name, result in expander(node):
            out.append((REGISTRY[name], wrap(result)))
        kids = _children(node)
        for index, child in enumerate(kids):
            def wrap_child(new_child, _index=index, _node=node, _wrap=wrap, _kids=kids):
                return _wrap(_rebuild(_node, _kids[:_index] + (new_child,) + _kids[_index + 1 :]))

            visit(child, wrap_child)

    visit(term, lambda x: x)
    return out


def _size(node) -> int:
    return 1 + sum(_size(c) for c in _children(node))


_NODE_CAP = 600


def _explore(term: Term, depth: int):
    """BFS over directed rewrites; maps stripped terms to (term, trace)."""
    start = term
    visited: dict[Term, tuple[Term, tuple[TraceStep, ...]]] = {_strip(start): (start, ())}
    frontier = [start]
    for _ in range(depth):
        if not frontier or len(visited) > _NODE_CAP:
            break
        next_frontier: list[Term] = []
        for current in frontier:
            _, trace = visited[_strip(current)]
            for rule, result in rewrite_step(current):
                key = _strip(result)
                if key in visited:
                    continue
                visited[key] = (result, trace + (TraceStep(rule.name, current, result),))
                next_frontier.append(result)
            if len(visited) > _NODE_CAP:
                break
        frontier = next_frontier
    return visited


def _flip(trace: tuple[TraceStep, ...]) -> tuple[TraceStep, ...]:
    """Reverse a trace recorded from the right-hand side."""
    return tuple(
        TraceStep(step.rule, step.after, step.before, forward=not step.forward)
        for step in reversed(trace)
    )


def _order_key(item):
    key, _ = item
    return (_size(key), repr(key))


def bounded_equiv(lhs: Term, rhs: Term, depth: int = 12) -> EquivVerdict:
    """Decide βη-equivalence of two well-typed terms within a search bound.

    Equiv verdicts are sound and carry a step-by-step trace; Unknown means
    the bound was exhausted.  Both inputs must be well typed at a common
    stack and type; η steps rely on that precondition.
    """
    trace = _search(lhs, rhs, depth, struct_depth=64)
    if trace is None:
        return UNKNOWN
    return EquivVerdict("equiv", tuple(trace))


def _search(lhs: Term, rhs: Term, depth: int, struct_depth: int):
    if _strip(lhs) == _strip(rhs):
        return []
    if struct_depth <= 0:
        return None
    left = _explore(lhs, depth)
    right = _explore(rhs, depth)
    meet = set(left) & set(right)
    if meet:
        key = min(meet, key=lambda k: (_size(k), repr(k)))
        _, ltrace = left[key]
        _, rtrace = right[key]
        return list(ltrace) + list(_flip(rtrace))
    lkey, (lrep, ltrace) = min(left.items(), key=_order_key)
    rkey, (rrep, rtrace) = min(right.items(), key=_order_key)
    middle = _align(lrep, rrep, depth, struct_depth - 1)
    if middle is None:
        return None
    return list(ltrace) + middle + list(_flip(rtrace))


def _align(lrep, rrep, depth, struct_depth):
    """Connect two rewrite-normalized representatives: decompose along a
    shared scaffold, or η-expand the non-introduction side at the root."""
    if _strip(lrep) == _strip(rrep):
        return []
    if _same_scaffold(lrep, rrep):
        lkids = _children(lrep)
        rkids = _children(rrep)
        if not lkids:
            return None
        steps: list[TraceStep] = []
        current = list(lkids)
        for index in range(len(lkids)):
            child_trace = _search(lkids[index], rkids[index], depth, struct_depth)
            if child_trace is None:
                return None
            for step in child_trace:
                before = _rebuild(lrep, tuple(current[:index]) + (step.before,) + lkids[index + 1 :])
                after = _rebuild(lrep, tuple(current[:index]) + (step.after,) + lkids[index + 1 :])
                steps.append(TraceStep(step.rule, before, after, step.forward))
            current[index] = rkids[index]
        return steps
    # One η layer per comparison round, driven by the other side's head.
    if isinstance(rrep, Lam) and not isinstance(lrep, Lam) and isinstance(lrep, Term):
        expanded = Lam(App(Sub(lrep, Wk()), Var(0)))
        rest = _align(expanded, rrep, depth, struct_depth)
        if rest is not None:
            return [TraceStep("eta-pi", lrep, expanded)] + rest
        return None
    if isinstance(lrep, Lam) and not isinstance(rrep, Lam) and isinstance(rrep, Term):
        expanded = Lam(App(Sub(rrep, Wk()), Var(0)))
        rest = _align(lrep, expanded, depth, struct_depth)
        if rest is not None:
            return rest + [TraceStep("eta-pi", expanded, rrep, forward=False)]
        return None
    if isinstance(rrep, BoxIntro) and not isinstance(lrep, BoxIntro) and isinstance(lrep, Term):
        expanded = BoxIntro(Unbox(1, lrep))
        rest = _align(expanded, rrep, depth, struct_depth)
        if rest is not None:
            return [TraceStep("eta-box", lrep, expanded)] + rest
        return None
    if isinstance(lrep, BoxIntro) and not isinstance(rrep, BoxIntro) and isinstance(rrep, Term):
        expanded = BoxIntro(Unbox(1, rrep))
        rest = _align(lrep, expanded, depth, struct_depth)
        if rest is not None:
            return rest + [TraceStep("eta-box", expanded, rrep, forward=False)]
        return None
    return None


def replay_trace(lhs: Term, rhs: Term, trace: tuple[TraceStep, ...]) -> bool:
    """Check that a trace connects lhs to rhs.

    The chain position always moves before→after; a step with forward=False
    records a rule firing in the opposite direction (after→before).  Every
    step must match its registered rule at some position, via the positional
    rewriter or the expansion enumerator.
    """
    position = _strip(lhs)
    for step in trace:
        if _strip(step.before) != position:
            return False
        source, target = (step.before, step.after) if step.forward else (step.after, step.before)
        candidates = [
            (rule.name, _strip(result))
            for rule, result in rewrite_step(source) + expansion_step(source)
        ]
        if (step.rule, _strip(target)) not in candidates:
            return False
        position = _strip(step.after)
    return position == _strip(rhs)
