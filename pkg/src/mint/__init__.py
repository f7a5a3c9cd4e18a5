"""Mint: a kernel for a Kripke-style modal dependent type theory.

Parses, type-checks, and normalizes terms under a configurable modal flavor
(K, T, K4, S4).  Normalization is by evaluation through an untyped domain; a
bounded declarative rewrite oracle provides an independent equivalence
check.
"""

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
    NfClass,
    Pi,
    Sub,
    Subst,
    Succ,
    Term,
    TruncationRangeError,
    Unbox,
    Univ,
    Var,
    Wk,
    Zero,
    classify_nf,
    stack_truncate,
)
from .substitution import mot_subst, q_lift, trunc_offset, truncate
from .domain import (
    Envs,
    UMoT,
    UMOT_ID,
    apply_umot,
    apply_umot_envs,
    envs_bind,
    envs_drop,
    envs_ext,
    envs_offset,
    envs_trunc,
    umot_compose,
    umot_lift,
    umot_offset,
    umot_trunc,
)
from .evaluator import EvalError, Fuel, do_app, do_rec, do_unbox, eval_subst, evaluate
from .readback import ReadbackError, initial_env, nbe, rb_ne, rb_nf, rb_ty
from .typecheck import (
    CheckError,
    TypeValue,
    check,
    check_stack,
    check_subst,
    convertible,
    infer,
    infer_subst,
)
from .oracle import EquivVerdict, REGISTRY, bounded_equiv, rewrite_step
from .surface import ParseError, SourceFile, parse_core, parse_file, print_term

__all__ = [name for name in dir() if not name.startswith("_")]
