"""Untyped semantic domain: values, evaluation environments, modal maps.

Both untyped modal transformations (UMoTs) and evaluation environments are
conceptually infinite streams; they are represented by a finite prefix plus a
canonical tail (offset 1, no locals).  Constructors strip the canonical tail,
so structural equality coincides with equality of the streams.

Environment frames are ordered current-world-first: frame 0 is the topmost
world, the only one local variables can address.
"""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import Term


class EnvShapeError(ValueError):
    """Raised when an environment operation needs a binding that is absent."""


@dataclass(frozen=True)
class UMoT:
    """Untyped modal transformation: a stream of world offsets, tail of 1s."""

    offsets: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        offs = self.offsets
        while offs and offs[-1] == 1:
            offs = offs[:-1]
        object.__setattr__(self, "offsets", offs)

    def read(self, i: int) -> int:
        return self.offsets[i] if i < len(self.offsets) else 1


UMOT_ID = UMoT()


def umot_lift(kappa: UMoT, n: int) -> UMoT:
    """⇑ⁿκ: prepend an offset for a freshly entered world."""
    return UMoT((n,) + kappa.offsets)


def umot_offset(kappa: UMoT, n: int) -> int:
    """Sum of the first n offsets; tail positions count 1."""
    if n < 0:
        raise ValueError("offset expects a natural number")
    explicit = sum(kappa.offsets[:n])
    return explicit + max(0, n - len(kappa.offsets))


def umot_trunc(kappa: UMoT, n: int) -> UMoT:
    if n < 0:
        raise ValueError("truncation expects a natural number")
    return UMoT(kappa.offsets[n:])


def umot_compose(first: UMoT, second: UMoT) -> UMoT:
    """first ∘ second, so that a[first][second] = a[first ∘ second].

    Position 0 reads umot_offset(second, first(0)); the tail composes the
    tails after truncating `second` by first(0).  Once the finite prefix of
    `first` is exhausted it acts as the identity.
    """
    acc: list[int] = []
    rest = second
    for head in first.offsets:
        acc.append(umot_offset(rest, head))
        rest = umot_trunc(rest, head)
    return UMoT(tuple(acc) + rest.offsets)


class DomainValue:
    """Base class for domain values."""

    __slots__ = ()


class Neutral:
    """Base class for neutral domain values."""

    __slots__ = ()


@dataclass(frozen=True)
class Frame:
    """One world of an evaluation environment: an offset plus its locals."""

    offset: int = 1
    locals: tuple[DomainValue, ...] = ()


_TAIL_FRAME = Frame(1, ())


@dataclass(frozen=True)
class Envs:
    """Evaluation environment: frames for the finite prefix, tail (1, ())."""

    frames: tuple[Frame, ...] = ()

    def __post_init__(self) -> None:
        frames = self.frames
        while frames and frames[-1] == _TAIL_FRAME:
            frames = frames[:-1]
        object.__setattr__(self, "frames", frames)

    def frame(self, i: int) -> Frame:
        return self.frames[i] if i < len(self.frames) else _TAIL_FRAME


EMPTY_ENVS = Envs()


def envs_ext(env: Envs, offset: int = 1) -> Envs:
    """Enter a fresh world carrying `offset`, with no locals yet."""
    return Envs((Frame(offset, ()),) + env.frames)


def envs_bind(env: Envs, value: DomainValue) -> Envs:
    top = env.frame(0)
    return Envs((Frame(top.offset, top.locals + (value,)),) + env.frames[1:])


def envs_drop(env: Envs) -> Envs:
    top = env.frame(0)
    if not top.locals:
        raise EnvShapeError("cannot drop a binding from an empty local environment")
    return Envs((Frame(top.offset, top.locals[:-1]),) + env.frames[1:])


def envs_trunc(env: Envs, n: int) -> Envs:
    if n < 0:
        raise ValueError("truncation expects a natural number")
    return Envs(env.frames[n:])


def envs_offset(env: Envs, n: int) -> int:
    if n < 0:
        raise ValueError("offset expects a natural number")
    total = 0
    for i in range(n):
        total += env.frame(i).offset
    return total


def envs_lookup(env: Envs, index: int) -> DomainValue:
    """Look a de Bruijn index up in the current world's locals."""
    locals_ = env.frame(0).locals
    if index < 0 or index >= len(locals_):
        raise EnvShapeError(f"index {index} unbound in a world of {len(locals_)} locals")
    return locals_[-1 - index]


@dataclass(frozen=True)
class Closure:
    """A term under one binder together with its captured environment."""

    body: Term
    env: Envs


@dataclass(frozen=True)
class Closure2:
    """A term under two binders together with its captured environment."""

    body: Term
    env: Envs


@dataclass(frozen=True)
class DNat(DomainValue):
    pass


@dataclass(frozen=True)
class DUniv(DomainValue):
    level: int


@dataclass(frozen=True)
class DBoxTy(DomainValue):
    inner: DomainValue  # lives one world up


@dataclass(frozen=True)
class DPi(DomainValue):
    dom: DomainValue
    cod: Closure


@dataclass(frozen=True)
class DZero(DomainValue):
    pass


@dataclass(frozen=True)
class DSucc(DomainValue):
    pred: DomainValue


@dataclass(frozen=True)
class DBox(DomainValue):
    inner: DomainValue  # lives one world up


@dataclass(frozen=True)
class DLam(DomainValue):
    closure: Closure


@dataclass(frozen=True)
class DReflect(DomainValue):
    """↑^A(c): a neutral embedded in the domain at type value A."""

    ty: DomainValue
    neutral: Neutral


@dataclass(frozen=True)
class DVar(Neutral):
    """A domain variable: the level-th variable of its own world."""

    level: int


@dataclass(frozen=True)
class DApp(Neutral):
    fn: Neutral
    arg: "Reify"


@dataclass(frozen=True)
class DUnbox(Neutral):
    level: int
    body: Neutral


@dataclass(frozen=True)
class DRec(Neutral):
    """Stuck Nat elimination; captures its environment for readback."""

    motive: Closure
    base: DomainValue
    step: Closure2
    scrutinee: Neutral
    env: Envs


@dataclass(frozen=True)
class Reify:
    """↓^A(a): a value paired with the type value directing its readback."""

    ty: DomainValue
    value: DomainValue


NormalD = Reify


def apply_umot(value, kappa: UMoT):
    """Apply a UMoT structurally to a value, neutral, normal, closure or env.

    The unbox clause re-indexes through the transformation; variables are
    per-world levels and are untouched.
    """
    if kappa == UMOT_ID:
        return value
    match value:
        case DNat() | DUniv(_) | DZero() | DVar(_):
            return value
        case DBoxTy(inner):
            return DBoxTy(apply_umot(inner, umot_lift(kappa, 1)))
        case DPi(dom, cod):
            return DPi(apply_umot(dom, kappa), apply_umot(cod, kappa))
        case DSucc(pred):
            return DSucc(apply_umot(pred, kappa))
        case DBox(inner):
            return DBox(apply_umot(inner, umot_lift(kappa, 1)))
        case DLam(closure):
            return DLam(apply_umot(closure, kappa))
        case DReflect(ty, neutral):
            return DReflect(apply_umot(ty, kappa), apply_umot(neutral, kappa))
        case DApp(fn, arg):
            return DApp(apply_umot(fn, kappa), apply_umot(arg, kappa))
        case DUnbox(level, body):
            return DUnbox(umot_offset(kappa, level), apply_umot(body, umot_trunc(kappa, level)))
        case DRec(motive, base, step, scrutinee, env):
            return DRec(
                apply_umot(motive, kappa),
                apply_umot(base, kappa),
                apply_umot(step, kappa),
                apply_umot(scrutinee, kappa),
                apply_umot_envs(env, kappa),
            )
        case Reify(ty, val):
            return Reify(apply_umot(ty, kappa), apply_umot(val, kappa))
        case Closure(body, env):
            return Closure(body, apply_umot_envs(env, kappa))
        case Closure2(body, env):
            return Closure2(body, apply_umot_envs(env, kappa))
    raise TypeError(f"cannot apply a modal transformation to {value!r}")


def apply_umot_envs(env: Envs, kappa: UMoT) -> Envs:
    """Apply a UMoT frame by frame: ρ⃗[κ](i) = (L(κᵢ, kᵢ), ρᵢ[κᵢ]) with
    κᵢ = trunc(κ, L(ρ⃗, i)).  Frames are materialized until κ's finite prefix
    has been consumed, after which the tail maps to itself."""
    frames: list[Frame] = []
    consumed = 0  # envs_offset(env, i)
    i = 0
    while i < len(env.frames) or consumed < len(kappa.offsets):
        frame = env.frame(i)
        kap_i = umot_trunc(kappa, consumed)
        frames.append(
            Frame(
                umot_offset(kap_i, frame.offset),
                tuple(apply_umot(v, kap_i) for v in frame.locals),
            )
        )
        consumed += frame.offset
        i += 1
    return Envs(tuple(frames))
