"""Random generators used by the oracle suites and the tests."""
from __future__ import annotations

import random

from .formulas import (
    BOT, TOP, ArrowF, BoxF, DiaF, Formula, InL, InR, LiftF, PairF, conj, disj,
)
from .types import (
    BOOL, SIERPINSKI, UNIT, CoSum, Fun, Lift, Lower, Prod, Rec, Type, Upper, parse_type, unfold,
)

# shapes of depth at most three used by the entailment suites
TYPE_SHAPES = [
    parse_type(s) for s in [
        "(+ (lift 1) (lift 1))",
        "(x (+ (lift 1) (lift 1)) (lift 1))",
        "(-> (+ (lift 1) (lift 1)) (+ (lift 1) (lift 1)))",
        "(-> (lift 1) (lift (lift 1)))",
        "(pu (x (lift 1) (lift 1)))",
        "(pl (+ (lift 1) (lift 1)))",
        "(lift (+ (lift 1) (lift 1)))",
        "(rec t (+ 1 (lift t)))",
        "(x (lift 1) (-> (lift 1) (lift 1)))",
        "(pu (pl (lift 1)))",
    ]
]


def random_type(rng: random.Random, depth: int = 3) -> Type:
    if depth <= 1:
        return rng.choice([UNIT, SIERPINSKI, SIERPINSKI])
    pick = rng.randrange(8)
    sub = lambda: random_type(rng, depth - 1)  # noqa: E731
    if pick == 0:
        return Prod(sub(), sub())
    if pick == 1:
        return Fun(random_type(rng, 1), sub())
    if pick == 2:
        return CoSum(sub(), sub())
    if pick == 3:
        return Lift(sub())
    if pick == 4:
        return Upper(sub())
    if pick == 5:
        return Lower(sub())
    if pick == 6:
        return BOOL
    return SIERPINSKI


def random_formula(rng: random.Random, sigma: Type, size: int) -> Formula:
    """A well-formed formula at ``sigma`` with at most ``size`` nodes."""
    if size <= 1:
        return rng.choice([TOP, TOP, BOT]) if not _has_generator(sigma) or rng.random() < 0.3 \
            else _generator(rng, sigma, 1)
    roll = rng.random()
    if roll < 0.3:
        left = rng.randint(1, size - 2) if size > 2 else 1
        a = random_formula(rng, sigma, left)
        b = random_formula(rng, sigma, max(1, size - 1 - left))
        return conj(a, b) if rng.random() < 0.5 else disj(a, b)
    if not _has_generator(sigma):
        return rng.choice([TOP, BOT])
    return _generator(rng, sigma, size)


def _has_generator(sigma: Type) -> bool:
    while isinstance(sigma, Rec):
        sigma = unfold(sigma)
    return not sigma == UNIT


def _generator(rng: random.Random, sigma: Type, size: int) -> Formula:
    while isinstance(sigma, Rec):
        sigma = unfold(sigma)
    inner = max(1, size - 1)
    if isinstance(sigma, Prod):
        k = rng.randint(1, max(1, inner - 1))
        return PairF(random_formula(rng, sigma.left, k), random_formula(rng, sigma.right, max(1, inner - k)))
    if isinstance(sigma, Fun):
        k = rng.randint(1, max(1, inner - 1))
        return ArrowF(random_formula(rng, sigma.arg, k), random_formula(rng, sigma.res, max(1, inner - k)))
    if isinstance(sigma, CoSum):
        if rng.random() < 0.5:
            return InL(random_formula(rng, sigma.left, inner))
        return InR(random_formula(rng, sigma.right, inner))
    if isinstance(sigma, Lift):
        return LiftF(random_formula(rng, sigma.body, inner))
    if isinstance(sigma, Upper):
        return BoxF(random_formula(rng, sigma.body, inner))
    if isinstance(sigma, Lower):
        return DiaF(random_formula(rng, sigma.body, inner))
    return TOP


def random_lts(rng: random.Random, n_states: int, acts=("a", "b"), edge_p: float = 0.25,
               div_p: float = 0.3):
    from .process import Lts
    states = [f"s{i}" for i in range(n_states)]
    trans = {(p, a, q) for p in states for a in acts for q in states if rng.random() < edge_p / len(acts)}
    div = {p for p in states if rng.random() < div_p}
    return Lts(tuple(acts), tuple(states), frozenset(trans), frozenset(div))


def random_proc_formula(rng: random.Random, acts, size: int, depth: int = 3):
    """A sort-pi process formula with at most ``size`` nodes and modal depth at most ``depth``."""
    from .process import FF, TT, Box, Dia, p_and, p_or
    if size <= 2 or depth == 0:
        return rng.choice([TT, FF]) if size < 2 or depth == 0 else \
            rng.choice([Box, Dia])(_random_kappa(rng, acts, 1, depth))
    if rng.random() < 0.3:
        left = rng.randint(1, size - 2)
        a = random_proc_formula(rng, acts, left, depth)
        b = random_proc_formula(rng, acts, size - 1 - left, depth)
        return (p_and if rng.random() < 0.5 else p_or)(a, b)
    return rng.choice([Box, Dia])(_random_kappa(rng, acts, size - 1, depth))


def _random_kappa(rng: random.Random, acts, size: int, depth: int):
    from .process import KFF, KTT, TT, Act, k_and, k_or
    if size <= 1:
        return rng.choice([KTT, KFF]) if rng.random() < 0.2 else Act(rng.choice(list(acts)), TT)
    if size >= 3 and rng.random() < 0.3:
        left = rng.randint(1, size - 2)
        a = _random_kappa(rng, acts, left, depth)
        b = _random_kappa(rng, acts, size - 1 - left, depth)
        return (k_and if rng.random() < 0.5 else k_or)(a, b)
    return Act(rng.choice(list(acts)), random_proc_formula(rng, acts, size - 1, depth - 1))


def random_hml(rng: random.Random, acts, size: int, depth: int = 3, with_init: bool = False):
    from .process import HFF, HTT, BoxA, DiaA, Init, h_and, h_or
    if size <= 1 or depth == 0:
        if with_init and rng.random() < 0.3:
            return Init(frozenset(a for a in acts if rng.random() < 0.5))
        return rng.choice([HTT, HFF])
    if size >= 3 and rng.random() < 0.35:
        left = rng.randint(1, size - 2)
        a = random_hml(rng, acts, left, depth, with_init)
        b = random_hml(rng, acts, size - 1 - left, depth, with_init)
        return (h_and if rng.random() < 0.5 else h_or)(a, b)
    return rng.choice([BoxA, DiaA])(rng.choice(list(acts)), random_hml(rng, acts, size - 1, depth - 1, with_init))


def random_proc_element(rng: random.Random, acts, depth: int, width: int = 3):
    from .process import ProcElement
    if depth == 0:
        return ProcElement(rng.random() < 0.5)
    caps = [(rng.choice(list(acts)), random_proc_element(rng, acts, depth - 1, width))
            for _ in range(rng.randint(0, width))]
    return ProcElement(rng.random() < 0.5, caps)


# small types whose rank-2 enumerations stay cheap
TERM_TYPES = [
    parse_type(s) for s in [
        "(+ (lift 1) (lift 1))", "(lift 1)", "(x (lift 1) (lift 1))", "(-> (lift 1) (lift 1))",
        "(pl (lift 1))", "(pu (lift 1))", "(lift (lift 1))", "1",
    ]
]


class _Fresh:
    def __init__(self):
        self.n = 0

    def __call__(self, base: str) -> str:
        self.n += 1
        return f"{base}{self.n}"


def random_term(rng: random.Random, ty: Type, ctx: dict, size: int, allow_mu: bool = False):
    """A well-typed term of type ``ty`` in context ``ctx`` with roughly ``size`` nodes."""
    return _term(rng, ty, dict(ctx), size, _Fresh(), allow_mu)


def _term(rng, ty, ctx, size, fresh, allow_mu):
    from . import terms as tm
    sub = lambda t, c=ctx, s=None: _term(rng, t, c, s if s is not None else size // 2, fresh, allow_mu)  # noqa: E731
    hits = [x for x, t in ctx.items() if t == ty]
    if size <= 1 or (hits and rng.random() < 0.25):
        if hits and rng.random() < 0.7:
            return tm.Var(rng.choice(sorted(hits)))
        return _canonical(rng, ty, ctx, fresh)
    roll = rng.random()
    if roll < 0.35:
        elim = _eliminate(rng, ty, ctx, size, fresh, allow_mu)
        if elim is not None:
            return elim
    if allow_mu and roll > 0.93:
        x = fresh("m")
        return tm.Mu(x, ty, sub(ty, {**ctx, x: ty}))
    return _introduce(rng, ty, ctx, size, fresh, allow_mu)


def _canonical(rng, ty, ctx, fresh):
    """A small term of type ``ty`` built from constructors only."""
    from . import terms as tm
    while isinstance(ty, Rec):
        return tm.Fold(_canonical(rng, unfold(ty), ctx, fresh), ty)
    if isinstance(ty, Prod):
        return tm.Pair(_canonical(rng, ty.left, ctx, fresh), _canonical(rng, ty.right, ctx, fresh))
    if isinstance(ty, Fun):
        x = fresh("x")
        inner = {**ctx, x: ty.arg}
        hits = [v for v, t in inner.items() if t == ty.res]
        body = tm.Var(rng.choice(sorted(hits))) if hits and rng.random() < 0.6 \
            else _canonical(rng, ty.res, inner, fresh)
        return tm.Lam(x, ty.arg, body)
    if isinstance(ty, CoSum):
        if rng.random() < 0.5:
            return tm.InjL(_canonical(rng, ty.left, ctx, fresh), ty.right)
        return tm.InjR(_canonical(rng, ty.right, ctx, fresh), ty.left)
    if isinstance(ty, Lift):
        return tm.Up(_canonical(rng, ty.body, ctx, fresh))
    if isinstance(ty, Lower):
        return tm.SingletonL(_canonical(rng, ty.body, ctx, fresh))
    if isinstance(ty, Upper):
        return tm.SingletonU(_canonical(rng, ty.body, ctx, fresh))
    return tm.Star()


def _introduce(rng, ty, ctx, size, fresh, allow_mu):
    from . import terms as tm
    half = max(1, size // 2)
    sub = lambda t, c=ctx, s=half: _term(rng, t, c, s, fresh, allow_mu)  # noqa: E731
    if isinstance(ty, Rec):
        return tm.Fold(sub(unfold(ty), ctx, size - 1), ty)
    if isinstance(ty, Prod):
        return tm.Pair(sub(ty.left), sub(ty.right))
    if isinstance(ty, Fun):
        x = fresh("x")
        return tm.Lam(x, ty.arg, sub(ty.res, {**ctx, x: ty.arg}, size - 1))
    if isinstance(ty, CoSum):
        if rng.random() < 0.5:
            return tm.InjL(sub(ty.left, ctx, size - 1), ty.right)
        return tm.InjR(sub(ty.right, ctx, size - 1), ty.left)
    if isinstance(ty, Lift):
        return tm.Up(sub(ty.body, ctx, size - 1))
    if isinstance(ty, (Lower, Upper)):
        lower = isinstance(ty, Lower)
        pick = rng.random()
        if pick < 0.4:
            return (tm.SingletonL if lower else tm.SingletonU)(sub(ty.body, ctx, size - 1))
        if pick < 0.7:
            return (tm.UnionL if lower else tm.UnionU)(sub(ty), sub(ty))
        if isinstance(ty.body, Prod) and pick < 0.85:
            cls = Lower if lower else Upper
            return (tm.TensorL if lower else tm.TensorU)(sub(cls(ty.body.left)), sub(cls(ty.body.right)))
        x = fresh("e")
        src = ty.body
        return (tm.ExtendL if lower else tm.ExtendU)(sub(ty), x, sub(ty, {**ctx, x: src}))
    return tm.Star()


def _eliminate(rng, ty, ctx, size, fresh, allow_mu):
    """Use a context variable of a compound type to produce ``ty``, if one fits."""
    from . import terms as tm
    half = max(1, size // 2)
    options = []
    for v, t in sorted(ctx.items(), key=lambda kv: kv[0]):
        if isinstance(t, Fun) and t.res == ty:
            options.append(("app", v, t))
        if isinstance(t, Prod):
            options.append(("letp", v, t))
        if isinstance(t, CoSum):
            options.append(("cases", v, t))
        if isinstance(t, Lift):
            options.append(("liftlet", v, t))
        if isinstance(t, Rec) and unfold(t) == ty:
            options.append(("unfold", v, t))
        if isinstance(t, Lower) and isinstance(ty, Lower):
            options.append(("extL", v, t))
        if isinstance(t, Upper) and isinstance(ty, Upper):
            options.append(("extU", v, t))
    if not options:
        return None
    kind, v, t = rng.choice(options)
    sub = lambda c, s=half: _term(rng, ty, c, s, fresh, allow_mu)  # noqa: E731
    if kind == "app":
        return tm.App(tm.Var(v), _term(rng, t.arg, ctx, half, fresh, allow_mu))
    if kind == "letp":
        x, y = fresh("x"), fresh("y")
        return tm.LetPair(tm.Var(v), x, y, sub({**ctx, x: t.left, y: t.right}, size - 1))
    if kind == "cases":
        x, y = fresh("x"), fresh("y")
        return tm.Cases(tm.Var(v), x, sub({**ctx, x: t.left}), y, sub({**ctx, y: t.right}))
    if kind == "liftlet":
        x = fresh("x")
        return tm.LiftLet(tm.Var(v), x, sub({**ctx, x: t.body}, size - 1))
    if kind == "unfold":
        return tm.Unfold(tm.Var(v))
    x = fresh("e")
    cls = tm.ExtendL if kind == "extL" else tm.ExtendU
    return cls(tm.Var(v), x, sub({**ctx, x: t.body}, size - 1))


def enumerate_hml(acts, size: int, depth: int) -> list:
    """Every HML formula without init atoms up to ``size`` and modal depth ``depth``.

    Connectives are binary, so each syntax tree is listed once.
    """
    from .process import HFF, HTT, BoxA, DiaA, HAnd, HOr
    acts = sorted(acts)
    table = {}  # (size, depth) -> formulas of exactly that size within that depth
    for s in range(1, size + 1):
        for d in range(depth + 1):
            if s == 1:
                table[s, d] = [HTT, HFF]
                continue
            out = []
            if d > 0:
                out += [mk(a, b) for mk in (DiaA, BoxA) for a in acts for b in table[s - 1, d - 1]]
            for left in range(1, s - 1):
                for x in table[left, d]:
                    for y in table[s - 1 - left, d]:
                        out += [HAnd((x, y)), HOr((x, y))]
            table[s, d] = out
    return [f for s in range(1, size + 1) for f in table[s, depth]]
