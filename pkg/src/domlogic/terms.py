"""The typed term metalanguage: typing, rank-bounded evaluation and checking."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Optional, Union

from . import elements as el
from .errors import ParseError, TypeCheckError
from .formulas import Formula, TOP, disjuncts, rank as formula_rank, well_formed
from .logic import prime_element, primes_of
from .sexpr import SExpr, dumps, parse
from .types import (
    UNIT, CoSum, Fun, Lift, Lower, Prod, Rec, Type, Upper, from_sexpr as type_from_sexpr, unfold,
)


# ---------------------------------------------------------------- syntax

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Star:
    pass


@dataclass(frozen=True)
class Pair:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class LetPair:
    m: "Term"
    x: str
    y: str
    body: "Term"


@dataclass(frozen=True)
class Lam:
    x: str
    ty: Type
    body: "Term"
    res: Optional[Type] = None


@dataclass(frozen=True)
class App:
    fn: "Term"
    arg: "Term"


@dataclass(frozen=True)
class InjL:
    m: "Term"
    other: Optional[Type] = None


@dataclass(frozen=True)
class InjR:
    m: "Term"
    other: Optional[Type] = None


@dataclass(frozen=True)
class Cases:
    m: "Term"
    x: str
    left: "Term"
    y: str
    right: "Term"
    ty: Optional[Type] = None


@dataclass(frozen=True)
class Up:
    m: "Term"


@dataclass(frozen=True)
class LiftLet:
    m: "Term"
    x: str
    body: "Term"
    ty: Optional[Type] = None


@dataclass(frozen=True)
class SingletonL:
    m: "Term"


@dataclass(frozen=True)
class SingletonU:
    m: "Term"


@dataclass(frozen=True)
class ExtendL:
    m: "Term"
    x: str
    body: "Term"


@dataclass(frozen=True)
class ExtendU:
    m: "Term"
    x: str
    body: "Term"


@dataclass(frozen=True)
class UnionL:
    m: "Term"
    n: "Term"


@dataclass(frozen=True)
class UnionU:
    m: "Term"
    n: "Term"


@dataclass(frozen=True)
class TensorL:
    m: "Term"
    n: "Term"


@dataclass(frozen=True)
class TensorU:
    m: "Term"
    n: "Term"


@dataclass(frozen=True)
class Fold:
    m: "Term"
    ty: Optional[Rec] = None


@dataclass(frozen=True)
class Unfold:
    m: "Term"


@dataclass(frozen=True)
class Mu:
    x: str
    ty: Type
    body: "Term"


Term = Union[Var, Star, Pair, LetPair, Lam, App, InjL, InjR, Cases, Up, LiftLet, SingletonL,
             SingletonU, ExtendL, ExtendU, UnionL, UnionU, TensorL, TensorU, Fold, Unfold, Mu]

_SETS_UNARY = {"sglL": SingletonL, "sglU": SingletonU, "up": Up, "unfold": Unfold}
_SETS_BINARY = {"uplL": UnionL, "uplU": UnionU, "tenL": TensorL, "tenU": TensorU,
                "pair": Pair, "app": App}
_BINDING = {"extL": ExtendL, "extU": ExtendU, "liftlet": LiftLet}
_KEYWORDS = {"lam", "mu", "letp", "cases", "inl", "inr", "fold", "star"} | set(_SETS_UNARY) \
    | set(_SETS_BINARY) | set(_BINDING)


def term_from_sexpr(node: SExpr) -> Term:
    return rename_apart(_build(node))


def parse_term(text: str) -> Term:
    return term_from_sexpr(parse(text))


def _build(n: SExpr) -> Term:
    if isinstance(n, str):
        if n == "star":
            return Star()
        if n in _KEYWORDS:
            raise ParseError(f"keyword {n!r} used as a variable")
        return Var(n)
    if not n or not isinstance(n[0], str):
        raise ParseError(f"bad term {dumps(n)}")
    tag, *a = n
    if tag in _SETS_UNARY and len(a) == 1:
        return _SETS_UNARY[tag](_build(a[0]))
    if tag in _SETS_BINARY and len(a) == 2:
        return _SETS_BINARY[tag](_build(a[0]), _build(a[1]))
    if tag in _BINDING and len(a) == 3:
        return _BINDING[tag](_build(a[0]), _name(a[1]), _build(a[2]))
    if tag == "lam" and len(a) == 3:
        return Lam(_name(a[0]), type_from_sexpr(a[1]), _build(a[2]))
    if tag == "mu" and len(a) == 3:
        return Mu(_name(a[0]), type_from_sexpr(a[1]), _build(a[2]))
    if tag == "letp" and len(a) == 4:
        return LetPair(_build(a[0]), _name(a[1]), _name(a[2]), _build(a[3]))
    if tag == "cases" and len(a) == 5:
        return Cases(_build(a[0]), _name(a[1]), _build(a[2]), _name(a[3]), _build(a[4]))
    if tag in ("inl", "inr") and len(a) in (1, 2):
        other = type_from_sexpr(a[1]) if len(a) == 2 else None
        return (InjL if tag == "inl" else InjR)(_build(a[0]), other)
    if tag == "fold" and len(a) in (1, 2):
        ty = type_from_sexpr(a[1]) if len(a) == 2 else None
        if ty is not None and not isinstance(ty, Rec):
            raise ParseError("fold annotation must be a recursive type")
        return Fold(_build(a[0]), ty)
    raise ParseError(f"bad term {dumps(n)}")


def _name(n: SExpr) -> str:
    if not isinstance(n, str) or n in _KEYWORDS:
        raise ParseError(f"expected a variable name, got {dumps(n) if n else n!r}")
    return n


def to_sexpr(m: Term) -> str:
    if isinstance(m, Var):
        return m.name
    if isinstance(m, Star):
        return "star"
    if isinstance(m, Lam):
        return f"(lam {m.x} {m.ty} {to_sexpr(m.body)})"
    if isinstance(m, Mu):
        return f"(mu {m.x} {m.ty} {to_sexpr(m.body)})"
    if isinstance(m, LetPair):
        return f"(letp {to_sexpr(m.m)} {m.x} {m.y} {to_sexpr(m.body)})"
    if isinstance(m, Cases):
        return f"(cases {to_sexpr(m.m)} {m.x} {to_sexpr(m.left)} {m.y} {to_sexpr(m.right)})"
    if isinstance(m, (InjL, InjR)):
        tag = "inl" if isinstance(m, InjL) else "inr"
        return f"({tag} {to_sexpr(m.m)}" + (f" {m.other})" if m.other is not None else ")")
    if isinstance(m, Fold):
        return f"(fold {to_sexpr(m.m)}" + (f" {m.ty})" if m.ty is not None else ")")
    for tag, cls in {**_SETS_UNARY}.items():
        if isinstance(m, cls):
            return f"({tag} {to_sexpr(m.m)})"
    for tag, cls in _SETS_BINARY.items():
        if isinstance(m, cls):
            a, b = (m.fn, m.arg) if isinstance(m, App) else (m.left, m.right) if isinstance(m, Pair) else (m.m, m.n)
            return f"({tag} {to_sexpr(a)} {to_sexpr(b)})"
    for tag, cls in _BINDING.items():
        if isinstance(m, cls):
            return f"({tag} {to_sexpr(m.m)} {m.x} {to_sexpr(m.body)})"
    raise TypeError(m)


# ---------------------------------------------------------------- renaming

def free_vars(m: Term) -> frozenset:
    if isinstance(m, Var):
        return frozenset([m.name])
    if isinstance(m, Star):
        return frozenset()
    if isinstance(m, (Lam, Mu)):
        return free_vars(m.body) - {m.x}
    if isinstance(m, LetPair):
        return free_vars(m.m) | (free_vars(m.body) - {m.x, m.y})
    if isinstance(m, Cases):
        return free_vars(m.m) | (free_vars(m.left) - {m.x}) | (free_vars(m.right) - {m.y})
    if isinstance(m, (LiftLet, ExtendL, ExtendU)):
        return free_vars(m.m) | (free_vars(m.body) - {m.x})
    return frozenset().union(*(free_vars(c) for c in _subterms(m)))


def _subterms(m: Term) -> tuple:
    if isinstance(m, Pair):
        return (m.left, m.right)
    if isinstance(m, App):
        return (m.fn, m.arg)
    if isinstance(m, (UnionL, UnionU, TensorL, TensorU)):
        return (m.m, m.n)
    if isinstance(m, (InjL, InjR, Up, SingletonL, SingletonU, Fold, Unfold)):
        return (m.m,)
    return ()


def rename_apart(m: Term) -> Term:
    """Give every binder a name distinct from all other binders and free variables."""
    used = set(free_vars(m))

    def fresh(x: str) -> str:
        if x not in used:
            used.add(x)
            return x
        for i in itertools.count(1):
            cand = f"{x}_{i}"
            if cand not in used:
                used.add(cand)
                return cand

    def go(t: Term, env: dict) -> Term:
        if isinstance(t, Var):
            return Var(env.get(t.name, t.name))
        if isinstance(t, Star):
            return t
        if isinstance(t, (Lam, Mu)):
            x = fresh(t.x)
            return replace(t, x=x, body=go(t.body, {**env, t.x: x}))
        if isinstance(t, LetPair):
            x, y = fresh(t.x), fresh(t.y)
            return LetPair(go(t.m, env), x, y, go(t.body, {**env, t.x: x, t.y: y}))
        if isinstance(t, Cases):
            x, y = fresh(t.x), fresh(t.y)
            return replace(t, m=go(t.m, env), x=x, left=go(t.left, {**env, t.x: x}),
                           y=y, right=go(t.right, {**env, t.y: y}))
        if isinstance(t, (LiftLet, ExtendL, ExtendU)):
            x = fresh(t.x)
            return replace(t, m=go(t.m, env), x=x, body=go(t.body, {**env, t.x: x}))
        if isinstance(t, Pair):
            return Pair(go(t.left, env), go(t.right, env))
        if isinstance(t, App):
            return App(go(t.fn, env), go(t.arg, env))
        if isinstance(t, (UnionL, UnionU, TensorL, TensorU)):
            return type(t)(go(t.m, env), go(t.n, env))
        return replace(t, m=go(t.m, env))

    # binders first claim names not already free
    return go(m, {})


def substitute(m: Term, x: str, n: Term) -> Term:
    """Capture-avoiding substitution, assuming binders of m were renamed apart from n."""
    clash = free_vars(n)

    def go(t: Term) -> Term:
        if isinstance(t, Var):
            return n if t.name == x else t
        if isinstance(t, Star):
            return t
        binders = _binders(t)
        if x in binders:
            # only the non-binding part can see x
            if isinstance(t, (Lam, Mu)):
                return t
            if isinstance(t, LetPair):
                return replace(t, m=go(t.m))
            if isinstance(t, Cases):
                return replace(t, m=go(t.m), left=t.left if t.x == x else go(t.left),
                               right=t.right if t.y == x else go(t.right))
            return replace(t, m=go(t.m))
        if binders & clash:
            raise ValueError("substitution would capture; rename apart first")
        if isinstance(t, (Lam, Mu)):
            return replace(t, body=go(t.body))
        if isinstance(t, LetPair):
            return replace(t, m=go(t.m), body=go(t.body))
        if isinstance(t, Cases):
            return replace(t, m=go(t.m), left=go(t.left), right=go(t.right))
        if isinstance(t, (LiftLet, ExtendL, ExtendU)):
            return replace(t, m=go(t.m), body=go(t.body))
        if isinstance(t, Pair):
            return Pair(go(t.left), go(t.right))
        if isinstance(t, App):
            return App(go(t.fn), go(t.arg))
        if isinstance(t, (UnionL, UnionU, TensorL, TensorU)):
            return type(t)(go(t.m), go(t.n))
        return replace(t, m=go(t.m))

    return go(m)


def _binders(t: Term) -> set:
    if isinstance(t, (Lam, Mu, LiftLet, ExtendL, ExtendU)):
        return {t.x}
    if isinstance(t, (LetPair, Cases)):
        return {t.x, t.y}
    return set()


# ---------------------------------------------------------------- typing

def _fail(rule: str, msg: str):
    raise TypeCheckError(rule, msg)


def elaborate(m: Term, ctx: Optional[dict] = None, expected: Optional[Type] = None) -> tuple:
    """Type-check ``m``, filling in annotations; returns (annotated term, type)."""
    ctx = dict(ctx or {})
    t, ty = _elab(m, ctx, expected)
    if expected is not None and ty != expected:
        _fail("conv", f"expected {expected}, got {ty}")
    return t, ty


def type_of(m: Term, ctx: Optional[dict] = None) -> Type:
    return elaborate(m, ctx)[1]


def _elab(m: Term, ctx: dict, exp: Optional[Type]) -> tuple:
    if isinstance(m, Var):
        if m.name not in ctx:
            _fail("Var", f"unbound variable {m.name}")
        return m, ctx[m.name]
    if isinstance(m, Star):
        return m, UNIT
    if isinstance(m, Pair):
        el_, er = (exp.left, exp.right) if isinstance(exp, Prod) else (None, None)
        a, ta = _elab(m.left, ctx, el_)
        b, tb = _elab(m.right, ctx, er)
        return Pair(a, b), Prod(ta, tb)
    if isinstance(m, LetPair):
        a, ta = _elab(m.m, ctx, None)
        if not isinstance(ta, Prod):
            _fail("x-E", f"let-pair of non-product type {ta}")
        b, tb = _elab(m.body, {**ctx, m.x: ta.left, m.y: ta.right}, exp)
        return LetPair(a, m.x, m.y, b), tb
    if isinstance(m, Lam):
        exp_res = exp.res if isinstance(exp, Fun) else None
        b, tb = _elab(m.body, {**ctx, m.x: m.ty}, exp_res)
        return Lam(m.x, m.ty, b, tb), Fun(m.ty, tb)
    if isinstance(m, App):
        f, tf = _elab(m.fn, ctx, None)
        if not isinstance(tf, Fun):
            _fail("->-E", f"application of non-function type {tf}")
        a, ta = _elab(m.arg, ctx, tf.arg)
        if ta != tf.arg:
            _fail("->-E", f"argument type {ta} does not match {tf.arg}")
        return App(f, a), tf.res
    if isinstance(m, (InjL, InjR)):
        left = isinstance(m, InjL)
        hint = None
        other = m.other
        if isinstance(exp, CoSum):
            hint = exp.left if left else exp.right
            other = other if other is not None else (exp.right if left else exp.left)
        a, ta = _elab(m.m, ctx, hint)
        if other is None:
            _fail("+-I", "cannot infer the other summand; annotate the injection")
        ty = CoSum(ta, other) if left else CoSum(other, ta)
        return type(m)(a, other), ty
    if isinstance(m, Cases):
        a, ta = _elab(m.m, ctx, None)
        if not isinstance(ta, CoSum):
            _fail("+-E", f"case analysis of non-sum type {ta}")
        l, tl = _elab(m.left, {**ctx, m.x: ta.left}, exp)
        r, tr = _elab(m.right, {**ctx, m.y: ta.right}, exp if exp is not None else tl)
        if tl != tr:
            _fail("+-E", f"branch types differ: {tl} and {tr}")
        return Cases(a, m.x, l, m.y, r, tl), tl
    if isinstance(m, Up):
        a, ta = _elab(m.m, ctx, exp.body if isinstance(exp, Lift) else None)
        return Up(a), Lift(ta)
    if isinstance(m, LiftLet):
        a, ta = _elab(m.m, ctx, None)
        if not isinstance(ta, Lift):
            _fail("lift-E", f"lifting of non-lifted type {ta}")
        b, tb = _elab(m.body, {**ctx, m.x: ta.body}, exp)
        return LiftLet(a, m.x, b, tb), tb
    if isinstance(m, (SingletonL, SingletonU)):
        cls = Lower if isinstance(m, SingletonL) else Upper
        a, ta = _elab(m.m, ctx, exp.body if isinstance(exp, cls) else None)
        return type(m)(a), cls(ta)
    if isinstance(m, (ExtendL, ExtendU)):
        cls = Lower if isinstance(m, ExtendL) else Upper
        rule = "dia-E" if cls is Lower else "box-E"
        a, ta = _elab(m.m, ctx, None)
        if not isinstance(ta, cls):
            _fail(rule, f"extension of {ta}")
        b, tb = _elab(m.body, {**ctx, m.x: ta.body}, exp)
        if not isinstance(tb, cls):
            _fail(rule, f"extension body has type {tb}")
        return type(m)(a, m.x, b), tb
    if isinstance(m, (UnionL, UnionU)):
        cls = Lower if isinstance(m, UnionL) else Upper
        a, ta = _elab(m.m, ctx, exp)
        b, tb = _elab(m.n, ctx, ta)
        if not isinstance(ta, cls) or ta != tb:
            _fail("union", f"cannot form union of {ta} and {tb}")
        return type(m)(a, b), ta
    if isinstance(m, (TensorL, TensorU)):
        cls = Lower if isinstance(m, TensorL) else Upper
        a, ta = _elab(m.m, ctx, None)
        b, tb = _elab(m.n, ctx, None)
        if not isinstance(ta, cls) or not isinstance(tb, cls):
            _fail("tensor", f"cannot form tensor of {ta} and {tb}")
        return type(m)(a, b), cls(Prod(ta.body, tb.body))
    if isinstance(m, Fold):
        target = m.ty if m.ty is not None else exp
        if not isinstance(target, Rec):
            _fail("rec-I", "cannot infer the recursive type; annotate the fold")
        a, ta = _elab(m.m, ctx, unfold(target))
        if ta != unfold(target):
            _fail("rec-I", f"fold body has type {ta}, expected {unfold(target)}")
        return Fold(a, target), target
    if isinstance(m, Unfold):
        a, ta = _elab(m.m, ctx, None)
        if not isinstance(ta, Rec):
            _fail("rec-E", f"unfold of non-recursive type {ta}")
        return Unfold(a), unfold(ta)
    if isinstance(m, Mu):
        b, tb = _elab(m.body, {**ctx, m.x: m.ty}, m.ty)
        if tb != m.ty:
            _fail("mu-I", f"fixpoint body has type {tb}, expected {m.ty}")
        return Mu(m.x, m.ty, b), m.ty
    raise TypeError(m)


def has_mu(m: Term) -> bool:
    if isinstance(m, Mu):
        return True
    if isinstance(m, (Var, Star)):
        return False
    if isinstance(m, (Lam, LiftLet, ExtendL, ExtendU)):
        return has_mu(m.body) or (not isinstance(m, Lam) and has_mu(m.m))
    if isinstance(m, LetPair):
        return has_mu(m.m) or has_mu(m.body)
    if isinstance(m, Cases):
        return has_mu(m.m) or has_mu(m.left) or has_mu(m.right)
    return any(has_mu(c) for c in _subterms(m))


# ---------------------------------------------------------------- evaluation

def eval_term(m: Term, env: dict, k: int, ctx: Optional[dict] = None, fuel: Optional[int] = None) -> el.Element:
    """The rank-``k`` projection of the denotation of ``m`` (a lower bound with Mu)."""
    ctx = ctx if ctx is not None else {}
    annotated, _ = elaborate(m, ctx)
    fuel = k + 4 if fuel is None else fuel
    return el.project(_ev(annotated, dict(env), k, fuel), k)


def eval_annotated(m: Term, env: dict, k: int, fuel: Optional[int] = None) -> el.Element:
    fuel = k + 4 if fuel is None else fuel
    return el.project(_ev(m, dict(env), k, fuel), k)


def _probe_rank(sigma, k: int) -> int:
    exact = el.exact_rank(sigma)
    return k if exact is None else max(k, exact)


def _ev(m: Term, env: dict, k: int, fuel: int) -> el.Element:
    if isinstance(m, Var):
        return env[m.name]
    if isinstance(m, Star):
        return el.UNIT_BOT
    if isinstance(m, Pair):
        return el.PairE(_ev(m.left, env, k, fuel), _ev(m.right, env, k, fuel))
    if isinstance(m, LetPair):
        v = _ev(m.m, env, k, fuel)
        return _ev(m.body, {**env, m.x: v.left, m.y: v.right}, k, fuel)
    if isinstance(m, Lam):
        # finite argument types are probed exhaustively so beta reduction is exact
        probe, keep = _probe_rank(m.ty, k), _probe_rank(m.res, k)
        try:
            args = el.enumerate_elements(m.ty, probe)
        except el.RankExplosion:
            args, keep = el.enumerate_elements(m.ty, k), k
        table = {a: el.project(_ev(m.body, {**env, m.x: a}, k, fuel), keep) for a in args}
        return el.fun_from_table(table, Fun(m.ty, m.res))
    if isinstance(m, App):
        return el.apply(_ev(m.fn, env, k, fuel), _ev(m.arg, env, k, fuel))
    if isinstance(m, InjL):
        return el.sum_left(_ev(m.m, env, k, fuel))
    if isinstance(m, InjR):
        return el.sum_right(_ev(m.m, env, k, fuel))
    if isinstance(m, Cases):
        v = _ev(m.m, env, k, fuel)
        if isinstance(v, el.SumL):
            return _ev(m.left, {**env, m.x: v.body}, k, fuel)
        if isinstance(v, el.SumR):
            return _ev(m.right, {**env, m.y: v.body}, k, fuel)
        return el.bottom(m.ty)
    if isinstance(m, Up):
        return el.LiftUp(_ev(m.m, env, k, fuel))
    if isinstance(m, LiftLet):
        v = _ev(m.m, env, k, fuel)
        if isinstance(v, el.LiftUp):
            return _ev(m.body, {**env, m.x: v.body}, k, fuel)
        return el.bottom(m.ty)
    if isinstance(m, SingletonL):
        return el.LowerSet(frozenset([_ev(m.m, env, k, fuel)]))
    if isinstance(m, SingletonU):
        return el.UpperSet(frozenset([_ev(m.m, env, k, fuel)]))
    if isinstance(m, (ExtendL, ExtendU)):
        v = _ev(m.m, env, k, fuel)
        members = set()
        for d in v.members:
            members.update(_ev(m.body, {**env, m.x: d}, k, fuel).members)
        return el.lower_set(members) if isinstance(m, ExtendL) else el.upper_set(members)
    if isinstance(m, (UnionL, UnionU)):
        a, b = _ev(m.m, env, k, fuel), _ev(m.n, env, k, fuel)
        mk = el.lower_set if isinstance(m, UnionL) else el.upper_set
        return mk(a.members | b.members)
    if isinstance(m, (TensorL, TensorU)):
        a, b = _ev(m.m, env, k, fuel), _ev(m.n, env, k, fuel)
        mk = el.lower_set if isinstance(m, TensorL) else el.upper_set
        return mk(el.PairE(x, y) for x in a.members for y in b.members)
    if isinstance(m, Fold):
        return el.FoldE(_ev(m.m, env, k, fuel))
    if isinstance(m, Unfold):
        return _ev(m.m, env, k, fuel).body
    if isinstance(m, Mu):
        d = el.bottom(m.ty)
        for _ in range(fuel):
            nxt = el.project(_ev(m.body, {**env, m.x: d}, k, fuel), k)
            if nxt == d:
                break
            d = nxt
        return d
    raise TypeError(m)


# ---------------------------------------------------------------- program logic

def _choices(gamma: dict, ctx: dict):
    """Environments built from one prime disjunct per assumption."""
    names = sorted(gamma)
    options = []
    for x in names:
        elems = [prime_element(p, ctx[x]) for p in primes_of(gamma[x], ctx[x])]
        options.append([u for u in elems if u is not None])
    for pick in itertools.product(*options):
        yield dict(zip(names, pick))


def check(m: Term, gamma: dict, phi: Formula, k: int, ctx: Optional[dict] = None,
          fuel: Optional[int] = None) -> bool:
    """Decide whether every environment satisfying ``gamma`` sends ``m`` into ``phi``."""
    ctx = dict(ctx or {})
    annotated, ty = elaborate(m, ctx)
    if not well_formed(phi, ty):
        raise TypeCheckError("assertion", f"formula {phi} is not well formed at {ty}")
    live = {x: g for x, g in gamma.items() if x in ctx}
    base = {x: el.bottom(t) for x, t in ctx.items()}
    for env in _choices(live, ctx):
        full = {**base, **env}
        if not el.sat(eval_annotated(annotated, full, k, fuel), phi, ty):
            return False
    return True


def check_by_enumeration(m: Term, gamma: dict, phi: Formula, k: int, ctx: dict,
                         fuel: Optional[int] = None) -> bool:
    """Brute-force counterpart of ``check`` over every satisfying environment of rank k."""
    annotated, ty = elaborate(m, ctx)
    names = sorted(ctx)
    pools = []
    for x in names:
        g = gamma.get(x, TOP)
        pools.append([u for u in el.enumerate_elements(ctx[x], k) if el.sat(u, g, ctx[x])])
    for pick in itertools.product(*pools):
        if not el.sat(eval_annotated(annotated, dict(zip(names, pick)), k, fuel), phi, ty):
            return False
    return True


def required_rank(phi: Formula, ty: Type, gamma: dict, ctx: dict) -> int:
    r = formula_rank(phi, ty)
    for x, g in gamma.items():
        if x in ctx:
            r = max(r, formula_rank(g, ctx[x]))
    return r
