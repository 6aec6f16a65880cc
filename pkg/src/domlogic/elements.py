"""Finite elements of the domains denoted by type expressions.

Elements are kept in canonical form so that structural equality coincides
with order-equivalence:

* step functions hold their irredundant step set,
* lower sets keep only maximal members, upper sets only minimal ones,
* tagged sum payloads are never bottom.

Inconsistent joins are reported as ``None``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Optional, Union

from .errors import RankExplosion, TypeMismatch
from .formulas import (
    And, ArrowF, BoxF, DiaF, Formula, InL, InR, LiftF, Or, PairF, TOP, conj_list, disj_list,
)
from .types import CoSum, Fun, Lift, Lower, Prod, Rec, Type, Unit, Upper, unfold

ENUM_CAP = 50_000


@dataclass(frozen=True)
class UnitBot:
    def __str__(self) -> str:
        return "*"


@dataclass(frozen=True)
class PairE:
    left: "Element"
    right: "Element"

    def __str__(self) -> str:
        return f"(pair {self.left} {self.right})"


@dataclass(frozen=True)
class StepFun:
    steps: frozenset
    ty: Fun = field(compare=True)

    def __str__(self) -> str:
        body = " ".join(f"({a} {b})" for a, b in sorted_steps(self))
        return f"(fun {body})" if body else "(fun)"


@dataclass(frozen=True)
class SumBot:
    def __str__(self) -> str:
        return "sbot"


@dataclass(frozen=True)
class SumL:
    body: "Element"

    def __str__(self) -> str:
        return f"(inl {self.body})"


@dataclass(frozen=True)
class SumR:
    body: "Element"

    def __str__(self) -> str:
        return f"(inr {self.body})"


@dataclass(frozen=True)
class LiftBot:
    def __str__(self) -> str:
        return "lbot"


@dataclass(frozen=True)
class LiftUp:
    body: "Element"

    def __str__(self) -> str:
        return f"(up {self.body})"


@dataclass(frozen=True)
class LowerSet:
    members: frozenset

    def __str__(self) -> str:
        return "(lower " + " ".join(sorted(map(str, self.members))) + ")"


@dataclass(frozen=True)
class UpperSet:
    members: frozenset

    def __str__(self) -> str:
        return "(upper " + " ".join(sorted(map(str, self.members))) + ")"


@dataclass(frozen=True)
class FoldE:
    body: "Element"

    def __str__(self) -> str:
        return f"(fold {self.body})"


Element = Union[UnitBot, PairE, StepFun, SumBot, SumL, SumR, LiftBot, LiftUp, LowerSet, UpperSet, FoldE]

UNIT_BOT = UnitBot()
SUM_BOT = SumBot()
LIFT_BOT = LiftBot()


def sorted_steps(f: StepFun) -> list:
    return sorted(f.steps, key=lambda s: (str(s[0]), str(s[1])))


# ---------------------------------------------------------------- basics

@lru_cache(maxsize=None)
def bottom(sigma: Type) -> Element:
    if isinstance(sigma, Unit):
        return UNIT_BOT
    if isinstance(sigma, Prod):
        return PairE(bottom(sigma.left), bottom(sigma.right))
    if isinstance(sigma, Fun):
        return StepFun(frozenset(), sigma)
    if isinstance(sigma, CoSum):
        return SUM_BOT
    if isinstance(sigma, Lift):
        return LIFT_BOT
    if isinstance(sigma, Lower):
        return LowerSet(frozenset([bottom(sigma.body)]))
    if isinstance(sigma, Upper):
        return UpperSet(frozenset([bottom(sigma.body)]))
    if isinstance(sigma, Rec):
        return FoldE(bottom(unfold(sigma)))
    raise TypeMismatch(f"no elements at open type {sigma}")


@lru_cache(maxsize=None)
def is_bottom(u: Element) -> bool:
    if isinstance(u, (UnitBot, SumBot, LiftBot)):
        return True
    if isinstance(u, PairE):
        return is_bottom(u.left) and is_bottom(u.right)
    if isinstance(u, StepFun):
        return not u.steps
    if isinstance(u, (LowerSet, UpperSet)):
        return len(u.members) == 1 and is_bottom(next(iter(u.members)))
    if isinstance(u, FoldE):
        return is_bottom(u.body)
    return False


@lru_cache(maxsize=None)
def rank(u: Element) -> int:
    """Element rank: one per lifting, powerdomain or fold layer."""
    if is_bottom(u):
        return 0
    if isinstance(u, PairE):
        return max(rank(u.left), rank(u.right))
    if isinstance(u, StepFun):
        return max(max(rank(a), rank(b)) for a, b in u.steps)
    if isinstance(u, (SumL, SumR)):
        return rank(u.body)
    if isinstance(u, (LiftUp, FoldE)):
        return 1 + rank(u.body)
    if isinstance(u, (LowerSet, UpperSet)):
        return 1 + max(rank(m) for m in u.members)
    raise TypeMismatch(f"unexpected element {u!r}")


def _mismatch(u, v):
    raise TypeMismatch(f"cannot compare {u} with {v}")


@lru_cache(maxsize=None)
def leq(u: Element, v: Element) -> bool:
    if u == v:
        return True
    if isinstance(u, UnitBot):
        return isinstance(v, UnitBot) or _mismatch(u, v)
    if isinstance(u, PairE):
        if not isinstance(v, PairE):
            _mismatch(u, v)
        return leq(u.left, v.left) and leq(u.right, v.right)
    if isinstance(u, StepFun):
        if not isinstance(v, StepFun):
            _mismatch(u, v)
        return all(leq(b, apply(v, a)) for a, b in u.steps)
    if isinstance(u, (SumBot, SumL, SumR)):
        if not isinstance(v, (SumBot, SumL, SumR)):
            _mismatch(u, v)
        if isinstance(u, SumBot):
            return True
        return type(u) is type(v) and leq(u.body, v.body)
    if isinstance(u, (LiftBot, LiftUp)):
        if not isinstance(v, (LiftBot, LiftUp)):
            _mismatch(u, v)
        if isinstance(u, LiftBot):
            return True
        return isinstance(v, LiftUp) and leq(u.body, v.body)
    if isinstance(u, LowerSet):
        if not isinstance(v, LowerSet):
            _mismatch(u, v)
        return all(any(leq(x, y) for y in v.members) for x in u.members)
    if isinstance(u, UpperSet):
        if not isinstance(v, UpperSet):
            _mismatch(u, v)
        return all(any(leq(x, y) for x in u.members) for y in v.members)
    if isinstance(u, FoldE):
        if not isinstance(v, FoldE):
            _mismatch(u, v)
        return leq(u.body, v.body)
    _mismatch(u, v)


def maximal(items: Iterable[Element]) -> frozenset:
    items = list(set(items))
    return frozenset(x for x in items if not any(x != y and leq(x, y) for y in items))


def minimal(items: Iterable[Element]) -> frozenset:
    items = list(set(items))
    return frozenset(x for x in items if not any(x != y and leq(y, x) for y in items))


def lower_set(members: Iterable[Element]) -> LowerSet:
    return LowerSet(maximal(members))


def upper_set(members: Iterable[Element]) -> UpperSet:
    return UpperSet(minimal(members))


def sum_left(x: Element) -> Element:
    return SUM_BOT if is_bottom(x) else SumL(x)


def sum_right(x: Element) -> Element:
    return SUM_BOT if is_bottom(x) else SumR(x)


# ---------------------------------------------------------------- joins

@lru_cache(maxsize=None)
def join(u: Element, v: Element) -> Optional[Element]:
    """Least upper bound, or None when the two elements are inconsistent."""
    if u == v or is_bottom(v):
        return u
    if is_bottom(u):
        return v
    if isinstance(u, PairE):
        if not isinstance(v, PairE):
            _mismatch(u, v)
        a = join(u.left, v.left)
        b = join(u.right, v.right) if a is not None else None
        return None if b is None else PairE(a, b)
    if isinstance(u, StepFun):
        if not isinstance(v, StepFun):
            _mismatch(u, v)
        return make_fun(u.steps | v.steps, u.ty)
    if isinstance(u, (SumL, SumR)):
        if not isinstance(v, (SumL, SumR)):
            _mismatch(u, v)
        if type(u) is not type(v):
            return None
        inner = join(u.body, v.body)
        return None if inner is None else type(u)(inner)
    if isinstance(u, LiftUp):
        if not isinstance(v, LiftUp):
            _mismatch(u, v)
        inner = join(u.body, v.body)
        return None if inner is None else LiftUp(inner)
    if isinstance(u, LowerSet):
        if not isinstance(v, LowerSet):
            _mismatch(u, v)
        return lower_set(u.members | v.members)
    if isinstance(u, UpperSet):
        if not isinstance(v, UpperSet):
            _mismatch(u, v)
        joins = [join(x, y) for x in u.members for y in v.members]
        joins = [j for j in joins if j is not None]
        return upper_set(joins) if joins else None
    if isinstance(u, FoldE):
        if not isinstance(v, FoldE):
            _mismatch(u, v)
        inner = join(u.body, v.body)
        return None if inner is None else FoldE(inner)
    _mismatch(u, v)


def join_all(items: Iterable[Element], sigma: Type) -> Optional[Element]:
    acc = bottom(sigma)
    for x in items:
        acc = join(acc, x)
        if acc is None:
            return None
    return acc


def consistent(u: Element, v: Element) -> bool:
    return join(u, v) is not None


# ---------------------------------------------------------------- functions

def apply(f: StepFun, a: Element) -> Element:
    out = _apply_steps(f.steps, a, f.ty.res)
    if out is None:
        raise TypeMismatch(f"inconsistent step function {f}")
    return out


def _apply_steps(steps, a, res_ty) -> Optional[Element]:
    acc = bottom(res_ty)
    for c, d in steps:
        if leq(c, a):
            acc = join(acc, d)
            if acc is None:
                return None
    return acc


def _join_closure(args: list) -> list:
    seen = set(args)
    frontier = list(seen)
    while frontier:
        fresh = []
        for x, y in itertools.product(frontier, list(seen)):
            j = join(x, y)
            if j is not None and j not in seen:
                seen.add(j)
                fresh.append(j)
        frontier = fresh
    return list(seen)


def make_fun(steps: Iterable, ty: Fun) -> Optional[StepFun]:
    """Build the canonical step function, or None if the steps are inconsistent."""
    steps = frozenset(steps)
    args = list({a for a, _ in steps})
    for point in _join_closure(args):
        if _apply_steps(steps, point, ty.res) is None:
            return None
    table = {a: _apply_steps(steps, a, ty.res) for a in args}
    return _irredundant(table, ty)


def fun_from_table(table: dict, ty: Fun) -> StepFun:
    """Canonical step function of a monotone map given on a join-closed set of points."""
    return _irredundant(table, ty)


def _irredundant(table: dict, ty: Fun) -> StepFun:
    kept = []
    for c, v in table.items():
        if is_bottom(v):
            continue
        below = [w for d, w in table.items() if d != c and leq(d, c)]
        acc = bottom(ty.res)
        for w in below:
            acc = join(acc, w)
        if acc != v:
            kept.append((c, v))
    return StepFun(frozenset(kept), ty)


def step(a: Element, b: Element, ty: Fun) -> StepFun:
    return _irredundant({a: b}, ty)


# ---------------------------------------------------------------- enumeration

@lru_cache(maxsize=None)
def exact_rank(sigma: Type) -> Optional[int]:
    """The least rank at which every element of ``sigma`` is enumerated; None for recursive types."""
    if isinstance(sigma, Unit):
        return 0
    if isinstance(sigma, (Prod, CoSum, Fun)):
        parts = (sigma.left, sigma.right) if not isinstance(sigma, Fun) else (sigma.arg, sigma.res)
        ranks = [exact_rank(p) for p in parts]
        return None if None in ranks else max(ranks)
    if isinstance(sigma, (Lift, Lower, Upper)):
        inner = exact_rank(sigma.body)
        return None if inner is None else inner + 1
    return None


def _check_cap(n: int, sigma: Type, k: int) -> None:
    if n > ENUM_CAP:
        raise RankExplosion(f"more than {ENUM_CAP} elements of {sigma} at rank {k}")


@lru_cache(maxsize=None)
def enumerate_elements(sigma: Type, k: int) -> tuple:
    """All finite elements of rank at most ``k``, bottom first."""
    if k <= 0:
        return (bottom(sigma),)
    if isinstance(sigma, Unit):
        return (UNIT_BOT,)
    if isinstance(sigma, Prod):
        ls, rs = enumerate_elements(sigma.left, k), enumerate_elements(sigma.right, k)
        _check_cap(len(ls) * len(rs), sigma, k)
        return tuple(PairE(a, b) for a in ls for b in rs)
    if isinstance(sigma, CoSum):
        ls, rs = enumerate_elements(sigma.left, k), enumerate_elements(sigma.right, k)
        out = [SUM_BOT]
        out += [SumL(a) for a in ls if not is_bottom(a)]
        out += [SumR(b) for b in rs if not is_bottom(b)]
        return tuple(out)
    if isinstance(sigma, Lift):
        return (LIFT_BOT,) + tuple(LiftUp(a) for a in enumerate_elements(sigma.body, k - 1))
    if isinstance(sigma, Rec):
        return tuple(FoldE(a) for a in enumerate_elements(unfold(sigma), k - 1))
    if isinstance(sigma, (Lower, Upper)):
        inner = enumerate_elements(sigma.body, k - 1)
        sets = _antichains(inner, sigma, k)
        cls = LowerSet if isinstance(sigma, Lower) else UpperSet
        out = [cls(s) for s in sets]
        out.sort(key=lambda u: (rank(u), str(u)))
        return tuple(out)
    if isinstance(sigma, Fun):
        return tuple(_monotone_maps(sigma, k))
    raise TypeMismatch(f"cannot enumerate open type {sigma}")


def _antichains(items: tuple, sigma: Type, k: int) -> list:
    """Nonempty antichains of ``items``."""
    comparable = {
        (i, j) for i, x in enumerate(items) for j, y in enumerate(items)
        if i != j and (leq(x, y) or leq(y, x))
    }
    out = []

    def grow(start: int, chosen: list):
        if chosen:
            out.append(frozenset(items[i] for i in chosen))
            _check_cap(len(out), sigma, k)
        for j in range(start, len(items)):
            if all((i, j) not in comparable for i in chosen):
                chosen.append(j)
                grow(j + 1, chosen)
                chosen.pop()

    grow(0, [])
    return out


def _monotone_maps(sigma: Fun, k: int) -> list:
    dom = list(enumerate_elements(sigma.arg, k))
    cod = enumerate_elements(sigma.res, k)
    # linear extension: elements with fewer predecessors first
    below = {a: [b for b in dom if b != a and leq(b, a)] for a in dom}
    dom.sort(key=lambda a: (len(below[a]), str(a)))
    above_in_cod = {v: [w for w in cod if leq(v, w)] for v in cod}
    results = []
    table: dict = {}

    def extend(i: int):
        if i == len(dom):
            results.append(fun_from_table(dict(table), sigma))
            _check_cap(len(results), sigma, k)
            return
        a = dom[i]
        lower = bottom(sigma.res)
        for b in below[a]:
            lower = join(lower, table[b])
            if lower is None:
                return
        for v in above_in_cod[lower] if lower in above_in_cod else ():
            table[a] = v
            extend(i + 1)
        table.pop(a, None)

    extend(0)
    return results


# ---------------------------------------------------------------- projection

def project(u: Element, k: int) -> Element:
    """The largest element of rank at most ``k`` below ``u``."""
    if is_bottom(u) or k < 0:
        return _bottom_like(u)
    return _project(u, k)


@lru_cache(maxsize=None)
def _project(u: Element, k: int) -> Element:
    if k <= 0 or is_bottom(u):
        return _bottom_like(u)
    if isinstance(u, UnitBot):
        return u
    if isinstance(u, PairE):
        return PairE(_project(u.left, k), _project(u.right, k))
    if isinstance(u, SumL):
        return sum_left(_project(u.body, k))
    if isinstance(u, SumR):
        return sum_right(_project(u.body, k))
    if isinstance(u, LiftUp):
        return LiftUp(_project(u.body, k - 1))
    if isinstance(u, FoldE):
        return FoldE(_project(u.body, k - 1))
    if isinstance(u, LowerSet):
        return lower_set(_project(m, k - 1) for m in u.members)
    if isinstance(u, UpperSet):
        return upper_set(_project(m, k - 1) for m in u.members)
    if isinstance(u, StepFun):
        table = {a: _project(apply(u, a), k) for a in enumerate_elements(u.ty.arg, k)}
        return fun_from_table(table, u.ty)
    raise TypeMismatch(f"unexpected element {u!r}")


def _bottom_like(u: Element) -> Element:
    if isinstance(u, (UnitBot, SumBot, SumL, SumR)):
        return UNIT_BOT if isinstance(u, UnitBot) else SUM_BOT
    if isinstance(u, (LiftBot, LiftUp)):
        return LIFT_BOT
    if isinstance(u, PairE):
        return PairE(_bottom_like(u.left), _bottom_like(u.right))
    if isinstance(u, StepFun):
        return StepFun(frozenset(), u.ty)
    if isinstance(u, LowerSet):
        return LowerSet(frozenset([_bottom_like(next(iter(u.members)))]))
    if isinstance(u, UpperSet):
        return UpperSet(frozenset([_bottom_like(next(iter(u.members)))]))
    if isinstance(u, FoldE):
        return FoldE(_bottom_like(u.body))
    raise TypeMismatch(f"unexpected element {u!r}")


# ---------------------------------------------------------------- satisfaction

def sat(u: Element, phi: Formula, sigma: Type) -> bool:
    """Membership of ``u`` in the denotation of ``phi``, by direct recursion."""
    return _sat(u, phi, sigma)


@lru_cache(maxsize=None)
def _sat(u: Element, phi: Formula, sigma: Type) -> bool:
    if isinstance(phi, And):
        return all(_sat(u, a, sigma) for a in phi.args)
    if isinstance(phi, Or):
        return any(_sat(u, a, sigma) for a in phi.args)
    if isinstance(sigma, Rec):
        return _sat(u.body, phi, unfold(sigma))
    if isinstance(phi, PairF):
        return _sat(u.left, phi.left, sigma.left) and _sat(u.right, phi.right, sigma.right)
    if isinstance(phi, ArrowF):
        from .formulas import rank as frank
        r = frank(phi.arg, sigma.arg)
        return all(
            _sat(apply(u, x), phi.res, sigma.res)
            for x in enumerate_elements(sigma.arg, r)
            if _sat(x, phi.arg, sigma.arg)
        )
    if isinstance(phi, InL):
        if _sat(bottom(sigma.left), phi.body, sigma.left):
            return True
        return isinstance(u, SumL) and _sat(u.body, phi.body, sigma.left)
    if isinstance(phi, InR):
        if _sat(bottom(sigma.right), phi.body, sigma.right):
            return True
        return isinstance(u, SumR) and _sat(u.body, phi.body, sigma.right)
    if isinstance(phi, LiftF):
        return isinstance(u, LiftUp) and _sat(u.body, phi.body, sigma.body)
    if isinstance(phi, BoxF):
        return all(_sat(m, phi.body, sigma.body) for m in u.members)
    if isinstance(phi, DiaF):
        return any(_sat(m, phi.body, sigma.body) for m in u.members)
    raise TypeMismatch(f"formula {phi} does not fit type {sigma}")


def defining_formula(u: Element, sigma: Type) -> Formula:
    """A prime formula whose denotation is exactly the up-set of ``u``."""
    if is_bottom(u):
        return TOP
    if isinstance(sigma, Rec):
        return defining_formula(u.body, unfold(sigma))
    if isinstance(u, PairE):
        return PairF(defining_formula(u.left, sigma.left), defining_formula(u.right, sigma.right))
    if isinstance(u, StepFun):
        return conj_list(
            ArrowF(defining_formula(a, sigma.arg), defining_formula(b, sigma.res))
            for a, b in sorted_steps(u)
        )
    if isinstance(u, SumL):
        return InL(defining_formula(u.body, sigma.left))
    if isinstance(u, SumR):
        return InR(defining_formula(u.body, sigma.right))
    if isinstance(u, LiftUp):
        return LiftF(defining_formula(u.body, sigma.body))
    if isinstance(u, UpperSet):
        return BoxF(disj_list(defining_formula(m, sigma.body) for m in u.members))
    if isinstance(u, LowerSet):
        return conj_list(DiaF(defining_formula(m, sigma.body)) for m in u.members)
    raise TypeMismatch(f"element {u} does not fit type {sigma}")


def minsat(phi: Formula, sigma: Type) -> list:
    """Minimal elements generating the denotation of ``phi``."""
    from .logic import minsat as _minsat
    return _minsat(phi, sigma)


def fits(u: Element, sigma: Type) -> bool:
    """Whether ``u`` is an element of type ``sigma``."""
    if isinstance(sigma, Rec):
        return isinstance(u, FoldE) and fits(u.body, unfold(sigma))
    if isinstance(sigma, Unit):
        return isinstance(u, UnitBot)
    if isinstance(sigma, Prod):
        return isinstance(u, PairE) and fits(u.left, sigma.left) and fits(u.right, sigma.right)
    if isinstance(sigma, Fun):
        return isinstance(u, StepFun) and u.ty == sigma
    if isinstance(sigma, CoSum):
        if isinstance(u, SumL):
            return fits(u.body, sigma.left)
        if isinstance(u, SumR):
            return fits(u.body, sigma.right)
        return isinstance(u, SumBot)
    if isinstance(sigma, Lift):
        return isinstance(u, LiftBot) or (isinstance(u, LiftUp) and fits(u.body, sigma.body))
    if isinstance(sigma, Lower):
        return isinstance(u, LowerSet) and all(fits(m, sigma.body) for m in u.members)
    if isinstance(sigma, Upper):
        return isinstance(u, UpperSet) and all(fits(m, sigma.body) for m in u.members)
    return False
