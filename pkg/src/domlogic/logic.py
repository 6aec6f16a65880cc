"""Syntactic meta-predicates, consistent disjunctive normal forms and entailment.

Everything here is computed from the syntax of formulas. The element
constructions are used only to compare prime formulas once they are in
normal form, which is how entailment between normal forms is decided.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

from . import elements as el
from .errors import BlowupLimit
from .formulas import (
    BOT, TOP, And, ArrowF, BoxF, DiaF, Formula, InL, InR, LiftF, Or, PairF,
    conj_list, conjuncts, disj_list, disjuncts, key, well_formed,
)
from .types import CoSum, Fun, Lift, Lower, Prod, Rec, Type, Unit, Upper, unfold

NODE_CAP = 1_000_000
FUN_CON_CAP = 16


def _head(sigma: Type) -> Type:
    while isinstance(sigma, Rec):
        sigma = unfold(sigma)
    return sigma


# ---------------------------------------------------------------- PNF, C, T

def is_pnf(phi: Formula) -> bool:
    """Disjunctions occur only immediately under a box."""
    if isinstance(phi, Or):
        return False
    if isinstance(phi, And):
        return all(is_pnf(a) for a in phi.args)
    if isinstance(phi, BoxF):
        return all(is_pnf(d) for d in disjuncts(phi.body))
    if isinstance(phi, (PairF, ArrowF)):
        a, b = (phi.left, phi.right) if isinstance(phi, PairF) else (phi.arg, phi.res)
        return is_pnf(a) and is_pnf(b)
    return is_pnf(phi.body)


def con(phi: Formula, sigma: Type) -> bool:
    """The consistency predicate C, defined on conjunctions of PNFs."""
    items = [c for a in conjuncts(phi) for c in conjuncts(a)]
    if not items:
        return True
    ty = _head(sigma)
    if isinstance(ty, Unit):
        return True
    if isinstance(ty, Prod):
        return con(conj_list(p.left for p in items), ty.left) and con(
            conj_list(p.right for p in items), ty.right)
    if isinstance(ty, Fun):
        if len(items) > FUN_CON_CAP:
            raise BlowupLimit(f"consistency of {len(items)} arrows exceeds the cap of {FUN_CON_CAP}")
        for r in range(1, len(items) + 1):
            for sub in itertools.combinations(items, r):
                if con(conj_list(p.arg for p in sub), ty.arg) and not con(
                        conj_list(p.res for p in sub), ty.res):
                    return False
        return True
    if isinstance(ty, CoSum):
        lefts = conj_list(p.body for p in items if isinstance(p, InL))
        rights = conj_list(p.body for p in items if isinstance(p, InR))
        if term(lefts, ty.left) and term(rights, ty.right):
            return False
        return con(lefts, ty.left) and con(rights, ty.right)
    if isinstance(ty, Lift):
        return con(conj_list(p.body for p in items), ty.body)
    if isinstance(ty, Lower):
        return all(con(p.body, ty.body) for p in items)
    if isinstance(ty, Upper):
        choices = [disjuncts(p.body) for p in items]
        return any(con(conj_list(f), ty.body) for f in itertools.product(*choices))
    raise TypeError(sigma)


def term(phi: Formula, sigma: Type) -> bool:
    """The termination predicate T: bottom does not satisfy ``phi``."""
    if isinstance(phi, And):
        return any(term(a, sigma) for a in phi.args)
    ty = _head(sigma)
    if isinstance(phi, PairF):
        return term(phi.left, ty.left) or term(phi.right, ty.right)
    if isinstance(phi, ArrowF):
        return con(phi.arg, ty.arg) and term(phi.res, ty.res)
    if isinstance(phi, InL):
        return term(phi.body, ty.left)
    if isinstance(phi, InR):
        return term(phi.body, ty.right)
    if isinstance(phi, LiftF):
        return True
    if isinstance(phi, BoxF):
        return all(term(d, ty.body) for d in disjuncts(phi.body))
    if isinstance(phi, DiaF):
        return term(phi.body, ty.body)
    if isinstance(phi, Or):
        return all(term(d, sigma) for d in phi.args)
    raise TypeError(phi)


def is_cpnf(phi: Formula, sigma: Type) -> bool:
    """PNF whose every PNF subformula is consistent."""
    return is_pnf(phi) and _all_consistent(phi, sigma)


def _all_consistent(phi: Formula, sigma: Type) -> bool:
    if not con(phi, sigma):
        return False
    ty = _head(sigma)
    for p in conjuncts(phi):
        if isinstance(p, PairF):
            ok = _all_consistent(p.left, ty.left) and _all_consistent(p.right, ty.right)
        elif isinstance(p, ArrowF):
            ok = _all_consistent(p.arg, ty.arg) and _all_consistent(p.res, ty.res)
        elif isinstance(p, InL):
            ok = _all_consistent(p.body, ty.left)
        elif isinstance(p, InR):
            ok = _all_consistent(p.body, ty.right)
        elif isinstance(p, (LiftF, DiaF)):
            ok = _all_consistent(p.body, ty.body)
        elif isinstance(p, BoxF):
            ds = disjuncts(p.body)
            ok = bool(ds) and all(_all_consistent(d, ty.body) for d in ds)
        else:
            ok = True
        if not ok:
            return False
    return True


def is_cdnf(phi: Formula, sigma: Type) -> bool:
    return all(is_cpnf(d, sigma) for d in disjuncts(phi))


@dataclass(frozen=True)
class MetaFlags:
    pnf: bool
    con: bool
    term: bool
    cpnf: bool
    sharp: bool
    down: bool


def meta_predicates(phi: Formula, sigma: Type) -> MetaFlags:
    pnf = is_pnf(phi)
    if all(is_pnf(d) for d in disjuncts(phi)):
        ds = disjuncts(phi)
    else:
        ds = disjuncts(to_cdnf(phi, sigma))
    cons = [con(d, sigma) for d in ds]
    terms = [term(d, sigma) for d in ds]
    return MetaFlags(
        pnf=pnf,
        con=any(cons),
        term=all(terms),
        cpnf=pnf and is_cpnf(phi, sigma),
        sharp=not any(cons),
        down=all(terms),
    )


# ---------------------------------------------------------------- CDNF

class _Budget:
    def __init__(self, cap: int):
        self.cap = cap
        self.used = 0

    def spend(self, n: int = 1) -> None:
        self.used += n
        if self.used > self.cap:
            raise BlowupLimit(f"normal form exceeded {self.cap} nodes")


def to_cdnf(phi: Formula, sigma: Type, cap: int = NODE_CAP) -> Formula:
    """A disjunction of consistent prime formulas equal to ``phi``."""
    primes = _cdnf(phi, sigma, _Budget(cap))
    return Or(tuple(sorted(primes, key=key)))


def primes_of(phi: Formula, sigma: Type, cap: int = NODE_CAP) -> list:
    return _cdnf(phi, sigma, _Budget(cap))


def _cdnf(phi: Formula, sigma: Type, budget: _Budget) -> list:
    budget.spend()
    if isinstance(phi, Or):
        out = []
        for a in phi.args:
            out.extend(_cdnf(a, sigma, budget))
        return _absorb(out, sigma)
    if isinstance(phi, And):
        acc = [TOP]
        for a in phi.args:
            parts = _cdnf(a, sigma, budget)
            nxt = []
            for p, q in itertools.product(acc, parts):
                budget.spend()
                m = _meet(p, q, sigma, budget)
                if m is not None:
                    nxt.append(m)
            acc = _absorb(nxt, sigma)
            if not acc:
                return []
        return acc
    ty = _head(sigma)
    if isinstance(phi, PairF):
        out = []
        for c in _cdnf(phi.left, ty.left, budget):
            for d in _cdnf(phi.right, ty.right, budget):
                budget.spend()
                out.append(TOP if c == TOP and d == TOP else PairF(c, d))
        return _absorb(out, sigma)
    if isinstance(phi, ArrowF):
        cs = _cdnf(phi.arg, ty.arg, budget)
        ds = _cdnf(phi.res, ty.res, budget)
        # (\/c -> \/d) = /\_c \/_d (c -> d)
        acc = [()]
        for c in cs:
            options = [(c, d) for d in ds]
            if any(d == TOP or not term(d, ty.res) for d in ds):
                continue  # c -> t is t
            acc = [a + (o,) for a in acc for o in options]
            budget.spend(len(acc))
            if not acc:
                return []
        out = []
        for arrows in acc:
            f = conj_list(ArrowF(c, d) for c, d in arrows)
            if con(f, ty):
                out.append(f)
        return _absorb(out, sigma)
    if isinstance(phi, InL):
        return _absorb([_inject(InL, c, ty.left) for c in _cdnf(phi.body, ty.left, budget)], sigma)
    if isinstance(phi, InR):
        return _absorb([_inject(InR, c, ty.right) for c in _cdnf(phi.body, ty.right, budget)], sigma)
    if isinstance(phi, LiftF):
        return _absorb([LiftF(c) for c in _cdnf(phi.body, ty.body, budget)], sigma)
    if isinstance(phi, BoxF):
        cs = _cdnf(phi.body, ty.body, budget)
        box = _box(cs, ty.body)
        return [] if box is None else [box]
    if isinstance(phi, DiaF):
        return _absorb([TOP if c == TOP else DiaF(c) for c in _cdnf(phi.body, ty.body, budget)], sigma)
    raise TypeError(phi)


def _inject(ctor, c: Formula, sigma: Type) -> Formula:
    # a prime that bottom satisfies is t, and injecting t gives t
    return ctor(c) if term(c, sigma) else TOP


def _box(cs: list, sigma: Type) -> Optional[Formula]:
    if not cs:
        return None
    cs = _absorb(cs, sigma)
    if TOP in cs:
        return TOP
    return BoxF(disj_list(cs))


def _meet(p: Formula, q: Formula, sigma: Type, budget: _Budget) -> Optional[Formula]:
    """Conjunction of two consistent primes as a consistent prime, or None."""
    if p == TOP:
        return q
    if q == TOP:
        return p
    ty = _head(sigma)
    items = list(conjuncts(p)) + list(conjuncts(q))
    if isinstance(ty, Prod):
        gens = [x for x in items if x != TOP]
        left = _meet_all([x.left for x in gens], ty.left, budget)
        if left is None:
            return None
        right = _meet_all([x.right for x in gens], ty.right, budget)
        if right is None:
            return None
        return TOP if left == TOP and right == TOP else PairF(left, right)
    if isinstance(ty, Fun):
        f = conj_list(items)
        return f if con(f, ty) else None
    if isinstance(ty, CoSum):
        lefts = [x.body for x in items if isinstance(x, InL)]
        rights = [x.body for x in items if isinstance(x, InR)]
        if lefts and rights:
            return None
        ctor, sub, parts = (InL, ty.left, lefts) if lefts else (InR, ty.right, rights)
        m = _meet_all(parts, sub, budget)
        return None if m is None else _inject(ctor, m, sub)
    if isinstance(ty, Lift):
        m = _meet_all([x.body for x in items], ty.body, budget)
        return None if m is None else LiftF(m)
    if isinstance(ty, Upper):
        pairs = []
        for a, b in itertools.product(disjuncts(p.body), disjuncts(q.body)):
            budget.spend()
            m = _meet(a, b, ty.body, budget)
            if m is not None:
                pairs.append(m)
        return _box(pairs, ty.body)
    if isinstance(ty, Lower):
        bodies = _keep_strongest([x.body for x in items], ty.body)
        return conj_list(DiaF(b) for b in bodies)
    raise TypeError(sigma)


def _meet_all(ps: list, sigma: Type, budget: _Budget) -> Optional[Formula]:
    acc = TOP
    for p in ps:
        acc = _meet(acc, p, sigma, budget)
        if acc is None:
            return None
    return acc


def _absorb(ps: list, sigma: Type) -> list:
    """Drop primes whose denotation is contained in another's."""
    ps = list(dict.fromkeys(ps))
    elems = [prime_element(p, sigma) for p in ps]
    out = []
    for i, (p, u) in enumerate(zip(ps, elems)):
        dominated = any(
            j != i and el.leq(v, u) and (not el.leq(u, v) or j < i)
            for j, v in enumerate(elems)
        )
        if not dominated:
            out.append(p)
    return sorted(out, key=key)


def _keep_strongest(ps: list, sigma: Type) -> list:
    """Among diamond bodies keep those whose elements are maximal."""
    ps = list(dict.fromkeys(ps))
    elems = [prime_element(p, sigma) for p in ps]
    out = []
    for i, (p, u) in enumerate(zip(ps, elems)):
        dominated = any(
            j != i and el.leq(u, v) and (not el.leq(v, u) or j < i)
            for j, v in enumerate(elems)
        )
        if not dominated:
            out.append(p)
    return out


# ---------------------------------------------------------------- primes and elements

def prime_element(p: Formula, sigma: Type) -> Optional[el.Element]:
    """The generator of the principal up-set denoted by a prime formula."""
    if isinstance(p, And):
        acc = el.bottom(sigma)
        for a in p.args:
            u = prime_element(a, sigma)
            if u is None:
                return None
            acc = el.join(acc, u)
            if acc is None:
                return None
        return acc
    if isinstance(sigma, Rec):
        u = prime_element(p, unfold(sigma))
        return None if u is None else el.FoldE(u)
    if isinstance(p, PairF):
        a = prime_element(p.left, sigma.left)
        b = prime_element(p.right, sigma.right)
        return None if a is None or b is None else el.PairE(a, b)
    if isinstance(p, ArrowF):
        a = prime_element(p.arg, sigma.arg)
        if a is None:
            return el.bottom(sigma)
        b = prime_element(p.res, sigma.res)
        return None if b is None else el.step(a, b, sigma)
    if isinstance(p, InL):
        a = prime_element(p.body, sigma.left)
        return None if a is None else el.sum_left(a)
    if isinstance(p, InR):
        a = prime_element(p.body, sigma.right)
        return None if a is None else el.sum_right(a)
    if isinstance(p, LiftF):
        a = prime_element(p.body, sigma.body)
        return None if a is None else el.LiftUp(a)
    if isinstance(p, DiaF):
        a = prime_element(p.body, sigma.body)
        return None if a is None else el.LowerSet(frozenset([a]))
    if isinstance(p, BoxF):
        ms = [prime_element(d, sigma.body) for d in disjuncts(p.body)]
        ms = [m for m in ms if m is not None]
        return el.upper_set(ms) if ms else None
    raise TypeError(p)


def minsat(phi: Formula, sigma: Type) -> list:
    elems = [prime_element(p, sigma) for p in primes_of(phi, sigma)]
    elems = [u for u in elems if u is not None]
    return sorted(el.minimal(elems), key=str)


def entails(phi: Formula, psi: Formula, sigma: Type, cap: int = NODE_CAP) -> bool:
    """Decide phi <= psi through normal forms and prime elements."""
    return entailment_witness(phi, psi, sigma, cap) is None


def entailment_witness(phi: Formula, psi: Formula, sigma: Type,
                       cap: int = NODE_CAP) -> Optional[el.Element]:
    """A minimal element satisfying ``phi`` but not ``psi``, or None when phi <= psi."""
    left = [prime_element(p, sigma) for p in primes_of(phi, sigma, cap)]
    right = [prime_element(q, sigma) for q in primes_of(psi, sigma, cap)]
    right = [v for v in right if v is not None]
    for u in sorted((u for u in left if u is not None), key=str):
        if not any(el.leq(v, u) for v in right):
            return u
    return None


def equivalent(phi: Formula, psi: Formula, sigma: Type) -> bool:
    return entails(phi, psi, sigma) and entails(psi, phi, sigma)


def check_well_formed(phi: Formula, sigma: Type) -> None:
    from .errors import TypeMismatch
    if not well_formed(phi, sigma):
        raise TypeMismatch(f"formula {phi} is not well formed at {sigma}")
