"""Typed propositional formulas of the domain logic."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Union

from .errors import ParseError
from .sexpr import SExpr, dumps, parse
from .types import CoSum, Fun, Lift, Lower, Prod, Rec, Type, Upper, unfold


@dataclass(frozen=True)
class And:
    args: tuple = ()

    def __str__(self) -> str:
        return "tt" if not self.args else "(and " + " ".join(map(str, self.args)) + ")"


@dataclass(frozen=True)
class Or:
    args: tuple = ()

    def __str__(self) -> str:
        return "ff" if not self.args else "(or " + " ".join(map(str, self.args)) + ")"


@dataclass(frozen=True)
class PairF:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return f"(pair {self.left} {self.right})"


@dataclass(frozen=True)
class ArrowF:
    arg: "Formula"
    res: "Formula"

    def __str__(self) -> str:
        return f"(arrow {self.arg} {self.res})"


@dataclass(frozen=True)
class InL:
    body: "Formula"

    def __str__(self) -> str:
        return f"(inl {self.body})"


@dataclass(frozen=True)
class InR:
    body: "Formula"

    def __str__(self) -> str:
        return f"(inr {self.body})"


@dataclass(frozen=True)
class LiftF:
    body: "Formula"

    def __str__(self) -> str:
        return f"(lift {self.body})"


@dataclass(frozen=True)
class BoxF:
    body: "Formula"

    def __str__(self) -> str:
        return f"(box {self.body})"


@dataclass(frozen=True)
class DiaF:
    body: "Formula"

    def __str__(self) -> str:
        return f"(dia {self.body})"


Formula = Union[And, Or, PairF, ArrowF, InL, InR, LiftF, BoxF, DiaF]

TOP = And(())
BOT = Or(())
# (t)_bot, the convergence formula, and the two truth values of B
STAR = LiftF(TOP)
TRUE_F = InL(STAR)
FALSE_F = InR(STAR)

_UNARY = {"inl": InL, "inr": InR, "lift": LiftF, "box": BoxF, "dia": DiaF}
_BINARY = {"pair": PairF, "arrow": ArrowF}


@lru_cache(maxsize=None)
def key(phi: Formula) -> str:
    return str(phi)


def _flat(cls, args: Iterable[Formula]) -> tuple:
    out = set()
    for a in args:
        if isinstance(a, cls):
            out.update(a.args)
        else:
            out.add(a)
    return tuple(sorted(out, key=key))


def conj(*args: Formula) -> Formula:
    """Flattened, sorted conjunction; a singleton collapses to its member."""
    items = _flat(And, args)
    if any(a == BOT for a in items):
        return BOT
    return items[0] if len(items) == 1 else And(items)


def disj(*args: Formula) -> Formula:
    items = _flat(Or, args)
    if any(a == TOP for a in items):
        return TOP
    return items[0] if len(items) == 1 else Or(items)


def conj_list(args: Iterable[Formula]) -> Formula:
    return conj(*args)


def disj_list(args: Iterable[Formula]) -> Formula:
    return disj(*args)


def conjuncts(phi: Formula) -> tuple:
    return phi.args if isinstance(phi, And) else (phi,)


def disjuncts(phi: Formula) -> tuple:
    return phi.args if isinstance(phi, Or) else (phi,)


def from_sexpr(node: SExpr) -> Formula:
    if isinstance(node, str):
        if node == "tt":
            return TOP
        if node == "ff":
            return BOT
        raise ParseError(f"unknown formula atom {node!r}")
    if not node:
        raise ParseError("empty formula")
    tag, *args = node
    if tag == "and":
        return And(tuple(from_sexpr(a) for a in args)) if len(args) != 1 else from_sexpr(args[0])
    if tag == "or":
        return Or(tuple(from_sexpr(a) for a in args)) if len(args) != 1 else from_sexpr(args[0])
    if tag in _UNARY and len(args) == 1:
        return _UNARY[tag](from_sexpr(args[0]))
    if tag in _BINARY and len(args) == 2:
        return _BINARY[tag](from_sexpr(args[0]), from_sexpr(args[1]))
    raise ParseError(f"bad formula {dumps(node)}")


def parse_formula(text: str) -> Formula:
    return normalize_connectives(from_sexpr(parse(text)))


def normalize_connectives(phi: Formula) -> Formula:
    """Flatten and sort every And/Or in the formula."""
    if isinstance(phi, And):
        return conj_list(normalize_connectives(a) for a in phi.args) if phi.args else TOP
    if isinstance(phi, Or):
        return disj_list(normalize_connectives(a) for a in phi.args) if phi.args else BOT
    if isinstance(phi, (PairF, ArrowF)):
        a, b = children(phi)
        return type(phi)(normalize_connectives(a), normalize_connectives(b))
    return type(phi)(normalize_connectives(phi.body))


def children(phi: Formula) -> tuple:
    if isinstance(phi, (And, Or)):
        return phi.args
    if isinstance(phi, PairF):
        return (phi.left, phi.right)
    if isinstance(phi, ArrowF):
        return (phi.arg, phi.res)
    return (phi.body,)


def size(phi: Formula) -> int:
    return 1 + sum(size(c) for c in children(phi))


def well_formed(phi: Formula, sigma: Type) -> bool:
    if isinstance(phi, (And, Or)):
        return all(well_formed(a, sigma) for a in phi.args)
    if isinstance(sigma, Rec):
        return well_formed(phi, unfold(sigma))
    if isinstance(phi, PairF):
        return isinstance(sigma, Prod) and well_formed(phi.left, sigma.left) and well_formed(phi.right, sigma.right)
    if isinstance(phi, ArrowF):
        return isinstance(sigma, Fun) and well_formed(phi.arg, sigma.arg) and well_formed(phi.res, sigma.res)
    if isinstance(phi, InL):
        return isinstance(sigma, CoSum) and well_formed(phi.body, sigma.left)
    if isinstance(phi, InR):
        return isinstance(sigma, CoSum) and well_formed(phi.body, sigma.right)
    if isinstance(phi, LiftF):
        return isinstance(sigma, Lift) and well_formed(phi.body, sigma.body)
    if isinstance(phi, BoxF):
        return isinstance(sigma, Upper) and well_formed(phi.body, sigma.body)
    if isinstance(phi, DiaF):
        return isinstance(sigma, Lower) and well_formed(phi.body, sigma.body)
    return False


def rank(phi: Formula, sigma: Type) -> int:
    """Structural rank: the element rank at which satisfaction is decided exactly."""
    if isinstance(phi, (And, Or)):
        return max((rank(a, sigma) for a in phi.args), default=0)
    if isinstance(sigma, Rec):
        return 1 + rank(phi, unfold(sigma))
    if isinstance(phi, PairF):
        return max(rank(phi.left, sigma.left), rank(phi.right, sigma.right))
    if isinstance(phi, ArrowF):
        return max(rank(phi.arg, sigma.arg), rank(phi.res, sigma.res))
    if isinstance(phi, InL):
        return rank(phi.body, sigma.left)
    if isinstance(phi, InR):
        return rank(phi.body, sigma.right)
    return 1 + rank(phi.body, sigma.body)
