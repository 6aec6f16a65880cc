"""Type expressions of the metalanguage.

Recursive types are kept in a canonical form: every ``Rec`` binder is named
``t<h>`` where ``h`` is the nesting height of ``Rec`` nodes inside its body.
The name depends only on the subtree, so canonical types compare by plain
structural equality, and binders along any path are distinct.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Union

from .errors import ParseError, TypeMismatch
from .sexpr import SExpr, dumps, parse


@dataclass(frozen=True)
class Unit:
    def __str__(self) -> str:
        return "1"


@dataclass(frozen=True)
class Prod:
    left: "Type"
    right: "Type"

    def __str__(self) -> str:
        return f"(x {self.left} {self.right})"


@dataclass(frozen=True)
class Fun:
    arg: "Type"
    res: "Type"

    def __str__(self) -> str:
        return f"(-> {self.arg} {self.res})"


@dataclass(frozen=True)
class CoSum:
    left: "Type"
    right: "Type"

    def __str__(self) -> str:
        return f"(+ {self.left} {self.right})"


@dataclass(frozen=True)
class Lift:
    body: "Type"

    def __str__(self) -> str:
        return f"(lift {self.body})"


@dataclass(frozen=True)
class Upper:
    body: "Type"

    def __str__(self) -> str:
        return f"(pu {self.body})"


@dataclass(frozen=True)
class Lower:
    body: "Type"

    def __str__(self) -> str:
        return f"(pl {self.body})"


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Rec:
    binder: str
    body: "Type"

    def __str__(self) -> str:
        return f"(rec {self.binder} {self.body})"


Type = Union[Unit, Prod, Fun, CoSum, Lift, Upper, Lower, Var, Rec]

UNIT = Unit()
SIERPINSKI = Lift(UNIT)
BOOL = CoSum(SIERPINSKI, SIERPINSKI)

_BINARY = {"x": Prod, "->": Fun, "+": CoSum}
_UNARY = {"lift": Lift, "pu": Upper, "pl": Lower}


def free_vars(ty: Type) -> frozenset[str]:
    if isinstance(ty, Var):
        return frozenset([ty.name])
    if isinstance(ty, Unit):
        return frozenset()
    if isinstance(ty, (Prod, Fun, CoSum)):
        a, b = _children(ty)
        return free_vars(a) | free_vars(b)
    if isinstance(ty, (Lift, Upper, Lower)):
        return free_vars(ty.body)
    if isinstance(ty, Rec):
        return free_vars(ty.body) - {ty.binder}
    raise TypeError(ty)


def _children(ty):
    if isinstance(ty, (Prod, CoSum)):
        return ty.left, ty.right
    return ty.arg, ty.res


def subst(ty: Type, name: str, repl: Type) -> Type:
    """Substitute a closed type for a variable."""
    if isinstance(ty, Var):
        return repl if ty.name == name else ty
    if isinstance(ty, Unit):
        return ty
    if isinstance(ty, (Prod, CoSum)):
        return type(ty)(subst(ty.left, name, repl), subst(ty.right, name, repl))
    if isinstance(ty, Fun):
        return Fun(subst(ty.arg, name, repl), subst(ty.res, name, repl))
    if isinstance(ty, (Lift, Upper, Lower)):
        return type(ty)(subst(ty.body, name, repl))
    if isinstance(ty, Rec):
        if ty.binder == name:
            return ty
        return Rec(ty.binder, subst(ty.body, name, repl))
    raise TypeError(ty)


def _rec_height(ty: Type) -> int:
    if isinstance(ty, (Unit, Var)):
        return 0
    if isinstance(ty, (Prod, Fun, CoSum)):
        a, b = _children(ty)
        return max(_rec_height(a), _rec_height(b))
    if isinstance(ty, (Lift, Upper, Lower)):
        return _rec_height(ty.body)
    return 1 + _rec_height(ty.body)


def canon(ty: Type, env: dict[str, str] | None = None) -> Type:
    """Rename every Rec binder to its height-indexed canonical name."""
    env = env or {}
    if isinstance(ty, Var):
        return Var(env.get(ty.name, ty.name))
    if isinstance(ty, Unit):
        return ty
    if isinstance(ty, (Prod, CoSum)):
        return type(ty)(canon(ty.left, env), canon(ty.right, env))
    if isinstance(ty, Fun):
        return Fun(canon(ty.arg, env), canon(ty.res, env))
    if isinstance(ty, (Lift, Upper, Lower)):
        return type(ty)(canon(ty.body, env))
    name = f"t{_rec_height(ty.body)}"
    return Rec(name, canon(ty.body, {**env, ty.binder: name}))


@lru_cache(maxsize=None)
def unfold(ty: Rec) -> Type:
    """One-step unfolding ``σ[rec t.σ / t]`` of a recursive type."""
    if not isinstance(ty, Rec):
        raise TypeMismatch(f"cannot unfold non-recursive type {ty}")
    return canon(subst(ty.body, ty.binder, ty))


def head(ty: Type) -> Type:
    """Unfold outer Rec layers until a constructor is exposed."""
    seen = 0
    while isinstance(ty, Rec):
        ty = unfold(ty)
        seen += 1
        if seen > 64:
            raise TypeMismatch("unguarded recursive type")
    return ty


def _guarded(ty: Type, name: str, guarded: bool) -> bool:
    """True iff every free occurrence of ``name`` sits under a guarding constructor."""
    if isinstance(ty, Var):
        return ty.name != name or guarded
    if isinstance(ty, Unit):
        return True
    if isinstance(ty, Prod):
        return _guarded(ty.left, name, guarded) and _guarded(ty.right, name, guarded)
    if isinstance(ty, (Fun, CoSum)):
        a, b = _children(ty)
        return _guarded(a, name, True) and _guarded(b, name, True)
    if isinstance(ty, (Lift, Upper, Lower)):
        return _guarded(ty.body, name, True)
    if ty.binder == name:
        return True
    return _guarded(ty.body, name, guarded)


def check_type(ty: Type) -> None:
    """Raise ParseError unless ``ty`` is closed and all recursion is guarded."""
    fv = free_vars(ty)
    if fv:
        raise ParseError(f"free type variables {sorted(fv)}")
    _check_guards(ty)


def _check_guards(ty: Type) -> None:
    if isinstance(ty, Rec):
        if not _guarded(ty.body, ty.binder, False):
            raise ParseError(f"unguarded recursion in {ty}")
        _check_guards(ty.body)
    elif isinstance(ty, (Prod, Fun, CoSum)):
        for c in _children(ty):
            _check_guards(c)
    elif isinstance(ty, (Lift, Upper, Lower)):
        _check_guards(ty.body)


def from_sexpr(node: SExpr) -> Type:
    def go(n: SExpr) -> Type:
        if isinstance(n, str):
            return UNIT if n == "1" else Var(n)
        if not n:
            raise ParseError("empty type expression")
        tag, *args = n
        if tag in _BINARY and len(args) == 2:
            return _BINARY[tag](go(args[0]), go(args[1]))
        if tag in _UNARY and len(args) == 1:
            return _UNARY[tag](go(args[0]))
        if tag == "rec" and len(args) == 2 and isinstance(args[0], str):
            return Rec(args[0], go(args[1]))
        raise ParseError(f"bad type expression {dumps(n)}")

    ty = go(node)
    check_type(ty)
    return canon(ty)


def parse_type(text: str) -> Type:
    return from_sexpr(parse(text))


def depth(ty: Type) -> int:
    """Constructor nesting depth, counting a Rec as one layer."""
    if isinstance(ty, (Unit, Var)):
        return 0
    if isinstance(ty, (Prod, Fun, CoSum)):
        a, b = _children(ty)
        return 1 + max(depth(a), depth(b))
    return 1 + depth(ty.body)
