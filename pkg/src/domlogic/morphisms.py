"""Morphism terms, their translation into lambda terms, and Hoare triples."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from . import elements as el
from .errors import ParseError, SortError
from .formulas import ArrowF, Formula, disj_list
from .sexpr import SExpr, dumps, parse
from .terms import (
    App, Cases, ExtendL, ExtendU, Fold, InjL, InjR, Lam, LetPair, LiftLet, Mu, Pair, SingletonL,
    SingletonU, Star, TensorL, TensorU, Term, UnionL, UnionU, Unfold, Up, Var, check, elaborate,
    eval_annotated,
)
from .types import from_sexpr as type_from_sexpr
from .types import UNIT, CoSum, Fun, Lift, Lower, Prod, Rec, Type, Upper, unfold


@dataclass(frozen=True)
class Id:
    ty: Type


@dataclass(frozen=True)
class Comp:
    first: "Morphism"
    second: "Morphism"


@dataclass(frozen=True)
class Terminal:
    ty: Type


@dataclass(frozen=True)
class Pairing:
    left: "Morphism"
    right: "Morphism"


@dataclass(frozen=True)
class P:
    left: Type
    right: Type


@dataclass(frozen=True)
class Q:
    left: Type
    right: Type


@dataclass(frozen=True)
class Curry:
    f: "Morphism"


@dataclass(frozen=True)
class Ap:
    arg: Type
    res: Type


@dataclass(frozen=True)
class L:
    left: Type
    right: Type


@dataclass(frozen=True)
class R:
    left: Type
    right: Type


@dataclass(frozen=True)
class Copair:
    left: "Morphism"
    right: "Morphism"


@dataclass(frozen=True)
class UpM:
    ty: Type


@dataclass(frozen=True)
class LiftM:
    f: "Morphism"


@dataclass(frozen=True)
class Strict:
    f: "Morphism"


@dataclass(frozen=True)
class SglL:
    ty: Type


@dataclass(frozen=True)
class SglU:
    ty: Type


@dataclass(frozen=True)
class DagL:
    f: "Morphism"


@dataclass(frozen=True)
class DagU:
    f: "Morphism"


@dataclass(frozen=True)
class PlusL:
    ty: Type


@dataclass(frozen=True)
class PlusU:
    ty: Type


@dataclass(frozen=True)
class TenL:
    left: Type
    right: Type


@dataclass(frozen=True)
class TenU:
    left: Type
    right: Type


@dataclass(frozen=True)
class FoldM:
    ty: Rec


@dataclass(frozen=True)
class UnfoldM:
    ty: Rec


@dataclass(frozen=True)
class Y:
    ty: Type


Morphism = Union[Id, Comp, Terminal, Pairing, P, Q, Curry, Ap, L, R, Copair, UpM, LiftM, Strict,
                 SglL, SglU, DagL, DagU, PlusL, PlusU, TenL, TenU, FoldM, UnfoldM, Y]


_TYPE_ARGS = {
    "id": (Id, 1), "one": (Terminal, 1), "p": (P, 2), "q": (Q, 2), "ap": (Ap, 2), "l": (L, 2),
    "r": (R, 2), "up": (UpM, 1), "sglL": (SglL, 1), "sglU": (SglU, 1), "plusL": (PlusL, 1),
    "plusU": (PlusU, 1), "tenL": (TenL, 2), "tenU": (TenU, 2), "fold": (FoldM, 1),
    "unfold": (UnfoldM, 1), "Y": (Y, 1),
}
_MORPH_ARGS = {
    "comp": (Comp, 2), "pairing": (Pairing, 2), "copair": (Copair, 2), "curry": (Curry, 1),
    "lift": (LiftM, 1), "strict": (Strict, 1), "dagL": (DagL, 1), "dagU": (DagU, 1),
}


def parse_morphism(text: str) -> Morphism:
    """Read a morphism term such as ``(comp (p 1 (lift 1)) (id 1))``.

    ``(comp f g)`` means f followed by g.
    """
    return morphism_from_sexpr(parse(text))


def morphism_from_sexpr(node: SExpr) -> Morphism:
    if not isinstance(node, list) or not node or not isinstance(node[0], str):
        raise ParseError(f"bad morphism term {dumps(node)}")
    tag, *args = node
    if tag in _TYPE_ARGS:
        cls, n = _TYPE_ARGS[tag]
        if len(args) != n:
            raise ParseError(f"({tag} ...) takes {n} type arguments")
        tys = [type_from_sexpr(a) for a in args]
        if cls in (FoldM, UnfoldM) and not isinstance(tys[0], Rec):
            raise ParseError(f"({tag} ...) needs a recursive type")
        return cls(*tys)
    if tag in _MORPH_ARGS:
        cls, n = _MORPH_ARGS[tag]
        if len(args) != n:
            raise ParseError(f"({tag} ...) takes {n} morphism arguments")
        return cls(*(morphism_from_sexpr(a) for a in args))
    raise ParseError(f"unknown morphism constructor {tag!r}")


def sort_of(f: Morphism) -> tuple:
    """The morphism type (source, target) of ``f``."""
    if isinstance(f, Id):
        return f.ty, f.ty
    if isinstance(f, Comp):
        a, b = sort_of(f.first)
        c, d = sort_of(f.second)
        if b != c:
            raise SortError(f"cannot compose ({a},{b}) with ({c},{d})")
        return a, d
    if isinstance(f, Terminal):
        return f.ty, UNIT
    if isinstance(f, Pairing):
        a, b = sort_of(f.left)
        c, d = sort_of(f.right)
        if a != c:
            raise SortError(f"pairing sources differ: {a} and {c}")
        return a, Prod(b, d)
    if isinstance(f, P):
        return Prod(f.left, f.right), f.left
    if isinstance(f, Q):
        return Prod(f.left, f.right), f.right
    if isinstance(f, Curry):
        a, c = sort_of(f.f)
        if not isinstance(a, Prod):
            raise SortError(f"curry needs a product source, got {a}")
        return a.left, Fun(a.right, c)
    if isinstance(f, Ap):
        return Prod(Fun(f.arg, f.res), f.arg), f.res
    if isinstance(f, L):
        return f.left, CoSum(f.left, f.right)
    if isinstance(f, R):
        return f.right, CoSum(f.left, f.right)
    if isinstance(f, Copair):
        a, b = sort_of(f.left)
        c, d = sort_of(f.right)
        if b != d:
            raise SortError(f"copairing targets differ: {b} and {d}")
        return CoSum(a, c), b
    if isinstance(f, UpM):
        return f.ty, Lift(f.ty)
    if isinstance(f, LiftM):
        a, b = sort_of(f.f)
        return Lift(a), b
    if isinstance(f, Strict):
        return sort_of(f.f)
    if isinstance(f, SglL):
        return f.ty, Lower(f.ty)
    if isinstance(f, SglU):
        return f.ty, Upper(f.ty)
    if isinstance(f, (DagL, DagU)):
        cls = Lower if isinstance(f, DagL) else Upper
        a, b = sort_of(f.f)
        if not isinstance(b, cls):
            raise SortError(f"extension needs a powerdomain target, got {b}")
        return cls(a), b
    if isinstance(f, PlusL):
        return Prod(Lower(f.ty), Lower(f.ty)), Lower(f.ty)
    if isinstance(f, PlusU):
        return Prod(Upper(f.ty), Upper(f.ty)), Upper(f.ty)
    if isinstance(f, TenL):
        return Prod(Lower(f.left), Lower(f.right)), Lower(Prod(f.left, f.right))
    if isinstance(f, TenU):
        return Prod(Upper(f.left), Upper(f.right)), Upper(Prod(f.left, f.right))
    if isinstance(f, FoldM):
        return unfold(f.ty), f.ty
    if isinstance(f, UnfoldM):
        return f.ty, unfold(f.ty)
    if isinstance(f, Y):
        return Fun(f.ty, f.ty), f.ty
    raise SortError(f"unknown morphism {f!r}")


class _Names:
    def __init__(self):
        self.n = 0

    def __call__(self, base: str) -> str:
        self.n += 1
        return f"{base}{self.n}"


def translate(f: Morphism) -> Term:
    """The lambda term of type source -> target denoting ``f``."""
    sort_of(f)
    return _tr(f, _Names())


def _tr(f: Morphism, fresh: _Names) -> Term:
    src, tgt = sort_of(f)
    if isinstance(f, Id):
        x = fresh("x")
        return Lam(x, src, Var(x))
    if isinstance(f, Comp):
        x = fresh("x")
        return Lam(x, src, App(_tr(f.second, fresh), App(_tr(f.first, fresh), Var(x))))
    if isinstance(f, Terminal):
        return Lam(fresh("x"), src, Star())
    if isinstance(f, Pairing):
        x = fresh("x")
        return Lam(x, src, Pair(App(_tr(f.left, fresh), Var(x)), App(_tr(f.right, fresh), Var(x))))
    if isinstance(f, (P, Q)):
        z, x, y = fresh("z"), fresh("x"), fresh("y")
        return Lam(z, src, LetPair(Var(z), x, y, Var(x if isinstance(f, P) else y)))
    if isinstance(f, Curry):
        x, y = fresh("x"), fresh("y")
        pair_ty = sort_of(f.f)[0]
        return Lam(x, pair_ty.left,
                   Lam(y, pair_ty.right, App(_tr(f.f, fresh), Pair(Var(x), Var(y)))))
    if isinstance(f, Ap):
        z, g, x = fresh("z"), fresh("f"), fresh("x")
        return Lam(z, src, LetPair(Var(z), g, x, App(Var(g), Var(x))))
    if isinstance(f, L):
        x = fresh("x")
        return Lam(x, src, InjL(Var(x), f.right))
    if isinstance(f, R):
        y = fresh("y")
        return Lam(y, src, InjR(Var(y), f.left))
    if isinstance(f, Copair):
        z, x, y = fresh("z"), fresh("x"), fresh("y")
        return Lam(z, src, Cases(Var(z), x, App(_tr(f.left, fresh), Var(x)),
                                 y, App(_tr(f.right, fresh), Var(y))))
    if isinstance(f, Strict):
        z, x, y = fresh("z"), fresh("x"), fresh("y")
        return Lam(z, src, Cases(InjL(Var(z), tgt), x, App(_tr(f.f, fresh), Var(x)), y, Var(y)))
    if isinstance(f, UpM):
        x = fresh("x")
        return Lam(x, src, Up(Var(x)))
    if isinstance(f, LiftM):
        y, x = fresh("y"), fresh("x")
        return Lam(y, src, LiftLet(Var(y), x, App(_tr(f.f, fresh), Var(x))))
    if isinstance(f, (SglL, SglU)):
        x = fresh("x")
        return Lam(x, src, (SingletonL if isinstance(f, SglL) else SingletonU)(Var(x)))
    if isinstance(f, (DagL, DagU)):
        z, x = fresh("z"), fresh("x")
        ext = ExtendL if isinstance(f, DagL) else ExtendU
        return Lam(z, src, ext(Var(z), x, App(_tr(f.f, fresh), Var(x))))
    if isinstance(f, (PlusL, PlusU, TenL, TenU)):
        z, x, y = fresh("z"), fresh("x"), fresh("y")
        op = {PlusL: UnionL, PlusU: UnionU, TenL: TensorL, TenU: TensorU}[type(f)]
        return Lam(z, src, LetPair(Var(z), x, y, op(Var(x), Var(y))))
    if isinstance(f, FoldM):
        x = fresh("x")
        return Lam(x, src, Fold(Var(x), f.ty))
    if isinstance(f, UnfoldM):
        x = fresh("x")
        return Lam(x, src, Unfold(Var(x)))
    if isinstance(f, Y):
        g, x = fresh("f"), fresh("x")
        return Lam(g, src, Mu(x, f.ty, App(Var(g), Var(x))))
    raise SortError(f"unknown morphism {f!r}")


def hoare(f: Morphism, phi: Formula, psi: Formula, k: int, fuel: Optional[int] = None) -> bool:
    """Decide the triple {phi} f {psi} as an assertion about the translated term."""
    return check(translate(f), {}, ArrowF(phi, psi), k, {}, fuel)


def denote(f: Morphism, k: int, fuel: Optional[int] = None) -> el.StepFun:
    term, _ = elaborate(translate(f), {})
    return eval_annotated(term, {}, k, fuel)


def preimage_formula(f: Morphism, psi: Formula, k: int, fuel: Optional[int] = None) -> Formula:
    """A formula for the inputs of rank k that ``f`` sends into ``psi``.

    This is the modal formula [f]psi restricted to the rank-k elements, which
    is exact whenever the preimage is generated at rank k.
    """
    src, tgt = sort_of(f)
    g = denote(f, k, fuel)
    hits = [u for u in el.enumerate_elements(src, k) if el.sat(el.apply(g, u), psi, tgt)]
    return disj_list(el.defining_formula(u, src) for u in el.minimal(hits))
