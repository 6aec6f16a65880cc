"""The lazy lambda calculus: evaluation, its domain of finite elements, and its logic.

Operationally, terms are reduced to weak head normal form by one-step head
reduction, in one of several dialects that add constants:

* ``pure``: no constants
* ``withC``: a convergence tester ``C``
* ``withP``: a parallel convergence tester ``P``
* ``withStar``: an atom ``star`` with ``C`` as case selection
* ``withStarP``: the same plus ``P``

Denotationally, the finite elements of D = (D -> D)_bot are joins of step
functions.  Terms are given element values by a call-by-need evaluator whose
results are projected onto rank k by probing every element of rank k - 1.
"""
from __future__ import annotations

import itertools
import sys
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Optional, Union

from .errors import IllegalConstant, NotNormalForm, ParseError, RankExplosion
from .sexpr import SExpr, dumps, parse

DEFAULT_FUEL = 10_000
ELEM_FUEL = 2_000
RANK_CAP = 4
SIZE_CAP = 20_000

DIALECTS = {
    "pure": frozenset(),
    "withC": frozenset({"C"}),
    "withP": frozenset({"P"}),
    "withStar": frozenset({"star", "C"}),
    "withStarP": frozenset({"star", "C", "P"}),
}


# ---------------------------------------------------------------------------
# terms


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True, slots=True)
class Lam:
    var: str
    body: "Lambda"

    def __str__(self):
        return f"(lam {self.var} {self.body})"


@dataclass(frozen=True, slots=True)
class App:
    fun: "Lambda"
    arg: "Lambda"

    def __str__(self):
        head, args = spine(self)
        return "(" + " ".join(str(t) for t in [head, *args]) + ")"


@dataclass(frozen=True, slots=True)
class Const:
    name: str  # "C", "P" or "star"

    def __str__(self):
        return self.name


Lambda = Union[Var, Lam, App, Const]
C, P, STAR = Const("C"), Const("P"), Const("star")


def apps(head: Lambda, *args: Lambda) -> Lambda:
    for a in args:
        head = App(head, a)
    return head


def lams(names: Iterable[str], body: Lambda) -> Lambda:
    for x in reversed(list(names)):
        body = Lam(x, body)
    return body


def spine(t: Lambda) -> tuple:
    """Split ``t`` into its head and its argument list."""
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fun
    return t, args[::-1]


_DELTA = Lam("x", App(Var("x"), Var("x")))
_YD = Lam("x", App(Var("f"), App(Var("x"), Var("x"))))
ABBREVIATIONS = {
    "I": Lam("x", Var("x")),
    "K": lams("xy", Var("x")),
    "S": lams("xyz", App(App(Var("x"), Var("z")), App(Var("y"), Var("z")))),
    "Y": Lam("f", App(_YD, _YD)),
    "Omega": App(_DELTA, _DELTA),
}
ABBREVIATIONS["YK"] = App(ABBREVIATIONS["Y"], ABBREVIATIONS["K"])
I, K, OMEGA, YK = (ABBREVIATIONS[n] for n in ("I", "K", "Omega", "YK"))
KOMEGA = App(K, OMEGA)
TRUE_T = lams("xy", Var("x"))
FALSE_T = lams("xy", Var("y"))


def parse_lambda(text: str, dialect: str = "pure") -> Lambda:
    t = lambda_from_sexpr(parse(text))
    check_dialect(t, dialect)
    return t


def lambda_from_sexpr(node: SExpr, bound: frozenset = frozenset()) -> Lambda:
    if isinstance(node, str):
        if node in bound:
            return Var(node)
        if node in ("C", "P", "star"):
            return Const(node)
        if node in ABBREVIATIONS:
            return ABBREVIATIONS[node]
        return Var(node)
    if not node:
        raise ParseError("empty application")
    if node[0] == "lam":
        if len(node) < 3 or not all(isinstance(x, str) for x in node[1:-1]):
            raise ParseError(f"bad abstraction {dumps(node)}")
        names = node[1:-1]
        return lams(names, lambda_from_sexpr(node[-1], bound | set(names)))
    if node[0] == "app":
        node = node[1:]
    if len(node) < 2:
        raise ParseError(f"application needs at least two parts: {dumps(node)}")
    parts = [lambda_from_sexpr(n, bound) for n in node]
    return apps(parts[0], *parts[1:])


def constants(t: Lambda) -> frozenset:
    if isinstance(t, Const):
        return frozenset({t.name})
    if isinstance(t, Lam):
        return constants(t.body)
    if isinstance(t, App):
        return constants(t.fun) | constants(t.arg)
    return frozenset()


def check_dialect(t: Lambda, dialect: str) -> None:
    if dialect not in DIALECTS:
        raise ParseError(f"unknown dialect {dialect!r}; expected one of {sorted(DIALECTS)}")
    extra = constants(t) - DIALECTS[dialect]
    if extra:
        raise IllegalConstant(f"constant(s) {sorted(extra)} not available in dialect {dialect}")


def free_vars(t: Lambda) -> frozenset:
    if isinstance(t, Var):
        return frozenset({t.name})
    if isinstance(t, Lam):
        return free_vars(t.body) - {t.var}
    if isinstance(t, App):
        return free_vars(t.fun) | free_vars(t.arg)
    return frozenset()


def size(t: Lambda) -> int:
    if isinstance(t, Lam):
        return 1 + size(t.body)
    if isinstance(t, App):
        return 1 + size(t.fun) + size(t.arg)
    return 1


def _fresh(base: str, avoid: frozenset) -> str:
    n = 1
    while f"{base}{n}" in avoid:
        n += 1
    return f"{base}{n}"


def subst(t: Lambda, x: str, s: Lambda, fv_s: Optional[frozenset] = None) -> Lambda:
    """Capture-avoiding ``t[s/x]``."""
    if fv_s is None:
        fv_s = free_vars(s)
    return _subst(t, x, s, fv_s)


def _subst(t, x, s, fv_s):
    if isinstance(t, Var):
        return s if t.name == x else t
    if isinstance(t, App):
        return App(_subst(t.fun, x, s, fv_s), _subst(t.arg, x, s, fv_s))
    if isinstance(t, Lam):
        if t.var == x:
            return t
        if t.var in fv_s:
            new = _fresh(t.var, fv_s | free_vars(t.body))
            return Lam(new, _subst(_subst(t.body, t.var, Var(new), frozenset({new})), x, s, fv_s))
        return Lam(t.var, _subst(t.body, x, s, fv_s))
    return t


def debruijn(t: Lambda, env: tuple = ()) -> str:
    """An alpha-invariant key for ``t``."""
    if isinstance(t, Var):
        return f"#{env.index(t.name)}" if t.name in env else t.name
    if isinstance(t, Lam):
        return "(\\" + debruijn(t.body, (t.var, *env)) + ")"
    if isinstance(t, App):
        return "(" + debruijn(t.fun, env) + " " + debruijn(t.arg, env) + ")"
    return t.name


# ---------------------------------------------------------------------------
# one-step reduction and weak head normal forms


def is_value(t: Lambda, dialect: str) -> bool:
    if isinstance(t, (Lam, Const)):
        return True
    head, args = spine(t)
    return head == P and len(args) == 1 and "P" in DIALECTS[dialect]


def step(t: Lambda, dialect: str = "pure") -> Optional[Lambda]:
    """One step of head reduction, or None when ``t`` is in normal form (or stuck)."""
    if not isinstance(t, App):
        return None
    head, args = spine(t)
    if isinstance(head, Lam):
        return apps(subst(head.body, head.var, args[0]), *args[1:])
    if head == C and dialect in ("withC", "withStar", "withStarP"):
        tested = args[0]
        if dialect == "withC":
            if isinstance(tested, Lam) or tested == C:
                return apps(I, *args[1:])
        elif is_value(tested, dialect):
            return apps(FALSE_T if tested == STAR else TRUE_T, *args[1:])
        inner = step(tested, dialect)
        return None if inner is None else apps(C, inner, *args[1:])
    if head == P and len(args) >= 2 and "P" in DIALECTS[dialect]:
        m, n = args[0], args[1]
        if is_value(m, dialect) or is_value(n, dialect):
            return apps(I, *args[2:])
        m2, n2 = step(m, dialect), step(n, dialect)
        if m2 is None and n2 is None:
            return None
        return apps(P, m if m2 is None else m2, n if n2 is None else n2, *args[2:])
    return None


@dataclass(frozen=True)
class Outcome:
    """Result of evaluating to weak head normal form."""
    kind: str  # "converges", "diverges" or "fuel-out"
    term: Optional[Lambda] = None
    steps: int = 0
    reason: str = ""

    @property
    def converges(self) -> bool:
        return self.kind == "converges"

    def __str__(self):
        if self.kind == "converges":
            return f"converges to {self.term} in {self.steps} steps"
        if self.kind == "diverges":
            return f"diverges ({self.reason}) after {self.steps} steps"
        return f"fuel ran out after {self.steps} steps"


def eval_whnf(t: Lambda, fuel: int = DEFAULT_FUEL, dialect: str = "pure",
              cycle_cache: int = 4096) -> Outcome:
    """Reduce a closed term to weak head normal form.

    Divergence is only reported when a configuration repeats (up to renaming)
    or the term is stuck; otherwise running out of fuel is reported as such.
    """
    check_dialect(t, dialect)
    seen = set()
    for n in range(fuel + 1):
        if is_value(t, dialect):
            return Outcome("converges", t, n)
        key = debruijn(t)
        if key in seen:
            return Outcome("diverges", None, n, "configuration repeats")
        if len(seen) < cycle_cache:
            seen.add(key)
        nxt = step(t, dialect)
        if nxt is None:
            return Outcome("diverges", None, n, f"stuck at {t}")
        if size(nxt) > SIZE_CAP:
            return Outcome("fuel-out", None, n)
        t = nxt
    return Outcome("fuel-out", None, fuel)


@dataclass(frozen=True)
class Classification:
    """Which case of the head-reduction trichotomy a term falls into.

    ``kind`` is one of "diverges-or-fuel-out", "abstraction", "constant" or
    "head-form".  For head forms ``var`` is the head variable, ``spine`` the
    number of its arguments, ``nesting`` the number of enclosing ``C``s and
    ``trailing`` the argument count after each enclosing ``C``.
    """
    kind: str
    term: Optional[Lambda] = None
    steps: int = 0
    var: Optional[str] = None
    spine: int = 0
    nesting: int = 0
    trailing: tuple = ()

    def __str__(self):
        if self.kind == "head-form":
            extra = f", nesting {self.nesting}, trailing {list(self.trailing)}" if self.nesting else ""
            return f"head form {self.var} with {self.spine} argument(s){extra}"
        if self.kind in ("abstraction", "constant"):
            return f"{self.kind} {self.term} after {self.steps} steps"
        return "diverges or runs out of fuel"


def classify(t: Lambda, fuel: int = DEFAULT_FUEL, dialect: str = "pure") -> Classification:
    if dialect not in ("pure", "withC"):
        raise IllegalConstant("classification is defined for the pure and withC dialects")
    check_dialect(t, dialect)
    seen = set()
    for n in range(fuel + 1):
        nxt = step(t, dialect)
        if nxt is None:
            return _describe(t, n)
        key = debruijn(t)
        if key in seen or size(nxt) > SIZE_CAP:
            break
        seen.add(key)
        t = nxt
    return Classification("diverges-or-fuel-out", None, fuel)


def _describe(t: Lambda, steps: int) -> Classification:
    if isinstance(t, Lam):
        return Classification("abstraction", t, steps)
    if t == C:
        return Classification("constant", t, steps)
    trailing = []
    while True:
        head, args = spine(t)
        if head == C and args:
            trailing.append(len(args) - 1)
            t = args[0]
            continue
        if isinstance(head, Var):
            return Classification("head-form", t, steps, head.name, len(args),
                                  len(trailing), tuple(trailing))
        return Classification("stuck", t, steps)


# ---------------------------------------------------------------------------
# finite elements of D = (D -> D)_bot


class LazyElement:
    """Bottom (``steps is None``) or a lifted join of step functions.

    Step sets are kept in a canonical form: one step ``(u, f(u))`` for each
    argument at which the function strictly increases, so equal elements
    compare equal.
    """
    __slots__ = ("steps", "_hash")

    def __init__(self, steps: Optional[Iterable] = None):
        self.steps = None if steps is None else frozenset(steps)
        self._hash = hash(self.steps)

    def __eq__(self, other):
        return isinstance(other, LazyElement) and self.steps == other.steps

    def __hash__(self):
        return self._hash

    @property
    def is_bottom(self) -> bool:
        return self.steps is None

    def __repr__(self):
        if self.steps is None:
            return "bot"
        return "{" + ", ".join(f"{u}->{v}" for u, v in sorted(self.steps, key=repr)) + "}"


LBOT = LazyElement(None)


def rank(d: LazyElement) -> int:
    if d.steps is None:
        return 0
    return 1 + max((max(rank(u), rank(v)) for u, v in d.steps), default=0)


@lru_cache(maxsize=None)
def lleq(d1: LazyElement, d2: LazyElement) -> bool:
    if d1.steps is None:
        return True
    if d2.steps is None:
        return False
    return all(lleq(v, lapply(d2, u)) for u, v in d1.steps)


@lru_cache(maxsize=None)
def lapply(d: LazyElement, x: LazyElement) -> LazyElement:
    if d.steps is None:
        return LBOT
    return ljoin_all(v for u, v in d.steps if lleq(u, x))


@lru_cache(maxsize=None)
def ljoin(d1: LazyElement, d2: LazyElement) -> LazyElement:
    if d1.steps is None:
        return d2
    if d2.steps is None:
        return d1
    return lfun(d1.steps | d2.steps)


def ljoin_all(ds: Iterable[LazyElement]) -> LazyElement:
    out = LBOT
    for d in ds:
        out = ljoin(out, d)
    return out


def lfun(steps: Iterable) -> LazyElement:
    """The canonical lifted function generated by ``steps``."""
    steps = [(u, v) for u, v in steps if not v.is_bottom]
    if not steps:
        return LazyElement(())
    closure = {LBOT} | {u for u, _ in steps}
    frontier = list(closure)
    while frontier:
        new = []
        for a in frontier:
            for b in list(closure):
                j = ljoin(a, b)
                if j not in closure:
                    closure.add(j)
                    new.append(j)
        frontier = new
    raw = LazyElement(steps)
    value = {u: lapply(raw, u) for u in closure}
    keep = []
    for u in closure:
        below = ljoin_all(value[x] for x in closure if x != u and lleq(x, u))
        if value[u] != below:
            keep.append((u, value[u]))
    return LazyElement(keep)


@lru_cache(maxsize=None)
def lazy_elements(k: int) -> tuple:
    """Every element of D_k, the rank-k approximant of D."""
    if k >= RANK_CAP:
        raise RankExplosion(f"D_{k} is too large to enumerate (ranks below {RANK_CAP} only)")
    if k == 0:
        return (LBOT,)
    prev = lazy_elements(k - 1)
    order = _linear_extension(prev)
    below = {x: [y for y in order if y != x and lleq(y, x)] for x in order}
    out = [LBOT]

    def extend(i: int, table: dict):
        if i == len(order):
            out.append(lfun(table.items()))
            return
        x = order[i]
        for v in prev:
            if all(lleq(table[y], v) for y in below[x]):
                table[x] = v
                extend(i + 1, table)
                del table[x]

    extend(0, {})
    return tuple(dict.fromkeys(out))


def _linear_extension(elems) -> list:
    remaining = list(elems)
    out = []
    while remaining:
        for x in remaining:
            if not any(y != x and lleq(y, x) for y in remaining):
                out.append(x)
                remaining.remove(x)
                break
    return out


def lproject(d: LazyElement, k: int) -> LazyElement:
    if k <= 0 or d.steps is None:
        return LBOT
    return lfun((u, lproject(lapply(d, u), k - 1)) for u in lazy_elements(k - 1))


# ---------------------------------------------------------------------------
# the lazy logic


@dataclass(frozen=True)
class TopL:
    def __str__(self):
        return "t"


@dataclass(frozen=True)
class AndL:
    parts: tuple

    def __str__(self):
        return "(and " + " ".join(map(str, self.parts)) + ")"


@dataclass(frozen=True)
class ArrBot:
    arg: "LFormula"
    res: "LFormula"

    def __str__(self):
        if self == LAMBDA:
            return "lam"
        return f"(arr {self.arg} {self.res})"


LFormula = Union[TopL, AndL, ArrBot]
TOP = TopL()
LAMBDA = ArrBot(TOP, TOP)


def l_and(*parts: LFormula) -> LFormula:
    flat = set()
    for p in parts:
        if isinstance(p, AndL):
            flat.update(p.parts)
        elif p != TOP:
            flat.add(p)
    if not flat:
        return TOP
    if len(flat) == 1:
        return flat.pop()
    return AndL(tuple(sorted(flat, key=str)))


def parse_lformula(text: str) -> LFormula:
    return lformula_from_sexpr(parse(text))


def lformula_from_sexpr(node: SExpr) -> LFormula:
    if node == "t":
        return TOP
    if node in ("lam", "lambda"):
        return LAMBDA
    if isinstance(node, list) and node:
        if node[0] == "and":
            return l_and(*(lformula_from_sexpr(n) for n in node[1:]))
        if node[0] == "arr" and len(node) == 3:
            return ArrBot(lformula_from_sexpr(node[1]), lformula_from_sexpr(node[2]))
    raise ParseError(f"bad lazy formula {dumps(node)}")


def ldepth(phi: LFormula) -> int:
    if isinstance(phi, AndL):
        return max(ldepth(p) for p in phi.parts)
    if isinstance(phi, ArrBot):
        return 1 + max(ldepth(phi.arg), ldepth(phi.res))
    return 0


def _conjuncts(phi: LFormula) -> tuple:
    if isinstance(phi, AndL):
        return phi.parts
    return () if phi == TOP else (phi,)


@lru_cache(maxsize=None)
def _arrows(phi: LFormula) -> tuple:
    """The conjunction of (arg -> res) pairs equivalent to ``phi``.

    Conjunctive results are split and a result of ``t`` collapses to
    (t -> t), so every pair has a non-conjunctive result.
    """
    out = set()
    for c in _conjuncts(phi):
        res = _conjuncts(c.res)
        if not res:
            out.add((TOP, TOP))
        for r in res:
            out.add((c.arg, r))
    return tuple(sorted(out, key=str))


@lru_cache(maxsize=None)
def entails_lazy(phi: LFormula, psi: LFormula) -> bool:
    """Decide phi <= psi by comparing arrow conjuncts."""
    right = _arrows(psi)
    if not right:
        return True
    left = _arrows(phi)
    if not left:
        return False
    for arg, res in right:
        hit = l_and(*(r for a, r in left if entails_lazy(arg, a)))
        if res == TOP:
            continue
        if not entails_lazy(hit, res):
            return False
    return True


@lru_cache(maxsize=None)
def lelem(phi: LFormula) -> LazyElement:
    """The least element satisfying ``phi``."""
    if isinstance(phi, AndL):
        return ljoin_all(lelem(p) for p in phi.parts)
    if isinstance(phi, ArrBot):
        return lfun([(lelem(phi.arg), lelem(phi.res))])
    return LBOT


@lru_cache(maxsize=None)
def lformula(d: LazyElement) -> LFormula:
    """A formula whose least model is ``d``."""
    if d.steps is None:
        return TOP
    return l_and(LAMBDA, *(ArrBot(lformula(u), lformula(v)) for u, v in sorted(d.steps, key=repr)))


def lsat(d: LazyElement, phi: LFormula) -> bool:
    return lleq(lelem(phi), d)


def is_nl(phi: LFormula) -> bool:
    return all(_is_snl(c) for c in _conjuncts(phi))


def _is_snl(phi: LFormula) -> bool:
    while phi != LAMBDA:
        if not isinstance(phi, ArrBot) or not is_nl(phi.arg):
            return False
        phi = phi.res
    return True


def _snl_args(phi: LFormula) -> list:
    args = []
    while phi != LAMBDA:
        args.append(phi.arg)
        phi = phi.res
    return args


def to_nl(phi: LFormula) -> LFormula:
    """An equivalent formula in the nested-arrow normal form."""
    out = []
    for c in _conjuncts(phi):
        out.extend(_nl_arrow(to_nl(c.arg), to_nl(c.res)))
    return l_and(*out)


def _nl_arrow(arg: LFormula, res: LFormula) -> list:
    res_parts = _conjuncts(res)
    if not res_parts:
        return [LAMBDA]
    return [ArrBot(arg, r) for r in res_parts]


def nl_formulas(depth: int) -> list:
    """Every NL formula of depth at most ``depth`` with irredundant syntax.

    Conjunctions are taken over sets of distinct simple conjuncts.
    """
    return list(_nl_upto(depth))


@lru_cache(maxsize=None)
def _snl_upto(depth: int) -> tuple:
    if depth < 1:
        return ()
    out = {LAMBDA}
    args = _nl_upto(depth - 1)
    frontier = {LAMBDA}
    while frontier:
        new = set()
        for s in frontier:
            for a in args:
                cand = ArrBot(a, s)
                if ldepth(cand) <= depth and cand not in out:
                    new.add(cand)
        out |= new
        frontier = new
    return tuple(sorted(out, key=str))


@lru_cache(maxsize=None)
def _nl_upto(depth: int) -> tuple:
    simples = _snl_upto(depth)
    out = []
    for r in range(len(simples) + 1):
        for combo in itertools.combinations(simples, r):
            out.append(l_and(*combo))
    return tuple(dict.fromkeys(out))


# ---------------------------------------------------------------------------
# element evaluation


class _OutOfFuel(Exception):
    pass


class _Budget:
    def __init__(self, fuel: int):
        self.left = fuel

    def tick(self):
        self.left -= 1
        if self.left < 0:
            raise _OutOfFuel


class _Fun:
    __slots__ = ("apply",)

    def __init__(self, apply: Callable):
        self.apply = apply


_BOT = None  # the divergent value


class _Thunk:
    __slots__ = ("compute", "value", "done")

    def __init__(self, compute: Callable):
        self.compute = compute
        self.done = False
        self.value = None

    def force(self, budget: _Budget):
        if not self.done:
            v = self.compute(budget)
            self.value, self.done = v, True
        return self.value


def _ready(value) -> _Thunk:
    th = _Thunk(None)
    th.value, th.done = value, True
    return th


def _value_of(t: Lambda, env: dict, dialect: str) -> _Thunk:
    if isinstance(t, Var):
        return env[t.name]
    if isinstance(t, Lam):
        return _ready(_Fun(lambda th, b: _value_of(t.body, {**env, t.var: th}, dialect)))
    if isinstance(t, Const):
        return _ready(_constant(t.name, dialect))

    def compute(budget):
        budget.tick()
        f = _value_of(t.fun, env, dialect).force(budget)
        if f is _BOT:
            return _BOT
        return f.apply(_value_of(t.arg, env, dialect), budget).force(budget)

    return _Thunk(compute)


_I_VALUE = _Fun(lambda th, b: th)


def _constant(name: str, dialect: str):
    if name == "C" and dialect == "withC":
        return _Fun(lambda th, b: _ready(_BOT if th.force(b) is _BOT else _I_VALUE))
    if name == "P" and dialect == "withP":
        return _Fun(lambda th1, b1: _ready(_Fun(lambda th2, b2: _ready(_parallel(th1, th2, b2)))))
    raise IllegalConstant(f"constant {name} has no element semantics in dialect {dialect}")


def _parallel(th1: _Thunk, th2: _Thunk, budget: _Budget):
    half = max(budget.left // 2, 0)
    unknown = False
    for th in (th1, th2):
        sub = _Budget(half)
        try:
            if th.force(sub) is not _BOT:
                return _I_VALUE
        except _OutOfFuel:
            unknown = True
        budget.left -= half - max(sub.left, 0)
    if unknown:
        raise _OutOfFuel
    return _BOT


@lru_cache(maxsize=None)
def _embed(d: LazyElement):
    if d.steps is None:
        return _BOT
    return _Fun(lambda th, b: _ready(_embed(ljoin_all(v for u, v in d.steps if _below(u, th, b)))))


def _below(u: LazyElement, th: _Thunk, budget: _Budget) -> bool:
    """Whether the finite element ``u`` approximates the value of ``th``."""
    if u.steps is None:
        return True
    f = th.force(budget)
    if f is _BOT:
        return False
    return all(_below(v, f.apply(_ready(_embed(s)), budget), budget) for s, v in u.steps)


def _project(th: _Thunk, k: int, fuel: int) -> LazyElement:
    if k <= 0:
        return LBOT
    try:
        f = th.force(_Budget(fuel))
    except _OutOfFuel:
        return LBOT
    if f is _BOT:
        return LBOT
    steps = []
    for u in lazy_elements(k - 1):
        try:
            res = f.apply(_ready(_embed(u)), _Budget(fuel))
        except _OutOfFuel:
            continue
        steps.append((u, _project(res, k - 1, fuel)))
    return lfun(steps)


def eval_elem(t: Lambda, env: Optional[dict] = None, k: int = 2, dialect: str = "pure",
              fuel: int = ELEM_FUEL) -> LazyElement:
    """The rank-k approximation of the denotation of ``t``.

    Free variables are bound to finite elements by ``env``.  A sub-computation
    that exhausts ``fuel`` is treated as divergent, so the result is always a
    lower bound of the true projection, and equal to it when fuel suffices.
    """
    if k > RANK_CAP:
        raise RankExplosion(f"rank {k} exceeds the cap {RANK_CAP}")
    if dialect not in ("pure", "withC", "withP"):
        raise IllegalConstant(f"no element semantics for dialect {dialect}")
    check_dialect(t, dialect)
    env = env or {}
    missing = free_vars(t) - set(env)
    if missing:
        raise ParseError(f"unbound variable(s) {sorted(missing)}")
    thunk_env = {x: _ready(_embed(d)) for x, d in env.items()}
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 200_000))
    try:
        return _project(_value_of(t, thunk_env, dialect), k, fuel)
    finally:
        sys.setrecursionlimit(old)


def lcheck(t: Lambda, gamma: dict, phi: LFormula, k: Optional[int] = None,
           dialect: str = "pure", fuel: int = ELEM_FUEL) -> bool:
    """Decide ``t, gamma |= phi`` by evaluating ``t`` at the least environment."""
    if k is None:
        k = max([ldepth(phi), *(ldepth(g) for g in gamma.values())], default=0)
    if k < ldepth(phi):
        raise RankExplosion(f"rank {k} is below the formula depth {ldepth(phi)}")
    env = {x: lelem(g) for x, g in gamma.items()}
    for x in free_vars(t) - set(env):
        env[x] = LBOT
    return lsat(eval_elem(t, env, k, dialect, fuel), phi)


# ---------------------------------------------------------------------------
# definability of formulas by terms


C_OF_P = Lam("c", apps(P, Var("c"), Var("c")))


def _ctest(m: Lambda, conv: Lambda) -> Lambda:
    return App(conv, m)


def m_phi(phi: LFormula, conv: Lambda = C_OF_P) -> Lambda:
    """A term whose properties are exactly the consequences of ``phi``.

    ``conv`` is the convergence tester used; by default it is built from P.
    """
    if not is_nl(phi):
        raise NotNormalForm(f"{phi} is not in nested-arrow normal form")
    conj = [_snl_args(c) for c in _conjuncts(phi)]
    if not conj:
        return OMEGA
    k = max(len(a) for a in conj)
    xs = [f"x{j}" for j in range(1, k + 1)]
    body = KOMEGA
    for j in range(k, 0, -1):
        tests = []
        for args in sorted(conj, key=lambda a: [str(x) for x in a]):
            if j <= len(args):
                tests.append(_chain([App(t_phi(args[l], conv), Var(xs[l])) for l in range(j)], conv))
        body = Lam(xs[j - 1], apps(conv, _par_sum(tests), body))
    return body


def _chain(tests: list, conv: Lambda) -> Lambda:
    out = App(conv, tests[-1])
    for t in reversed(tests[:-1]):
        out = apps(conv, t, out)
    return out


def _par_sum(tests: list) -> Lambda:
    if not tests:
        return OMEGA
    return apps(P, tests[0], _par_sum(tests[1:]))


def t_phi(phi: LFormula, conv: Lambda = C_OF_P) -> Lambda:
    """A term that converges on exactly the arguments satisfying ``phi``."""
    if not is_nl(phi):
        raise NotNormalForm(f"{phi} is not in nested-arrow normal form")
    calls = [apps(Var("x"), *(m_phi(a, conv) for a in _snl_args(c)))
             for c in sorted(_conjuncts(phi), key=str)]
    body = KOMEGA
    for call in reversed(calls):
        body = apps(conv, call, body)
    return Lam("x", body)


# ---------------------------------------------------------------------------
# applicative bisimulation against a corpus


@dataclass(frozen=True)
class CorpusVerdict:
    refuted: bool
    witness: tuple = ()
    left: Optional[Outcome] = None
    right: Optional[Outcome] = None

    def __str__(self):
        if not self.refuted:
            return "consistent on the corpus"
        args = " ".join(map(str, self.witness)) or "(no arguments)"
        return f"refuted by arguments {args}: left {self.left}, right {self.right}"


def bisim_corpus(m: Lambda, n: Lambda, k: int, corpus: list, fuel: int = DEFAULT_FUEL,
                 dialect: str = "pure") -> CorpusVerdict:
    """Look for argument vectors of length < k on which ``m`` converges and ``n`` does not."""
    for length in range(k):
        for args in itertools.product(corpus, repeat=length):
            left = eval_whnf(apps(m, *args), fuel, dialect)
            if not left.converges:
                continue
            right = eval_whnf(apps(n, *args), fuel, dialect)
            if not right.converges:
                return CorpusVerdict(True, tuple(args), left, right)
    return CorpusVerdict(False)


# ---------------------------------------------------------------------------
# term enumeration and sampling


def enumerate_closed(max_size: int, consts: tuple = ()) -> list:
    """All closed terms of size at most ``max_size`` with bound names x0, x1, ..."""
    out = []
    for s in range(1, max_size + 1):
        out.extend(_terms(s, 0, tuple(consts)))
    return out


@lru_cache(maxsize=None)
def _terms(s: int, scope: int, consts: tuple) -> tuple:
    if s == 1:
        return tuple(Var(f"x{i}") for i in range(scope)) + tuple(Const(c) for c in consts)
    out = [Lam(f"x{scope}", b) for b in _terms(s - 1, scope + 1, consts)]
    for left in range(1, s - 1):
        for f in _terms(left, scope, consts):
            for a in _terms(s - 1 - left, scope, consts):
                out.append(App(f, a))
    return tuple(out)


def random_closed(rng, max_size: int, consts: tuple = (), scope: tuple = ()) -> Lambda:
    if max_size <= 1 or (scope and rng.random() < 0.3):
        pool = [Var(x) for x in scope] + [Const(c) for c in consts]
        if pool:
            return rng.choice(pool)
    if not scope or rng.random() < 0.45:
        x = f"x{len(scope)}"
        return Lam(x, random_closed(rng, max_size - 1, consts, (*scope, x)))
    left = rng.randint(1, max(1, max_size - 2))
    return App(random_closed(rng, left, consts, scope),
               random_closed(rng, max(1, max_size - 1 - left), consts, scope))


# ---------------------------------------------------------------------------
# non-definability harnesses


@dataclass(frozen=True)
class HarnessCase:
    term: Lambda
    note: str

    def __str__(self):
        return f"{self.term}: {self.note}"


def sequentiality_case(m: Lambda, fuel: int = DEFAULT_FUEL, dialect: str = "pure") -> tuple:
    """Check ``m ~ I`` or (m Omega converges iff m (K Omega) converges) for closed pure ``m``.

    Returns (ok, note) where the note names the case that applied.
    """
    r1 = eval_whnf(App(m, OMEGA), fuel, dialect)
    r2 = eval_whnf(App(m, KOMEGA), fuel, dialect)
    shape = classify(App(m, Var("z")), fuel, dialect)
    if r1.converges == r2.converges:
        if "fuel-out" in (r1.kind, r2.kind):
            return True, f"both non-convergent within fuel ({shape})"
        return True, f"agree ({'both converge' if r1.converges else 'both diverge'}; {shape})"
    # rank 2 cannot separate C from I, so compare up to rank 3
    same_as_i = all(eval_elem(m, k=k, dialect=dialect) == eval_elem(I, k=k) for k in (1, 2, 3))
    if same_as_i and shape.kind == "head-form" and shape.var == "z" and shape.spine == 0 \
            and shape.nesting == 0:
        return True, "behaves as the identity"
    return False, f"m Omega {r1}; m (K Omega) {r2}; {shape}"


def sequentiality_counterexamples(max_size: int = 8, fuel: int = DEFAULT_FUEL) -> tuple:
    """Exhaustively test closed pure terms; returns (checked, counterexamples)."""
    terms = enumerate_closed(max_size)
    bad = []
    for m in terms:
        ok, note = sequentiality_case(m, fuel)
        if not ok:
            bad.append(HarnessCase(m, note))
    return len(terms), bad


def parallel_test_case(m: Lambda, fuel: int = DEFAULT_FUEL, dialect: str = "withC") -> tuple:
    """Whether ``m`` avoids behaving as a parallel convergence test."""
    a = eval_whnf(apps(m, KOMEGA, OMEGA), fuel, dialect)
    b = eval_whnf(apps(m, OMEGA, KOMEGA), fuel, dialect)
    if not (a.converges and b.converges):
        return True, "one of the one-sided tests does not converge"
    c = eval_whnf(apps(m, OMEGA, OMEGA), fuel, dialect)
    if c.converges:
        return True, "converges on Omega Omega as well"
    return False, f"m (K Omega) Omega and m Omega (K Omega) converge; m Omega Omega {c}"


def parallel_counterexamples(max_size: int = 7, fuel: int = DEFAULT_FUEL) -> tuple:
    terms = enumerate_closed(max_size, ("C",))
    bad = []
    for m in terms:
        ok, note = parallel_test_case(m, fuel)
        if not ok:
            bad.append(HarnessCase(m, note))
    return len(terms), bad


def parallel_or_case(m: Lambda, fuel: int = DEFAULT_FUEL) -> bool:
    """True when ``m`` meets every defining clause of parallel or in withStarP."""
    for args in ((KOMEGA, OMEGA), (OMEGA, KOMEGA)):
        r = eval_whnf(apps(m, *args), fuel, "withStarP")
        if not (r.converges and isinstance(r.term, Lam)):
            return False
    r = eval_whnf(apps(m, STAR, STAR), fuel, "withStarP")
    return r.converges and r.term == STAR
