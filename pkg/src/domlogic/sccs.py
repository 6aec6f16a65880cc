"""Synchronous CCS over an abelian action monoid.

Terms have an operational semantics (``transitions``) and a compositional
denotation into finite process elements (``denote``).  For recursion-free
terms the two agree up to prebisimulation, which ``full_abstraction_report``
checks pair by pair.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Union

from .errors import ParseError, SortError
from .process import BOTTOM, EMPTY, Lts, ProcElement, leq, prebisim_relation
from .sexpr import SExpr, dumps, parse

STATE_CAP = 5000


# ---------------------------------------------------------------------------
# monoids


class FreeAbelian:
    """Finite multisets over named generators; ``1`` is the empty multiset."""

    def __init__(self, generators):
        self.generators = tuple(sorted(set(generators)))
        if not self.generators:
            raise ParseError("a free monoid needs at least one generator")
        self.unit = "1"

    def parse_elem(self, text: str) -> str:
        if text == "1":
            return "1"
        parts = text.split(".")
        for g in parts:
            if g not in self.generators:
                raise ParseError(f"unknown generator {g!r}")
        return ".".join(sorted(parts))

    def _parts(self, x: str) -> list:
        return [] if x == "1" else x.split(".")

    def mul(self, x: str, y: str) -> str:
        parts = self._parts(x) + self._parts(y)
        return ".".join(sorted(parts)) if parts else "1"

    def relabelling(self, pairs) -> dict:
        """Extend a map on generators to the homomorphism it induces (as a generator map)."""
        mapping = {}
        for src, dst in pairs:
            src = self.parse_elem(src)
            if src not in self.generators:
                raise SortError(f"relabelling must map generators, got {src!r}")
            mapping[src] = self.parse_elem(dst)
        return {g: mapping.get(g, g) for g in self.generators}

    def apply(self, mapping: dict, x: str) -> str:
        out = "1"
        for g in self._parts(x):
            out = self.mul(out, mapping[g])
        return out


class TableMonoid:
    def __init__(self, elements, unit: str, table: dict):
        self.elements = tuple(elements)
        self.unit = unit
        self.table = dict(table)
        self._check()

    def _check(self):
        es = self.elements
        if self.unit not in es:
            raise ParseError(f"unit {self.unit!r} is not an element")
        for x in es:
            for y in es:
                if (x, y) not in self.table or self.table[x, y] not in es:
                    raise ParseError(f"product {x}*{y} is missing or outside the carrier")
        for x in es:
            if self.table[self.unit, x] != x:
                raise ParseError(f"{self.unit} is not a unit for {x}")
            for y in es:
                if self.table[x, y] != self.table[y, x]:
                    raise ParseError(f"product is not commutative at {x},{y}")
                for z in es:
                    if self.table[self.table[x, y], z] != self.table[x, self.table[y, z]]:
                        raise ParseError(f"product is not associative at {x},{y},{z}")

    def parse_elem(self, text: str) -> str:
        if text not in self.elements:
            raise ParseError(f"unknown action {text!r}")
        return text

    def mul(self, x: str, y: str) -> str:
        return self.table[x, y]

    def relabelling(self, pairs) -> dict:
        mapping = {self.parse_elem(s): self.parse_elem(d) for s, d in pairs}
        total = {x: mapping.get(x, x) for x in self.elements}
        if total[self.unit] != self.unit:
            raise SortError("relabelling must fix the unit")
        for x in self.elements:
            for y in self.elements:
                if total[self.mul(x, y)] != self.mul(total[x], total[y]):
                    raise SortError(f"relabelling is not a homomorphism at {x},{y}")
        return total

    def apply(self, mapping: dict, x: str) -> str:
        return mapping[x]


Monoid = Union[FreeAbelian, TableMonoid]


def parse_monoid(text: str) -> Monoid:
    """Read ``monoid free a b`` or a ``monoid table`` block.

    A table block lists ``elements x y ...``, ``unit u`` and one
    ``row x p1 p2 ...`` per element giving x times each element in order.
    """
    lines = [ln.split("#", 1)[0].split() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or lines[0][0] != "monoid" or len(lines[0]) < 2:
        raise ParseError("monoid file must start with 'monoid free' or 'monoid table'")
    if lines[0][1] == "free":
        return FreeAbelian(lines[0][2:])
    if lines[0][1] != "table":
        raise ParseError(f"unknown monoid kind {lines[0][1]!r}")
    elements, unit, rows = None, None, {}
    for ln in lines[1:]:
        if ln[0] == "elements":
            elements = ln[1:]
        elif ln[0] == "unit" and len(ln) == 2:
            unit = ln[1]
        elif ln[0] == "row" and len(ln) >= 2:
            rows[ln[1]] = ln[2:]
        else:
            raise ParseError(f"cannot read monoid line {' '.join(ln)!r}")
    if elements is None or unit is None:
        raise ParseError("table monoid needs 'elements' and 'unit'")
    table = {}
    for x, prods in rows.items():
        if len(prods) != len(elements):
            raise ParseError(f"row {x} has {len(prods)} entries, expected {len(elements)}")
        table.update({(x, y): z for y, z in zip(elements, prods)})
    return TableMonoid(elements, unit, table)


# ---------------------------------------------------------------------------
# terms


@dataclass(frozen=True)
class Nil:
    def __str__(self):
        return "O"


@dataclass(frozen=True)
class Omega:
    def __str__(self):
        return "Omega"


@dataclass(frozen=True)
class Prefix:
    act: str
    body: "Sccs"

    def __str__(self):
        return f"(pre {self.act} {self.body})"


@dataclass(frozen=True)
class Plus:
    left: "Sccs"
    right: "Sccs"

    def __str__(self):
        return f"(plus {self.left} {self.right})"


@dataclass(frozen=True)
class Restrict:
    body: "Sccs"
    allowed: frozenset

    def __str__(self):
        return f"(restrict {self.body} ({' '.join(sorted(self.allowed))}))"


@dataclass(frozen=True)
class Relabel:
    body: "Sccs"
    mapping: tuple  # sorted (src, dst) pairs of the full map

    def __str__(self):
        pairs = " ".join(f"({s} {d})" for s, d in self.mapping if s != d)
        return f"(relabel {self.body} ({pairs}))"


@dataclass(frozen=True)
class Times:
    left: "Sccs"
    right: "Sccs"

    def __str__(self):
        return f"(times {self.left} {self.right})"


@dataclass(frozen=True)
class RecVar:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Rec:
    var: str
    body: "Sccs"

    def __str__(self):
        return f"(rec {self.var} {self.body})"


Sccs = Union[Nil, Omega, Prefix, Plus, Restrict, Relabel, Times, RecVar, Rec]
NIL = Nil()
OMEGA = Omega()


def parse_sccs(text: str, monoid: Monoid) -> Sccs:
    return sccs_from_sexpr(parse(text), monoid)


def sccs_from_sexpr(node: SExpr, monoid: Monoid) -> Sccs:
    if isinstance(node, str):
        if node == "O":
            return NIL
        if node == "Omega":
            return OMEGA
        return RecVar(node)
    if not node:
        raise ParseError("empty term")
    tag, *args = node
    sub = lambda n: sccs_from_sexpr(n, monoid)  # noqa: E731
    if tag == "pre" and len(args) == 2 and isinstance(args[0], str):
        return Prefix(monoid.parse_elem(args[0]), sub(args[1]))
    if tag in ("plus", "times") and len(args) == 2:
        return (Plus if tag == "plus" else Times)(sub(args[0]), sub(args[1]))
    if tag == "restrict" and len(args) == 2 and isinstance(args[1], list):
        return Restrict(sub(args[0]), frozenset(monoid.parse_elem(a) for a in args[1]))
    if tag == "relabel" and len(args) == 2 and isinstance(args[1], list):
        pairs = []
        for p in args[1]:
            if not (isinstance(p, list) and len(p) == 2 and all(isinstance(x, str) for x in p)):
                raise ParseError(f"bad relabelling pair {dumps(p)}")
            pairs.append(tuple(p))
        return Relabel(sub(args[0]), tuple(sorted(monoid.relabelling(pairs).items())))
    if tag == "rec" and len(args) == 2 and isinstance(args[0], str):
        return Rec(args[0], sub(args[1]))
    raise ParseError(f"bad SCCS term {dumps(node)}")


def free_vars(t: Sccs) -> frozenset:
    if isinstance(t, RecVar):
        return frozenset({t.name})
    if isinstance(t, Rec):
        return free_vars(t.body) - {t.var}
    return frozenset().union(*(free_vars(c) for c in _children(t)))


def _children(t: Sccs) -> tuple:
    if isinstance(t, (Prefix, Restrict, Relabel, Rec)):
        return (t.body,)
    if isinstance(t, (Plus, Times)):
        return (t.left, t.right)
    return ()


def _rebuild(t: Sccs, kids: list) -> Sccs:
    if isinstance(t, Prefix):
        return Prefix(t.act, kids[0])
    if isinstance(t, Restrict):
        return Restrict(kids[0], t.allowed)
    if isinstance(t, Relabel):
        return Relabel(kids[0], t.mapping)
    if isinstance(t, Rec):
        return Rec(t.var, kids[0])
    if isinstance(t, Plus):
        return Plus(*kids)
    if isinstance(t, Times):
        return Times(*kids)
    return t


def subst(t: Sccs, x: str, s: Sccs) -> Sccs:
    """Replace free ``x`` by the closed term ``s``."""
    if isinstance(t, RecVar):
        return s if t.name == x else t
    if isinstance(t, Rec) and t.var == x:
        return t
    return _rebuild(t, [subst(c, x, s) for c in _children(t)])


def height(t: Sccs) -> int:
    return 1 + max((height(c) for c in _children(t)), default=0)


def has_rec(t: Sccs) -> bool:
    return isinstance(t, (Rec, RecVar)) or any(has_rec(c) for c in _children(t))


# ---------------------------------------------------------------------------
# operational semantics


@dataclass(frozen=True)
class Transitions:
    diverges: bool
    steps: frozenset
    complete: bool = True


def diverges(t: Sccs) -> bool:
    """The least divergence predicate; always decidable since each rule removes a binder."""
    if isinstance(t, Omega):
        return True
    if isinstance(t, (Nil, Prefix)):
        return False
    if isinstance(t, (Plus, Times)):
        return diverges(t.left) or diverges(t.right)
    if isinstance(t, (Restrict, Relabel)):
        return diverges(t.body)
    if isinstance(t, Rec):
        return diverges(subst(t.body, t.var, OMEGA))
    raise SortError(f"open term: free variable {t}")


def transitions(t: Sccs, monoid: Monoid, fuel: int = 32) -> Transitions:
    """Divergence and one-step transitions; ``complete`` is False if fuel ran out."""
    steps, complete = _steps(t, monoid, fuel)
    return Transitions(diverges(t), frozenset(steps), complete)


def _steps(t: Sccs, monoid: Monoid, fuel: int) -> tuple:
    if isinstance(t, (Nil, Omega)):
        return set(), True
    if isinstance(t, Prefix):
        return {(t.act, t.body)}, True
    if isinstance(t, Plus):
        s1, c1 = _steps(t.left, monoid, fuel)
        s2, c2 = _steps(t.right, monoid, fuel)
        return s1 | s2, c1 and c2
    if isinstance(t, Restrict):
        s, c = _steps(t.body, monoid, fuel)
        return {(a, Restrict(u, t.allowed)) for a, u in s if a in t.allowed}, c
    if isinstance(t, Relabel):
        s, c = _steps(t.body, monoid, fuel)
        mapping = dict(t.mapping)
        return {(monoid.apply(mapping, a), Relabel(u, t.mapping)) for a, u in s}, c
    if isinstance(t, Times):
        s1, c1 = _steps(t.left, monoid, fuel)
        s2, c2 = _steps(t.right, monoid, fuel)
        return {(monoid.mul(a, b), Times(u, v)) for a, u in s1 for b, v in s2}, c1 and c2
    if isinstance(t, Rec):
        if fuel <= 0:
            return set(), False
        return _steps(subst(t.body, t.var, t), monoid, fuel - 1)
    raise SortError(f"open term: free variable {t}")


def reachable_lts(terms, monoid: Monoid, fuel: int = 32, cap: int = STATE_CAP) -> tuple:
    """The transition system reachable from ``terms``; returns (lts, names, complete)."""
    names: dict = {}
    trans, div, complete = set(), set(), True
    queue = list(terms)
    for t in queue:
        names.setdefault(t, f"t{len(names)}")
    i = 0
    while i < len(queue):
        t = queue[i]
        i += 1
        info = transitions(t, monoid, fuel)
        complete = complete and info.complete
        if info.diverges:
            div.add(names[t])
        for a, u in info.steps:
            if u not in names:
                if len(names) >= cap:
                    complete = False
                    continue
                names[u] = f"t{len(names)}"
                queue.append(u)
            trans.add((names[t], a, names[u]))
    acts = {a for _, a, _ in trans}
    return Lts(tuple(acts), tuple(names.values()), frozenset(trans), frozenset(div)), names, complete


@dataclass(frozen=True)
class BisimVerdict:
    """Preorder verdicts in both directions; None means unknown."""
    left_below: Optional[bool]
    right_below: Optional[bool]

    @property
    def equivalent(self) -> Optional[bool]:
        if self.left_below is None or self.right_below is None:
            return None
        return self.left_below and self.right_below


def bisim_terms(t1: Sccs, t2: Sccs, monoid: Monoid, fuel: int = 32) -> BisimVerdict:
    lts, names, complete = reachable_lts([t1, t2], monoid, fuel)
    if not complete:
        return BisimVerdict(None, None)
    rel, _ = prebisim_relation(lts)
    a, b = names[t1], names[t2]
    return BisimVerdict((a, b) in rel, (b, a) in rel)


# ---------------------------------------------------------------------------
# denotational semantics


def project(d: ProcElement, k: int) -> ProcElement:
    if k <= 0:
        return BOTTOM
    return ProcElement(d.divergent, [(a, project(e, k - 1)) for a, e in d.caps])


def d_plus(d1: ProcElement, d2: ProcElement) -> ProcElement:
    return ProcElement(d1.divergent or d2.divergent, d1.caps | d2.caps)


def d_restrict(d: ProcElement, allowed: frozenset) -> ProcElement:
    return ProcElement(d.divergent, [(a, d_restrict(e, allowed)) for a, e in d.caps if a in allowed])


def d_relabel(d: ProcElement, mapping: dict, monoid: Monoid) -> ProcElement:
    return ProcElement(d.divergent, [(monoid.apply(mapping, a), d_relabel(e, mapping, monoid))
                                     for a, e in d.caps])


def d_times(d1: ProcElement, d2: ProcElement, monoid: Monoid) -> ProcElement:
    caps = [(monoid.mul(a, b), d_times(e1, e2, monoid)) for a, e1 in d1.caps for b, e2 in d2.caps]
    return ProcElement(d1.divergent or d2.divergent, caps)


def denote(t: Sccs, monoid: Monoid, k: int, env: Optional[dict] = None, fuel: int = 256) -> ProcElement:
    """The depth-k truncation of the denotation of ``t``.

    Recursion is computed by iterating from bottom until the depth-k iterate
    is stable (at most ``fuel`` rounds).
    """
    env = env or {}
    if k <= 0:
        return BOTTOM
    if isinstance(t, Nil):
        return EMPTY
    if isinstance(t, Omega):
        return BOTTOM
    if isinstance(t, Prefix):
        return ProcElement(False, [(t.act, denote(t.body, monoid, k - 1, env, fuel))])
    if isinstance(t, Plus):
        return d_plus(denote(t.left, monoid, k, env, fuel), denote(t.right, monoid, k, env, fuel))
    if isinstance(t, Restrict):
        return d_restrict(denote(t.body, monoid, k, env, fuel), t.allowed)
    if isinstance(t, Relabel):
        return d_relabel(denote(t.body, monoid, k, env, fuel), dict(t.mapping), monoid)
    if isinstance(t, Times):
        return d_times(denote(t.left, monoid, k, env, fuel), denote(t.right, monoid, k, env, fuel), monoid)
    if isinstance(t, RecVar):
        if t.name not in env:
            raise SortError(f"open term: free variable {t.name}")
        return project(env[t.name], k)
    if isinstance(t, Rec):
        d = BOTTOM
        for _ in range(fuel):
            nxt = denote(t.body, monoid, k, {**env, t.var: d}, fuel)
            if nxt == d:
                break
            d = nxt
        return d
    raise TypeError(t)


def unfold_outermost(t: Sccs) -> Sccs:
    """Unfold every recursion binder not nested inside another one."""
    if isinstance(t, Rec):
        return subst(t.body, t.var, t)
    return _rebuild(t, [unfold_outermost(c) for c in _children(t)])


def omega_cut(t: Sccs) -> Sccs:
    if isinstance(t, Rec):
        return OMEGA
    return _rebuild(t, [omega_cut(c) for c in _children(t)])


def approximants(t: Sccs, n: int) -> list:
    """Recursion-free approximants after 0..n rounds of outermost unfolding."""
    out, seen = [], set()
    for _ in range(n + 1):
        a = omega_cut(t)
        if a not in seen:
            seen.add(a)
            out.append(a)
        t = unfold_outermost(t)
    return out


@dataclass(frozen=True)
class FullAbstractionReport:
    operational: BisimVerdict
    left_below: bool
    right_below: bool
    depth: int

    @property
    def agrees(self) -> bool:
        return (self.operational.left_below, self.operational.right_below) == \
            (self.left_below, self.right_below)

    def summary(self) -> str:
        if self.left_below and self.right_below:
            rel = "equivalent"
        elif self.left_below:
            rel = "below only left-to-right"
        elif self.right_below:
            rel = "below only right-to-left"
        else:
            rel = "incomparable"
        return f"{rel}; operational and denotational {'agree' if self.agrees else 'DISAGREE'}"


def full_abstraction_report(t1: Sccs, t2: Sccs, monoid: Monoid) -> FullAbstractionReport:
    if has_rec(t1) or has_rec(t2):
        raise SortError("full abstraction report needs recursion-free terms")
    h = max(height(t1), height(t2))
    d1, d2 = denote(t1, monoid, h), denote(t2, monoid, h)
    return FullAbstractionReport(bisim_terms(t1, t2, monoid), leq(d1, d2), leq(d2, d1), h)


def random_term(rng, monoid: Monoid, height_bound: int, acts: list, allow_ops: bool = True) -> Sccs:
    """A recursion-free term of height at most ``height_bound``."""
    if height_bound <= 1:
        return rng.choice([NIL, OMEGA])
    roll = rng.random()
    sub = lambda: random_term(rng, monoid, height_bound - 1, acts, allow_ops)  # noqa: E731
    if roll < 0.3:
        return Prefix(rng.choice(acts), sub())
    if roll < 0.55:
        return Plus(sub(), sub())
    if not allow_ops or roll < 0.65:
        return rng.choice([NIL, OMEGA, Prefix(rng.choice(acts), sub())])
    if roll < 0.75:
        return Restrict(sub(), frozenset(a for a in acts if rng.random() < 0.5))
    if roll < 0.85 and isinstance(monoid, FreeAbelian):
        pairs = [(g, rng.choice(acts)) for g in monoid.generators if rng.random() < 0.6]
        return Relabel(sub(), tuple(sorted(monoid.relabelling(pairs).items())))
    return Times(sub(), sub())


def product_actions(monoid: FreeAbelian, max_len: int = 2) -> list:
    out = {"1"}
    for n in range(1, max_len + 1):
        for combo in itertools.combinations_with_replacement(monoid.generators, n):
            out.add(".".join(combo))
    return sorted(out)
