"""Transition systems, prebisimulation and the two-sorted process logic.

Process formulas come in two sorts.  Sort pi formulas are built from
``Box(kappa)`` and ``Dia(kappa)`` with conjunction and disjunction; sort kappa
formulas from ``Act(a, pi)``.  Finite elements of the domain of
synchronisation trees are ``ProcElement`` generator sets compared in the
Egli-Milner style.
"""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Union

from .errors import BlowupLimit, NotNormalForm, ParseError, SortError
from .sexpr import SExpr, dumps, parse

SDNF_CAP = 20_000


# ---------------------------------------------------------------------------
# transition systems


@dataclass
class Lts:
    acts: tuple
    states: tuple
    trans: frozenset
    div: frozenset
    _succ: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.acts = tuple(sorted(set(self.acts)))
        self.trans = frozenset(self.trans)
        self.div = frozenset(self.div)
        names = set(self.states) | set(self.div)
        for p, a, q in self.trans:
            if a not in self.acts:
                raise SortError(f"action {a!r} is not declared in acts")
            names |= {p, q}
        self.states = tuple(sorted(names))
        succ = {p: [] for p in self.states}
        for p, a, q in self.trans:
            succ[p].append((a, q))
        self._succ = {p: tuple(sorted(m)) for p, m in succ.items()}

    def succ(self, p: str) -> tuple:
        return self._succ[p]

    def diverges(self, p: str) -> bool:
        return p in self.div

    def initials(self, p: str) -> frozenset:
        return frozenset(a for a, _ in self._succ[p])

    def view(self, p: str) -> tuple:
        return p in self.div, self._succ[p]

    def to_text(self) -> str:
        lines = ["acts " + " ".join(self.acts)]
        lines += [f"state {p}" for p in self.states]
        lines += [f"trans {p} {a} {q}" for p, a, q in sorted(self.trans)]
        lines += [f"div {p}" for p in sorted(self.div)]
        return "\n".join(lines) + "\n"


def parse_lts(text: str) -> Lts:
    """Read the line format ``acts a b``, ``trans p a q``, ``div p`` (and ``state p``)."""
    acts, states, trans, div = None, [], set(), set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        head, rest = line[0], line[1:]
        if head == "acts":
            acts = rest
        elif head == "trans" and len(rest) == 3:
            trans.add(tuple(rest))
        elif head == "div" and rest:
            div.update(rest)
        elif head == "state" and rest:
            states.extend(rest)
        else:
            raise ParseError(f"line {lineno}: cannot read {raw.strip()!r}")
    if acts is None:
        raise ParseError("missing 'acts' header")
    return Lts(tuple(acts), tuple(states), frozenset(trans), frozenset(div))


def disjoint_union(left: Lts, right: Lts, tag=("l.", "r.")) -> Lts:
    def rn(pre, p):
        return pre + p
    trans = {(rn(tag[0], p), a, rn(tag[0], q)) for p, a, q in left.trans}
    trans |= {(rn(tag[1], p), a, rn(tag[1], q)) for p, a, q in right.trans}
    states = [rn(tag[0], p) for p in left.states] + [rn(tag[1], p) for p in right.states]
    div = {rn(tag[0], p) for p in left.div} | {rn(tag[1], p) for p in right.div}
    return Lts(tuple(set(left.acts) | set(right.acts)), tuple(states), frozenset(trans), frozenset(div))


def prebisim_relation(l: Lts) -> tuple:
    """Greatest prebisimulation and the number of refinement rounds to reach it."""
    rel = {(p, q) for p in l.states for q in l.states}
    rounds = 0
    while True:
        nxt = {(p, q) for p, q in rel if _step_ok(l, p, q, rel)}
        if nxt == rel:
            return frozenset(rel), rounds
        rel = nxt
        rounds += 1


def _step_ok(l: Lts, p: str, q: str, rel: set) -> bool:
    for a, p1 in l.succ(p):
        if not any(b == a and (p1, q1) in rel for b, q1 in l.succ(q)):
            return False
    if not l.diverges(p):
        if l.diverges(q):
            return False
        for b, q1 in l.succ(q):
            if not any(a == b and (p1, q1) in rel for a, p1 in l.succ(p)):
                return False
    return True


def prebisim(l: Lts, p: str, q: str) -> bool:
    return (p, q) in prebisim_relation(l)[0]


def prebisim_approx(l: Lts, n: int) -> frozenset:
    """The n-th approximant of prebisimilarity, starting from the full relation."""
    rel = {(p, q) for p in l.states for q in l.states}
    for _ in range(n):
        rel = {(p, q) for p, q in rel if _step_ok(l, p, q, rel)}
    return frozenset(rel)


# ---------------------------------------------------------------------------
# formulas


@dataclass(frozen=True)
class PAnd:
    args: tuple

    def __str__(self):
        return "tt" if not self.args else "(and " + " ".join(map(str, self.args)) + ")"


@dataclass(frozen=True)
class POr:
    args: tuple

    def __str__(self):
        return "ff" if not self.args else "(or " + " ".join(map(str, self.args)) + ")"


@dataclass(frozen=True)
class Box:
    body: "Kappa"

    def __str__(self):
        return f"(box {self.body})"


@dataclass(frozen=True)
class Dia:
    body: "Kappa"

    def __str__(self):
        return f"(dia {self.body})"


@dataclass(frozen=True)
class KAnd:
    args: tuple

    def __str__(self):
        return "tt" if not self.args else "(and " + " ".join(map(str, self.args)) + ")"


@dataclass(frozen=True)
class KOr:
    args: tuple

    def __str__(self):
        return "ff" if not self.args else "(or " + " ".join(map(str, self.args)) + ")"


@dataclass(frozen=True)
class Act:
    act: str
    body: "Pi"

    def __str__(self):
        return f"(act {self.act} {self.body})"


Pi = Union[PAnd, POr, Box, Dia]
Kappa = Union[KAnd, KOr, Act]

TT = PAnd(())
FF = POr(())
KTT = KAnd(())
KFF = KOr(())


def _flat(cls, args) -> tuple:
    out = set()
    for a in args:
        out.update(a.args if isinstance(a, cls) else (a,))
    return tuple(sorted(out, key=str))


def p_and(*args: Pi) -> Pi:
    items = _flat(PAnd, args)
    if FF in items:
        return FF
    return items[0] if len(items) == 1 else PAnd(items)


def p_or(*args: Pi) -> Pi:
    items = _flat(POr, args)
    if TT in items:
        return TT
    return items[0] if len(items) == 1 else POr(items)


def k_and(*args: Kappa) -> Kappa:
    items = _flat(KAnd, args)
    if KFF in items:
        return KFF
    return items[0] if len(items) == 1 else KAnd(items)


def k_or(*args: Kappa) -> Kappa:
    items = _flat(KOr, args)
    if KTT in items:
        return KTT
    return items[0] if len(items) == 1 else KOr(items)


def parse_proc_formula(text: str) -> Pi:
    return proc_from_sexpr(parse(text), "pi")


def proc_from_sexpr(node: SExpr, sort: str = "pi"):
    if isinstance(node, str):
        if node == "tt":
            return TT if sort == "pi" else KTT
        if node == "ff":
            return FF if sort == "pi" else KFF
        raise ParseError(f"unknown process formula atom {node!r}")
    if not node:
        raise ParseError("empty process formula")
    tag, *args = node
    if tag in ("and", "or"):
        parts = [proc_from_sexpr(a, sort) for a in args]
        if sort == "pi":
            return (p_and if tag == "and" else p_or)(*parts)
        return (k_and if tag == "and" else k_or)(*parts)
    if sort == "pi" and tag in ("box", "dia") and len(args) == 1:
        return (Box if tag == "box" else Dia)(proc_from_sexpr(args[0], "kappa"))
    if sort == "kappa" and tag == "act" and len(args) == 2 and isinstance(args[0], str):
        return Act(args[0], proc_from_sexpr(args[1], "pi"))
    raise ParseError(f"bad {sort} formula {dumps(node)}")


def modal_depth(phi) -> int:
    if isinstance(phi, (PAnd, POr, KAnd, KOr)):
        return max((modal_depth(a) for a in phi.args), default=0)
    if isinstance(phi, (Box, Dia)):
        return modal_depth(phi.body)
    if isinstance(phi, Act):
        return 1 + modal_depth(phi.body)
    raise TypeError(phi)


def formula_size(phi) -> int:
    if isinstance(phi, (PAnd, POr, KAnd, KOr)):
        return 1 + sum(formula_size(a) for a in phi.args)
    return 1 + formula_size(phi.body)


def sort_of(phi) -> frozenset:
    """Action names occurring in a process or HML formula."""
    if isinstance(phi, (PAnd, POr, KAnd, KOr, HAnd, HOr)):
        return frozenset().union(*(sort_of(a) for a in phi.args))
    if isinstance(phi, (Box, Dia)):
        return sort_of(phi.body)
    if isinstance(phi, (Act, DiaA, BoxA)):
        return frozenset({phi.act}) | sort_of(phi.body)
    if isinstance(phi, Init):
        return phi.acts
    raise TypeError(phi)


def converges(phi) -> bool:
    """The syntactic predicate: does the completely undefined process fail ``phi``?"""
    if isinstance(phi, (PAnd, KAnd)):
        return any(converges(a) for a in phi.args)
    if isinstance(phi, (POr, KOr)):
        return all(converges(a) for a in phi.args)
    if isinstance(phi, Act):
        return True
    return converges(phi.body)


# ---------------------------------------------------------------------------
# satisfaction over any transition view

View = Callable[[object], tuple]


def sat_view(view: View, state, phi: Pi) -> bool:
    """Satisfaction where ``view(state)`` returns (diverges, moves)."""
    memo: dict = {}

    def pi(s, f) -> bool:
        key = (s, f)
        if key not in memo:
            memo[key] = _pi(s, f)
        return memo[key]

    def _pi(s, f) -> bool:
        if isinstance(f, PAnd):
            return all(pi(s, g) for g in f.args)
        if isinstance(f, POr):
            return any(pi(s, g) for g in f.args)
        div, moves = view(s)
        caps = list(moves) + ([None] if div else [])
        if isinstance(f, Box):
            return all(kap(c, f.body) for c in caps)
        if isinstance(f, Dia):
            return any(kap(c, f.body) for c in caps + [None])
        raise SortError(f"expected a pi formula, got {f}")

    def kap(c, f) -> bool:
        if isinstance(f, KAnd):
            return all(kap(c, g) for g in f.args)
        if isinstance(f, KOr):
            return any(kap(c, g) for g in f.args)
        if isinstance(f, Act):
            return c is not None and c[0] == f.act and pi(c[1], f.body)
        raise SortError(f"expected a kappa formula, got {f}")

    return pi(state, phi)


def psat(l: Lts, p: str, phi: Pi) -> bool:
    return sat_view(l.view, p, phi)


def equivalent_on(l: Lts, phi: Pi, psi: Pi) -> bool:
    return all(psat(l, p, phi) == psat(l, p, psi) for p in l.states)


# ---------------------------------------------------------------------------
# finite elements


class ProcElement:
    """A finite element given by a divergence flag and generator capabilities."""

    __slots__ = ("divergent", "caps", "_hash")

    def __init__(self, divergent: bool, caps: Iterable = ()):
        self.divergent = bool(divergent)
        self.caps = _canonical_caps(self.divergent, frozenset(caps))
        self._hash = hash((self.divergent, self.caps))

    def __eq__(self, other):
        return isinstance(other, ProcElement) and self._hash == other._hash \
            and self.divergent == other.divergent and self.caps == other.caps

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"ProcElement({self})"

    def __str__(self):
        parts = [f"({a} {d})" for a, d in sorted(self.caps, key=lambda c: (c[0], str(c[1])))]
        if self.divergent:
            parts.append("bot")
        return "{" + " ".join(parts) + "}"

    def view(self) -> tuple:
        return self.divergent, tuple(self.caps)

    def depth(self) -> int:
        return max((1 + d.depth() for _, d in self.caps), default=0)


def _cap_leq(c1, c2) -> bool:
    return c1[0] == c2[0] and leq(c1[1], c2[1])


def _canonical_caps(divergent: bool, caps: frozenset) -> frozenset:
    maximal = {c for c in caps if not any(d != c and _cap_leq(c, d) for d in caps)}
    if divergent:
        return frozenset(maximal)
    minimal = {c for c in caps if not any(d != c and _cap_leq(d, c) for d in caps)}
    return frozenset(maximal | minimal)


@functools.lru_cache(maxsize=None)
def leq(d1: ProcElement, d2: ProcElement) -> bool:
    """Egli-Milner order with a least element and an isolated empty set."""
    if not all(any(_cap_leq(c1, c2) for c2 in d2.caps) for c1 in d1.caps):
        return False
    if d1.divergent:
        return True
    if d2.divergent:
        return False
    return all(any(_cap_leq(c1, c2) for c1 in d1.caps) for c2 in d2.caps)


BOTTOM = ProcElement(True)
EMPTY = ProcElement(False)


def elem_sat(d: ProcElement, phi: Pi) -> bool:
    return sat_view(ProcElement.view, d, phi)


def universal_sem(l: Lts, p: str, depth: int) -> ProcElement:
    """The depth-truncated unfolding of ``p`` as a finite element."""
    memo: dict = {}

    def go(s, n):
        if n == 0:
            return BOTTOM
        key = (s, n)
        if key not in memo:
            memo[key] = ProcElement(l.diverges(s), [(a, go(q, n - 1)) for a, q in l.succ(s)])
        return memo[key]

    return go(p, depth)


def enumerate_elements(acts: Iterable[str], depth: int, cap: int = 200_000) -> list:
    """All finite elements of depth at most ``depth`` over ``acts`` (canonical, deduplicated).

    Capabilities with different actions are incomparable, so an element is a
    divergence flag plus an independent generator set per action: an antichain
    when divergent, a set without three-element chains when convergent.
    """
    acts = sorted(acts)
    level = [BOTTOM, EMPTY]
    for _ in range(depth):
        flat = _height_bounded_sets(level, 1)
        tall = _height_bounded_sets(level, 2)
        if len(flat) ** len(acts) + len(tall) ** len(acts) > cap:
            raise BlowupLimit("element enumeration exceeded the cap")
        found = set()
        for divergent, pool in ((True, flat), (False, tall)):
            for combo in itertools.product(pool, repeat=len(acts)):
                found.add(ProcElement(divergent, [(a, d) for a, part in zip(acts, combo) for d in part]))
        level = sorted(found, key=str)
    return level


def _height_bounded_sets(elems: list, height: int) -> list:
    below = {(i, j) for i, x in enumerate(elems) for j, y in enumerate(elems) if i != j and leq(x, y)}
    out = []

    def grow(start, chosen):
        out.append(tuple(elems[i] for i in chosen))
        for i in range(start, len(elems)):
            trial = chosen + [i]
            if _chain_height(trial, below) <= height:
                grow(i + 1, trial)

    grow(0, [])
    return out


def _chain_height(idx: list, below: set) -> int:
    best = {}
    for i in sorted(idx, key=lambda i: sum((j, i) in below for j in idx)):
        best[i] = 1 + max((best[j] for j in best if (j, i) in below), default=0)
    return max(best.values(), default=0)


# ---------------------------------------------------------------------------
# prime normal forms


@dataclass(frozen=True)
class DivPrime:
    """A conjunction of diamonds over actions, one per pair in ``dias``."""
    dias: frozenset


@dataclass(frozen=True)
class ConvPrime:
    """A box over a disjunction of actions together with diamonds."""
    box: frozenset
    dias: frozenset


Prime = Union[DivPrime, ConvPrime]


@functools.lru_cache(maxsize=None)
def k_prime(p: Prime) -> ProcElement:
    if isinstance(p, DivPrime):
        return ProcElement(True, [(a, k_prime(q)) for a, q in p.dias])
    return ProcElement(False, [(a, k_prime(q)) for a, q in p.box | p.dias])


def prime_formula(p: Prime) -> Pi:
    dias = [Dia(Act(a, prime_formula(q))) for a, q in p.dias]
    if isinstance(p, DivPrime):
        return p_and(*dias)
    return p_and(Box(k_or(*[Act(a, prime_formula(q)) for a, q in p.box])), *dias)


def _below(c1, c2) -> bool:
    """b(psi) <= a(phi) for pairs of prime arguments."""
    return c1[0] == c2[0] and leq(k_prime(c2[1]), k_prime(c1[1]))


def as_prime(phi: Pi) -> Optional[Prime]:
    """Read ``phi`` syntactically as a prime normal form, or return None."""
    parts = phi.args if isinstance(phi, PAnd) else (phi,)
    boxes, dias = [], []
    for c in parts:
        if isinstance(c, Box):
            boxes.append(c.body)
        elif isinstance(c, Dia) and isinstance(c.body, Act):
            inner = as_prime(c.body.body)
            if inner is None:
                return None
            dias.append((c.body.act, inner))
        else:
            return None
    if not boxes:
        return DivPrime(frozenset(dias))
    if len(boxes) > 1:
        return None
    body = boxes[0]
    alts = body.args if isinstance(body, KOr) else (body,)
    items = []
    for alt in alts:
        if not isinstance(alt, Act):
            return None
        inner = as_prime(alt.body)
        if inner is None:
            return None
        items.append((alt.act, inner))
    box, dset = frozenset(items), frozenset(dias)
    if not all(any(_below(d, b) for d in dset) for b in box):
        return None
    if not all(any(_below(d, b) for b in box) for d in dset):
        return None
    return ConvPrime(box, dset)


def is_pnf(phi: Pi) -> bool:
    return as_prime(phi) is not None


def is_sdnf(phi: Pi) -> bool:
    parts = phi.args if isinstance(phi, POr) else (phi,)
    return all(is_pnf(p) for p in parts)


def k_elem(phi: Pi) -> ProcElement:
    p = as_prime(phi)
    if p is None:
        raise NotNormalForm(f"not in prime normal form: {phi}")
    return k_prime(p)


@functools.lru_cache(maxsize=None)
def def_prime(d: ProcElement) -> Prime:
    caps = frozenset((a, def_prime(e)) for a, e in d.caps)
    if d.divergent:
        return DivPrime(caps)
    return ConvPrime(caps, caps)


def def_formula(d: ProcElement) -> Pi:
    return prime_formula(def_prime(d))


# ---------------------------------------------------------------------------
# strong disjunctive normal form


def _product(options: list, limit: int = SDNF_CAP) -> list:
    out = [()]
    for opt in options:
        out = [x + (y,) for x in out for y in opt]
        if len(out) > limit:
            raise BlowupLimit("normal form exceeded the disjunct cap")
    return out


def _pi_dnf(phi: Pi) -> list:
    """Disjuncts as pairs (boxes, diamonds) of kappa bodies."""
    if isinstance(phi, POr):
        return [c for a in phi.args for c in _pi_dnf(a)]
    if isinstance(phi, PAnd):
        return [(sum((c[0] for c in combo), ()), sum((c[1] for c in combo), ()))
                for combo in _product([_pi_dnf(a) for a in phi.args])]
    if isinstance(phi, Box):
        return [((phi.body,), ())]
    if isinstance(phi, Dia):
        return [((), (phi.body,))]
    raise SortError(f"expected a pi formula, got {phi}")


def _kappa_dnf(kap: Kappa) -> list:
    """Disjuncts as tuples of (action, pi) conjuncts."""
    if isinstance(kap, KOr):
        return [c for a in kap.args for c in _kappa_dnf(a)]
    if isinstance(kap, KAnd):
        return [sum(combo, ()) for combo in _product([_kappa_dnf(a) for a in kap.args])]
    if isinstance(kap, Act):
        return [((kap.act, kap.body),)]
    raise SortError(f"expected a kappa formula, got {kap}")


def _single_action(clause: tuple) -> Optional[tuple]:
    """A nonempty same-action conjunction a(phi1)...a(phin) as (a, phi1 and ... phin)."""
    acts = {a for a, _ in clause}
    if len(acts) != 1:
        return None
    return clause[0][0], p_and(*[f for _, f in clause])


def _weakest(items) -> frozenset:
    items = sorted(items, key=_pair_key)
    keep = []
    for i, c in enumerate(items):
        if not any(j != i and _below(c, d) and (not _below(d, c) or j < i) for j, d in enumerate(items)):
            keep.append(c)
    return frozenset(keep)


def _strongest(items) -> frozenset:
    items = sorted(items, key=_pair_key)
    keep = []
    for i, c in enumerate(items):
        if not any(j != i and _below(d, c) and (not _below(c, d) or j < i) for j, d in enumerate(items)):
            keep.append(c)
    return frozenset(keep)


def _pair_key(c) -> str:
    return c[0] + " " + str(prime_formula(c[1]))


@functools.lru_cache(maxsize=None)
def sdnf_primes(phi: Pi) -> tuple:
    """The disjuncts of a strong disjunctive normal form of ``phi``."""
    thetas = []
    for boxes, dias in _pi_dnf(phi):
        thetas.extend(_flatten_conjunct(boxes, dias))
    out = []
    work = list(thetas)
    while work:
        box, dias = work.pop()
        dias = _strongest(dias)
        if box is None:
            out.append(DivPrime(dias))
            continue
        box = _weakest(box)
        uncovered = sorted((b for b in box if not any(_below(d, b) for d in dias)), key=_pair_key)
        # each uncovered box item is either dropped or demanded, doubling the case split
        if 2 ** len(uncovered) > SDNF_CAP:
            raise BlowupLimit(f"SDNF case split over {len(uncovered)} box items exceeds the disjunct cap")
        bad = uncovered[0] if uncovered else None
        if bad is not None:
            work.append((box - {bad}, dias))
            work.append((box, dias | {bad}))
            continue
        bad = next((d for d in sorted(dias, key=_pair_key) if not any(_below(d, b) for b in box)), None)
        if bad is not None:
            act, psi = bad
            rest = dias - {bad}
            for a, phi1 in sorted(box, key=_pair_key):
                if a != act:
                    continue
                for theta in sdnf_primes(p_and(prime_formula(phi1), prime_formula(psi))):
                    work.append((box, rest | {(act, theta)}))
            continue
        out.append(ConvPrime(box, dias))
        if len(out) + len(work) > SDNF_CAP:
            raise BlowupLimit("SDNF exceeded the disjunct cap")
    return _prune_disjuncts(out)


def _flatten_conjunct(boxes: tuple, dias: tuple) -> list:
    box = None
    if boxes:
        items, unconstrained = set(), False
        for clause in _kappa_dnf(k_and(*boxes)):
            if not clause:
                unconstrained = True
                break
            merged = _single_action(clause)
            if merged is None:
                continue
            items.update((merged[0], q) for q in sdnf_primes(merged[1]))
        box = None if unconstrained else frozenset(items)
    options = []
    for kap in dias:
        clauses = _kappa_dnf(kap)
        if any(not c for c in clauses):
            continue
        opts = []
        for clause in clauses:
            merged = _single_action(clause)
            if merged is not None:
                opts.extend((merged[0], q) for q in sdnf_primes(merged[1]))
        if not opts:
            return []
        options.append(sorted(set(opts), key=_pair_key))
    return [(box, frozenset(combo)) for combo in _product(options)]


def _prune_disjuncts(primes: list) -> tuple:
    uniq = {}
    for p in primes:
        uniq.setdefault(k_prime(p), p)
    elems = sorted(uniq, key=str)
    keep = [d for d in elems if not any(e != d and leq(e, d) for e in elems)]
    return tuple(uniq[d] for d in keep)


def sdnf(phi: Pi) -> Pi:
    return p_or(*[prime_formula(p) for p in sdnf_primes(phi)])


def entails_proc(phi: Pi, psi: Pi) -> bool:
    """Decide phi <= psi by comparing the elements of the prime disjuncts."""
    right = [k_prime(q) for q in sdnf_primes(psi)]
    return all(any(leq(e, k_prime(p)) for e in right) for p in sdnf_primes(phi))


def entailment_witness(phi: Pi, psi: Pi) -> Optional[ProcElement]:
    """An element satisfying phi but not psi, or None when phi entails psi."""
    right = [k_prime(q) for q in sdnf_primes(psi)]
    for p in sdnf_primes(phi):
        d = k_prime(p)
        if not any(leq(e, d) for e in right):
            return d
    return None


def equivalent_proc(phi: Pi, psi: Pi) -> bool:
    return entails_proc(phi, psi) and entails_proc(psi, phi)


# ---------------------------------------------------------------------------
# synchronisation trees


@dataclass(frozen=True)
class SyncTree:
    summands: tuple = ()
    omega: bool = False

    def __str__(self):
        if not self.summands:
            return "Omega" if self.omega else "O"
        parts = [f"{a}{_tree_arg(t)}" for a, t in self.summands]
        if self.omega:
            parts.append("Omega")
        return "+".join(parts)

    def view(self) -> tuple:
        return self.omega, self.summands


def _tree_arg(t: SyncTree) -> str:
    s = str(t)
    return s if s in ("O", "Omega") or "+" not in s else f"({s})"


def make_tree(summands: Iterable, omega: bool = False) -> SyncTree:
    return SyncTree(tuple(sorted(summands, key=lambda c: (c[0], str(c[1])))), omega)


def st_prime(p: Prime) -> SyncTree:
    kids = [(a, st_prime(q)) for a, q in p.dias]
    if isinstance(p, DivPrime):
        return make_tree(kids, omega=True)
    return make_tree([(a, st_prime(q)) for a, q in p.box] + kids)


def st_tree(phi: Pi) -> SyncTree:
    p = as_prime(phi)
    if p is None:
        raise NotNormalForm(f"not in prime normal form: {phi}")
    return st_prime(p)


def embed_tree(l: Lts, tree: SyncTree, prefix: str = "st") -> tuple:
    """Add ``tree`` as a fresh component of ``l``; returns (new lts, root state)."""
    trans, div, states = set(l.trans), set(l.div), list(l.states)
    counter = itertools.count()

    def add(t: SyncTree) -> str:
        name = f"{prefix}{next(counter)}"
        while name in l.states:
            name = f"{prefix}{next(counter)}"
        states.append(name)
        if t.omega:
            div.add(name)
        for a, sub in t.summands:
            trans.add((name, a, add(sub)))
        return name

    root = add(tree)
    acts = set(l.acts) | {a for _, a, _ in trans}
    return Lts(tuple(acts), tuple(states), frozenset(trans), frozenset(div)), root


def tree_element(t: SyncTree) -> ProcElement:
    return ProcElement(t.omega, [(a, tree_element(s)) for a, s in t.summands])


# ---------------------------------------------------------------------------
# Hennessy-Milner logic with the init extension


@dataclass(frozen=True)
class HAnd:
    args: tuple

    def __str__(self):
        return "tt" if not self.args else "(and " + " ".join(map(str, self.args)) + ")"


@dataclass(frozen=True)
class HOr:
    args: tuple

    def __str__(self):
        return "ff" if not self.args else "(or " + " ".join(map(str, self.args)) + ")"


@dataclass(frozen=True)
class DiaA:
    act: str
    body: "Hml"

    def __str__(self):
        return f"(diaa {self.act} {self.body})"


@dataclass(frozen=True)
class BoxA:
    act: str
    body: "Hml"

    def __str__(self):
        return f"(boxa {self.act} {self.body})"


@dataclass(frozen=True)
class Init:
    acts: frozenset

    def __str__(self):
        return "(init" + "".join(" " + a for a in sorted(self.acts)) + ")"


Hml = Union[HAnd, HOr, DiaA, BoxA, Init]
HTT = HAnd(())
HFF = HOr(())


def h_and(*args: Hml) -> Hml:
    items = _flat(HAnd, args)
    if HFF in items:
        return HFF
    return items[0] if len(items) == 1 else HAnd(items)


def h_or(*args: Hml) -> Hml:
    items = _flat(HOr, args)
    if HTT in items:
        return HTT
    return items[0] if len(items) == 1 else HOr(items)


def parse_hml(text: str) -> Hml:
    return hml_from_sexpr(parse(text))


def hml_from_sexpr(node: SExpr) -> Hml:
    if node == "tt":
        return HTT
    if node == "ff":
        return HFF
    if isinstance(node, list) and node:
        tag, *args = node
        if tag in ("and", "or"):
            parts = [hml_from_sexpr(a) for a in args]
            return HAnd(tuple(parts)) if tag == "and" else HOr(tuple(parts))
        if tag in ("diaa", "boxa") and len(args) == 2 and isinstance(args[0], str):
            return (DiaA if tag == "diaa" else BoxA)(args[0], hml_from_sexpr(args[1]))
        if tag == "init" and all(isinstance(a, str) for a in args):
            return Init(frozenset(args))
    raise ParseError(f"bad HML formula {dumps(node)}")


def hml_depth(psi: Hml) -> int:
    if isinstance(psi, (HAnd, HOr)):
        return max((hml_depth(a) for a in psi.args), default=0)
    if isinstance(psi, (DiaA, BoxA)):
        return 1 + hml_depth(psi.body)
    return 0


def hml_size(psi: Hml) -> int:
    if isinstance(psi, (HAnd, HOr)):
        return 1 + sum(hml_size(a) for a in psi.args)
    if isinstance(psi, (DiaA, BoxA)):
        return 1 + hml_size(psi.body)
    return 1


def hml_sat_view(view: View, state, psi: Hml) -> bool:
    """HML satisfaction; ``[a]`` also demands convergence, as does ``init``."""
    if isinstance(psi, HAnd):
        return all(hml_sat_view(view, state, a) for a in psi.args)
    if isinstance(psi, HOr):
        return any(hml_sat_view(view, state, a) for a in psi.args)
    div, moves = view(state)
    if isinstance(psi, DiaA):
        return any(a == psi.act and hml_sat_view(view, q, psi.body) for a, q in moves)
    if isinstance(psi, BoxA):
        return not div and all(hml_sat_view(view, q, psi.body) for a, q in moves if a == psi.act)
    if isinstance(psi, Init):
        return not div and all(a in psi.acts for a, _ in moves)
    raise TypeError(psi)


def hml_sat(l: Lts, p: str, psi: Hml) -> bool:
    return hml_sat_view(l.view, p, psi)


def star(psi: Hml, acts: Iterable[str]) -> Pi:
    """Translate an HML formula into the process logic over the finite action set ``acts``."""
    acts = frozenset(acts)
    if not sort_of(psi) <= acts:
        raise SortError(f"formula uses actions outside {sorted(acts)}")
    return _star(psi, acts)


def _star(psi: Hml, acts: frozenset) -> Pi:
    if isinstance(psi, HAnd):
        return p_and(*[_star(a, acts) for a in psi.args])
    if isinstance(psi, HOr):
        return p_or(*[_star(a, acts) for a in psi.args])
    if isinstance(psi, DiaA):
        return Dia(Act(psi.act, _star(psi.body, acts)))
    if isinstance(psi, BoxA):
        others = [Act(b, TT) for b in sorted(acts - {psi.act})]
        return Box(k_or(Act(psi.act, _star(psi.body, acts)), *others))
    if isinstance(psi, Init):
        return Box(k_or(*[Act(a, TT) for a in sorted(psi.acts)]))
    raise TypeError(psi)


def nl_normal(phi: Pi) -> Pi:
    """Rewrite into the normal forms accepted by ``dagger``.

    These are conjunctions and disjunctions of ``Dia(Act(a, .))`` and of boxes
    over disjunctions with pairwise distinct actions.
    """
    if isinstance(phi, PAnd):
        return p_and(*[nl_normal(a) for a in phi.args])
    if isinstance(phi, POr):
        return p_or(*[nl_normal(a) for a in phi.args])
    if isinstance(phi, Dia):
        alts = []
        for clause in _kappa_dnf(phi.body):
            if not clause:
                return TT
            merged = _single_action(clause)
            if merged is not None:
                alts.append(Dia(Act(merged[0], nl_normal(merged[1]))))
        return p_or(*alts)
    if isinstance(phi, Box):
        boxes = []
        for clause in _kappa_cnf(phi.body):
            groups: dict = {}
            for a, f in clause:
                groups.setdefault(a, []).append(f)
            boxes.append(Box(k_or(*[Act(a, nl_normal(p_or(*fs))) for a, fs in sorted(groups.items())])))
        return p_and(*boxes)
    raise SortError(f"expected a pi formula, got {phi}")


def _kappa_cnf(kap: Kappa) -> list:
    """Conjuncts as tuples of (action, pi) disjuncts, with same-action conjunctions merged."""
    if isinstance(kap, KAnd):
        return [c for a in kap.args for c in _kappa_cnf(a)]
    if isinstance(kap, KOr):
        return [sum(combo, ()) for combo in _product([_kappa_cnf(a) for a in kap.args])]
    if isinstance(kap, Act):
        return [((kap.act, kap.body),)]
    raise SortError(f"expected a kappa formula, got {kap}")


def dagger(phi: Pi, acts: Iterable[str], use_init: bool = True) -> Hml:
    """Translate a process formula into HML.

    With ``use_init`` the box clause emits ``init``; otherwise it emits
    ``[b]ff`` for every declared action b outside the box, which is only
    faithful on convergent processes when that set is nonempty.
    """
    acts = frozenset(acts)
    if not sort_of(phi) <= acts:
        raise SortError(f"formula uses actions outside {sorted(acts)}")
    return _dagger(nl_normal(phi), acts, use_init)


def _dagger(phi: Pi, acts: frozenset, use_init: bool) -> Hml:
    if isinstance(phi, PAnd):
        return h_and(*[_dagger(a, acts, use_init) for a in phi.args])
    if isinstance(phi, POr):
        return h_or(*[_dagger(a, acts, use_init) for a in phi.args])
    if isinstance(phi, Dia) and isinstance(phi.body, Act):
        return DiaA(phi.body.act, _dagger(phi.body.body, acts, use_init))
    if isinstance(phi, Box):
        alts = phi.body.args if isinstance(phi.body, KOr) else (phi.body,)
        if not all(isinstance(a, Act) for a in alts) or len({a.act for a in alts}) != len(alts):
            raise NotNormalForm(f"box is not over distinct actions: {phi}")
        parts = [BoxA(a.act, _dagger(a.body, acts, use_init)) for a in alts]
        named = frozenset(a.act for a in alts)
        if use_init:
            parts.append(Init(named))
        else:
            parts.extend(BoxA(b, HFF) for b in sorted(acts - named))
        return h_and(*parts)
    raise NotNormalForm(f"not in the dagger normal form: {phi}")


def enumerate_hml(acts: Iterable[str], max_size: int, max_depth: int, with_init: bool = False) -> dict:
    """All HML formulas by (size, depth) up to the bounds, with binary connectives.

    Returns a dict from size to a list of (formula, depth).  ``init`` atoms are
    included only when requested.
    """
    acts = sorted(acts)
    table: dict = {1: [(HTT, 0), (HFF, 0)]}
    if with_init:
        for r in range(len(acts) + 1):
            for sub in itertools.combinations(acts, r):
                table[1].append((Init(frozenset(sub)), 0))
    for size in range(2, max_size + 1):
        found = []
        for f, d in table[size - 1]:
            if d < max_depth:
                for a in acts:
                    found.append((DiaA(a, f), d + 1))
                    found.append((BoxA(a, f), d + 1))
        for left in range(1, size - 1):
            right = size - 1 - left
            for f, d in table[left]:
                for g, e in table[right]:
                    found.append((HAnd((f, g)), max(d, e)))
                    found.append((HOr((f, g)), max(d, e)))
        table[size] = found
    return table
