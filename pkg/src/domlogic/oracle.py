"""Brute-force semantic oracles and the randomized suites that compare against them.

Every suite is deterministic for a given seed and returns a :class:`Report`
whose failures carry an auditable witness.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

from . import elements as el
from . import formulas as fm
from . import gen, lazy, logic, process as pr, sccs, terms as tm
from .errors import BlowupLimit


@dataclass
class Report:
    name: str
    cases: int = 0
    failures: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def lines(self) -> list:
        out = [f"{self.name}: {self.cases} cases, {len(self.failures)} failures"]
        out += [f"  note: {n}" for n in self.notes]
        out += [f"  witness: {w}" for w in self.failures[:10]]
        return out


# ---------------------------------------------------------------- oracles

def entails_by_elements(phi, psi, sigma) -> bool:
    """phi <= psi checked on every finite element of the joint rank."""
    r = max(fm.rank(phi, sigma), fm.rank(psi, sigma))
    return all(el.sat(u, psi, sigma) for u in el.enumerate_elements(sigma, r) if el.sat(u, phi, sigma))


def consistent_by_elements(phi, sigma) -> bool:
    return any(el.sat(u, phi, sigma) for u in el.enumerate_elements(sigma, fm.rank(phi, sigma)))


def terminates_by_elements(phi, sigma) -> bool:
    return not el.sat(el.bottom(sigma), phi, sigma)


def stabilization_index(l: pr.Lts) -> int:
    return pr.prebisim_relation(l)[1] + 1


def usem_below(l: pr.Lts, p: str, q: str, n: int) -> bool:
    return pr.leq(pr.universal_sem(l, p, n), pr.universal_sem(l, q, n))


def lazy_entails_by_elements(phi, psi) -> bool:
    return lazy.lleq(lazy.lelem(psi), lazy.lelem(phi))


def random_lformula(rng: random.Random, depth: int):
    if depth == 0 or rng.random() < 0.2:
        return lazy.TOP
    if rng.random() < 0.3:
        return lazy.l_and(random_lformula(rng, depth), random_lformula(rng, depth))
    return lazy.ArrBot(random_lformula(rng, depth - 1), random_lformula(rng, depth - 1))


def random_pnf(rng: random.Random, sigma, size: int):
    """A prime formula, possibly an inconsistent conjunction of two."""
    while True:
        phi = gen.random_formula(rng, sigma, size)
        if rng.random() < 0.4:
            phi = fm.conj(phi, gen.random_formula(rng, sigma, size))
        if logic.is_pnf(phi):
            return phi


def lazy_universe(extra: int = 200, seed: int = 0) -> list:
    """Formulas of depth at most three standing for every element of D_3.

    The canonical formula of each element of D_3 is joined by bare arrows over
    D_2, the NL formulas of depth two and random syntactic variants.
    """
    rng = random.Random(seed)
    d2, d3 = lazy.lazy_elements(2), lazy.lazy_elements(3)
    out = [lazy.lformula(d) for d in d3]
    out += [lazy.ArrBot(lazy.lformula(a), lazy.lformula(b)) for a in d2 for b in d2]
    out += lazy.nl_formulas(2)
    while len(out) < len(d3) + len(d2) ** 2 + 8 + extra:
        phi = random_lformula(rng, 3)
        if lazy.ldepth(phi) <= 3:
            out.append(phi)
    return list(dict.fromkeys(out))


# ---------------------------------------------------------------- suites

def suite_entails(cases: int, size: int, seed: int) -> Report:
    rng = random.Random(seed)
    rep = Report("entails vs element oracle")
    for sigma in gen.TYPE_SHAPES:
        for _ in range(cases):
            phi = gen.random_formula(rng, sigma, rng.randint(1, size))
            psi = gen.random_formula(rng, sigma, rng.randint(1, size))
            rep.cases += 1
            got, want = logic.entails(phi, psi, sigma), entails_by_elements(phi, psi, sigma)
            if got != want:
                rep.failures.append(f"{sigma}: {phi} <= {psi}: procedure {got}, oracle {want}")
    return rep


def suite_meta(cases: int, size: int, seed: int) -> Report:
    rng = random.Random(seed)
    rep = Report("meta-predicates vs element oracle")
    for _ in range(cases):
        sigma = rng.choice(gen.TYPE_SHAPES)
        phi = random_pnf(rng, sigma, rng.randint(1, size))
        flags = logic.meta_predicates(phi, sigma)
        want = (consistent_by_elements(phi, sigma), terminates_by_elements(phi, sigma))
        rep.cases += 1
        if (flags.con, flags.term) != want:
            rep.failures.append(f"{sigma}: {phi}: C,T = {flags.con},{flags.term}, oracle {want}")
    return rep


def suite_cdnf(cases: int, size: int, seed: int) -> Report:
    rng = random.Random(seed)
    rep = Report("CDNF shape and equivalence")
    for _ in range(cases):
        sigma = rng.choice(gen.TYPE_SHAPES)
        phi = gen.random_formula(rng, sigma, rng.randint(1, size))
        psi = logic.to_cdnf(phi, sigma)
        rep.cases += 1
        if not logic.is_cdnf(psi, sigma):
            rep.failures.append(f"{sigma}: {psi} is not in CDNF")
        elif not (entails_by_elements(phi, psi, sigma) and entails_by_elements(psi, phi, sigma)):
            rep.failures.append(f"{sigma}: {phi} and its CDNF {psi} differ")
    return rep


def random_check_case(rng: random.Random, size: int) -> tuple:
    """A random (term, context, assumptions, formula, rank) with satisfiable assumptions."""
    ty = rng.choice(gen.TERM_TYPES)
    ctx = {f"v{j}": rng.choice(gen.TERM_TYPES) for j in range(rng.randint(0, 2))}
    m = gen.random_term(rng, ty, ctx, rng.randint(2, size))
    phi = gen.random_formula(rng, ty, rng.randint(1, 6))
    gamma = {}
    for x, t in ctx.items():
        g = gen.random_formula(rng, t, rng.randint(1, 4))
        while not logic.minsat(g, t):
            g = gen.random_formula(rng, t, rng.randint(1, 4))
        gamma[x] = g
    k = max(1, tm.required_rank(phi, ty, gamma, ctx)) + rng.randint(0, 1)
    return m, ctx, gamma, phi, k


def suite_check(cases: int, size: int, seed: int) -> Report:
    rng = random.Random(seed)
    rep = Report("endogenous check vs enumeration of environments")
    for _ in range(cases):
        m, ctx, gamma, phi, k = random_check_case(rng, size)
        got = tm.check(m, gamma, phi, k, ctx)
        want = tm.check_by_enumeration(m, gamma, phi, k, ctx)
        rep.cases += 1
        if got != want:
            rep.failures.append(f"{tm.to_sexpr(m)} under {gamma} at {phi}, rank {k}: {got} vs {want}")
    return rep


def suite_sdnf(cases: int, size: int, seed: int, n_lts: int = 20) -> Report:
    rng = random.Random(seed)
    acts = ("a", "b")
    systems = [gen.random_lts(rng, rng.randint(1, 8), acts) for _ in range(n_lts)]
    rep = Report("SDNF shape, depth and satisfaction equivalence")
    capped = 0
    while rep.cases < cases:
        phi = gen.random_proc_formula(rng, acts, rng.randint(1, size))
        try:
            psi = pr.sdnf(phi)
        except BlowupLimit:
            capped += 1
            continue
        rep.cases += 1
        if not pr.is_sdnf(psi):
            rep.failures.append(f"{phi}: result {psi} is not in SDNF")
        elif pr.modal_depth(psi) > pr.modal_depth(phi):
            rep.failures.append(f"{phi}: modal depth grew in {psi}")
        else:
            for l in systems:
                if not pr.equivalent_on(l, phi, psi):
                    rep.failures.append(f"{phi}: {psi} differs on\n{l.to_text()}")
                    break
    if capped:
        rep.notes.append(f"{capped} drawn formulas exceeded the disjunct cap and were redrawn")
    return rep


def suite_usem(cases: int, size: int, seed: int) -> Report:
    rng = random.Random(seed)
    rep = Report("prebisimilarity vs universal semantics")
    for _ in range(cases):
        l = gen.random_lts(rng, rng.randint(1, max(1, size)), ("a", "b"))
        n = stabilization_index(l)
        rel = pr.prebisim_relation(l)[0]
        rep.cases += 1
        for p in l.states:
            for q in l.states:
                if ((p, q) in rel) != usem_below(l, p, q, n):
                    rep.failures.append(f"{p},{q} at depth {n} in\n{l.to_text()}")
    return rep


def suite_proc_entails(cases: int, size: int, seed: int) -> Report:
    rng = random.Random(seed)
    acts = ("a", "b")
    systems = [gen.random_lts(rng, rng.randint(1, 6), acts) for _ in range(30)]
    rep = Report("process entailment vs satisfaction on random systems")
    capped = 0
    while rep.cases < cases:
        phi = gen.random_proc_formula(rng, acts, rng.randint(1, size))
        psi = gen.random_proc_formula(rng, acts, rng.randint(1, size))
        try:
            holds = pr.entails_proc(phi, psi)
        except BlowupLimit:
            capped += 1
            continue
        rep.cases += 1
        if not holds:
            continue
        for l in systems:
            bad = [p for p in l.states if pr.psat(l, p, phi) and not pr.psat(l, p, psi)]
            if bad:
                rep.failures.append(f"{phi} <= {psi} claimed but {bad[0]} refutes in\n{l.to_text()}")
                break
    if capped:
        rep.notes.append(f"{capped} drawn pairs exceeded the disjunct cap and were redrawn")
    return rep


def suite_sccs(cases: int, size: int, seed: int) -> Report:
    rng = random.Random(seed)
    monoid = sccs.FreeAbelian(["a", "b"])
    acts = sccs.product_actions(monoid)
    rep = Report("SCCS bisimulation vs denotational order")
    for _ in range(cases):
        t1 = sccs.random_term(rng, monoid, size, acts)
        t2 = sccs.random_term(rng, monoid, size, acts)
        fa = sccs.full_abstraction_report(t1, t2, monoid)
        rep.cases += 1
        if not fa.agrees:
            rep.failures.append(f"{t1} vs {t2}: {fa.summary()}")
    return rep


def suite_lazy(cases: int, size: int, seed: int) -> Report:
    rng = random.Random(seed)
    rep = Report("lazy logic vs element order")
    universe = lazy_universe(extra=cases, seed=seed)
    for phi in universe:
        if lazy.lelem(lazy.lformula(lazy.lelem(phi))) != lazy.lelem(phi):
            rep.failures.append(f"{phi}: formula and element do not round-trip")
        for psi in universe:
            rep.cases += 1
            if lazy.entails_lazy(phi, psi) != lazy_entails_by_elements(phi, psi):
                rep.failures.append(f"{phi} <= {psi}")
    for _ in range(cases):
        m = lazy.random_closed(rng, size)
        for k in (1, 2, 3):
            rep.cases += 1
            if not lazy.lleq(lazy.eval_elem(m, k=k), lazy.eval_elem(lazy.YK, k=k)):
                rep.failures.append(f"{m} is not below YK at rank {k}")
    return rep


SUITES: dict[str, list[Callable]] = {
    "logic-core": [suite_entails, suite_meta, suite_cdnf],
    "elements": [suite_meta],
    "term-language": [suite_check],
    "process-logic": [suite_sdnf, suite_usem, suite_proc_entails],
    "sccs": [suite_sccs],
    "lazy-lambda": [suite_lazy],
}


def run_suites(module: str, cases: int, size: int, seed: int) -> list:
    names = sorted(SUITES) if module == "all" else [module]
    out = []
    for name in names:
        for fn in SUITES[name]:
            out.append(fn(cases, size, seed))
    return out
