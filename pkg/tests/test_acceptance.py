"""Acceptance criteria, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL ...`` line, which is also
collected into the terminal summary.
"""
import itertools
import random
import time

import pytest

from domlogic import elements as el
from domlogic import gen, lazy as lz, logic, oracle, process as pr
from domlogic import types as ty
from domlogic.formulas import TOP, TRUE_F, FALSE_F, ArrowF, PairF, conj
from domlogic.types import BOOL, Fun, Prod

SEED = 20240
FIVE_MINUTES = 300.0


@pytest.fixture
def verdict(record_property):
    def record(n: int, ok: bool, detail: str):
        line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'} {detail}"
        print(line)
        record_property("acceptance", line)
        return ok
    return record


def _summary(rep):
    return f"{rep.cases} cases, {len(rep.failures)} disagreements"


def test_criterion_01_entailment_matches_semantics(verdict):
    assert all(ty.depth(s) <= 3 for s in gen.TYPE_SHAPES)
    start = time.perf_counter()
    rep = oracle.suite_entails(1000, 8, SEED)
    elapsed = time.perf_counter() - start
    ok = rep.ok and rep.cases >= 1000 * len(gen.TYPE_SHAPES) and elapsed < FIVE_MINUTES
    verdict(1, ok, f"{len(gen.TYPE_SHAPES)} shapes, {_summary(rep)}, {elapsed:.1f}s")
    assert ok, rep.failures[:5]


def test_criterion_02_meta_predicates_on_pnf(verdict):
    rep = oracle.suite_meta(2000, 8, SEED)
    ok = rep.ok and rep.cases >= 1000
    verdict(2, ok, _summary(rep))
    assert ok, rep.failures[:5]


BB_B = Fun(Prod(BOOL, BOOL), BOOL)
POR_FORMULA = conj(
    ArrowF(PairF(TRUE_F, TOP), TRUE_F),
    ArrowF(PairF(TOP, TRUE_F), TRUE_F),
    ArrowF(PairF(FALSE_F, FALSE_F), FALSE_F),
)


def test_criterion_03_endogenous_logic_and_parallel_or(verdict):
    rep = oracle.suite_check(300, 6, SEED)
    tt, ff = el.SumL(el.LiftUp(el.UNIT_BOT)), el.SumR(el.LiftUp(el.UNIT_BOT))
    sb = el.SUM_BOT
    por = el.make_fun([(el.PairE(tt, sb), tt), (el.PairE(sb, tt), tt), (el.PairE(ff, ff), ff)], BB_B)
    minimal = logic.minsat(POR_FORMULA, BB_B)
    conjuncts = all(el.sat(por, c, BB_B) for c in POR_FORMULA.args)
    stronger = el.sat(por, ArrowF(PairF(TOP, TOP), TRUE_F), BB_B)
    ok = rep.ok and rep.cases >= 300 and minimal == [por] and conjuncts and not stronger
    verdict(3, ok, f"{_summary(rep)}; parallel or is the unique minimal model: {minimal == [por]}, "
                   f"meets all conjuncts: {conjuncts}, meets (t x t) -> true: {stronger}")
    assert ok, rep.failures[:5]


def test_criterion_04_sdnf(verdict):
    rep = oracle.suite_sdnf(500, 8, SEED, n_lts=20)
    ok = rep.ok and rep.cases == 500
    verdict(4, ok, f"{_summary(rep)} over 20 systems of at most 8 states")
    assert ok, rep.failures[:3]


def test_criterion_05_universal_semantics(verdict):
    rep = oracle.suite_usem(200, 8, SEED)
    ok = rep.ok and rep.cases == 200
    verdict(5, ok, f"{_summary(rep)} (all state pairs of each system)")
    assert ok, rep.failures[:3]


BEX = pr.parse_lts("""
acts a b1 b2
trans p a p1
div p
trans q2 a r1
trans q2 a r2
trans r1 b1 z1
trans r2 b2 z2
div q2
""")


def test_criterion_06_hml_truncation(verdict):
    phi = pr.parse_proc_formula("(dia (act a (box ff)))")
    distinguishes = pr.psat(BEX, "p", phi) and not pr.psat(BEX, "q2", phi)
    not_below = not pr.prebisim(BEX, "p", "q2")
    hml = gen.enumerate_hml(["a", "b1", "b2"], 6, 2)
    separating = [f for f in hml if pr.hml_sat(BEX, "p", f) and not pr.hml_sat(BEX, "q2", f)]
    init = pr.dagger(pr.parse_proc_formula("(box ff)"), ["a", "b1", "b2"])
    with_init = pr.DiaA("a", init)
    init_separates = pr.hml_sat(BEX, "p", with_init) and not pr.hml_sat(BEX, "q2", with_init)
    ok = distinguishes and not_below and not separating and init_separates
    detail = (f"process formula separates p from q2: {distinguishes}; "
              f"{len(hml)} HML formulas enumerated, {len(separating)} separate them")
    if separating:
        smallest = min(separating, key=lambda f: (pr.hml_size(f), str(f)))
        detail += f" (smallest: {smallest})"
    detail += f"; dagger of (box ff) is {init}, which separates: {init_separates}"
    verdict(6, ok, detail)
    assert ok, detail


def test_criterion_07_sccs_full_abstraction(verdict):
    start = time.perf_counter()
    rep = oracle.suite_sccs(500, 4, SEED)
    elapsed = time.perf_counter() - start
    ok = rep.ok and rep.cases == 500 and elapsed < FIVE_MINUTES
    verdict(7, ok, f"{_summary(rep)}, {elapsed:.1f}s")
    assert ok, rep.failures[:5]


def test_criterion_08_lazy_landmarks(verdict):
    checks = {}
    checks["Omega does not converge"] = not lz.eval_whnf(lz.OMEGA).converges
    checks["lam x. Omega converges"] = lz.eval_whnf(lz.parse_lambda("(lam x Omega)")).converges
    eta_omega = lz.parse_lambda("(lam x (Omega x))")
    corpus = [lz.I, lz.K, lz.OMEGA, lz.KOMEGA]
    checks["lam x. Omega x vs Omega refuted at rank 1"] = (
        lz.bisim_corpus(eta_omega, lz.OMEGA, 1, corpus).refuted
        and not lz.lleq(lz.eval_elem(eta_omega, k=1), lz.eval_elem(lz.OMEGA, k=1)))
    checks["YK applied to any 1..5 arguments converges"] = all(
        lz.eval_whnf(lz.apps(lz.YK, *args)).converges
        for n in range(1, 6) for args in itertools.product([lz.OMEGA, lz.KOMEGA, lz.I], repeat=n))
    rng = random.Random(SEED)
    sampled = [lz.random_closed(rng, 10) for _ in range(200)]
    below = [m for m in sampled
             if not all(lz.lleq(lz.eval_elem(m, k=k), lz.eval_elem(lz.YK, k=k)) for k in (1, 2, 3))]
    checks["200 sampled terms below YK at ranks 1-3"] = not below
    ok = all(checks.values())
    verdict(8, ok, "; ".join(f"{k}: {v}" for k, v in checks.items()))
    assert ok, [str(m) for m in below[:5]]


def test_criterion_09_lazy_duality(verdict):
    universe = oracle.lazy_universe(extra=200, seed=SEED)
    covered = {lz.lelem(p) for p in universe} == set(lz.lazy_elements(3))
    assert all(lz.ldepth(p) <= 3 for p in universe)
    bad = [(p, q) for p in universe for q in universe
           if lz.entails_lazy(p, q) != oracle.lazy_entails_by_elements(p, q)]
    ok = covered and not bad
    verdict(9, ok, f"{len(universe)} formulas covering all 36 elements of D_3: {covered}, "
                   f"{len(universe) ** 2} pairs, {len(bad)} disagreements")
    assert ok, bad[:5]


def test_criterion_10_definability(verdict):
    nl = lz.nl_formulas(2)
    bad = []
    for phi in nl:
        m = lz.m_phi(phi)
        for psi in nl:
            want = lz.entails_lazy(phi, psi)
            if lz.lcheck(m, {}, psi, dialect="withP") != want:
                bad.append(f"M[{phi}] |= {psi}")
            if lz.eval_whnf(lz.App(lz.t_phi(psi), m), dialect="withP").converges != want:
                bad.append(f"T[{psi}] M[{phi}]")
    ok = not bad and len(nl) > 0
    verdict(10, ok, f"{len(nl)} NL formulas of depth <= 2, {len(nl) ** 2} pairs, {len(bad)} failures")
    assert ok, bad[:5]


def test_criterion_11_sequentiality_harnesses(verdict):
    n_seq, bad_seq = lz.sequentiality_counterexamples(8)
    n_par, bad_par = lz.parallel_counterexamples(7)
    ok = not bad_seq and not bad_par
    verdict(11, ok, f"{n_seq} pure terms of size <= 8, {len(bad_seq)} counterexamples; "
                    f"{n_par} withC terms of size <= 7, {len(bad_par)} counterexamples")
    assert ok, [str(c) for c in (bad_seq + bad_par)[:5]]
