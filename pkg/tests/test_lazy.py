import random

import pytest
from hypothesis import given, settings, strategies as st

from domlogic import lazy as lz
from domlogic.errors import IllegalConstant, NotNormalForm, RankExplosion
from domlogic.lazy import App, Const, Lam, Var

seeds = st.integers(0, 2**31)


def L(text, dialect="pure"):
    return lz.parse_lambda(text, dialect)


def F(text):
    return lz.parse_lformula(text)


def test_parse_abbreviations_and_sugar():
    assert L("I") == lz.I
    assert L("(lam x y x)") == lz.K
    assert L("(f a b)") == App(App(Var("f"), Var("a")), Var("b"))
    assert L("(app f a)") == App(Var("f"), Var("a"))
    assert L("(lam C C)") == Lam("C", Var("C"))
    assert L("(C x)", "withC") == App(Const("C"), Var("x"))


def test_dialects_are_enforced():
    with pytest.raises(IllegalConstant):
        L("(C x)")
    with pytest.raises(IllegalConstant):
        lz.eval_elem(L("star", "withStar"), dialect="withStar")
    with pytest.raises(IllegalConstant):
        lz.classify(L("P", "withP"), dialect="withP")


def test_whnf_landmarks():
    assert not lz.eval_whnf(lz.OMEGA).converges
    assert lz.eval_whnf(lz.OMEGA).kind in ("diverges", "fuel-out")
    assert lz.eval_whnf(L("(lam x Omega)")).converges
    assert lz.eval_whnf(lz.KOMEGA).converges
    yk = lz.YK
    args = [L(t) for t in ("I", "K", "Omega", "(K Omega)", "YK")]
    for n in range(1, 6):
        assert lz.eval_whnf(lz.apps(yk, *args[:n])).converges


def test_strict_and_parallel_constants():
    assert lz.eval_whnf(L("(C (K Omega) I)", "withC"), dialect="withC").term == lz.I
    assert not lz.eval_whnf(L("(C Omega I)", "withC"), dialect="withC").converges
    for args in ("(K Omega) Omega", "Omega (K Omega)"):
        assert lz.eval_whnf(L(f"(P {args})", "withP"), dialect="withP").converges
    assert not lz.eval_whnf(L("(P Omega Omega)", "withP"), dialect="withP").converges


def test_classify_examples():
    assert lz.classify(L("(lam y ((lam z z) y))")).kind == "abstraction"
    assert lz.classify(L("(lam y ((lam z z) y))")).steps == 0
    c = lz.classify(L("(x Omega)"))
    assert (c.kind, c.var, c.spine) == ("head-form", "x", 1)
    assert lz.classify(lz.OMEGA, fuel=100).kind == "diverges-or-fuel-out"
    nested = lz.classify(L("(C (x y) z)", "withC"), dialect="withC")
    assert (nested.var, nested.nesting, nested.trailing) == ("x", 1, (1,))


def test_element_counts_and_order():
    assert [len(lz.lazy_elements(k)) for k in range(4)] == [1, 2, 4, 36]
    d3 = lz.lazy_elements(3)
    for d in d3:
        assert lz.lleq(lz.LBOT, d) and lz.lleq(d, d)
    for a in d3[:12]:
        for b in d3[:12]:
            if lz.lleq(a, b) and lz.lleq(b, a):
                assert a == b
            j = lz.ljoin(a, b)
            if j is not None:
                assert lz.lleq(a, j) and lz.lleq(b, j)


def test_element_landmarks():
    assert lz.eval_elem(lz.OMEGA, k=2) == lz.LBOT
    lam_omega = lz.eval_elem(L("(lam x Omega)"), k=2)
    assert lam_omega == lz.lfun([]) and lam_omega != lz.LBOT
    # K and YK agree up to rank 2 but not beyond
    assert lz.eval_elem(lz.K, k=2) == lz.eval_elem(lz.YK, k=2)
    assert lz.lleq(lz.eval_elem(lz.K, k=3), lz.eval_elem(lz.YK, k=3))
    assert lz.eval_elem(lz.K, k=3) != lz.eval_elem(lz.YK, k=3)
    with pytest.raises(RankExplosion):
        lz.eval_elem(lz.I, k=lz.RANK_CAP + 1)


def test_lazy_entailment_examples():
    assert lz.entails_lazy(lz.LAMBDA, lz.TOP)
    assert not lz.entails_lazy(lz.TOP, lz.LAMBDA)
    assert lz.entails_lazy(F("(arr (arr t t) t)"), lz.LAMBDA)
    assert lz.entails_lazy(F("(arr t (and (arr t t) (arr (arr t t) t)))"),
                           F("(and (arr t (arr t t)) (arr t (arr (arr t t) t)))"))


def test_formula_element_round_trip():
    for d in lz.lazy_elements(3):
        phi = lz.lformula(d)
        assert lz.lelem(phi) == d
        assert lz.lsat(d, phi)
        assert lz.ldepth(phi) <= 3


def test_lcheck_examples():
    phi = F("(arr t t)")
    assert lz.lcheck(Var("x"), {"x": phi}, phi)
    assert lz.lcheck(lz.KOMEGA, {}, lz.LAMBDA)
    assert not lz.lcheck(lz.OMEGA, {}, lz.LAMBDA, k=1)
    with pytest.raises(RankExplosion):
        lz.lcheck(lz.I, {}, F("(arr (arr t t) t)"), k=1)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_abstraction_rule(seed):
    rng = random.Random(seed)
    body = lz.random_closed(rng, 6, scope=("x",))
    from domlogic.oracle import random_lformula
    phi, psi = random_lformula(rng, 1), random_lformula(rng, 1)
    assert lz.lcheck(Lam("x", body), {}, lz.ArrBot(phi, psi), k=2) == \
        lz.lcheck(body, {"x": phi}, psi, k=2)


def test_definability_terms():
    assert lz.m_phi(lz.LAMBDA) == lz.KOMEGA
    assert lz.t_phi(lz.LAMBDA, Const("C")) == Lam("x", lz.apps(Const("C"), Var("x"), lz.KOMEGA))
    with pytest.raises(NotNormalForm):
        lz.m_phi(F("(arr t (and (arr t t) (arr (arr t t) t)))"))


def test_applicative_corpus_refutations():
    corpus = [lz.I, lz.K, lz.OMEGA, lz.KOMEGA]
    v = lz.bisim_corpus(L("(lam x (Omega x))"), lz.OMEGA, 1, corpus)
    assert v.refuted and v.witness == ()
    assert not lz.bisim_corpus(lz.K, lz.K, 3, corpus).refuted
    assert not lz.bisim_corpus(lz.I, lz.YK, 3, corpus).refuted


CONTEXTS = [
    lambda h: App(h, lz.I),
    lambda h: App(lz.K, h),
    lambda h: Lam("q", App(h, Var("q"))),
    lambda h: App(App(h, lz.KOMEGA), lz.OMEGA),
]


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_element_order_is_a_precongruence(seed):
    rng = random.Random(seed)
    m, n = lz.random_closed(rng, 6), lz.random_closed(rng, 6)
    k = 1
    if not lz.lleq(lz.eval_elem(m, k=k + 2), lz.eval_elem(n, k=k + 2)):
        m = n  # fall back to the reflexive case
    for ctx in CONTEXTS:
        assert lz.lleq(lz.eval_elem(ctx(m), k=k), lz.eval_elem(ctx(n), k=k))


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_conditional_eta(seed):
    m = lz.random_closed(random.Random(seed), 7)
    if lz.eval_whnf(m, fuel=500).converges:
        fresh = Lam("zz", App(m, Var("zz")))
        for k in (1, 2):
            assert lz.eval_elem(fresh, k=k) == lz.eval_elem(m, k=k)


def test_harness_cases_flag_the_constants():
    ok, note = lz.sequentiality_case(Const("C"), dialect="withC")
    assert not ok
    assert lz.sequentiality_case(lz.I)[0]
    ok, _ = lz.parallel_test_case(Const("P"), dialect="withP")
    assert not ok
    assert lz.parallel_test_case(Const("C"))[0]


def test_sampled_terms_are_not_parallel_or():
    rng = random.Random(11)
    consts = ("star", "C", "P")
    assert not any(lz.parallel_or_case(lz.random_closed(rng, 8, consts), fuel=2000)
                   for _ in range(300))


def test_small_harnesses_have_no_counterexamples():
    checked, bad = lz.sequentiality_counterexamples(5)
    assert checked > 0 and bad == []
    checked, bad = lz.parallel_counterexamples(4)
    assert checked > 0 and bad == []
