import random

import pytest
from hypothesis import given, settings, strategies as st

from domlogic import process as pr, sccs
from domlogic.errors import ParseError, SortError

M = sccs.FreeAbelian(["a", "b"])
ACTS = sccs.product_actions(M)
Z2 = """
monoid table
elements e g
unit e
row e e g
row g g e
"""


def P(text, monoid=M):
    return sccs.parse_sccs(text, monoid)


def test_free_monoid_laws():
    assert M.mul("a", "b") == M.mul("b", "a") == "a.b"
    assert M.mul("1", "a") == "a"
    for x in ACTS:
        for y in ACTS:
            for z in ACTS:
                assert M.mul(M.mul(x, y), z) == M.mul(x, M.mul(y, z))
    assert M.parse_elem("b.a") == "a.b"
    with pytest.raises(ParseError):
        M.parse_elem("c")


def test_table_monoid_is_validated():
    z2 = sccs.parse_monoid(Z2)
    assert z2.mul("g", "g") == "e"
    bad = Z2.replace("row g g e", "row g e e")
    with pytest.raises(ParseError):
        sccs.parse_monoid(bad)
    with pytest.raises(ParseError):
        sccs.parse_monoid("monoid cyclic 3")


def test_relabelling_must_respect_structure():
    z2 = sccs.parse_monoid(Z2)
    with pytest.raises(SortError):
        z2.relabelling([("g", "e"), ("e", "g")])
    with pytest.raises(SortError):
        M.relabelling([("a.b", "a")])
    assert M.relabelling([("a", "b")]) == {"a": "b", "b": "b"}


def test_transition_examples():
    t = sccs.transitions(P("(times (pre a O) (pre b O))"), M)
    assert t.steps == {("a.b", sccs.Times(sccs.NIL, sccs.NIL))} and not t.diverges
    assert sccs.transitions(P("(times (pre a O) O)"), M).steps == frozenset()
    r = sccs.transitions(P("(restrict (plus (pre a O) (pre b O)) (a))"), M)
    assert {a for a, _ in r.steps} == {"a"}
    rl = sccs.transitions(P("(relabel (pre a O) ((a b)))"), M)
    assert {a for a, _ in rl.steps} == {"b"}
    assert sccs.transitions(P("(plus Omega (pre a O))"), M).diverges


def test_recursion_divergence_and_fuel():
    assert sccs.diverges(P("(rec x x)"))
    assert not sccs.diverges(P("(rec x (pre a x))"))
    loop = sccs.transitions(P("(rec x (plus x (pre a O)))"), M, fuel=5)
    assert not loop.complete
    with pytest.raises(SortError):
        sccs.diverges(P("x"))


def test_approximants_form_a_chain_with_the_recursion_as_limit():
    r = P("(rec x (pre a x))")
    approx = sccs.approximants(r, 2)
    assert [str(a) for a in approx] == ["Omega", "(pre a Omega)", "(pre a (pre a Omega))"]
    k = 3
    ds = [sccs.denote(a, M, k) for a in sccs.approximants(r, k)]
    for lo, hi in zip(ds, ds[1:]):
        assert pr.leq(lo, hi)
    assert ds[-1] == sccs.denote(r, M, k)


def test_full_abstraction_examples():
    o, om = P("O"), P("Omega")
    fa = sccs.full_abstraction_report(om, o, M)
    assert (fa.left_below, fa.right_below) == (True, False) and fa.agrees
    assert fa.summary() == "below only left-to-right; operational and denotational agree"
    sync = P("(times (pre a O) (pre b O))")
    fa = sccs.full_abstraction_report(sync, P("(pre a.b (times O O))"), M)
    assert fa.left_below and fa.right_below
    with pytest.raises(SortError):
        sccs.full_abstraction_report(P("(rec x x)"), o, M)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**31))
def test_operational_and_denotational_preorders_agree(seed):
    rng = random.Random(seed)
    t1 = sccs.random_term(rng, M, 4, ACTS)
    t2 = sccs.random_term(rng, M, 4, ACTS)
    assert sccs.height(t1) <= 4
    assert sccs.full_abstraction_report(t1, t2, M).agrees
    assert sccs.full_abstraction_report(t1, t1, M).operational.equivalent


def test_table_monoid_products_agree_too():
    z2 = sccs.parse_monoid(Z2)
    rng = random.Random(7)
    for _ in range(100):
        t1 = sccs.random_term(rng, z2, 4, ["e", "g"])
        t2 = sccs.random_term(rng, z2, 4, ["e", "g"])
        assert sccs.full_abstraction_report(t1, t2, z2).agrees
