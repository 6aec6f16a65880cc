import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from domlogic import elements as el
from domlogic import gen, logic
from domlogic.errors import RankExplosion
from domlogic.formulas import BOT, TOP, ArrowF, FALSE_F, LiftF, PairF, TRUE_F, conj, disj
from domlogic.types import BOOL, SIERPINSKI, UNIT, Fun, Lift, Prod

TT = el.SumL(el.LiftUp(el.UNIT_BOT))
FF = el.SumR(el.LiftUp(el.UNIT_BOT))
BB = Prod(BOOL, BOOL)
BB_B = Fun(BB, BOOL)
POR_F = conj(
    ArrowF(PairF(TRUE_F, TOP), TRUE_F),
    ArrowF(PairF(TOP, TRUE_F), TRUE_F),
    ArrowF(PairF(FALSE_F, FALSE_F), FALSE_F),
)
POR = el.make_fun(
    [(el.PairE(TT, el.SUM_BOT), TT), (el.PairE(el.SUM_BOT, TT), TT), (el.PairE(FF, FF), FF)], BB_B)


def test_sierpinski_and_booleans():
    assert el.enumerate_elements(SIERPINSKI, 1) == (el.LIFT_BOT, el.LiftUp(el.UNIT_BOT))
    assert set(el.enumerate_elements(BOOL, 1)) == {el.SUM_BOT, TT, FF}


def test_lifted_function_space_of_sierpinski_has_four_elements():
    d2 = el.enumerate_elements(Lift(Fun(SIERPINSKI, SIERPINSKI)), 2)
    assert len(d2) == 4


def test_enumeration_grows_with_rank():
    for sigma in gen.TYPE_SHAPES:
        small, big = el.enumerate_elements(sigma, 1), set(el.enumerate_elements(sigma, 2))
        assert set(small) <= big
        assert el.enumerate_elements(sigma, 0) == (el.bottom(sigma),)


def test_enumeration_cap_is_reported(monkeypatch):
    monkeypatch.setattr(el, "ENUM_CAP", 10)
    with pytest.raises(RankExplosion):
        el.enumerate_elements(Prod(Prod(SIERPINSKI, BOOL), Prod(BOOL, SIERPINSKI)), 1)


def test_leq_examples():
    for u in el.enumerate_elements(BB, 2):
        assert el.leq(el.bottom(BB), u)
    small = el.make_fun([(TT, TT)], Fun(BOOL, BOOL))
    large = el.make_fun([(el.SUM_BOT, TT)], Fun(BOOL, BOOL))
    assert el.leq(small, large) and not el.leq(large, small)


def test_leq_antisymmetric_on_pairs_of_booleans():
    elems = el.enumerate_elements(BB, 2)
    for u, v in itertools.product(elems, repeat=2):
        if el.leq(u, v) and el.leq(v, u):
            assert u == v


def test_join_examples():
    for u in el.enumerate_elements(BOOL, 1):
        assert el.join(u, el.SUM_BOT) == u
    assert el.join(TT, FF) is None
    elems = el.enumerate_elements(BOOL, 1)
    for u, v, w in itertools.product(elems, repeat=3):
        assert el.join(u, u) == u
        assert el.join(u, v) == el.join(v, u)
        left = el.join(u, v)
        left = None if left is None else el.join(left, w)
        right = el.join(v, w)
        right = None if right is None else el.join(u, right)
        assert left == right


def test_join_is_least_upper_bound():
    elems = el.enumerate_elements(Fun(BOOL, SIERPINSKI), 2)
    for u, v in itertools.product(elems, repeat=2):
        j = el.join(u, v)
        uppers = [w for w in elems if el.leq(u, w) and el.leq(v, w)]
        if j is None:
            assert not uppers
        else:
            assert el.leq(u, j) and el.leq(v, j)
            assert all(el.leq(j, w) for w in uppers)


def test_minsat_examples():
    for sigma in gen.TYPE_SHAPES:
        assert el.minsat(TOP, sigma) == [el.bottom(sigma)]
        assert el.minsat(BOT, sigma) == []
    assert el.minsat(POR_F, BB_B) == [POR]
    assert len(POR.steps) == 3


def test_sat_examples():
    assert el.sat(el.UNIT_BOT, TOP, UNIT)
    assert not el.sat(el.LIFT_BOT, LiftF(TOP), SIERPINSKI)
    assert el.sat(POR, POR_F, BB_B)


def test_apply_is_monotone():
    for sigma in (Fun(BOOL, BOOL), Fun(SIERPINSKI, Lift(SIERPINSKI))):
        args = el.enumerate_elements(sigma.arg, 2)
        for f in el.enumerate_elements(sigma, 2):
            for a, b in itertools.product(args, repeat=2):
                if el.leq(a, b):
                    assert el.leq(el.apply(f, a), el.apply(f, b))


def test_every_element_has_a_defining_formula():
    for sigma in gen.TYPE_SHAPES:
        for u in el.enumerate_elements(sigma, 2):
            phi = el.defining_formula(u, sigma)
            assert el.minsat(phi, sigma) == [u]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31))
def test_minsat_is_an_antichain_generating_the_denotation(seed):
    rng = random.Random(seed)
    sigma = rng.choice(gen.TYPE_SHAPES)
    phi = gen.random_formula(rng, sigma, 8)
    ms = el.minsat(phi, sigma)
    for u, v in itertools.permutations(ms, 2):
        assert not el.leq(u, v)
    from domlogic.formulas import rank
    for u in el.enumerate_elements(sigma, max(1, rank(phi, sigma))):
        assert el.sat(u, phi, sigma) == any(el.leq(v, u) for v in ms)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31))
def test_sat_distributes_over_connectives(seed):
    rng = random.Random(seed)
    sigma = rng.choice(gen.TYPE_SHAPES)
    a, b = gen.random_formula(rng, sigma, 5), gen.random_formula(rng, sigma, 5)
    for u in el.enumerate_elements(sigma, 2):
        assert el.sat(u, conj(a, b), sigma) == (el.sat(u, a, sigma) and el.sat(u, b, sigma))
        assert el.sat(u, disj(a, b), sigma) == (el.sat(u, a, sigma) or el.sat(u, b, sigma))


def test_stone_duality_at_desk_scale():
    from domlogic.oracle import entails_by_elements
    rng = random.Random(17)
    for _ in range(300):
        sigma = rng.choice(gen.TYPE_SHAPES)
        a, b = gen.random_formula(rng, sigma, 6), gen.random_formula(rng, sigma, 6)
        assert logic.entails(a, b, sigma) == entails_by_elements(a, b, sigma)
