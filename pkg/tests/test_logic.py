import random

import pytest
from hypothesis import given, settings, strategies as st

from domlogic import elements as el
from domlogic import gen, logic
from domlogic.errors import BlowupLimit, ParseError
from domlogic.formulas import (
    BOT, TOP, And, ArrowF, BoxF, FALSE_F, InL, InR, LiftF, Or, PairF, TRUE_F, conj, disj,
    parse_formula, rank, well_formed,
)
from domlogic.oracle import entails_by_elements
from domlogic.types import BOOL, SIERPINSKI, UNIT, CoSum, Fun, Lift, Prod, Rec, parse_type

BB_B = Fun(Prod(BOOL, BOOL), BOOL)
POR = conj(
    ArrowF(PairF(TRUE_F, TOP), TRUE_F),
    ArrowF(PairF(TOP, TRUE_F), TRUE_F),
    ArrowF(PairF(FALSE_F, FALSE_F), FALSE_F),
)
seeds = st.integers(0, 2**31)


def test_parse_types_and_formulas():
    assert parse_type("(+ (lift 1) (lift 1))") == CoSum(Lift(UNIT), Lift(UNIT))
    assert parse_formula("(inl (lift tt))") == TRUE_F
    assert parse_formula("(and tt tt)") == TOP
    assert parse_formula("ff") == BOT
    with pytest.raises(ParseError):
        parse_formula("(pair tt)")
    with pytest.raises(ParseError):
        parse_type("(rec t t)")


def test_rec_binders_are_renamed_apart():
    ty = parse_type("(rec t (+ 1 (rec t (lift t))))")
    assert isinstance(ty, Rec) and ty.body.right.binder != ty.binder


def test_well_formed_examples():
    assert well_formed(InL(LiftF(TOP)), CoSum(Lift(UNIT), Lift(UNIT)))
    assert not well_formed(BoxF(TOP), Fun(UNIT, UNIT))
    for sigma in gen.TYPE_SHAPES:
        assert well_formed(TOP, sigma)


def test_formula_at_rec_type_is_formula_at_unfolding():
    nat = parse_type("(rec t (+ 1 (lift t)))")
    two = parse_formula("(inr (lift (inr (lift (inl tt)))))")
    assert well_formed(two, nat)
    assert not well_formed(parse_formula("(pair tt tt)"), nat)


def test_meta_predicate_examples():
    both = And((InL(LiftF(TOP)), InR(LiftF(TOP))))
    flags = logic.meta_predicates(both, BOOL)
    assert flags.pnf and not flags.con and not flags.cpnf
    assert logic.meta_predicates(LiftF(TOP), SIERPINSKI).term
    top = logic.meta_predicates(TOP, BOOL)
    assert top.con and not top.term
    # the semantic oracle agrees: no element satisfies true and false together
    assert not any(el.sat(u, both, BOOL) for u in el.enumerate_elements(BOOL, 2))


def test_cpnf_implies_pnf_and_con():
    rng = random.Random(4)
    for _ in range(300):
        sigma = rng.choice(gen.TYPE_SHAPES)
        f = logic.meta_predicates(gen.random_formula(rng, sigma, 6), sigma)
        assert not f.cpnf or (f.pnf and f.con)


def test_cdnf_of_arrow_out_of_disjunction():
    sigma = Fun(BOOL, BOOL)
    phi = ArrowF(disj(TRUE_F, FALSE_F), TRUE_F)
    expected = conj(ArrowF(TRUE_F, TRUE_F), ArrowF(FALSE_F, TRUE_F))
    out = logic.to_cdnf(phi, sigma)
    assert logic.is_cdnf(out, sigma)
    assert len(out.args) == 1
    assert logic.equivalent(out.args[0], expected, sigma)
    assert logic.to_cdnf(BOT, sigma) == Or(())


def test_cdnf_blowup_is_reported():
    sigma = Prod(BOOL, BOOL)
    choice = disj(PairF(TRUE_F, TOP), PairF(TOP, FALSE_F))
    phi = conj(*[disj(choice, PairF(FALSE_F, TOP), PairF(TOP, TRUE_F)) for _ in range(3)])
    logic.to_cdnf(phi, sigma)
    with pytest.raises(BlowupLimit):
        logic.to_cdnf(phi, sigma, cap=3)


def test_entails_examples():
    for sigma in gen.TYPE_SHAPES:
        assert logic.entails(BOT, TOP, sigma)
    assert logic.entails(POR, ArrowF(PairF(TOP, TOP), TOP), BB_B)
    assert not logic.entails(TOP, TRUE_F, BOOL)
    assert logic.entailment_witness(TOP, TRUE_F, BOOL) == el.SUM_BOT


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_cdnf_is_equivalent_and_idempotent(seed):
    rng = random.Random(seed)
    sigma = rng.choice(gen.TYPE_SHAPES)
    phi = gen.random_formula(rng, sigma, 12)
    out = logic.to_cdnf(phi, sigma)
    assert logic.is_cdnf(out, sigma)
    assert entails_by_elements(phi, out, sigma) and entails_by_elements(out, phi, sigma)
    assert logic.to_cdnf(out, sigma) == out


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_entails_is_a_preorder(seed):
    rng = random.Random(seed)
    sigma = rng.choice(gen.TYPE_SHAPES)
    a, b, c = (gen.random_formula(rng, sigma, 6) for _ in range(3))
    assert logic.entails(a, a, sigma)
    if logic.entails(a, b, sigma) and logic.entails(b, c, sigma):
        assert logic.entails(a, c, sigma)
    # chaining through a weakening is always available
    assert logic.entails(conj(a, b), disj(a, c), sigma)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_distributivity(seed):
    rng = random.Random(seed)
    sigma = rng.choice(gen.TYPE_SHAPES)
    a, b, c = (gen.random_formula(rng, sigma, 5) for _ in range(3))
    assert logic.entails(conj(a, disj(b, c)), disj(conj(a, b), conj(a, c)), sigma)


def _contexts(sigma):
    """One-hole contexts that build a formula at a larger type from one at sigma."""
    return [
        (Lift(sigma), LiftF),
        (Prod(sigma, BOOL), lambda f: PairF(f, TRUE_F)),
        (Fun(BOOL, sigma), lambda f: ArrowF(TRUE_F, f)),
        (Fun(sigma, BOOL), lambda f: ArrowF(f, FALSE_F)),
        (CoSum(sigma, UNIT), InL),
    ]


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_equivalence_is_a_congruence(seed):
    rng = random.Random(seed)
    sigma = rng.choice([BOOL, SIERPINSKI, Prod(SIERPINSKI, SIERPINSKI)])
    a = gen.random_formula(rng, sigma, 6)
    b = logic.to_cdnf(a, sigma)
    assert logic.equivalent(a, b, sigma)
    for big, ctx in _contexts(sigma):
        assert logic.equivalent(ctx(a), ctx(b), big)


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_meta_predicates_match_semantics_on_pnf(seed):
    from domlogic.oracle import consistent_by_elements, random_pnf, terminates_by_elements
    rng = random.Random(seed)
    sigma = rng.choice(gen.TYPE_SHAPES)
    phi = random_pnf(rng, sigma, 6)
    f = logic.meta_predicates(phi, sigma)
    assert f.con == consistent_by_elements(phi, sigma)
    assert f.term == terminates_by_elements(phi, sigma)
    assert f.con == bool(logic.minsat(phi, sigma))


def test_rank_counts_constructor_layers():
    assert rank(TOP, BOOL) == 0
    assert rank(TRUE_F, BOOL) == 1
    assert rank(POR, BB_B) == 1
