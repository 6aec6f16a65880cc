import random

import pytest
from hypothesis import given, settings, strategies as st

from domlogic import elements as el
from domlogic import gen, logic, morphisms as mo, terms as tm
from domlogic.errors import TypeCheckError
from domlogic.formulas import TOP, ArrowF, FALSE_F, LiftF, PairF, TRUE_F, parse_formula
from domlogic.types import BOOL, SIERPINSKI, UNIT, Fun, Lift, Prod, parse_type

TT = el.SumL(el.LiftUp(el.UNIT_BOT))
FF = el.SumR(el.LiftUp(el.UNIT_BOT))
BB = Prod(BOOL, BOOL)


def test_type_of_examples():
    assert tm.type_of(tm.parse_term("(lam x (+ (lift 1) (lift 1)) x)")) == Fun(BOOL, BOOL)
    assert tm.type_of(tm.parse_term("(up star)")) == SIERPINSKI
    bad = "(lam z (+ 1 1) (cases z x (up star) y star))"
    with pytest.raises(TypeCheckError) as err:
        tm.type_of(tm.parse_term(bad))
    assert err.value.rule == "+-E"


def test_binders_are_renamed_apart():
    m = tm.parse_term("(lam x 1 (lam x 1 x))")
    assert m.x != m.body.x and m.body.body == tm.Var(m.body.x)


def test_eval_examples():
    assert tm.eval_term(tm.parse_term("(mu x (lift 1) x)"), {}, 3) == el.LIFT_BOT
    ident = tm.eval_term(tm.parse_term("(lam x (+ (lift 1) (lift 1)) x)"), {}, 2)
    for u in el.enumerate_elements(BOOL, 1):
        assert el.apply(ident, u) == u
    assert tm.eval_term(tm.parse_term("(up star)"), {}, 1) == el.LiftUp(el.UNIT_BOT)


def test_mu_reaches_least_fixpoint_of_unfolding_map():
    nat = "(rec t (+ 1 (lift t)))"
    m = tm.parse_term(f"(mu n {nat} (fold (inr (up n))))")
    v = tm.eval_term(m, {}, 4)
    assert tm.type_of(m) == parse_type(nat)
    # every iterate adds one successor layer
    assert el.rank(v) >= 3


def test_check_examples():
    proj = tm.parse_term("(lam p (x (+ (lift 1) (lift 1)) (+ (lift 1) (lift 1))) (letp p x y x))")
    assert tm.check(proj, {}, ArrowF(PairF(TRUE_F, TOP), TRUE_F), 1)
    phi = parse_formula("(inl (lift tt))")
    assert tm.check(tm.Var("x"), {"x": phi}, phi, 1, {"x": BOOL})
    assert not tm.check(tm.parse_term("(mu x (lift 1) x)"), {}, LiftF(TOP), 2)


def test_check_uses_every_disjunct_of_an_assumption():
    ctx = {"x": BOOL}
    m = tm.parse_term("(cases x a (inr (up star) (lift 1)) b (inl (up star) (lift 1)))")
    either = parse_formula("(or (inl (lift tt)) (inr (lift tt)))")
    assert tm.check(m, {"x": either}, either, 1, ctx)
    assert not tm.check(m, {"x": either}, TRUE_F, 1, ctx)
    assert tm.check(m, {"x": FALSE_F}, TRUE_F, 1, ctx)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**31))
def test_check_agrees_with_enumeration(seed):
    from domlogic.oracle import random_check_case
    m, ctx, gamma, phi, k = random_check_case(random.Random(seed), 8)
    assert tm.check(m, gamma, phi, k, ctx) == tm.check_by_enumeration(m, gamma, phi, k, ctx)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31))
def test_eval_is_monotone_in_rank(seed):
    rng = random.Random(seed)
    ty = rng.choice(gen.TERM_TYPES)
    m = gen.random_term(rng, ty, {}, 8, allow_mu=True)
    vals = [tm.eval_term(m, {}, k) for k in (1, 2, 3)]
    assert el.leq(vals[0], vals[1]) and el.leq(vals[1], vals[2])


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31))
def test_beta_consistency(seed):
    rng = random.Random(seed)
    arg_ty, res_ty = rng.choice(gen.TERM_TYPES), rng.choice(gen.TERM_TYPES)
    body = gen.random_term(rng, res_ty, {"z": arg_ty}, 6)
    arg = gen.random_term(rng, arg_ty, {}, 4)
    redex = tm.App(tm.Lam("z", arg_ty, body), arg)
    for k in (1, 2):
        assert tm.eval_term(redex, {}, k) == tm.eval_term(tm.substitute(body, "z", arg), {}, k)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31))
def test_check_is_stable_under_larger_rank(seed):
    from domlogic.oracle import random_check_case
    m, ctx, gamma, phi, k = random_check_case(random.Random(seed), 6)
    if tm.check(m, gamma, phi, k, ctx):
        assert tm.check(m, gamma, phi, k + 1, ctx)


# ---------------------------------------------------------------- morphisms

def test_translation_examples():
    t = mo.translate(mo.Id(BOOL))
    assert isinstance(t, tm.Lam) and t.body == tm.Var(t.x)
    y = mo.translate(mo.Y(SIERPINSKI))
    assert isinstance(y, tm.Lam) and isinstance(y.body, tm.Mu)
    assert y.body.body == tm.App(tm.Var(y.x), tm.Var(y.body.x))
    ap = mo.Ap(BOOL, SIERPINSKI)
    assert tm.type_of(mo.translate(ap)) == Fun(Prod(Fun(BOOL, SIERPINSKI), BOOL), SIERPINSKI)


def test_parse_morphism():
    f = mo.parse_morphism("(comp (p (lift 1) 1) (up (lift 1)))")
    assert f == mo.Comp(mo.P(SIERPINSKI, UNIT), mo.UpM(SIERPINSKI))
    assert mo.sort_of(f) == (Prod(SIERPINSKI, UNIT), Lift(SIERPINSKI))


MORPHISMS = [
    mo.Id(BOOL), mo.Id(SIERPINSKI), mo.P(BOOL, SIERPINSKI), mo.Q(BOOL, SIERPINSKI),
    mo.Terminal(BOOL), mo.L(SIERPINSKI, SIERPINSKI), mo.R(SIERPINSKI, SIERPINSKI),
    mo.UpM(UNIT), mo.UpM(SIERPINSKI), mo.LiftM(mo.Id(UNIT)), mo.LiftM(mo.UpM(UNIT)),
    mo.Pairing(mo.Id(BOOL), mo.Id(BOOL)), mo.SglL(SIERPINSKI), mo.SglU(SIERPINSKI),
    mo.Copair(mo.Terminal(SIERPINSKI), mo.Terminal(SIERPINSKI)), mo.Strict(mo.UpM(UNIT)),
]


def _composable(rng):
    while True:
        f, g = rng.choice(MORPHISMS), rng.choice(MORPHISMS)
        if mo.sort_of(f)[1] == mo.sort_of(g)[0]:
            return f, g


def test_translation_preserves_sorts():
    rng = random.Random(5)
    pool = list(MORPHISMS)
    for _ in range(50):
        f, g = _composable(rng)
        pool.append(mo.Comp(f, g))
    for f in pool:
        src, tgt = mo.sort_of(f)
        assert tm.type_of(mo.translate(f)) == Fun(src, tgt)


def test_hoare_examples():
    phi = parse_formula("(inl (lift tt))")
    assert mo.hoare(mo.Id(BOOL), phi, phi, 2)
    assert mo.hoare(mo.P(BOOL, SIERPINSKI), PairF(phi, TOP), phi, 2)
    # lift(up) is not strict-free: bottom goes to bottom, which fails (lift tt)
    f = mo.LiftM(mo.UpM(UNIT))
    assert not mo.hoare(f, TOP, LiftF(TOP), 2)
    assert el.apply(mo.denote(f, 2), el.LIFT_BOT) == el.LIFT_BOT


def test_composition_axiom_on_random_instances():
    rng = random.Random(8)
    for _ in range(40):
        f, g = _composable(rng)
        tgt = mo.sort_of(g)[1]
        psi = gen.random_formula(rng, tgt, 4)
        k = 2
        direct = mo.preimage_formula(mo.Comp(f, g), psi, k)
        staged = mo.preimage_formula(f, mo.preimage_formula(g, psi, k), k)
        assert logic.equivalent(direct, staged, mo.sort_of(f)[0])


def test_projection_and_identity_axioms():
    rng = random.Random(9)
    for _ in range(30):
        phi = gen.random_formula(rng, BOOL, 4)
        assert logic.equivalent(mo.preimage_formula(mo.P(BOOL, SIERPINSKI), phi, 2), PairF(phi, TOP),
                                Prod(BOOL, SIERPINSKI))
        assert logic.equivalent(mo.preimage_formula(mo.Id(BOOL), phi, 2), phi, BOOL)
