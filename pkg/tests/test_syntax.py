import random

from hypothesis import given, settings, strategies as st

from bml.generators import Gen
from bml.substitute import ClsSubst, subst_cls
from bml.syntax import (
    App,
    Atom,
    Box,
    Classifier,
    Forall,
    INITIAL,
    Imp,
    Lam,
    Quo,
    Unq,
    Var,
    alpha_eq,
    free_classifiers,
    free_variables,
)

g = Classifier("g")
g1 = Classifier("g1")
g2 = Classifier("g2")
g3 = Classifier("g3")
p = Atom("p")


def test_classifier_identity():
    assert INITIAL.is_initial
    assert Classifier("!") == INITIAL
    assert Classifier("g") != Classifier("h")
    assert str(INITIAL) == "!"


def test_binder_invariants():
    import pytest

    with pytest.raises(ValueError):
        Forall(g, g, p)
    with pytest.raises(ValueError):
        Forall(INITIAL, g, p)
    with pytest.raises(ValueError):
        Quo(g, g, Var("x"))
    with pytest.raises(ValueError):
        Lam("x", INITIAL, p, Var("x"))


def test_free_classifiers_formulas():
    assert free_classifiers(p) == frozenset()
    assert free_classifiers(Box(g, p)) == {g}
    assert free_classifiers(Forall(g1, g2, Box(g1, p))) == {g2}
    assert free_classifiers(Imp(Box(g1, p), Box(g2, p))) == {g1, g2}


def test_free_classifiers_terms():
    # the lambda's position classifier is free; quotation binders are not
    assert free_classifiers(Lam("x", g, p, Var("x"))) == {g}
    assert free_classifiers(Quo(g1, g2, Var("x"))) == {g2}
    assert free_classifiers(Unq(g1, Var("x"))) == {g1}
    assert free_classifiers(Quo(g1, g2, Unq(g1, Var("x")))) == {g2}


def test_free_variables():
    assert free_variables(Var("x")) == {"x"}
    assert free_variables(Lam("x", g, p, Var("x"))) == frozenset()
    assert free_variables(App(Var("x"), Unq(g, Var("y")))) == {"x", "y"}


def test_alpha_eq_binder_renaming():
    a = Forall(g1, INITIAL, Box(g1, p))
    b = Forall(g2, INITIAL, Box(g2, p))
    assert alpha_eq(a, b)


def test_alpha_eq_box_bound_is_free():
    assert not alpha_eq(Box(g1, p), Box(g2, p))


def test_alpha_eq_lambda_variable():
    assert alpha_eq(Lam("x", g, p, Var("x")), Lam("y", g, p, Var("y")))
    # the position classifier must match exactly
    assert not alpha_eq(Lam("x", g1, p, Var("x")), Lam("x", g2, p, Var("x")))


def test_alpha_eq_lambda_cls_under_quantifier_binder():
    # gen h >= !. \x : p @ h. x renames together with the binder
    a = CLam_body(g1)
    b = CLam_body(g2)
    assert alpha_eq(a, b)


def CLam_body(binder):
    from bml.syntax import CLam

    return CLam(binder, INITIAL, Lam("x", binder, p, Var("x")))


def test_alpha_eq_free_vs_bound_mismatch():
    # bound on one side, free on the other
    a = Forall(g1, INITIAL, Box(g1, p))
    b = Forall(g2, INITIAL, Box(g3, p))
    assert not alpha_eq(a, b)


# -- generated properties

seeds = st.integers(min_value=0, max_value=10_000)


@given(seeds)
@settings(max_examples=60, deadline=None)
def test_alpha_eq_reflexive_and_symmetric(seed):
    gen = Gen(random.Random(seed))
    f = gen.raw_formula(4)
    t = gen.raw_term(4)
    assert alpha_eq(f, f)
    assert alpha_eq(t, t)
    f2 = gen.raw_formula(4)
    assert alpha_eq(f, f2) == alpha_eq(f2, f)


@given(seeds)
@settings(max_examples=60, deadline=None)
def test_free_classifiers_after_substitution(seed):
    gen = Gen(random.Random(seed))
    a = gen.raw_formula(4)
    frm, to = Classifier("g1"), Classifier("g3")
    after = free_classifiers(subst_cls(a, ClsSubst(frm, to)))
    assert after <= (free_classifiers(a) - {frm}) | {to}
