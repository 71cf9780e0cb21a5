import random

import pytest

from bml.contexts import pos
from bml.corpus import all_judgments
from bml.generators import Gen
from bml.kernel import (
    AtomicTypeError,
    audit_derivation,
    check,
    eta_expand,
    format_derivation,
    infer,
)
from bml.parsing import parse_context, parse_formula, parse_judgment, parse_term
from bml.printing import print_term
from bml.reduction import beta_step
from bml.syntax import EMPTY, Box, Classifier, Imp, Lam, Quo, Unq, Var, alpha_eq


def j(text):
    ctx, term, ann = parse_judgment(text)
    return ctx, term, ann


def test_identity():
    ctx, term, _ = j(r"|- \x : p @ g. x")
    result = infer(ctx, term)
    assert result.ok
    assert alpha_eq(result.type, parse_formula("p -> p"))


def test_reflection_term():
    ctx, term, _ = j(r"|- \x : [>= !]p @ g1. unq[g1]{ x }")
    result = infer(ctx, term)
    assert result.ok and alpha_eq(result.type, parse_formula("[>= !]p -> p"))


def test_distribution_term():
    ctx, term, _ = j(
        r"|- gen g >= !. \f : [>= g](p -> q) @ gf. \a : [>= g]p @ ga."
        r" quo[g2 >= g]{ unq[gf]{ f } unq[ga]{ a } }"
    )
    result = infer(ctx, term)
    want = parse_formula("forall g >= !. [>= g](p -> q) -> [>= g]p -> [>= g]q")
    assert result.ok and alpha_eq(result.type, want)


def test_check_accepts_and_rejects():
    ctx, term, _ = j(r"|- \x : p @ g. x")
    assert check(ctx, term, parse_formula("p -> p")).ok
    result = check(ctx, term, parse_formula("p -> q"))
    assert not result.ok
    assert result.error.expected == parse_formula("p -> q")
    assert alpha_eq(result.error.actual, parse_formula("p -> p"))


def test_var_needs_scope_transition():
    # the open item only introduces a stage transition from g1, so the
    # hypothesis is not reachable intuitionistically
    ctx, term, _ = j("x : p @ g1, open g2 >= ! |- x")
    result = infer(ctx, term)
    assert not result.ok
    assert result.error.rule == "Var"
    assert "g1 <= g2" in result.error.obligation


def test_unbound_variable():
    result = infer(EMPTY, Var("nope"))
    assert not result.ok and "unbound" in result.error.obligation


def test_splice_requires_stage_transition():
    ctx, term, _ = j("x : [>= !]p @ g1, shut ! |- unq[g1]{ x }")
    result = infer(ctx, term)
    assert not result.ok
    assert result.error.rule == "box-E"
    assert "[=" in result.error.obligation


def test_quotation_classifier_must_not_escape():
    ctx, term, _ = j(r"|- quo[g >= !]{ gen h >= g. \y : p @ c. y }")
    result = infer(ctx, term)
    assert not result.ok
    assert result.error.rule == "box-I" and "escapes" in result.error.obligation


def test_argument_type_mismatch_names_the_rule():
    ctx, term, _ = j(r"|- (\x : p @ g. x) (\y : q @ h. y)")
    result = infer(ctx, term)
    assert not result.ok and result.error.rule == "->-E"
    assert result.error.path == ()


def test_instantiation_needs_bound_transition():
    ctx, term, _ = j(
        "cls g1 >= !, cls g2 >= !, x : (forall h >= g1. p) @ gx |- x[g2]"
    )
    result = infer(ctx, term)
    assert not result.ok and result.error.rule == "forall-E"


def test_collision_renaming_accepts_shadowed_binders():
    # nested lambdas with the same position classifier type fine; the
    # kernel renames the inner extension internally
    ctx, term, _ = j(r"|- \y : p @ c. \z : q @ c. z")
    result = infer(ctx, term)
    assert result.ok and alpha_eq(result.type, parse_formula("p -> q -> q"))


def test_subject_reduction_through_collision():
    # after two contractions a copied lambda nests below one with the same
    # position classifier; typing must survive
    text = (
        r"v : p @ gv |- (\f : p -> p @ c1. f (f v))"
        r" (\z : p @ g5. (\w : p @ g6. z) v)"
    )
    ctx, term, _ = j(text)
    here = pos(ctx)
    expected = infer(ctx, term)
    assert expected.ok
    current = term
    while True:
        stepped = beta_step(current, here)
        if stepped is None:
            break
        after = infer(ctx, stepped)
        assert after.ok, after.error
        assert alpha_eq(after.type, expected.type)
        current = stepped


def test_determinism():
    for _, ctx, term, _ in all_judgments():
        first = infer(ctx, term)
        second = infer(ctx, term)
        assert first.ok and second.ok and alpha_eq(first.type, second.type)


def test_audit_accepts_corpus_derivations():
    for name, ctx, term, _ in all_judgments():
        result = infer(ctx, term)
        assert result.ok
        assert audit_derivation(result.derivation) == [], name


def test_audit_flags_corruption():
    import dataclasses

    ctx, term, _ = j(r"|- \x : p @ g. x")
    d = infer(ctx, term).derivation
    broken = dataclasses.replace(d, type=parse_formula("q -> q"))
    assert audit_derivation(broken)


def test_trace_rendering_mentions_rules():
    ctx, term, _ = j(r"|- \x : [>= !]p @ g1. unq[g1]{ x }")
    text = format_derivation(infer(ctx, term).derivation)
    assert "[->-I]" in text and "[box-E]" in text and "[Var]" in text


# -- eta expansion


def test_eta_arrow():
    ctx = parse_context("f : p -> q @ g")
    expanded = eta_expand(ctx, Var("f"))
    assert isinstance(expanded, Lam)
    assert expanded.body == __import__("bml.syntax", fromlist=["App"]).App(
        Var("f"), Var(expanded.var)
    )
    result = infer(ctx, expanded)
    assert result.ok and alpha_eq(result.type, parse_formula("p -> q"))


def test_eta_box_splices_at_the_position():
    ctx = parse_context("m : [>= !]p @ g1")
    expanded = eta_expand(ctx, Var("m"))
    assert isinstance(expanded, Quo)
    assert expanded.body == Unq(Classifier("g1"), Var("m"))
    result = infer(ctx, expanded)
    assert result.ok and alpha_eq(result.type, parse_formula("[>= !]p"))


def test_eta_quantifier():
    ctx = parse_context("m : (forall h >= !. [>= h]p) @ g1")
    expanded = eta_expand(ctx, Var("m"))
    result = infer(ctx, expanded)
    assert result.ok and alpha_eq(result.type, parse_formula("forall h >= !. [>= h]p"))


def test_eta_atomic_rejected():
    ctx = parse_context("x : p @ g")
    with pytest.raises(AtomicTypeError):
        eta_expand(ctx, Var("x"))


def test_eta_preserves_types_on_generated_terms():
    gen = Gen(random.Random(9))
    done = 0
    while done < 30:
        ctx = gen.context(4)
        term = gen.typed_term(ctx, 3)
        before = infer(ctx, term)
        try:
            expanded = eta_expand(ctx, term)
        except AtomicTypeError:
            continue
        after = infer(ctx, expanded)
        assert after.ok, after.error
        assert alpha_eq(after.type, before.type)
        done += 1


# -- persistency (weakening along scope growth)


def test_persistency_on_generated_extensions():
    from bml.contexts import RelKind, derives

    gen = Gen(random.Random(10))
    done = 0
    while done < 40:
        ctx = gen.context(4)
        term = gen.typed_term(ctx, 3)
        before = infer(ctx, term)
        assert before.ok
        extended = gen.extend_context(ctx, 3)
        if not derives(extended, RelKind.PRE, pos(ctx), pos(extended)):
            continue
        after = infer(extended, term)
        assert after.ok, after.error
        assert alpha_eq(after.type, before.type)
        done += 1
