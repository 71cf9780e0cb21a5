import random

import pytest

from bml.contexts import RelKind, derives, dom_c, pos
from bml.generators import Gen
from bml.kernel import infer
from bml.parsing import parse_formula, parse_term
from bml.substitute import ClsSubst, VarSubst, subst_cls, subst_var
from bml.syntax import (
    App,
    Box,
    Classifier,
    Cls,
    Context,
    Forall,
    Hyp,
    Lam,
    Open,
    Shut,
    Unq,
    Var,
    alpha_eq,
)

g1, g2, g3, g4 = (Classifier(n) for n in ("g1", "g2", "g3", "g4"))
p = parse_formula("p")


def cs(frm, to):
    return ClsSubst(frm, to)


def test_box_bound_swapped():
    assert subst_cls(Box(g1, p), cs(g1, g2)) == Box(g2, p)


def test_quantifier_binder_shields_its_occurrences():
    f = Forall(g1, g2, Box(g1, p))
    assert subst_cls(f, cs(g1, g3)) == f


def test_unq_annotation_swapped():
    t = Unq(g1, Var("x"))
    assert subst_cls(t, cs(g1, g4)) == Unq(g4, Var("x"))


def test_variable_replaced():
    n = parse_term(r"\y : p @ g3. y")
    assert subst_var(Var("x"), VarSubst(cs(g2, g1), "x", n)) == n
    assert subst_var(Var("y"), VarSubst(cs(g2, g1), "x", n)) == Var("y")


def test_combined_substitution_under_lambda():
    body = Lam("y", g3, p, App(Var("y"), Var("x")))
    got = subst_var(body, VarSubst(cs(g2, g1), "x", Var("z")))
    assert got == Lam("y", g3, p, App(Var("y"), Var("z")))


def test_capture_avoidance_variable():
    # substituting y under a binder for y renames the binder
    body = Lam("y", g3, p, App(Var("y"), Var("x")))
    got = subst_var(body, VarSubst(cs(g2, g1), "x", Var("y")))
    assert alpha_eq(got, Lam("w", g3, p, App(Var("w"), Var("y"))))


def test_capture_avoidance_classifier():
    # substituting toward the binder's name renames the binder first
    f = Forall(g2, g3, Box(g1, p))
    got = subst_cls(f, cs(g1, g2))
    assert alpha_eq(got, Forall(g4, g3, Box(g2, p)))


def test_lambda_position_classifier_is_substituted():
    t = Lam("x", g2, p, Unq(g2, Var("y")))
    got = subst_cls(t, cs(g2, g1))
    assert got == Lam("x", g1, p, Unq(g1, Var("y")))


def test_identity_substitution():
    gen = Gen(random.Random(4))
    for _ in range(50):
        f = gen.raw_formula(4)
        assert alpha_eq(subst_cls(f, cs(g1, g1)), f)
        t = gen.raw_term(4)
        assert alpha_eq(subst_cls(t, cs(g1, g1)), t)


def test_disjoint_substitutions_commute():
    gen = Gen(random.Random(5))
    a, b = cs(g1, g2), cs(g3, g4)
    for _ in range(50):
        f = gen.raw_formula(4)
        assert alpha_eq(subst_cls(subst_cls(f, a), b), subst_cls(subst_cls(f, b), a))


def test_initial_never_substituted_away():
    with pytest.raises(ValueError):
        ClsSubst(Classifier("!"), g1)


def test_context_substitution_reaches_annotations_and_bounds():
    ctx = Context(
        (
            Hyp("x", g1, Box(g2, p)),
            Open(g3, g2),
            Shut(g2),
        )
    )
    got = subst_cls(ctx, cs(g2, g4))
    assert got.items == (
        Hyp("x", g1, Box(g4, p)),
        Open(g3, g4),
        Shut(g4),
    )


def test_context_substitution_rejects_binder_collision():
    ctx = Context((Hyp("x", g1, p),))
    with pytest.raises(ValueError):
        subst_cls(ctx, cs(g1, g2))


# -- typed substitution lemmas, checked through the kernel on generated
#    derivations of the stated context shapes


def _hyps(ctx):
    return [item for item in ctx if isinstance(item, Hyp)]


def test_typed_variable_substitution():
    gen = Gen(random.Random(6))
    done = 0
    while done < 40:
        ctx1 = gen.context(4)
        inner = gen.typed_term(ctx1, depth=3)
        r_inner = infer(ctx1, inner)
        assert r_inner.ok
        gamma1 = pos(ctx1)
        x_cls = Classifier("sx")
        mid = ctx1.extend(Hyp("xsub", x_cls, r_inner.type))
        full = gen.extend_context(mid, 2)
        suffix = Context(full.items[len(mid.items):])
        outer = gen.typed_term(full, depth=3)
        r_outer = infer(full, outer)
        assert r_outer.ok
        sub = cs(x_cls, gamma1)
        new_ctx = ctx1.concat(subst_cls(suffix, sub))
        new_term = subst_var(outer, VarSubst(sub, "xsub", inner))
        result = infer(new_ctx, new_term)
        assert result.ok, result.error
        assert alpha_eq(result.type, subst_cls(r_outer.type, sub))
        done += 1


def test_typed_classifier_substitution():
    gen = Gen(random.Random(7))
    done = 0
    while done < 40:
        ctx1 = gen.context(4)
        bound = random.Random(done).choice(sorted(dom_c(ctx1), key=str))
        binder = Classifier("sc")
        mid = ctx1.extend(Cls(binder, bound))
        full = gen.extend_context(mid, 2)
        suffix = Context(full.items[len(mid.items):])
        term = gen.typed_term(full, depth=3)
        r = infer(full, term)
        assert r.ok
        targets = [c for c in dom_c(ctx1) if derives(ctx1, RelKind.PRE, bound, c)]
        target = sorted(targets, key=str)[0]
        sub = cs(binder, target)
        new_ctx = ctx1.concat(subst_cls(suffix, sub))
        result = infer(new_ctx, subst_cls(term, sub))
        assert result.ok, result.error
        assert alpha_eq(result.type, subst_cls(r.type, sub))
        done += 1


def test_typed_rebasing():
    gen = Gen(random.Random(8))
    done = 0
    while done < 40:
        ctx1 = gen.context(4)
        gamma1 = pos(ctx1)
        shut_at = sorted(
            (c for c in dom_c(ctx1) if derives(ctx1, RelKind.MOD, c, gamma1)), key=str
        )[0]
        bound = sorted(
            (c for c in dom_c(ctx1) if derives(ctx1, RelKind.PRE, c, gamma1)), key=str
        )[0]
        binder = Classifier("sr")
        mid = ctx1.extend(Shut(shut_at)).extend(Open(binder, bound))
        full = gen.extend_context(mid, 2)
        suffix = Context(full.items[len(mid.items):])
        term = gen.typed_term(full, depth=3)
        r = infer(full, term)
        assert r.ok
        sub = cs(binder, gamma1)
        new_ctx = ctx1.concat(subst_cls(suffix, sub))
        result = infer(new_ctx, subst_cls(term, sub))
        assert result.ok, result.error
        assert alpha_eq(result.type, subst_cls(r.type, sub))
        done += 1
