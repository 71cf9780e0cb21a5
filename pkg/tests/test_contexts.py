import random

import pytest

from bml.contexts import (
    DuplicateClassifier,
    RelKind,
    ShutNotBelow,
    UnknownClassifier,
    build_graph,
    derives,
    dom_c,
    pos,
    wf_context,
    wf_formula,
)
from bml.generators import Gen
from bml.parsing import parse_context, parse_formula
from bml.selfcheck import oracle_relations
from bml.syntax import Classifier, Context, EMPTY, INITIAL

g1, g2, g3 = Classifier("g1"), Classifier("g2"), Classifier("g3")


def ctx(text: str) -> Context:
    return parse_context(text)


def test_pos():
    assert pos(EMPTY) == INITIAL
    assert pos(ctx("x : p @ g1, shut !")) == INITIAL
    assert pos(ctx("x : p @ g1, cls g2 >= g1")) == g1
    assert pos(ctx("x : p @ g1, open g2 >= !")) == g2


def test_dom_c():
    assert dom_c(EMPTY) == {INITIAL}
    assert dom_c(ctx("x : p @ g1, open g2 >= !")) == {INITIAL, g1, g2}
    assert dom_c(ctx("x : p @ g1, shut g1")) == {INITIAL, g1}


def test_build_graph_empty():
    graph = build_graph(EMPTY)
    assert graph.nodes == {INITIAL}
    assert not graph.pre_edges and not graph.mod_edges


def test_build_graph_hyp_chain():
    graph = build_graph(ctx("x : p @ g1, y : q @ g2"))
    assert graph.pre_edges == {(INITIAL, g1), (g1, g2)}
    assert not graph.mod_edges


def test_build_graph_open():
    graph = build_graph(ctx("x : p @ g1, open g2 >= !"))
    assert graph.pre_edges == {(INITIAL, g1), (INITIAL, g2)}
    assert graph.mod_edges == {(g1, g2)}


def test_derives_reflexive():
    c = ctx("x : p @ g1")
    for a in dom_c(c):
        assert derives(c, RelKind.PRE, a, a)
        assert derives(c, RelKind.MOD, a, a)


def test_derives_chain():
    c = ctx("x : p @ g1, y : q @ g2")
    assert derives(c, RelKind.PRE, INITIAL, g2)
    assert not derives(c, RelKind.PRE, g2, g1)


def test_derives_modal_via_open():
    c = ctx("x : p @ g1, open g2 >= !")
    assert derives(c, RelKind.MOD, g1, g2)
    assert not derives(c, RelKind.PRE, g1, g2)


def test_derives_unknown_classifier():
    with pytest.raises(UnknownClassifier):
        derives(EMPTY, RelKind.PRE, g1, INITIAL)


def test_wf_empty_and_shut_initial():
    wf_context(EMPTY)
    wf_context(ctx("shut !"))  # ! [= ! by reflexivity


def test_wf_duplicate_classifier():
    with pytest.raises(DuplicateClassifier) as err:
        wf_context(ctx("x : p @ g1, x2 : q @ g1"))
    assert err.value.index == 1


def test_wf_shut_not_below():
    # after moving back to g1, nothing derives g2 [= g1
    with pytest.raises(ShutNotBelow) as err:
        wf_context(ctx("x : p @ g1, y : q @ g2, shut g2, shut g1, shut g2"))
    assert err.value.index == 4


def test_wf_shut_ok_by_mod_chain():
    wf_context(ctx("x : p @ g1, open g2 >= !, shut g1"))


def test_wf_unknown_bound():
    with pytest.raises(UnknownClassifier):
        wf_context(ctx("open g2 >= g9"))


def test_wf_formula():
    wf_formula(EMPTY, parse_formula("p -> p"))
    wf_formula(EMPTY, parse_formula("[>= !]p"))
    with pytest.raises(UnknownClassifier) as err:
        wf_formula(EMPTY, parse_formula("[>= g]p"))
    assert err.value.path == ("bound",)
    wf_formula(EMPTY, parse_formula("forall g >= !. [>= g]p"))
    with pytest.raises(DuplicateClassifier):
        wf_formula(ctx("x : p @ g1"), parse_formula("forall g1 >= !. p"))


def test_oracle_agreement_sample():
    gen = Gen(random.Random(0))
    for _ in range(60):
        c = gen.context(8)
        pre, mod = oracle_relations(c)
        for a in dom_c(c):
            for b in dom_c(c):
                assert derives(c, RelKind.PRE, a, b) == ((a, b) in pre)
                assert derives(c, RelKind.MOD, a, b) == ((a, b) in mod)


def test_initial_is_least():
    gen = Gen(random.Random(1))
    for _ in range(40):
        c = gen.context(8)
        for target in dom_c(c):
            assert derives(c, RelKind.PRE, INITIAL, target)
            assert derives(c, RelKind.MOD, INITIAL, target)


def test_pre_lifts_to_mod():
    gen = Gen(random.Random(2))
    for _ in range(40):
        c = gen.context(8)
        for a in dom_c(c):
            for b in dom_c(c):
                if derives(c, RelKind.PRE, a, b):
                    assert derives(c, RelKind.MOD, a, b)


def test_prefix_monotonicity():
    gen = Gen(random.Random(3))
    for _ in range(30):
        c = gen.context(5)
        extended = gen.extend_context(c, 3)
        for a in dom_c(c):
            for b in dom_c(c):
                for kind in (RelKind.PRE, RelKind.MOD):
                    if derives(c, kind, a, b):
                        assert derives(extended, kind, a, b)
