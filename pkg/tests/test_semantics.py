import random

import pytest

from bml.generators import Gen
from bml.parsing import parse_context, parse_formula
from bml.semantics import (
    InvalidModel,
    InvalidStructure,
    ModelFormatError,
    UnassignedClassifier,
    consequence_on,
    load_model,
    satisfies,
    satisfies_context,
    validate_model,
    validate_structure,
)
from bml.syntax import EMPTY

f = parse_formula


def one_point(val=("!",)):
    s = validate_structure(["!"], valuation={"p": val} if val else {})
    return validate_model(["w"], [], {"w": s})


def test_one_point_structure_valid():
    s = validate_structure(["!"], valuation={"p": ["!"]})
    assert s.domain == {"!"} and ("!", "!") in s.pre


def test_valuation_must_be_upward_closed():
    with pytest.raises(InvalidStructure) as err:
        validate_structure(["!", "d"], pre=[("!", "d")], valuation={"p": ["!"]})
    kinds = {v.kind for v in err.value.violations}
    assert "ValuationNotUpwardClosed" in kinds


def test_scope_edges_lift_into_stage_relation():
    s = validate_structure(["!", "d"], pre=[("!", "d")], mod=[("d", "!")])
    assert ("!", "d") in s.mod and ("d", "!") in s.mod


def test_root_must_be_least():
    with pytest.raises(InvalidStructure) as err:
        validate_structure(["!", "d"])
    assert any(v.kind == "NotRootLeast" for v in err.value.violations)


def test_model_growth_domain():
    small = validate_structure(["!", "d"], pre=[("!", "d")])
    tiny = validate_structure(["!"])
    with pytest.raises(InvalidModel) as err:
        validate_model(["w", "v"], [("w", "v")], {"w": small, "v": tiny})
    assert any(v.kind == "DomainShrank" for v in err.value.violations)


def test_model_growth_additions_fine():
    base = validate_structure(["!"])
    big = validate_structure(["!", "d"], pre=[("!", "d")], valuation={"p": ["d"]})
    model = validate_model(["w", "v"], [("w", "v")], {"w": base, "v": big})
    assert ("w", "v") in model.order


def test_satisfaction_atom():
    assert satisfies(one_point(), "w", "!", {"!": "!"}, f("p"))
    assert not satisfies(one_point(val=()), "w", "!", {"!": "!"}, f("p"))


def test_satisfaction_box_at_empty_valuation():
    assert not satisfies(one_point(val=()), "w", "!", {"!": "!"}, f("[>= !]p"))


def test_satisfaction_reflection_instance():
    gen = Gen(random.Random(30))
    for _ in range(10):
        model = gen.model()
        for w in sorted(model.worlds):
            s = model.structures[w]
            for d in sorted(s.domain):
                assert satisfies(model, w, d, {"!": s.root}, f("[>= !]p -> p"))


def test_unassigned_classifier():
    with pytest.raises(UnassignedClassifier):
        satisfies(one_point(), "w", "!", {"!": "!"}, f("[>= g]p"))


def test_satisfies_context_clauses():
    model = one_point()
    assert satisfies_context(model, "w", {"!": "!"}, EMPTY)
    ctx = parse_context("x : p @ g")
    assert satisfies_context(model, "w", {"!": "!", "g": "!"}, ctx)
    empty_val = one_point(val=())
    assert not satisfies_context(empty_val, "w", {"!": "!", "g": "!"}, ctx)


def test_consequence_trivial_and_hyp():
    gen = Gen(random.Random(31))
    suite = [gen.model() for _ in range(10)]
    assert consequence_on(suite, EMPTY, f("p -> p")).holds
    assert consequence_on(suite, parse_context("x : p @ g"), f("p")).holds
    verdict = consequence_on(suite, EMPTY, f("p"))
    assert not verdict.holds and verdict.world is not None


def test_model_file_roundtrip():
    text = """
    { "worlds": ["w", "v"], "order": [["w", "v"]],
      "w": {"domain": ["!"], "pre": [], "mod": [], "val": {"p": []}},
      "v": {"domain": ["!", "d"], "pre": [["!", "d"]], "mod": [], "val": {"p": ["d"]}} }
    """
    model = load_model(text)
    assert model.worlds == {"w", "v"}
    assert satisfies(model, "v", "d", {"!": "!"}, f("p"))
    # persistence across the world order: box formulas survive growth
    assert not satisfies(model, "w", "!", {"!": "!"}, f("p"))


def test_model_file_errors():
    with pytest.raises(ModelFormatError):
        load_model("not json")
    with pytest.raises(ModelFormatError):
        load_model('{"order": []}')
    with pytest.raises(ModelFormatError):
        load_model('{"worlds": ["w"], "w": {"domain": ["d"]}}')


def test_semantical_persistency_sample():
    gen = Gen(random.Random(32))
    pool = [f("p"), f("p -> q"), f("[>= !]p"), f("[>= !](p -> q)")]
    for _ in range(8):
        model = gen.model()
        for w in sorted(model.worlds):
            for v in sorted(model.order_up[w]):
                sv = model.structures[v]
                sw = model.structures[w]
                for formula in pool:
                    for d in sorted(sw.domain):
                        if not satisfies(model, w, d, {"!": sw.root}, formula):
                            continue
                        for e in sorted(sv.pre_up[d]):
                            assert satisfies(model, v, e, {"!": sv.root}, formula)
