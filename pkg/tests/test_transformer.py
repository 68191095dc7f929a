import random
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import bindings_for, fixture_path, load
from genmodels import random_bindings, random_model, untouched_paths
from umlf.dsl import format_model
from umlf.model import ClassDecl, classify_variation_points, extension_parents, structural_diff
from umlf.transformer import (
    REGISTRY,
    Binding,
    BindingsSyntaxError,
    TransformError,
    apply_binding,
    format_binding,
    parse_bindings,
    resolve_bindings,
    transform_all,
)
from umlf.validator import validate


def point(model, kind, cls, method=None):
    return next(p for p in classify_variation_points(model) if (p.kind, p.class_name, p.method) == (kind, cls, method))


def strategy_binding(model):
    return Binding(point(model, "variable-method", "SelectCourse", "selectCourse"), "strategy")


def hook_binding(model, before="showContent"):
    return Binding(point(model, "extensible-class", "ShowCourse"), "hook-list", (("before", before),))


# Goldens


def test_case_study_reproduces_fig8(fig3, fig8):
    out = transform_all(fig3, bindings_for(fig3, "case.bind"))
    assert not structural_diff(out, fig8)
    assert format_model(out) == fixture_path("fig8.umlf").read_text()


def test_mop_variant_reproduces_fig9(fig3):
    out = transform_all(fig3, bindings_for(fig3, "mop.bind"))
    assert format_model(out) == fixture_path("fig9.umlf").read_text()


def test_fig9_mop_class_has_three_boolean_parameters():
    mop = load("fig9.umlf")["SelectCourseMOP"]
    assert [(a.name, a.type_name) for a in mop.attributes] == [
        ("login", "Boolean"),
        ("major", "Boolean"),
        ("validate", "Boolean"),
    ]
    assert mop.attribute("login").doc == "TRUE if login is required"


def test_transformed_framework_is_a_fixpoint(fig8):
    assert transform_all(fig8, []) == fig8


# Individual rewrites


def test_strategy_moves_method_and_pattern(fig3):
    out = apply_binding(fig3, strategy_binding(fig3))
    strat = out["SelectCourseStrategy"]
    assert strat.is_abstract and strat.tags == {"dynamic", "separation-hook"}
    assert strat.method("selectCourse").is_abstract
    assert out["SelectCourse"].method("selectCourse") is None
    assert "separation-template" in out["SelectCourse"].tags
    agg = out.relationships[-1]
    assert (agg.kind, agg.sources, agg.target, agg.role, agg.multiplicity) == (
        "aggregation",
        ("SelectCourse",),
        "SelectCourseStrategy",
        "strategy",
        "1",
    )
    assert out.patterns[0].owner == "SelectCourseStrategy.selectCourse"


def test_strategy_carries_method_clauses(fig3):
    cls = fig3["SelectCourse"]
    from umlf.model import AttributeDecl, RestrictionClause

    cls = replace(
        cls,
        attributes=(AttributeDecl("fSeen", "Integer"),),
        constraints=(RestrictionClause("preserves", "fSeen", method="selectCourse"),),
    )
    out = apply_binding(fig3.with_class(cls), strategy_binding(fig3))
    (moved,) = out["SelectCourseStrategy"].constraints
    assert moved.key() == "on selectCourse preserves SelectCourse.fSeen"
    assert out["SelectCourse"].constraints == ()
    assert validate(out) == []


def test_two_strategies_on_one_class():
    from umlf.dsl import parse

    model = parse(
        "model M { class A { method f() { tags { variable, dynamic } } method g() { tags { variable, dynamic } } } }"
    )
    out = transform_all(model, [Binding(p, "strategy") for p in classify_variation_points(model)])
    assert [r.target for r in out.relationships] == ["FStrategy", "GStrategy"]
    assert validate(out) == []


def test_hook_list_shapes(fig3):
    out = apply_binding(fig3, hook_binding(fig3))
    hook = out["ShowCourseHook"]
    assert hook.is_interface and hook.tags == {"dynamic", "separation-hook"}
    assert [m.name for m in hook.methods] == ["invoke"]
    show = out["ShowCourse"]
    assert show.tags == {"separation-template"}
    assert [m.name for m in show.methods] == ["showCourse", "showContent", "addHook", "removeHook"]
    assert show.method("showContent").invokes_hooks == "ShowCourseHook"
    assert show.constraints == ()


def test_hook_list_marks_private_clause_by_construction(fig3):
    (clause,) = apply_binding(fig3, hook_binding(fig3))["ShowCourseHook"].constraints
    assert clause.by_construction
    assert clause.key() == "on invoke preserves ShowCourse.fSelectedCourse"


def test_hook_list_keeps_protected_clause_checked(fig3):
    cls = fig3["ShowCourse"]
    attr = replace(cls.attributes[0], visibility="protected")
    model = fig3.with_class(replace(cls, attributes=(attr,)))
    (clause,) = apply_binding(model, hook_binding(model))["ShowCourseHook"].constraints
    assert not clause.by_construction


def test_hook_list_before_must_exist(fig3):
    with pytest.raises(TransformError, match="before"):
        apply_binding(fig3, hook_binding(fig3, "nothere"))


def test_unification_of_static_variable_method(fig3):
    cls = fig3["SelectCourse"]
    m = replace(cls.methods[0], tags=frozenset({"variable", "static"}))
    model = fig3.with_class(replace(cls, methods=(m,)))
    vp = point(model, "variable-method", "SelectCourse", "selectCourse")
    out = apply_binding(model, Binding(vp, "unification"))
    sc = out["SelectCourse"]
    assert sc.is_abstract and sc.tags == {"static"}
    assert sc.method("selectCourse").is_abstract and sc.method("selectCourse").tags == frozenset()
    assert "SelectCourse" in extension_parents(out)


def test_unification_of_static_extensible_class(fig3):
    cls = fig3["ShowCourse"]
    model = fig3.with_class(replace(cls, tags=frozenset({"extensible", "static"})))
    out = apply_binding(model, Binding(point(model, "extensible-class", "ShowCourse"), "unification"))
    assert out["ShowCourse"].is_abstract and out["ShowCourse"].tags == {"static"}
    assert validate(out) == []


def test_mop_requires_parameters(fig3):
    vp = point(fig3, "variable-method", "SelectCourse", "selectCourse")
    with pytest.raises(TransformError, match="at least one"):
        apply_binding(fig3, Binding(vp, "mop"))
    with pytest.raises(TransformError, match="duplicate"):
        apply_binding(fig3, Binding(vp, "mop", (("a", None), ("a", None))))


# Rejections


def test_wrong_timing_is_rejected(fig3):
    vp = point(fig3, "variable-method", "SelectCourse", "selectCourse")
    with pytest.raises(TransformError, match="does not apply"):
        apply_binding(fig3, Binding(vp, "unification"))


@pytest.mark.parametrize("model_id", ["aop", "sop", "meta-programming"])
def test_reserved_models_are_not_implemented(fig3, model_id):
    assert model_id in REGISTRY
    vp = point(fig3, "variable-method", "SelectCourse", "selectCourse")
    with pytest.raises(TransformError, match="reserved"):
        apply_binding(fig3, Binding(vp, model_id))


def test_unknown_model_id(fig3):
    vp = point(fig3, "variable-method", "SelectCourse", "selectCourse")
    with pytest.raises(TransformError, match="unknown"):
        apply_binding(fig3, Binding(vp, "visitor"))


def test_missing_binding(fig3):
    with pytest.raises(TransformError, match="no binding covers extensible-class ShowCourse"):
        transform_all(fig3, [strategy_binding(fig3)])


def test_duplicate_binding(fig3):
    with pytest.raises(TransformError, match="more than once"):
        transform_all(fig3, [strategy_binding(fig3), strategy_binding(fig3), hook_binding(fig3)])


def test_binding_on_extensible_interface(fig3):
    vp = point(fig3, "extensible-interface", "Actor")
    with pytest.raises(TransformError, match="extensible interface"):
        transform_all(fig3, [strategy_binding(fig3), hook_binding(fig3), Binding(vp, "unification")])


def test_name_collision(fig3):
    model = replace(fig3, classes=fig3.classes + (ClassDecl("SelectCourseStrategy"),))
    with pytest.raises(TransformError, match="collision"):
        apply_binding(model, strategy_binding(fig3))


def test_invalid_model_is_rejected(fig3):
    from mutations import MUTATIONS

    with pytest.raises(TransformError, match="UMLF-E004"):
        transform_all(MUTATIONS["UMLF-E004"](fig3), [])


# Bindings files


def test_parse_bindings_file(fig3):
    lines = parse_bindings(fixture_path("mop.bind").read_text())
    assert [(b.class_name, b.method, b.model_id) for b in lines] == [
        ("SelectCourse", "selectCourse", "mop"),
        ("ShowCourse", None, "hook-list"),
    ]
    assert [k for k, _ in lines[0].params] == ["login", "major", "validate"]
    assert lines[1].params == (("before", "showContent"),)


def test_binding_line_numbers():
    with pytest.raises(BindingsSyntaxError) as info:
        parse_bindings("// ok\nA.m => strategy\nthis is wrong\n")
    assert info.value.line == 3


def test_quoted_parameter_escapes():
    (line,) = parse_bindings('A.m => mop(x="say \\"hi\\", // not a comment")')
    assert line.params == (("x", 'say "hi", // not a comment'),)


def test_resolve_rejects_non_points(fig3):
    with pytest.raises(TransformError, match="Actor names no extensible-class"):
        resolve_bindings(fig3, parse_bindings("Actor => unification"))


def test_format_binding_round_trip(fig3):
    for b in bindings_for(fig3, "mop.bind"):
        (line,) = parse_bindings(format_binding(b))
        assert resolve_bindings(fig3, [line]) == [b]


# Properties over random frameworks


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_transform_properties(seed):
    rng = random.Random(seed)
    model = random_model(rng)
    assert not [d for d in validate(model) if d.is_error]
    bindings = random_bindings(rng, model)
    out = transform_all(model, bindings)
    assert all(p.kind == "extensible-interface" for p in classify_variation_points(out))
    assert not [d for d in validate(out) if d.is_error]
    assert not structural_diff(model, out, untouched_paths(model, bindings))
    # Binding order is irrelevant and the result is a fixpoint.
    assert transform_all(model, list(reversed(bindings))) == out
    assert transform_all(out, []) == out
