import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FIXTURES, changed_classes, load, spec
from genmodels import random_model
from umlf.codegen import generate
from umlf.instantiator import instantiate
from umlf.model import Model

GOLDEN = FIXTURES / "skel_fig8"


def test_fig8_goldens(fig8):
    files = generate(fig8)
    golden = {p.name: p.read_text() for p in GOLDEN.iterdir()}
    assert len(files) == 8
    assert files == golden


def test_strategy_hot_spot(fig8):
    text = generate(fig8)["SelectCourseStrategy.skel"]
    assert "@HOT-SPOT(extensible-interface, dynamic)" in text


def test_empty_model():
    assert generate(Model("M")) == {}


def test_files_sorted_and_deterministic(fig8):
    a, b = generate(fig8), generate(fig8)
    assert a == b
    assert list(a) == sorted(a)


def test_delegation_and_hook_stubs(fig8):
    files = generate(fig8)
    assert "// delegate: return strategy.selectCourse()" in files["SelectCourse.skel"]
    show = files["ShowCourse.skel"]
    assert "public showContent() {\n    // for each h in hooks: h.invoke()\n  }" in show
    assert "public addHook(h: ShowCourseHook) { }" in show
    assert "@RESTRICTION(on invoke preserves ShowCourse.fSelectedCourse, by-construction)" in files["ShowCourseHook.skel"]


def test_untransformed_markers(fig3):
    files = generate(fig3)
    assert "// @VARIABLE(dynamic)" in files["SelectCourse.skel"]
    assert "// @EXTENSIBLE(dynamic)" in files["ShowCourse.skel"]
    assert "// @GENERALIZATION(Actor; incomplete, static)" in files["Student.skel"]


def test_mop_delegation():
    text = generate(load("fig9.umlf"))["SelectCourse.skel"]
    assert "// delegate: return mop.selectCourse()" in text


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_one_file_and_one_marker_per_abstract_method(seed):
    model = random_model(random.Random(seed))
    files = generate(model)
    assert set(files) == {f"{c.name}.skel" for c in model.classes}
    for cls in model.classes:
        text = files[f"{cls.name}.skel"]
        assert text.count("@HOT-SPOT(") == len(cls.abstract_methods())
    assert generate(model) == files


@pytest.mark.parametrize("inst", ["simple_select.inst", "fig10.inst"])
def test_regeneration_after_instantiation(fig8, inst):
    s = spec(inst)
    app = instantiate(fig8, s)
    before, after = generate(fig8), generate(app)
    app_files = {f"{a.name}.skel" for a in s.app_classes}
    assert set(after) - set(before) == app_files
    differing = {name for name in before if before[name] != after[name]}
    assert differing <= {f"{c}.skel" for c in changed_classes(fig8, app)}
    assert differing == set()
