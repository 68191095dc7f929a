import re
import sys
from pathlib import Path

import pytest

from umlf.dsl import parse_file
from umlf.instantiator import parse_spec_file
from umlf.model import Model, class_of_path, structural_diff
from umlf.transformer import parse_bindings, resolve_bindings

FIXTURES = Path(__file__).parent / "fixtures"
sys.path.insert(0, str(Path(__file__).parent))


def fixture_path(name: str) -> Path:
    return FIXTURES / name


def load(name: str):
    return parse_file(FIXTURES / name)


def bindings_for(model, name: str):
    return resolve_bindings(model, parse_bindings((FIXTURES / name).read_text()))


def spec(name: str):
    return parse_spec_file(FIXTURES / name)


def changed_classes(before: Model, after: Model) -> set[str]:
    """Classes whose own elements differ, plus ends of relationships that differ."""
    out = set()
    for entry in structural_diff(before, after):
        cls = class_of_path(entry.path)
        if cls:
            out.add(cls)
        elif entry.path.startswith("rel["):
            i = int(re.match(r"rel\[(\d+)\]", entry.path).group(1))
            for model in (before, after):
                if i < len(model.relationships):
                    rel = model.relationships[i]
                    out |= {rel.target, *rel.sources}
    return out


@pytest.fixture
def fig3():
    return load("fig3.umlf")


@pytest.fixture
def fig8():
    return load("fig8.umlf")
