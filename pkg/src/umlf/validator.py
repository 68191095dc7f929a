"""Tag applicability and well-formedness rules for UML-F models.

Every rule has one code; the catalogue with examples lives in
``docs/diagnostics.md``. Errors block transformation and instantiation,
warnings never do.
"""

from __future__ import annotations

from typing import Iterator

from .model import (
    TAGS,
    TIMING_TAGS,
    ClassDecl,
    Diagnostic,
    Model,
    extension_parents,
    is_declared_extension_interface,
    mop_classes,
)

RULES: dict[str, tuple[str, str]] = {
    "UMLF-E001": ("error", "{variable} applies to methods only"),
    "UMLF-E002": ("error", "{extensible} applies to classes only"),
    "UMLF-E003": ("error", "{incomplete} applies to generalizations and realizations only"),
    "UMLF-E004": ("error", "variation point carries neither {static} nor {dynamic}"),
    "UMLF-E005": ("error", "variation point carries both {static} and {dynamic}"),
    "UMLF-E006": ("error", "{appl-class} class is not attached through an {incomplete} relationship"),
    "UMLF-E007": ("error", "{for-all-new-methods} clause on a class that cannot gain methods"),
    "UMLF-E008": ("error", "{optional} applies to sequence events only"),
    "UMLF-E009": ("error", "timing tag on an element that is not a variation point"),
    "UMLF-E010": ("error", "preserves-clause names an undeclared attribute"),
    "UMLF-E011": ("error", "tag is not applicable to this kind of element"),
    "UMLF-W001": ("warning", "extensible interface declares no abstract methods"),
    "UMLF-W002": ("warning", "sequence pattern constrains a method that is not a variation point"),
}

# Tags whose misplacement has a dedicated rule; the rest fall back to E011.
_PLACEMENT_CODES = {
    "variable": "UMLF-E001",
    "extensible": "UMLF-E002",
    "incomplete": "UMLF-E003",
    "optional": "UMLF-E008",
}


def _diag(code: str, path: str, detail: str = "") -> Diagnostic:
    severity, message = RULES[code]
    return Diagnostic(code, severity, path, f"{message}{': ' + detail if detail else ''}")


def _elements(model: Model) -> Iterator[tuple[str, str, frozenset[str], bool]]:
    """Yield (element kind, path, tags, is_locus) for every taggable element."""
    for cls in model.classes:
        cpath = model.path(cls.name)
        locus = "extensible" in cls.tags or is_declared_extension_interface(cls)
        yield "class", cpath, cls.tags, locus
        for m in cls.methods:
            yield "method", f"{cpath}.{m.name}", m.tags, "variable" in m.tags
        for c in cls.constraints:
            yield "constraint", f"{cpath}.constraint[{c.key()}]", c.tags, False
    for i, rel in enumerate(model.relationships):
        locus = rel.is_inheritance and "incomplete" in rel.tags
        yield rel.kind, model.path(f"rel[{i}]"), rel.tags, locus
    for p in model.patterns:
        for e in p.events:
            yield "event", model.path(f"sequence.{p.name}.{e.name}"), e.tags, False


def _placement(model: Model) -> Iterator[Diagnostic]:
    for kind, path, tags, locus in _elements(model):
        for tag in sorted(tags):
            tagdef = TAGS.get(tag)
            if tagdef is None or tag in TIMING_TAGS:
                continue
            if kind not in tagdef.applies_to:
                yield _diag(_PLACEMENT_CODES.get(tag, "UMLF-E011"), path, f"{{{tag}}} on {kind}")
        timings = [t for t in TIMING_TAGS if t in tags]
        if locus:
            if not timings:
                yield _diag("UMLF-E004", path)
            elif len(timings) == 2:
                yield _diag("UMLF-E005", path)
        elif timings:
            yield _diag("UMLF-E009", path, f"{kind} is not a variation point")


def _appl_classes(model: Model) -> Iterator[Diagnostic]:
    # Instances complete their generalizations, so the rule only binds frameworks.
    if model.instance is not None:
        return
    for cls in model.classes:
        if "appl-class" not in cls.tags:
            continue
        if not cls.supertypes:
            yield _diag("UMLF-E006", model.path(cls.name), "no supertype")
        for sup in cls.supertypes:
            if not any(
                r.is_inheritance and cls.name in r.sources and r.target == sup and "incomplete" in r.tags
                for r in model.relationships
            ):
                yield _diag("UMLF-E006", model.path(cls.name), f"relationship to {sup}")


def _can_gain_methods(model: Model, cls: ClassDecl) -> bool:
    if "extensible" in cls.tags or is_declared_extension_interface(cls):
        return True
    return any(r.target == cls.name for _, r in model.incomplete_relationships())


def _clauses(model: Model) -> Iterator[Diagnostic]:
    for cls in model.classes:
        for c in cls.constraints:
            path = model.path(f"{cls.name}.constraint[{c.key()}]")
            if "for-all-new-methods" in c.tags and not _can_gain_methods(model, cls):
                yield _diag("UMLF-E007", path)
            if c.form == "preserves":
                owner = model.get(c.context) if c.context else cls
                if owner is None or owner.attribute(c.argument or "") is None:
                    where = c.context or cls.name
                    yield _diag("UMLF-E010", path, f"{where} has no attribute {c.argument}")


def _warnings(model: Model) -> Iterator[Diagnostic]:
    incomplete_parents = {r.target for _, r in model.incomplete_relationships()}
    for cls in model.classes:
        if cls.name in incomplete_parents and not cls.abstract_methods():
            yield _diag("UMLF-W001", model.path(cls.name))
    parents = set(extension_parents(model))
    mops = set(mop_classes(model))
    for p in model.patterns:
        cls = model.get(p.owner_class)
        method = cls.method(p.owner_method) if cls else None
        if method is None:
            continue
        if "variable" in method.tags:
            continue
        if cls.name in parents and method in cls.abstract_methods():
            continue
        if cls.name in mops:
            continue
        yield _diag("UMLF-W002", model.path(f"sequence.{p.name}"), f"{p.owner} is fixed")


def validate(model: Model) -> list[Diagnostic]:
    """Every rule violation in ``model``, ordered by element path then code."""
    found = [*_placement(model), *_appl_classes(model), *_clauses(model), *_warnings(model)]
    return sorted(set(found), key=lambda d: (d.path, d.code, d.message))
