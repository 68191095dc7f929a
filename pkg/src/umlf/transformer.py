"""Implementation models: rewrites that remove variable methods and extensible classes.

Each rewrite is a pure function ``Model -> Model`` that leaves every element
it does not name untouched. :func:`transform_all` applies one binding per
variation point, in classification order, and returns a framework whose only
remaining variation points are extensible interfaces.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Callable, Sequence

from .model import (
    EXTENSIBLE_CLASS,
    EXTENSIBLE_INTERFACE,
    VARIABLE_METHOD,
    AttributeDecl,
    ClassDecl,
    MethodDecl,
    Model,
    Param,
    Relationship,
    RestrictionClause,
    VariationPoint,
    classify_variation_points,
    has_errors,
    is_declared_extension_interface,
)
from .validator import validate


class TransformError(ValueError):
    """A binding cannot be applied to the model."""


class BindingsSyntaxError(ValueError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


Params = tuple[tuple[str, "str | None"], ...]


@dataclass(frozen=True)
class Binding:
    """Choice of implementation model for one variation point."""

    locus: VariationPoint
    model_id: str
    params: Params = ()

    def param(self, name: str) -> str | None:
        for key, value in self.params:
            if key == name:
                return value
        return None


@dataclass(frozen=True)
class ImplementationModel:
    id: str
    applies_to: frozenset[tuple[str, str]]
    param_schema: tuple[tuple[str, str], ...]
    rewrite: Callable[[Model, Binding], Model] | None

    def accepts(self, vp: VariationPoint) -> bool:
        return (vp.kind, vp.timing) in self.applies_to


STRATEGY_ROLE = "strategy"
HOOKS_ROLE = "hooks"
MOP_ROLE = "mop"


def upper_camel(name: str) -> str:
    return name[:1].upper() + name[1:]


def _require_class(model: Model, name: str) -> ClassDecl:
    cls = model.get(name)
    if cls is None:
        raise TransformError(f"no class named {name}")
    return cls


def _require_variable(model: Model, vp: VariationPoint, timing: str) -> tuple[ClassDecl, MethodDecl]:
    if vp.kind != VARIABLE_METHOD:
        raise TransformError(f"{vp.locus} is not a variable method")
    cls = _require_class(model, vp.class_name)
    method = cls.method(vp.method or "")
    if method is None or "variable" not in method.tags:
        raise TransformError(f"{vp.locus} is not tagged {{variable}}")
    if timing not in method.tags:
        raise TransformError(f"{vp.locus} is not tagged {{{timing}}}")
    return cls, method


def _check_new_class(model: Model, name: str) -> None:
    if name in model:
        raise TransformError(f"name collision: class {name} already exists")


def _check_role_free(model: Model, source: str, role: str) -> None:
    for rel in model.relationships:
        if rel.role == role and source in rel.sources:
            raise TransformError(f"{source} already has an aggregation with reserved role {role!r}")


def _moved_clauses(cls: ClassDecl, method: str) -> tuple[list[RestrictionClause], list[RestrictionClause]]:
    """Split ``cls``'s clauses into (scoped to ``method``, the rest)."""
    moved, kept = [], []
    for c in cls.constraints:
        if c.method == method and "for-all-new-methods" not in c.tags:
            context = (c.context or cls.name) if c.form == "preserves" else None
            moved.append(replace(c, context=context))
        else:
            kept.append(c)
    return moved, kept


def _retarget_patterns(model: Model, cls: str, method: str, new_cls: str) -> tuple:
    return tuple(
        replace(p, owner_class=new_cls) if (p.owner_class, p.owner_method) == (cls, method) else p
        for p in model.patterns
    )


def _extract_method(
    model: Model,
    binding: Binding,
    suffix: str,
    role: str,
    build: Callable[[ClassDecl, MethodDecl, str, list[RestrictionClause]], ClassDecl],
    template_tags: frozenset[str],
) -> Model:
    """Shared shape of strategy and MOP: move C.m into a new aggregated class."""
    cls, method = _require_variable(model, binding.locus, "dynamic")
    new_name = upper_camel(method.name) + suffix
    _check_new_class(model, new_name)
    # One class may hand several methods to strategies or MOP classes; the
    # aggregations share a role and differ by target.
    moved, kept = _moved_clauses(cls, method.name)
    new_cls = build(cls, method, new_name, moved)
    template = replace(
        cls,
        methods=tuple(m for m in cls.methods if m.name != method.name),
        tags=cls.tags | template_tags,
        constraints=tuple(kept),
    )
    agg = Relationship("aggregation", (cls.name,), new_name, role, "1")
    return replace(
        model.with_class(template),
        classes=model.with_class(template).classes + (new_cls,),
        relationships=model.relationships + (agg,),
        patterns=_retarget_patterns(model, cls.name, method.name, new_name),
    )


def apply_strategy(model: Model, binding: Binding) -> Model:
    """Move a dynamic variable method into an abstract strategy class."""

    def build(cls, method, name, moved):
        hook = MethodDecl(method.name, method.params, method.return_type, "public", True)
        return ClassDecl(
            name,
            "class",
            True,
            methods=(hook,),
            tags=frozenset({"dynamic", "separation-hook"}),
            constraints=tuple(moved),
        )

    return _extract_method(model, binding, "Strategy", STRATEGY_ROLE, build, frozenset({"separation-template"}))


def apply_mop(model: Model, binding: Binding) -> Model:
    """Replace a dynamic variable method by a class configured through Boolean parameters."""
    params = binding.params
    if not params:
        raise TransformError(f"mop binding for {binding.locus.locus} needs at least one parameter")
    names = [name for name, _ in params]
    dupes = sorted({n for n in names if names.count(n) > 1})
    if dupes:
        raise TransformError(f"duplicate mop parameters: {', '.join(dupes)}")

    def build(cls, method, name, moved):
        if method.name in names:
            raise TransformError(f"mop parameter {method.name!r} clashes with the method name")
        attrs = tuple(AttributeDecl(n, "Boolean", "private", doc) for n, doc in params)
        concrete = MethodDecl(method.name, method.params, method.return_type, "public", False)
        return ClassDecl(name, "class", False, attributes=attrs, methods=(concrete,), constraints=tuple(moved))

    return _extract_method(model, binding, "MOP", MOP_ROLE, build, frozenset())


def apply_unification(model: Model, binding: Binding) -> Model:
    """Template and hook stay in one class, which becomes abstract and static."""
    vp = binding.locus
    if vp.timing != "static":
        raise TransformError(f"unification needs a static variation point, {vp.locus} is {vp.timing}")
    if vp.kind == VARIABLE_METHOD:
        cls, method = _require_variable(model, vp, "static")
        hook = replace(method, is_abstract=True, tags=method.tags - {"variable", "static"})
        # A class that is already a declared extension point keeps its own timing;
        # the new hook method is bound together with the rest of it.
        marker = set() if is_declared_extension_interface(cls) else {"static"}
        cls = replace(
            cls,
            is_abstract=cls.kind == "class" or cls.is_abstract,
            methods=tuple(hook if m.name == method.name else m for m in cls.methods),
            tags=cls.tags | marker,
        )
        return model.with_class(cls)
    if vp.kind == EXTENSIBLE_CLASS:
        cls = _require_class(model, vp.class_name)
        if not {"extensible", "static"} <= cls.tags:
            raise TransformError(f"{cls.name} is not tagged {{extensible, static}}")
        # {static} stays as the marker that makes the class an extension parent.
        cls = replace(cls, is_abstract=cls.kind == "class" or cls.is_abstract, tags=cls.tags - {"extensible"})
        return model.with_class(cls)
    raise TransformError(f"unification does not apply to {vp.kind}")


def apply_hook_list(model: Model, binding: Binding) -> Model:
    """Let instances register zero or more hooks run before a chosen method."""
    vp = binding.locus
    if vp.kind != EXTENSIBLE_CLASS:
        raise TransformError(f"hook-list applies to extensible classes, not {vp.kind}")
    cls = _require_class(model, vp.class_name)
    if not {"extensible", "dynamic"} <= cls.tags:
        raise TransformError(f"{cls.name} is not tagged {{extensible, dynamic}}")
    if cls.is_interface:
        raise TransformError(f"hook-list cannot add concrete methods to interface {cls.name}")
    before = binding.param("before")
    if not before or cls.method(before) is None:
        raise TransformError(f"hook-list on {cls.name}: 'before' must name one of its methods (got {before!r})")
    hook_name = cls.name + "Hook"
    _check_new_class(model, hook_name)
    _check_role_free(model, cls.name, HOOKS_ROLE)
    taken = cls.member_names() & {"addHook", "removeHook"}
    if taken:
        raise TransformError(f"name collision: {cls.name} already declares {', '.join(sorted(taken))}")

    moved, kept = [], []
    for c in cls.constraints:
        if "for-all-new-methods" not in c.tags:
            kept.append(c)
            continue
        context = (c.context or cls.name) if c.form == "preserves" else None
        # Hooks only see the hook interface, so a private attribute is out of their reach.
        owner = model.get(context) if context else None
        attr = owner.attribute(c.argument or "") if owner else None
        private = attr is not None and attr.visibility == "private"
        moved.append(
            replace(
                c,
                method="invoke",
                context=context,
                tags=c.tags - {"for-all-new-methods"},
                by_construction=c.by_construction or private,
            )
        )

    hook_iface = ClassDecl(
        hook_name,
        "interface",
        methods=(MethodDecl("invoke", is_abstract=True),),
        tags=frozenset({"dynamic", "separation-hook"}),
        constraints=tuple(moved),
    )
    registrars = tuple(MethodDecl(n, (Param("h", hook_name),)) for n in ("addHook", "removeHook"))
    template = replace(
        cls,
        methods=tuple(replace(m, invokes_hooks=hook_name) if m.name == before else m for m in cls.methods)
        + registrars,
        tags=(cls.tags - {"extensible", "dynamic"}) | {"separation-template"},
        constraints=tuple(kept),
    )
    agg = Relationship("aggregation", (cls.name,), hook_name, HOOKS_ROLE, "0..*")
    updated = model.with_class(template)
    return replace(updated, classes=updated.classes + (hook_iface,), relationships=model.relationships + (agg,))


REGISTRY: dict[str, ImplementationModel] = {
    "strategy": ImplementationModel(
        "strategy", frozenset({(VARIABLE_METHOD, "dynamic")}), (), apply_strategy
    ),
    "unification": ImplementationModel(
        "unification",
        frozenset({(VARIABLE_METHOD, "static"), (EXTENSIBLE_CLASS, "static")}),
        (),
        apply_unification,
    ),
    "hook-list": ImplementationModel(
        "hook-list", frozenset({(EXTENSIBLE_CLASS, "dynamic")}), (("before", "method"),), apply_hook_list
    ),
    "mop": ImplementationModel(
        "mop", frozenset({(VARIABLE_METHOD, "dynamic")}), (("*", "boolean parameter"),), apply_mop
    ),
    # Reserved ids: known techniques without a shipped rewrite.
    "aop": ImplementationModel("aop", frozenset(), (), None),
    "sop": ImplementationModel("sop", frozenset(), (), None),
    "meta-programming": ImplementationModel("meta-programming", frozenset(), (), None),
}


def implementation_model(model_id: str) -> ImplementationModel:
    impl = REGISTRY.get(model_id)
    if impl is None:
        raise TransformError(f"unknown implementation model {model_id!r}")
    if impl.rewrite is None:
        raise TransformError(f"implementation model {model_id!r} is reserved but not implemented")
    return impl


def apply_binding(model: Model, binding: Binding) -> Model:
    impl = implementation_model(binding.model_id)
    if not impl.accepts(binding.locus):
        raise TransformError(
            f"{binding.model_id} does not apply to {binding.locus.kind} ({binding.locus.timing}) {binding.locus.locus}"
        )
    if impl.id in ("strategy", "unification") and binding.params:
        raise TransformError(f"{impl.id} takes no parameters")
    return impl.rewrite(model, binding)


def _same_locus(a: VariationPoint, b: VariationPoint) -> bool:
    return (a.kind, a.class_name, a.method, a.rel_index) == (b.kind, b.class_name, b.method, b.rel_index)


def transform_all(model: Model, bindings: Sequence[Binding]) -> Model:
    """Apply ``bindings`` so no variable method or extensible class remains."""
    diags = validate(model)
    if has_errors(diags):
        raise TransformError("model has validation errors: " + "; ".join(d.render() for d in diags if d.is_error))
    points = classify_variation_points(model)
    remaining = list(bindings)
    ordered: list[Binding] = []
    for vp in points:
        matches = [b for b in remaining if _same_locus(b.locus, vp)]
        if vp.kind == EXTENSIBLE_INTERFACE:
            if matches:
                raise TransformError(f"{vp.locus} is an extensible interface; nothing to transform")
            continue
        if not matches:
            raise TransformError(f"no binding covers {vp.kind} {vp.locus}")
        if len(matches) > 1:
            raise TransformError(f"{vp.locus} is bound more than once")
        remaining.remove(matches[0])
        # Timing comes from the model, not from whoever built the binding.
        ordered.append(replace(matches[0], locus=vp))
    if remaining:
        raise TransformError(f"binding for unknown variation point {remaining[0].locus.locus}")
    for b in ordered:
        model = apply_binding(model, b)
    return model


# --------------------------------------------------------------------------
# Bindings file: one "<Class>[.<method>] => <id>(<params>)" per line.

_LINE = re.compile(
    r"^(?P<cls>[A-Za-z_]\w*)(?:\.(?P<method>[A-Za-z_]\w*))?\s*=>\s*"
    r"(?P<id>[A-Za-z_][\w-]*)\s*(?:\((?P<params>.*)\))?\s*$"
)
_PARAM = re.compile(r'\s*([A-Za-z_]\w*)\s*(?:=\s*("(?:[^"\\]|\\.)*"|[A-Za-z_][\w-]*))?\s*(?:,|$)')


@dataclass(frozen=True)
class BindingLine:
    class_name: str
    method: str | None
    model_id: str
    params: Params
    line: int


def _parse_params(text: str, line: int) -> Params:
    params: list[tuple[str, str | None]] = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _PARAM.match(text, pos)
        if m is None or m.end() == pos:
            raise BindingsSyntaxError(line, f"malformed parameter list near {text[pos:]!r}")
        value = m.group(2)
        if value is not None and value.startswith('"'):
            value = re.sub(r"\\(.)", r"\1", value[1:-1])
        params.append((m.group(1), value))
        pos = m.end()
    return tuple(params)


def parse_bindings(text: str) -> list[BindingLine]:
    out = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("//", 1)[0].strip() if '"' not in raw else raw.strip()
        if not line or line.startswith("//"):
            continue
        m = _LINE.match(line)
        if m is None:
            raise BindingsSyntaxError(n, f"expected '<Class>[.<method>] => <model>(<params>)', got {raw.strip()!r}")
        params = _parse_params(m.group("params") or "", n)
        out.append(BindingLine(m.group("cls"), m.group("method"), m.group("id"), params, n))
    return out


def resolve_bindings(model: Model, lines: Sequence[BindingLine]) -> list[Binding]:
    """Attach each bindings-file line to the variation point it names."""
    points = classify_variation_points(model)
    out = []
    for bl in lines:
        kind = VARIABLE_METHOD if bl.method else EXTENSIBLE_CLASS
        vp = next(
            (p for p in points if p.kind == kind and p.class_name == bl.class_name and p.method == bl.method),
            None,
        )
        if vp is None:
            what = f"{bl.class_name}.{bl.method}" if bl.method else bl.class_name
            raise TransformError(f"line {bl.line}: {what} names no {kind}")
        out.append(Binding(vp, bl.model_id, bl.params))
    return out


def format_binding(b: Binding) -> str:
    target = f"{b.locus.class_name}.{b.locus.method}" if b.locus.method else b.locus.class_name
    if not b.params:
        return f"{target} => {b.model_id}"
    parts = []
    for key, value in b.params:
        if value is None:
            parts.append(key)
        elif re.fullmatch(r"[A-Za-z_][\w-]*", value):
            parts.append(f"{key}={value}")
        else:
            parts.append(f'{key}="' + value.replace("\\", "\\\\").replace('"', '\\"') + '"')
    return f"{target} => {b.model_id}({', '.join(parts)})"
