"""Framework instantiation: obligations, ``.inst`` specs, verification and assembly."""

from __future__ import annotations

from dataclasses import dataclass, replace

from ._lexer import EOF, SourceError, Syntax, TokenStream
from .conformance import STRICT, EffectSummary, check_effects, conforms
from .model import (
    ClassDecl,
    Diagnostic,
    InstanceInfo,
    MethodDecl,
    Model,
    Param,
    Relationship,
    RestrictionClause,
    SequencePattern,
    extension_parents,
    extension_timing,
    has_errors,
    mop_classes,
)

EXTENSION = "extension"
CONFIGURATION = "configuration"


class InstantiationError(ValueError):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(d.render() for d in diagnostics if d.is_error) or "instantiation failed")


@dataclass(frozen=True)
class Obligation:
    """What an instance must (or may) supply for one extension point."""

    interface_name: str
    abstract_methods: tuple[MethodDecl, ...]
    clauses: tuple[RestrictionClause, ...]
    patterns: tuple[SequencePattern, ...]
    timing: str
    kind: str = EXTENSION
    parameters: tuple[str, ...] = ()

    @property
    def runtime_capable(self) -> bool:
        return self.timing == "dynamic"

    def clauses_for(self, method: str, is_new: bool) -> list[RestrictionClause]:
        """Clauses an implementation of ``method`` must respect.

        A new method can only run on behalf of a method the framework calls,
        so it inherits every method-scoped clause as well.
        """
        return [
            c
            for c in self.clauses
            if c.scope != "method" or c.method == method or is_new
        ]


@dataclass(frozen=True)
class MethodImpl:
    name: str
    params: tuple[Param, ...] = ()
    summary: EffectSummary = EffectSummary()


@dataclass(frozen=True)
class AppClassSpec:
    name: str
    supertype: str
    methods: tuple[MethodImpl, ...] = ()

    def split(self, obligation: Obligation) -> tuple[list[MethodImpl], list[MethodImpl]]:
        """(implementations of abstract methods, new methods)."""
        abstract = {m.name for m in obligation.abstract_methods}
        return (
            [m for m in self.methods if m.name in abstract],
            [m for m in self.methods if m.name not in abstract],
        )


@dataclass(frozen=True)
class InstantiationSpec:
    instance_name: str
    framework: str
    app_classes: tuple[AppClassSpec, ...] = ()
    configurations: tuple[tuple[str, tuple[tuple[str, bool], ...]], ...] = ()


# --------------------------------------------------------------------------
# Obligations


def _untransformed(framework: Model) -> list[str]:
    found = []
    for cls in framework.classes:
        if "extensible" in cls.tags:
            found.append(cls.name)
        found.extend(f"{cls.name}.{m.name}" for m in cls.methods if "variable" in m.tags)
    return found


def list_obligations(framework: Model) -> list[Obligation]:
    """One obligation per extension parent and per MOP class, in declaration order."""
    leftover = _untransformed(framework)
    if leftover:
        raise InstantiationError(
            [
                Diagnostic("UMLF-E207", "error", framework.path(p), "variation point must be transformed first")
                for p in leftover
            ]
        )
    parents = set(extension_parents(framework))
    mops = set(mop_classes(framework))
    out = []
    for cls in framework.classes:
        if cls.name in parents:
            methods = {m.name for m in cls.abstract_methods()}
            out.append(
                Obligation(
                    cls.name,
                    cls.abstract_methods(),
                    cls.constraints,
                    tuple(p for p in framework.patterns_of(cls.name) if p.owner_method in methods),
                    extension_timing(framework, cls),
                )
            )
        elif cls.name in mops:
            params = tuple(a.name for a in cls.attributes if a.type_name == "Boolean")
            out.append(
                Obligation(
                    cls.name,
                    (),
                    cls.constraints,
                    tuple(framework.patterns_of(cls.name)),
                    "dynamic",
                    CONFIGURATION,
                    params,
                )
            )
    return out


# --------------------------------------------------------------------------
# Verification


def _err(code: str, path: str, message: str) -> Diagnostic:
    return Diagnostic(code, "error", path, message)


def verify_instance(framework: Model, spec: InstantiationSpec) -> list[Diagnostic]:
    """Every reason ``spec`` is not a valid instance of ``framework``."""
    root = spec.instance_name
    try:
        obligations = {o.interface_name: o for o in list_obligations(framework)}
    except InstantiationError as exc:
        return exc.diagnostics
    diags: list[Diagnostic] = []
    if spec.framework != framework.name:
        diags.append(_err("UMLF-E207", root, f"spec instantiates {spec.framework}, not {framework.name}"))

    seen: set[str] = set()
    for app in spec.app_classes:
        path = f"{root}.{app.name}"
        if app.name in framework or app.name in seen:
            diags.append(_err("UMLF-E205", path, f"class name {app.name} is already taken"))
        seen.add(app.name)
        ob = obligations.get(app.supertype)
        if ob is None or ob.kind != EXTENSION:
            diags.append(_err("UMLF-E203", path, f"{app.supertype} is not an extension point of {framework.name}"))
            continue
        names = [m.name for m in app.methods]
        for dup in sorted({n for n in names if names.count(n) > 1}):
            diags.append(_err("UMLF-E205", f"{path}.{dup}", "method declared twice"))
        implemented, new = app.split(ob)
        done = {m.name for m in implemented}
        for am in ob.abstract_methods:
            if am.name not in done:
                diags.append(_err("UMLF-E201", path, f"missing implementation of {ob.interface_name}.{am.signature()}"))
        abstract = {m.name: m for m in ob.abstract_methods}
        for impl in implemented:
            mpath = f"{path}.{impl.name}"
            declared = abstract[impl.name]
            if [p.type_name for p in impl.params] != [p.type_name for p in declared.params]:
                diags.append(_err("UMLF-E206", mpath, f"signature differs from {declared.signature()}"))
            diags += check_effects(
                impl.summary, ob.clauses_for(impl.name, False), framework[ob.interface_name], mpath, False
            )
            for pattern in ob.patterns:
                if pattern.owner_method != impl.name:
                    continue
                if impl.summary.trace is None:
                    diags.append(
                        Diagnostic("UMLF-W201", "warning", mpath, f"no trace declared; {pattern.name} unchecked")
                    )
                    continue
                result = conforms(impl.summary.trace, pattern, STRICT)
                if not result:
                    v = result.first_violation
                    diags.append(
                        _err(
                            "UMLF-E202",
                            mpath,
                            f"trace violates {pattern.name} at position {v.position}: expected {v.expected}",
                        )
                    )
        for impl in new:
            diags += check_effects(
                impl.summary, ob.clauses_for(impl.name, True), framework[ob.interface_name], f"{path}.{impl.name}", False
            )

    configured: set[str] = set()
    for target, values in spec.configurations:
        path = f"{root}.configure[{target}]"
        ob = obligations.get(target)
        if ob is None or ob.kind != CONFIGURATION:
            diags.append(_err("UMLF-E204", path, f"{target} is not a MOP class"))
            continue
        if target in configured:
            diags.append(_err("UMLF-E204", path, "configured twice"))
        configured.add(target)
        given = [k for k, _ in values]
        for k in sorted({k for k in given if given.count(k) > 1}):
            diags.append(_err("UMLF-E204", path, f"parameter {k} given twice"))
        for k in given:
            if k not in ob.parameters:
                diags.append(_err("UMLF-E204", path, f"unknown parameter {k}"))
        for k in ob.parameters:
            if k not in given:
                diags.append(_err("UMLF-E204", path, f"missing value for {k}"))
    return diags


def instantiate(framework: Model, spec: InstantiationSpec) -> Model:
    """The application model, or :class:`InstantiationError` with the diagnostics."""
    diags = verify_instance(framework, spec)
    if has_errors(diags):
        raise InstantiationError(diags)
    obligations = {o.interface_name: o for o in list_obligations(framework)}
    classes = list(framework.classes)
    relationships = list(framework.relationships)
    satisfied: set[str] = set()
    for app in spec.app_classes:
        ob = obligations[app.supertype]
        parent = framework[app.supertype]
        abstract = {m.name: m for m in ob.abstract_methods}
        methods = []
        for impl in app.methods:
            declared = abstract.get(impl.name)
            ret = declared.return_type if declared else None
            methods.append(MethodDecl(impl.name, impl.params, ret))
        tags = {"appl-class"}
        if "separation-hook" in parent.tags:
            tags.add("c-hook")
        classes.append(ClassDecl(app.name, supertypes=(app.supertype,), methods=tuple(methods), tags=frozenset(tags)))
        kind = "realization" if parent.is_interface else "generalization"
        relationships.append(Relationship(kind, (app.name,), app.supertype))
        satisfied.add(app.supertype)
    # Satisfied obligations are complete: their {incomplete} relationships close.
    for i, rel in enumerate(relationships):
        if rel.is_inheritance and "incomplete" in rel.tags and rel.target in satisfied:
            relationships[i] = replace(rel, tags=rel.tags - {"incomplete", "static", "dynamic"})
    return Model(
        spec.instance_name,
        tuple(classes),
        tuple(relationships),
        framework.patterns,
        InstanceInfo(framework.name, spec.configurations),
    )


def instance_report(framework: Model, spec: InstantiationSpec) -> list[str]:
    """One line per obligation: who fills it and whether it can be filled at runtime."""
    lines = []
    for ob in list_obligations(framework):
        if ob.kind == CONFIGURATION:
            values = dict(next((v for t, v in spec.configurations if t == ob.interface_name), ()))
            shown = ", ".join(f"{k}={'true' if values[k] else 'false'}" for k in ob.parameters if k in values)
            lines.append(f"{ob.interface_name} (mop, runtime-capable): {shown or 'configured at runtime'}")
            continue
        apps = [a.name for a in spec.app_classes if a.supertype == ob.interface_name]
        note = f"{ob.timing}, runtime-capable" if ob.runtime_capable else ob.timing
        lines.append(f"{ob.interface_name} ({note}): {', '.join(apps) if apps else 'open'}")
    return lines


# --------------------------------------------------------------------------
# .inst files


def _names_block(ts: TokenStream) -> frozenset[str]:
    ts.expect("{")
    names = ts.ident_list("attribute name", "}")
    ts.expect("}")
    return frozenset(t.text for t in names)


def _method_impl(ts: TokenStream) -> MethodImpl:
    ts.expect("method")
    name = ts.name("method name").text
    ts.expect("(")
    params = []
    if not ts.at(")"):
        while True:
            pname = ts.name("parameter name").text
            ts.expect(":")
            params.append(Param(pname, ts.name("parameter type").text))
            if not ts.accept(","):
                break
    ts.expect(")")
    ts.expect("{")
    reads: frozenset[str] = frozenset()
    writes: frozenset[str] = frozenset()
    trace = None
    if ts.accept("reads"):
        reads = _names_block(ts)
    if ts.accept("writes"):
        writes = _names_block(ts)
    if ts.accept("trace"):
        ts.expect("[")
        trace = tuple(t.text for t in ts.ident_list("event name", "]"))
        ts.expect("]")
    ts.expect("}")
    return MethodImpl(name, tuple(params), EffectSummary(reads, writes, trace))


def parse_spec(text: str, source: str = "<input>") -> InstantiationSpec:
    ts = TokenStream(text)
    apps: list[AppClassSpec] = []
    configs: list[tuple[str, tuple[tuple[str, bool], ...]]] = []
    instance = framework = ""
    try:
        ts.expect("instance")
        instance = ts.name("instance name").text
        ts.expect("of")
        framework = ts.name("framework name").text
        ts.expect("{")
        while ts.tok.kind != EOF and not ts.at("}"):
            start, level = ts.i, ts.level
            try:
                if ts.accept("class"):
                    name = ts.name("class name").text
                    ts.expect(":")
                    sup = ts.name("supertype").text
                    ts.expect("{")
                    methods = []
                    while ts.at("method"):
                        methods.append(_method_impl(ts))
                    ts.expect("}")
                    apps.append(AppClassSpec(name, sup, tuple(methods)))
                elif ts.accept("configure"):
                    target = ts.name("class name").text
                    ts.expect("{")
                    values = []
                    while not ts.at("}"):
                        key = ts.name("parameter name").text
                        ts.expect("=")
                        if not ts.at("true", "false"):
                            raise ts.fail("'true' or 'false'")
                        values.append((key, ts.advance().text == "true"))
                    ts.expect("}")
                    configs.append((target, tuple(values)))
                else:
                    raise ts.fail("'class' or 'configure'")
            except Syntax:
                if ts.i == start:
                    ts.advance()
                ts.sync(level, {"class", "configure"})
        ts.expect("}")
        if ts.tok.kind != EOF:
            raise ts.fail("end of input")
    except Syntax:
        pass
    if ts.errors:
        raise SourceError(sorted(ts.errors, key=lambda e: (e.line, e.column)), source)
    return InstantiationSpec(instance, framework, tuple(apps), tuple(configs))


def parse_spec_file(path) -> InstantiationSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_spec(fh.read(), str(path))


def format_spec(spec: InstantiationSpec) -> str:
    out = [f"instance {spec.instance_name} of {spec.framework} {{"]
    for app in spec.app_classes:
        out.append(f"  class {app.name} : {app.supertype} {{")
        for m in app.methods:
            params = ", ".join(f"{p.name}: {p.type_name}" for p in m.params)
            body = []
            s = m.summary
            if s.reads:
                body.append("reads { " + ", ".join(sorted(s.reads)) + " }")
            if s.writes:
                body.append("writes { " + ", ".join(sorted(s.writes)) + " }")
            if s.trace is not None:
                body.append("trace [ " + ", ".join(s.trace) + " ]" if s.trace else "trace [ ]")
            out.append(f"    method {m.name}({params}) {{ {' '.join(body)} }}" if body else f"    method {m.name}({params}) {{ }}")
        out.append("  }")
    for target, values in spec.configurations:
        body = " ".join(f"{k} = {'true' if v else 'false'}" for k, v in values)
        out.append(f"  configure {target} {{ {body} }}" if body else f"  configure {target} {{ }}")
    out.append("}")
    return "\n".join(out) + "\n"
