"""Neutral skeleton emission, one ``<Class>.skel`` file per class.

The format is described in ``docs/skel-format.md``. Nothing model-wide (such
as the model name) is written, so a class's file depends only on the class and
the relationships and patterns that touch it.
"""

from __future__ import annotations

from .model import (
    AttributeDecl,
    ClassDecl,
    MethodDecl,
    Model,
    extension_parents,
    extension_timing,
    sorted_tags,
    timing_of,
)

FileSet = dict[str, str]

INDENT = "  "


def _params(m: MethodDecl) -> str:
    return ", ".join(f"{p.name}: {p.type_name}" for p in m.params)


def _sig(m: MethodDecl) -> str:
    ret = f": {m.return_type}" if m.return_type else ""
    return f"{m.name}({_params(m)}){ret}"


def _attribute(a: AttributeDecl) -> list[str]:
    lines = [f"{INDENT}// {a.doc}"] if a.doc else []
    lines.append(f"{INDENT}{a.visibility} {a.name}: {a.type_name};")
    return lines


class _ClassWriter:
    def __init__(self, model: Model, cls: ClassDecl, parents: set[str]):
        self.model = model
        self.cls = cls
        self.parents = parents
        self.out: list[str] = []

    def line(self, text: str = "", depth: int = 0) -> None:
        self.out.append(INDENT * depth + text if text else "")

    def render(self) -> str:
        cls = self.cls
        if cls.tags:
            self.line(f"// @TAGS({', '.join(sorted_tags(cls.tags))})")
        if "extensible" in cls.tags:
            self.line(f"// @EXTENSIBLE({timing_of(cls.tags) or 'unbound'})")
        for rel in self.model.relationships:
            if rel.is_inheritance and cls.name in rel.sources and rel.tags:
                self.line(f"// @{rel.kind.upper()}({rel.target}; {', '.join(sorted_tags(rel.tags))})")
        for c in cls.constraints:
            suffix = ", by-construction" if c.by_construction else ""
            self.line(f"// @RESTRICTION({c.key()}{suffix})")
        header = "interface" if cls.is_interface else ("abstract class" if cls.is_abstract else "class")
        supers = f" : {', '.join(cls.supertypes)}" if cls.supertypes else ""
        self.line(f"{header} {cls.name}{supers} {{")
        for a in cls.attributes:
            self.out.extend(_attribute(a))
        self.fields()
        for m in cls.methods:
            self.method(m)
        self.delegates()
        self.line("}")
        return "\n".join(self.out) + "\n"

    def outgoing(self):
        return [
            r for r in self.model.relationships if not r.is_inheritance and self.cls.name in r.sources
        ]

    def field_name(self, rel) -> str:
        """The role, unless several aggregations share it; then the target's name."""
        shared = sum(1 for r in self.outgoing() if r.role == rel.role) > 1
        if rel.role and not shared:
            return rel.role
        return rel.target[0].lower() + rel.target[1:]

    def fields(self) -> None:
        for rel in self.outgoing():
            name = self.field_name(rel)
            mult = f" [{rel.multiplicity}]" if rel.multiplicity else ""
            self.line(f"private {name}: {rel.target}{mult};  // {rel.kind}", 1)

    def method(self, m: MethodDecl) -> None:
        cls = self.cls
        if m.is_abstract:
            if cls.name in self.parents:
                timing = extension_timing(self.model, cls)
                self.line(f"// @HOT-SPOT(extensible-interface, {timing})", 1)
            else:
                self.line("// @HOT-SPOT(abstract)", 1)
        if "variable" in m.tags:
            self.line(f"// @VARIABLE({timing_of(m.tags) or 'unbound'})", 1)
        for p in self.model.patterns_of(cls.name, m.name):
            self.line(f"// @PATTERN({p.name}: {p.describe()})", 1)
        head = f"{m.visibility} {'abstract ' if m.is_abstract and not cls.is_interface else ''}{_sig(m)}"
        if m.is_abstract:
            self.line(head + ";", 1)
            return
        hooks = [
            r
            for r in self.outgoing()
            if r.kind == "aggregation" and r.role == "hooks" and r.target == m.invokes_hooks
        ]
        if not hooks:
            self.line(head + " { }", 1)
            return
        self.line(head + " {", 1)
        for r in hooks:
            hook = self.model.get(r.target)
            for hm in hook.abstract_methods() if hook else ():
                args = ", ".join(p.name for p in hm.params)
                self.line(f"// for each h in {self.field_name(r)}: h.{hm.name}({args})", 2)
        self.line("}", 1)

    def delegates(self) -> None:
        """Re-materialize methods a strategy or MOP rewrite moved out of this class."""
        for rel in self.outgoing():
            if rel.kind != "aggregation" or rel.role not in ("strategy", "mop"):
                continue
            target = self.model.get(rel.target)
            for sm in target.methods if target else ():
                if self.cls.method(sm.name):
                    continue
                args = ", ".join(p.name for p in sm.params)
                self.line(f"{sm.visibility} {_sig(sm)} {{", 1)
                ret = "return " if sm.return_type else ""
                self.line(f"// delegate: {ret}{self.field_name(rel)}.{sm.name}({args})", 2)
                self.line("}", 1)


def generate(model: Model) -> FileSet:
    """Skeleton text for every class, keyed by ``<Class>.skel``, sorted by name."""
    parents = set(extension_parents(model))
    return {
        f"{cls.name}.skel": _ClassWriter(model, cls, parents).render()
        for cls in sorted(model.classes, key=lambda c: c.name)
    }
