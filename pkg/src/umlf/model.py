"""In-memory model graph, tag registry, variation-point classification and diffing.

Models are immutable value objects: every collection is a tuple or frozenset,
so two models built from the same content compare (and hash) equal no matter
how they were constructed.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property
from typing import Iterable, Iterator

VISIBILITIES = ("public", "protected", "private")
CLASS_KINDS = ("class", "interface")
RELATIONSHIP_KINDS = ("generalization", "realization", "aggregation", "association")
INHERITANCE_KINDS = ("generalization", "realization")

VARIABLE_METHOD = "variable-method"
EXTENSIBLE_CLASS = "extensible-class"
EXTENSIBLE_INTERFACE = "extensible-interface"

TIMING_TAGS = ("static", "dynamic")

# Element kinds a tag may be attached to.
CLASS = "class"
METHOD = "method"
CONSTRAINT = "constraint"
EVENT = "event"
_LOCI = frozenset({CLASS, METHOD, "generalization", "realization"})


@dataclass(frozen=True)
class TagDef:
    name: str
    applies_to: frozenset[str]
    meaning: str


def _tag(name: str, kinds: Iterable[str], meaning: str) -> tuple[str, TagDef]:
    return name, TagDef(name, frozenset(kinds), meaning)


#: Registration order is also the canonical printing order.
TAGS: dict[str, TagDef] = dict(
    [
        _tag("variable", [METHOD], "implementation must be supplied per instance"),
        _tag("extensible", [CLASS], "interface may gain methods per instance"),
        _tag("incomplete", INHERITANCE_KINDS, "new subclasses may be added here"),
        _tag("appl-class", [CLASS], "class exists only in framework instances"),
        _tag("static", _LOCI, "variation point is filled at compile time"),
        _tag("dynamic", _LOCI, "variation point may be filled at runtime"),
        _tag("for-all-new-methods", [CONSTRAINT], "clause holds for every added method"),
        _tag("optional", [EVENT], "event need not occur"),
        _tag("separation-template", [CLASS], "template role of the Separation meta-pattern"),
        _tag("separation-hook", [CLASS], "hook role of the Separation meta-pattern"),
        _tag("c-hook", [CLASS], "concrete hook supplied by an instance"),
    ]
)
TAG_ORDER = tuple(TAGS)
ROLE_TAGS = frozenset({"separation-template", "separation-hook", "c-hook"})


def sorted_tags(tags: Iterable[str]) -> list[str]:
    """Tags in registry order; unregistered names sort last, alphabetically."""
    rank = {name: i for i, name in enumerate(TAG_ORDER)}
    return sorted(tags, key=lambda t: (rank.get(t, len(rank)), t))


def timing_of(tags: frozenset[str]) -> str | None:
    """The single timing tag in ``tags``, or None when absent or ambiguous."""
    found = [t for t in TIMING_TAGS if t in tags]
    return found[0] if len(found) == 1 else None


@dataclass(frozen=True)
class Param:
    name: str
    type_name: str


@dataclass(frozen=True)
class AttributeDecl:
    name: str
    type_name: str
    visibility: str = "private"
    doc: str | None = None


@dataclass(frozen=True)
class MethodDecl:
    name: str
    params: tuple[Param, ...] = ()
    return_type: str | None = None
    visibility: str = "public"
    is_abstract: bool = False
    tags: frozenset[str] = frozenset()
    # Name of a hook interface whose hooks run before this method's body.
    invokes_hooks: str | None = None

    def signature(self) -> str:
        params = ", ".join(f"{p.name}: {p.type_name}" for p in self.params)
        ret = f": {self.return_type}" if self.return_type else ""
        return f"{self.name}({params}){ret}"

    def same_signature(self, other: MethodDecl) -> bool:
        return (
            [p.type_name for p in self.params] == [p.type_name for p in other.params]
            and self.name == other.name
        )


@dataclass(frozen=True)
class RestrictionClause:
    """An instantiation restriction attached to a class.

    ``form`` is ``preserves`` (``argument`` = attribute name), ``pure``, or
    ``opaque`` (``argument`` = carried text). ``method`` narrows the clause to
    one method; a ``for-all-new-methods`` tag widens it to every added method.
    ``context`` names the class whose attribute a migrated clause refers to.
    """

    form: str
    argument: str | None = None
    method: str | None = None
    context: str | None = None
    tags: frozenset[str] = frozenset()
    by_construction: bool = False

    @property
    def scope(self) -> str:
        if "for-all-new-methods" in self.tags:
            return "for-all-new-methods"
        return "method" if self.method else "class"

    def key(self) -> str:
        """Stable identity used in element paths."""
        scope = self.scope if self.scope != "method" else f"on {self.method}"
        return f"{scope} {self.describe()}"

    def describe(self) -> str:
        if self.form == "preserves":
            target = f"{self.context}.{self.argument}" if self.context else self.argument
            return f"preserves {target}"
        if self.form == "opaque":
            return f'text "{self.argument}"'
        return "pure"


@dataclass(frozen=True)
class ClassDecl:
    name: str
    kind: str = "class"
    is_abstract: bool = False
    supertypes: tuple[str, ...] = ()
    attributes: tuple[AttributeDecl, ...] = ()
    methods: tuple[MethodDecl, ...] = ()
    tags: frozenset[str] = frozenset()
    constraints: tuple[RestrictionClause, ...] = ()

    @property
    def is_interface(self) -> bool:
        return self.kind == "interface"

    def method(self, name: str) -> MethodDecl | None:
        for m in self.methods:
            if m.name == name:
                return m
        return None

    def attribute(self, name: str) -> AttributeDecl | None:
        for a in self.attributes:
            if a.name == name:
                return a
        return None

    def member_names(self) -> set[str]:
        return {a.name for a in self.attributes} | {m.name for m in self.methods}

    def abstract_methods(self) -> tuple[MethodDecl, ...]:
        return tuple(m for m in self.methods if m.is_abstract or self.is_interface)


@dataclass(frozen=True)
class Relationship:
    kind: str
    sources: tuple[str, ...]
    target: str
    role: str | None = None
    multiplicity: str | None = None
    tags: frozenset[str] = frozenset()

    @property
    def source(self) -> str:
        return self.sources[0]

    @property
    def is_inheritance(self) -> bool:
        return self.kind in INHERITANCE_KINDS

    def describe(self) -> str:
        return f"{self.kind} {', '.join(self.sources)} -> {self.target}"


@dataclass(frozen=True)
class Event:
    name: str
    tags: frozenset[str] = frozenset()

    @property
    def optional(self) -> bool:
        return "optional" in self.tags


@dataclass(frozen=True)
class SequencePattern:
    name: str
    owner_class: str
    owner_method: str
    events: tuple[Event, ...]

    @property
    def owner(self) -> str:
        return f"{self.owner_class}.{self.owner_method}"

    def describe(self) -> str:
        return ", ".join(e.name + ("?" if e.optional else "") for e in self.events)


@dataclass(frozen=True)
class InstanceInfo:
    """Marks a model as an application created from ``framework``."""

    framework: str
    configuration: tuple[tuple[str, tuple[tuple[str, bool], ...]], ...] = ()


@dataclass(frozen=True)
class Model:
    name: str
    classes: tuple[ClassDecl, ...] = ()
    relationships: tuple[Relationship, ...] = ()
    patterns: tuple[SequencePattern, ...] = ()
    instance: InstanceInfo | None = None

    @cached_property
    def _by_name(self) -> dict[str, ClassDecl]:
        return {c.name: c for c in self.classes}

    def get(self, name: str) -> ClassDecl | None:
        return self._by_name.get(name)

    def __getitem__(self, name: str) -> ClassDecl:
        return self._by_name[name]

    def __contains__(self, name: object) -> bool:
        return name in self._by_name

    def with_class(self, cls: ClassDecl) -> Model:
        """Replace the class of the same name, keeping its position."""
        return replace(self, classes=tuple(cls if c.name == cls.name else c for c in self.classes))

    def patterns_of(self, class_name: str, method: str | None = None) -> list[SequencePattern]:
        return [
            p
            for p in self.patterns
            if p.owner_class == class_name and (method is None or p.owner_method == method)
        ]

    def incomplete_relationships(self) -> list[tuple[int, Relationship]]:
        return [
            (i, r)
            for i, r in enumerate(self.relationships)
            if r.is_inheritance and "incomplete" in r.tags
        ]

    def path(self, relative: str) -> str:
        return f"{self.name}.{relative}" if relative else self.name


@dataclass(frozen=True)
class Diagnostic:
    code: str
    severity: str
    path: str
    message: str

    @property
    def is_error(self) -> bool:
        return self.severity == "error"

    def render(self) -> str:
        return f"{self.severity} {self.code} {self.path}: {self.message}"

    def __str__(self) -> str:
        return self.render()


def has_errors(diagnostics: Iterable[Diagnostic]) -> bool:
    return any(d.is_error for d in diagnostics)


# --------------------------------------------------------------------------
# Variation points


class ClassificationError(ValueError):
    """A variation-point locus has no usable timing tag."""


@dataclass(frozen=True)
class VariationPoint:
    kind: str
    class_name: str
    timing: str
    method: str | None = None
    rel_index: int | None = None

    @property
    def locus(self) -> str:
        """Relative element path of the tagged element."""
        if self.kind == VARIABLE_METHOD:
            return f"{self.class_name}.{self.method}"
        if self.kind == EXTENSIBLE_INTERFACE:
            return f"rel[{self.rel_index}]"
        return self.class_name

    def describe(self) -> str:
        where = self.locus
        if self.kind == EXTENSIBLE_INTERFACE:
            where = f"{where} (-> {self.class_name})"
        return f"{self.kind} {where} {self.timing}"


def _timing_or_raise(tags: frozenset[str], where: str) -> str:
    timing = timing_of(tags)
    if timing is None:
        if "static" in tags:
            raise ClassificationError(f"{where} carries both static and dynamic")
        raise ClassificationError(f"{where} carries neither static nor dynamic")
    return timing


def classify_variation_points(model: Model) -> list[VariationPoint]:
    """Variable methods, then extensible classes, then extensible interfaces.

    Within each group the order is declaration order. Extensible interfaces are
    reported per ``{incomplete}`` relationship, with ``class_name`` set to the
    relationship's parent.
    """
    methods: list[VariationPoint] = []
    classes: list[VariationPoint] = []
    for cls in model.classes:
        if "extensible" in cls.tags:
            timing = _timing_or_raise(cls.tags, cls.name)
            classes.append(VariationPoint(EXTENSIBLE_CLASS, cls.name, timing))
        for m in cls.methods:
            if "variable" in m.tags:
                timing = _timing_or_raise(m.tags, f"{cls.name}.{m.name}")
                methods.append(VariationPoint(VARIABLE_METHOD, cls.name, timing, method=m.name))
    interfaces = [
        VariationPoint(
            EXTENSIBLE_INTERFACE,
            rel.target,
            _timing_or_raise(rel.tags, f"rel[{i}]"),
            rel_index=i,
        )
        for i, rel in model.incomplete_relationships()
    ]
    return methods + classes + interfaces


def is_declared_extension_interface(cls: ClassDecl) -> bool:
    """An abstract class or interface that carries a timing tag itself.

    Rewrites produce these (strategy hook classes, hook interfaces, unified
    template classes); application classes are later attached beneath them.
    """
    return (
        (cls.is_abstract or cls.is_interface)
        and "extensible" not in cls.tags
        and any(t in cls.tags for t in TIMING_TAGS)
    )


def extension_parents(model: Model) -> list[str]:
    """Names of every class that instances extend, in declaration order."""
    incomplete_targets = {r.target for _, r in model.incomplete_relationships()}
    return [
        c.name
        for c in model.classes
        if c.name in incomplete_targets or is_declared_extension_interface(c)
    ]


def extension_timing(model: Model, cls: ClassDecl) -> str:
    """Binding time of an extension parent: its own tag, else its incomplete relationships'."""
    own = timing_of(cls.tags) if is_declared_extension_interface(cls) else None
    if own:
        return own
    timings = {timing_of(r.tags) for _, r in model.incomplete_relationships() if r.target == cls.name}
    return "dynamic" if "dynamic" in timings else "static"


def mop_classes(model: Model) -> list[str]:
    targets = {r.target for r in model.relationships if r.kind == "aggregation" and r.role == "mop"}
    return [c.name for c in model.classes if c.name in targets]


# --------------------------------------------------------------------------
# Structural diff


def element_table(model: Model) -> dict[str, object]:
    """Map every element path (without the model name) to its comparable content."""
    table: dict[str, object] = {}
    if model.instance is not None:
        table["instance"] = model.instance
    for cls in model.classes:
        table[cls.name] = (cls.kind, cls.is_abstract, cls.supertypes, cls.tags)
        for a in cls.attributes:
            table[f"{cls.name}.{a.name}"] = a
        for m in cls.methods:
            table[f"{cls.name}.{m.name}"] = m
        for c in cls.constraints:
            table[f"{cls.name}.constraint[{c.key()}]"] = c
    for i, rel in enumerate(model.relationships):
        table[f"rel[{i}]"] = rel
    for p in model.patterns:
        table[f"sequence.{p.name}"] = p
    return table


def element_paths(model: Model) -> set[str]:
    return set(element_table(model))


@dataclass(frozen=True)
class DiffEntry:
    change: str  # added | removed | changed
    path: str

    def __str__(self) -> str:
        return f"{self.change} {self.path}"


@dataclass(frozen=True)
class DiffReport:
    entries: tuple[DiffEntry, ...] = ()

    def __bool__(self) -> bool:
        return bool(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[DiffEntry]:
        return iter(self.entries)

    def paths(self, change: str) -> list[str]:
        return [e.path for e in self.entries if e.change == change]

    @property
    def added(self) -> list[str]:
        return self.paths("added")

    @property
    def removed(self) -> list[str]:
        return self.paths("removed")

    @property
    def changed(self) -> list[str]:
        return self.paths("changed")


def structural_diff(a: Model, b: Model, scope: Iterable[str] | None = None) -> DiffReport:
    """Compare two models element by element.

    Paths are relative to the model (``Class``, ``Class.member``,
    ``Class.constraint[...]``, ``rel[i]``, ``sequence.Name``, ``instance``),
    so models with different names can still be compared. With ``scope``
    only the listed paths are considered.
    """
    ta, tb = element_table(a), element_table(b)
    keys = set(ta) | set(tb)
    if scope is not None:
        keys &= set(scope)
    entries = []
    for path in sorted(keys):
        if path not in tb:
            entries.append(DiffEntry("removed", path))
        elif path not in ta:
            entries.append(DiffEntry("added", path))
        elif ta[path] != tb[path]:
            entries.append(DiffEntry("changed", path))
    return DiffReport(tuple(entries))


def class_of_path(path: str) -> str | None:
    """The class a relative path belongs to, if any."""
    if path.startswith(("rel[", "sequence.")) or path == "instance":
        return None
    return path.split(".", 1)[0]

