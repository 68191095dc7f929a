"""Random well-formed framework models and matching bindings for property tests.

Models are built directly from the dataclasses, never through the parser, so
round-trip tests exercise both directions. Every generated framework is meant
to validate without errors; tests assert that rather than assume it.
"""

from __future__ import annotations

import random

from umlf.model import (
    EXTENSIBLE_CLASS,
    VARIABLE_METHOD,
    AttributeDecl,
    ClassDecl,
    Event,
    InstanceInfo,
    MethodDecl,
    Model,
    Param,
    Relationship,
    RestrictionClause,
    SequencePattern,
    class_of_path,
    classify_variation_points,
    element_paths,
    extension_parents,
)
from umlf.conformance import expand
from umlf.transformer import Binding

CLASS_WORDS = [
    "Course", "Menu", "Page", "Report", "Ledger", "Editor", "Viewer", "Widget", "Session",
    "Catalog", "Account", "Order", "Invoice", "Sensor", "Driver", "Parser", "Window", "Panel",
]
METHOD_WORDS = ["open", "close", "render", "select", "update", "compute", "load", "save", "notify", "draw", "apply"]
ATTR_WORDS = ["fCount", "title", "owner", "fState", "limit", "label", "fCache"]
TYPES = ["String", "Integer", "Boolean", "Course", "Rights", "Item"]
ROLES = ["selector", "items", "parent", "view", "source"]
MULTS = ["1", "0..1", "0..*", "1..*"]
EVENT_WORDS = ["login", "show", "validate", "confirm", "store", "log", "fetch", "close"]
DOCS = ["TRUE if enabled", 'says "hi"', "back\\slash", "plain"]
VIS = ["public", "protected", "private"]


class _Names:
    def __init__(self, rng: random.Random):
        self.rng = rng
        self.used: set[str] = set()

    def fresh(self, pool: list[str], capital: bool = False) -> str:
        while True:
            base = self.rng.choice(pool)
            name = base if self.rng.random() < 0.5 else f"{base}{self.rng.randint(1, 99)}"
            if capital:
                name = name[0].upper() + name[1:]
            if name not in self.used:
                self.used.add(name)
                return name


def _method(rng, name, abstract=False, tags=frozenset()):
    params = tuple(Param(f"p{i}", rng.choice(TYPES)) for i in range(rng.randint(0, 2)))
    ret = rng.choice([None, *TYPES])
    return MethodDecl(name, params, ret, rng.choice(VIS), abstract, frozenset(tags))


def random_model(rng: random.Random, instance: bool = False) -> Model:
    """A framework with a mix of variation points, clauses, patterns and relationships."""
    class_names = _Names(rng)
    method_names = _Names(rng)  # unique model-wide, so rewrites never collide
    classes: list[ClassDecl] = []
    relationships: list[Relationship] = []
    patterns: list[SequencePattern] = []

    for _ in range(rng.randint(1, 5)):
        name = class_names.fresh(CLASS_WORDS, capital=True)
        roll = rng.random()
        if roll < 0.15:
            kind, is_abstract = "interface", False
        else:
            kind, is_abstract = "class", roll < 0.35
        tags: set[str] = set()
        extensible = kind == "class" and rng.random() < 0.35
        declared = not extensible and (is_abstract or kind == "interface") and rng.random() < 0.3
        timing = rng.choice(["static", "dynamic"])
        if extensible:
            tags |= {"extensible", timing}
        elif declared:
            tags.add(timing)
        attrs = ()
        if kind == "class":
            attr_names = _Names(rng)
            attrs = tuple(
                AttributeDecl(
                    attr_names.fresh(ATTR_WORDS),
                    rng.choice(TYPES),
                    rng.choice(VIS),
                    rng.choice([None, *DOCS]),
                )
                for _ in range(rng.randint(0, 2))
            )
        methods = []
        for _ in range(rng.randint(0, 3)):
            mname = method_names.fresh(METHOD_WORDS)
            if kind == "interface":
                methods.append(_method(rng, mname, abstract=True))
            elif is_abstract and rng.random() < 0.4:
                methods.append(_method(rng, mname, abstract=True))
            elif rng.random() < 0.35:
                methods.append(_method(rng, mname, tags={"variable", rng.choice(["static", "dynamic"])}))
            else:
                methods.append(_method(rng, mname))
        if extensible and timing == "dynamic" and not any("variable" not in m.tags for m in methods):
            methods.append(_method(rng, method_names.fresh(METHOD_WORDS)))
        constraints = []
        if (extensible or declared) and attrs and rng.random() < 0.6:
            constraints.append(
                RestrictionClause("preserves", rng.choice(attrs).name, tags=frozenset({"for-all-new-methods"}))
            )
        for m in methods:
            if "variable" in m.tags and rng.random() < 0.4:
                form = rng.choice(["pure", "opaque", "preserves"] if attrs else ["pure", "opaque"])
                arg = {"pure": None, "opaque": "no side effects", "preserves": attrs[0].name if attrs else None}[form]
                constraints.append(RestrictionClause(form, arg, method=m.name))
        if rng.random() < 0.15:
            constraints.append(RestrictionClause("opaque", 'keep "state" valid'))
        classes.append(ClassDecl(name, kind, is_abstract, (), attrs, tuple(methods), frozenset(tags), tuple(constraints)))

    # Incomplete generalizations beneath abstract classes or interfaces.
    parents = [c for c in classes if (c.is_abstract or c.is_interface) and "extensible" not in c.tags]
    for parent in parents:
        if rng.random() < 0.6:
            subs = [class_names.fresh(CLASS_WORDS, capital=True) for _ in range(rng.randint(1, 2))]
            kind = "realization" if parent.is_interface else "generalization"
            rel_tags = frozenset({"incomplete", rng.choice(["static", "dynamic"])}) if rng.random() < 0.7 else frozenset()
            for s in subs:
                classes.append(ClassDecl(s, "class", False, (parent.name,)))
            relationships.append(Relationship(kind, tuple(subs), parent.name, tags=rel_tags))

    for _ in range(rng.randint(0, 3)):
        if len(classes) < 2:
            break
        a, b = rng.sample(classes, 2)
        relationships.append(
            Relationship(
                rng.choice(["association", "aggregation"]),
                (a.name,),
                b.name,
                rng.choice([None, *ROLES]),
                rng.choice([None, *MULTS]),
            )
        )

    model = Model("Fw", tuple(classes), tuple(relationships))
    # Patterns on variation-point methods and extension-parent hooks only, so W002 stays quiet.
    candidates = []
    for vp in classify_variation_points(model):
        if vp.kind == VARIABLE_METHOD:
            candidates.append((vp.class_name, vp.method))
    for pname in extension_parents(model):
        candidates += [(pname, m.name) for m in model[pname].abstract_methods()]
    pattern_names = _Names(rng)
    for owner_class, owner_method in candidates:
        if rng.random() < 0.5:
            continue
        events = rng.sample(EVENT_WORDS, rng.randint(1, 5))
        flags = [rng.random() < 0.4 for _ in events]
        if all(flags):
            flags[rng.randrange(len(flags))] = False
        patterns.append(
            SequencePattern(
                pattern_names.fresh(["Flow", "Protocol", "Pattern"], capital=True),
                owner_class,
                owner_method,
                tuple(Event(e, frozenset({"optional"}) if f else frozenset()) for e, f in zip(events, flags)),
            )
        )
    info = None
    if instance:
        configs = tuple(
            (c.name, tuple((f"k{i}", rng.random() < 0.5) for i in range(rng.randint(0, 2))))
            for c in classes
            if rng.random() < 0.3
        )
        info = InstanceInfo("Base", configs)
    return Model("Fw", tuple(classes), tuple(relationships), tuple(patterns), info)


def random_bindings(rng: random.Random, model: Model) -> list[Binding]:
    """One applicable binding per variable method and extensible class."""
    out = []
    for vp in classify_variation_points(model):
        if vp.kind == VARIABLE_METHOD:
            if vp.timing == "static":
                out.append(Binding(vp, "unification"))
            elif rng.random() < 0.5:
                out.append(Binding(vp, "strategy"))
            else:
                n = rng.randint(1, 3)
                params = tuple((f"opt{i}", rng.choice([None, *DOCS])) for i in range(n))
                out.append(Binding(vp, "mop", params))
        elif vp.kind == EXTENSIBLE_CLASS:
            if vp.timing == "static":
                out.append(Binding(vp, "unification"))
            else:
                cls = model[vp.class_name]
                fixed = [m.name for m in cls.methods if "variable" not in m.tags]
                out.append(Binding(vp, "hook-list", (("before", rng.choice(fixed)),)))
    rng.shuffle(out)  # order must not matter
    return out


def untouched_paths(model: Model, bindings: list[Binding]) -> set[str]:
    """Paths of ``model`` that no binding names: other classes, all relationships, unrelated patterns."""
    touched = {b.locus.class_name for b in bindings}
    moved = {(b.locus.class_name, b.locus.method) for b in bindings if b.locus.method}
    owners = {f"sequence.{p.name}" for p in model.patterns if (p.owner_class, p.owner_method) in moved}
    return {p for p in element_paths(model) if class_of_path(p) not in touched and p not in owners}


EVENT_ALPHABET = ["a", "b", "c", "d", "e", "f", "g"]


def make_pattern(*spec: str) -> SequencePattern:
    """``make_pattern("a", "b?")``: a trailing ``?`` marks an optional event."""
    events = tuple(Event(s.rstrip("?"), frozenset({"optional"}) if s.endswith("?") else frozenset()) for s in spec)
    return SequencePattern("P", "C", "m", events)


def random_conformance_case(rng: random.Random) -> tuple[SequencePattern, tuple[str, ...]]:
    """A pattern of at most 6 events and a trace of at most 8.

    Half the traces start from an admissible one and get up to two random
    edits, so both outcomes are common.
    """
    names = rng.sample(EVENT_ALPHABET[:6], rng.randint(1, 6))
    p = make_pattern(*(n + ("?" if rng.random() < 0.5 else "") for n in names))
    if rng.random() < 0.5:
        trace = list(rng.choice(sorted(expand(p))))
        for _ in range(rng.randint(0, 2)):
            op = rng.randrange(3)
            if op == 0 and trace:
                del trace[rng.randrange(len(trace))]
            elif op == 1:
                trace.insert(rng.randint(0, len(trace)), rng.choice(EVENT_ALPHABET))
            elif trace:
                i, j = rng.randrange(len(trace)), rng.randrange(len(trace))
                trace[i], trace[j] = trace[j], trace[i]
    else:
        trace = [rng.choice(EVENT_ALPHABET) for _ in range(rng.randint(0, 8))]
    return p, tuple(trace[:8])
