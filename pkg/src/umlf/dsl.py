"""Reader and canonical printer for ``.umlf`` model files.

The grammar is documented in ``docs/grammar.md``. ``parse`` either returns a
complete :class:`~umlf.model.Model` or raises :class:`SourceError` carrying
every problem found; it never hands back a partial model.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ._lexer import EOF, IDENT, ParseError, SourceError, Syntax, Token, TokenStream, quote, unquote
from .model import (
    TAGS,
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
    sorted_tags,
)

__all__ = ["ParseError", "SourceError", "format_model", "parse", "parse_file"]

_ELEMENT_KEYWORDS = {
    "abstract",
    "class",
    "interface",
    "generalization",
    "realization",
    "aggregation",
    "association",
    "sequence",
    "instantiates",
    "configure",
}
_MEMBER_KEYWORDS = {"tags", "attr", "method", "constraint"}
_VISIBILITY = {"public", "protected", "private"}


@dataclass
class _Pending:
    """A name that must resolve once every class has been read."""

    token: Token
    expected: str


@dataclass
class _ClassDraft:
    decl: ClassDecl
    token: Token
    clause_tokens: list[tuple[RestrictionClause, Token, Token | None]] = field(default_factory=list)


class _ModelParser:
    def __init__(self, text: str):
        self.ts = TokenStream(text)
        self.classes: list[_ClassDraft] = []
        self.relationships: list[tuple[Relationship, list[Token], Token]] = []
        self.patterns: list[tuple[SequencePattern, Token, Token, Token]] = []
        self.framework: str | None = None
        self.configuration: list[tuple[str, tuple[tuple[str, bool], ...]]] = []
        self.configure_tokens: list[Token] = []
        self.class_refs: list[_Pending] = []

    @property
    def errors(self) -> list[ParseError]:
        return self.ts.errors

    # -- grammar -----------------------------------------------------------

    def model(self) -> str | None:
        ts = self.ts
        try:
            ts.expect("model")
            name = ts.name("model name").text
            ts.expect("{")
        except Syntax:
            return None
        while ts.tok.kind != EOF and not ts.at("}"):
            start = ts.i
            level = ts.level
            try:
                self.element()
            except Syntax:
                if ts.i == start:
                    ts.advance()
                ts.sync(level, _ELEMENT_KEYWORDS)
        try:
            ts.expect("}")
            if ts.tok.kind != EOF:
                raise ts.fail("end of input")
        except Syntax:
            pass
        return name

    def element(self) -> None:
        ts = self.ts
        if ts.at("abstract", "class", "interface"):
            self.class_decl()
        elif ts.at("generalization", "realization"):
            self.inheritance()
        elif ts.at("aggregation", "association"):
            self.association()
        elif ts.at("sequence"):
            self.sequence()
        elif ts.at("instantiates"):
            kw = ts.advance()
            tok = ts.name("framework name")
            if self.framework is not None:
                ts.report(kw, "at most one 'instantiates'")
            self.framework = tok.text
        elif ts.at("configure"):
            self.configure()
        else:
            raise ts.fail("class, relationship or sequence declaration")

    def tag_list(self, closer: str = "}") -> frozenset[str]:
        tags = set()
        for tok in self.ts.ident_list("tag name", closer):
            if tok.text not in TAGS:
                self.ts.report(tok, "registered tag name", tok.text)
            else:
                tags.add(tok.text)
        return frozenset(tags)

    def tags_block(self) -> frozenset[str]:
        ts = self.ts
        ts.expect("tags")
        ts.expect("{")
        tags = self.tag_list()
        ts.expect("}")
        return tags

    def class_decl(self) -> None:
        ts = self.ts
        is_abstract = ts.accept("abstract")
        if not ts.at("class", "interface"):
            raise ts.fail("'class' or 'interface'")
        kind = ts.advance().text
        name_tok = ts.name("class name")
        supertypes: list[str] = []
        if ts.accept(":"):
            for tok in [ts.name("supertype")] + self._more_names("supertype"):
                supertypes.append(tok.text)
                self.class_refs.append(_Pending(tok, "declared class"))
        ts.expect("{")
        draft = _ClassDraft(ClassDecl(name_tok.text, kind, is_abstract, tuple(supertypes)), name_tok)
        attrs: list[AttributeDecl] = []
        methods: list[MethodDecl] = []
        tags: set[str] = set()
        member_tokens: dict[str, Token] = {}
        while ts.tok.kind != EOF and not ts.at("}"):
            start = ts.i
            level = ts.level
            try:
                if ts.at("tags"):
                    tags |= self.tags_block()
                elif ts.at("attr"):
                    tok, attr = self.attribute()
                    self._unique_member(member_tokens, tok)
                    attrs.append(attr)
                elif ts.at("method"):
                    tok, method = self.method(kind == "interface")
                    self._unique_member(member_tokens, tok)
                    methods.append(method)
                elif ts.at("constraint"):
                    draft.clause_tokens.append(self.constraint())
                else:
                    raise ts.fail("'tags', 'attr', 'method' or 'constraint'")
            except Syntax:
                if ts.i == start:
                    ts.advance()
                ts.sync(level, _MEMBER_KEYWORDS)
        ts.expect("}")
        if kind == "interface" and attrs:
            ts.report(name_tok, "interface without attributes", f"attribute {attrs[0].name!r}")
        draft.decl = ClassDecl(
            name_tok.text,
            kind,
            is_abstract,
            tuple(supertypes),
            tuple(attrs),
            tuple(methods),
            frozenset(tags),
            tuple(c for c, _, _ in draft.clause_tokens),
        )
        self.classes.append(draft)

    def _more_names(self, what: str) -> list[Token]:
        out = []
        while self.ts.accept(","):
            out.append(self.ts.name(what))
        return out

    def _unique_member(self, seen: dict[str, Token], tok: Token) -> None:
        if tok.text in seen:
            self.ts.report(tok, "unique member name", tok.text)
        seen[tok.text] = tok

    def attribute(self) -> tuple[Token, AttributeDecl]:
        ts = self.ts
        ts.expect("attr")
        name = ts.name("attribute name")
        ts.expect(":")
        type_name = ts.name("type name").text
        visibility, doc = "private", None
        if ts.accept("{"):
            while not ts.at("}"):
                if ts.tok.text in _VISIBILITY and ts.tok.kind == IDENT:
                    visibility = ts.advance().text
                elif ts.accept("doc"):
                    doc = unquote(ts.string().text)
                else:
                    raise ts.fail("visibility or 'doc'")
            ts.expect("}")
        return name, AttributeDecl(name.text, type_name, visibility, doc)

    def method(self, in_interface: bool) -> tuple[Token, MethodDecl]:
        ts = self.ts
        ts.expect("method")
        name = ts.name("method name")
        params = self.params()
        return_type = None
        if ts.accept(":"):
            return_type = ts.name("return type").text
        visibility, is_abstract, tags, hooks = "public", in_interface, frozenset(), None
        if ts.accept("{"):
            while not ts.at("}"):
                if ts.tok.text in _VISIBILITY and ts.tok.kind == IDENT:
                    visibility = ts.advance().text
                elif ts.accept("abstract"):
                    is_abstract = True
                elif ts.at("tags"):
                    tags = tags | self.tags_block()
                elif ts.accept("invokes-hooks"):
                    tok = ts.name("hook interface name")
                    self.class_refs.append(_Pending(tok, "declared class"))
                    hooks = tok.text
                else:
                    raise ts.fail("visibility, 'abstract', 'tags' or 'invokes-hooks'")
            ts.expect("}")
        return name, MethodDecl(name.text, params, return_type, visibility, is_abstract, tags, hooks)

    def params(self) -> tuple[Param, ...]:
        ts = self.ts
        ts.expect("(")
        params: list[Param] = []
        seen: set[str] = set()
        if not ts.at(")"):
            while True:
                pname = ts.name("parameter name")
                ts.expect(":")
                ptype = ts.name("parameter type").text
                if pname.text in seen:
                    ts.report(pname, "unique parameter name", pname.text)
                seen.add(pname.text)
                params.append(Param(pname.text, ptype))
                if not ts.accept(","):
                    break
        ts.expect(")")
        return tuple(params)

    def constraint(self) -> tuple[RestrictionClause, Token, Token | None]:
        ts = self.ts
        kw = ts.expect("constraint")
        tags: set[str] = set()
        method_tok = None
        if ts.accept("forAllNewMethods"):
            tags.add("for-all-new-methods")
        elif ts.accept("on"):
            method_tok = ts.name("method name")
        context_tok = None
        if ts.accept("preserves"):
            first = ts.name("attribute name")
            if ts.accept("."):
                context_tok, attr = first, ts.name("attribute name")
                self.class_refs.append(_Pending(context_tok, "declared class"))
            else:
                attr = first
            form, argument = "preserves", attr.text
        elif ts.accept("pure"):
            form, argument = "pure", None
        elif ts.accept("text"):
            form, argument = "opaque", unquote(ts.string().text)
        else:
            raise ts.fail("'preserves', 'pure' or 'text'")
        by_construction = ts.accept("by-construction")
        if ts.accept("{"):
            tags |= self.tags_block()
            ts.expect("}")
        clause = RestrictionClause(
            form,
            argument,
            method_tok.text if method_tok else None,
            context_tok.text if context_tok else None,
            frozenset(tags),
            by_construction,
        )
        if method_tok is not None and "for-all-new-methods" in tags:
            ts.report(kw, "either 'forAllNewMethods' or 'on <method>'", "both")
        return clause, kw, method_tok

    def inheritance(self) -> None:
        ts = self.ts
        kind_tok = ts.advance()
        sources = [ts.name("class name")] + self._more_names("class name")
        ts.expect("->")
        target = ts.name("class name")
        tags: frozenset[str] = frozenset()
        if ts.accept("{"):
            if ts.at("tags"):
                tags = self.tags_block()
            ts.expect("}")
        rel = Relationship(kind_tok.text, tuple(t.text for t in sources), target.text, tags=tags)
        self.relationships.append((rel, sources, target))

    def association(self) -> None:
        ts = self.ts
        kind_tok = ts.advance()
        source = ts.name("class name")
        ts.expect("->")
        target = ts.name("class name")
        role = multiplicity = None
        if ts.accept("role"):
            role = ts.name("role name").text
        if ts.accept("mult"):
            multiplicity = unquote(ts.string().text)
        tags: frozenset[str] = frozenset()
        if ts.accept("{"):
            if ts.at("tags"):
                tags = self.tags_block()
            ts.expect("}")
        rel = Relationship(kind_tok.text, (source.text,), target.text, role, multiplicity, tags)
        self.relationships.append((rel, [source], target))

    def sequence(self) -> None:
        ts = self.ts
        ts.expect("sequence")
        name = ts.name("sequence name")
        ts.expect("for")
        owner = ts.name("class name")
        ts.expect(".")
        method = ts.name("method name")
        ts.expect("{")
        events: list[Event] = []
        seen: set[str] = set()
        while ts.at("event"):
            ts.advance()
            ev = ts.name("event name")
            tags: frozenset[str] = frozenset()
            if ts.accept("{"):
                tags = self.tag_list()
                ts.expect("}")
            if ev.text in seen:
                ts.report(ev, "unique event name", ev.text)
            seen.add(ev.text)
            events.append(Event(ev.text, tags))
        ts.expect("}")
        if events and all(e.optional for e in events):
            ts.report(name, "at least one mandatory event", "only optional events")
        elif not events:
            ts.report(name, "at least one event", "empty sequence")
        self.patterns.append((SequencePattern(name.text, owner.text, method.text, tuple(events)), name, owner, method))

    def configure(self) -> None:
        ts = self.ts
        ts.expect("configure")
        target = ts.name("class name")
        ts.expect("{")
        values: list[tuple[str, bool]] = []
        while not ts.at("}"):
            key = ts.name("parameter name")
            ts.expect("=")
            if not ts.at("true", "false"):
                raise ts.fail("'true' or 'false'")
            values.append((key.text, ts.advance().text == "true"))
        ts.expect("}")
        self.configuration.append((target.text, tuple(values)))
        self.configure_tokens.append(target)

    # -- semantic checks ---------------------------------------------------

    def resolve(self) -> None:
        ts = self.ts
        by_name: dict[str, ClassDecl] = {}
        for draft in self.classes:
            if draft.decl.name in by_name:
                ts.report(draft.token, "unique class name", draft.decl.name)
            else:
                by_name[draft.decl.name] = draft.decl
        for ref in self.class_refs:
            if ref.token.text not in by_name:
                ts.report(ref.token, ref.expected, ref.token.text)
        for draft in self.classes:
            keys: set[str] = set()
            for clause, kw, method_tok in draft.clause_tokens:
                if clause.key() in keys:
                    ts.report(kw, "distinct constraints", clause.key())
                keys.add(clause.key())
                if method_tok is not None and draft.decl.method(method_tok.text) is None:
                    ts.report(method_tok, f"method of {draft.decl.name}", method_tok.text)
        for rel, sources, target in self.relationships:
            for tok in [*sources, target]:
                if tok.text not in by_name:
                    ts.report(tok, "declared class", tok.text)
            if rel.is_inheritance and target.text in by_name:
                for tok in sources:
                    cls = by_name.get(tok.text)
                    if cls is not None and target.text not in cls.supertypes:
                        ts.report(tok, f"class declaring supertype {target.text}", tok.text)
        names: set[str] = set()
        for pattern, name, owner, method in self.patterns:
            if pattern.name in names:
                ts.report(name, "unique sequence name", pattern.name)
            names.add(pattern.name)
            cls = by_name.get(owner.text)
            if cls is None:
                ts.report(owner, "declared class", owner.text)
            elif cls.method(method.text) is None:
                ts.report(method, f"method of {owner.text}", method.text)
        for tok in self.configure_tokens:
            if tok.text not in by_name:
                ts.report(tok, "declared class", tok.text)


def parse(text: str, source: str = "<input>") -> Model:
    """Read a model; raise :class:`SourceError` listing every problem found."""
    p = _ModelParser(text)
    name = p.model()
    if name is not None:
        p.resolve()
    if p.errors:
        raise SourceError(sorted(p.errors, key=lambda e: (e.line, e.column)), source)
    instance = None
    if p.framework is not None:
        instance = InstanceInfo(p.framework, tuple(p.configuration))
    elif p.configuration:
        instance = InstanceInfo("", tuple(p.configuration))
    return Model(
        name,
        tuple(d.decl for d in p.classes),
        tuple(r for r, _, _ in p.relationships),
        tuple(t[0] for t in p.patterns),
        instance,
    )


def parse_file(path) -> Model:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), str(path))


# --------------------------------------------------------------------------
# Printer


def _tags(tags: frozenset[str]) -> str:
    return "tags { " + ", ".join(sorted_tags(tags)) + " }"


def _method_line(m: MethodDecl, in_interface: bool) -> str:
    props = []
    if m.visibility != "public":
        props.append(m.visibility)
    if m.is_abstract and not in_interface:
        props.append("abstract")
    if m.invokes_hooks:
        props.append(f"invokes-hooks {m.invokes_hooks}")
    if m.tags:
        props.append(_tags(m.tags))
    params = ", ".join(f"{p.name}: {p.type_name}" for p in m.params)
    line = f"method {m.name}({params})"
    if m.return_type:
        line += f": {m.return_type}"
    if props:
        line += " { " + " ".join(props) + " }"
    return line


def _attr_line(a: AttributeDecl) -> str:
    props = []
    if a.visibility != "private":
        props.append(a.visibility)
    if a.doc is not None:
        props.append(f"doc {quote(a.doc)}")
    line = f"attr {a.name}: {a.type_name}"
    if props:
        line += " { " + " ".join(props) + " }"
    return line


def _constraint_line(c: RestrictionClause) -> str:
    parts = ["constraint"]
    if "for-all-new-methods" in c.tags:
        parts.append("forAllNewMethods")
    elif c.method:
        parts.append(f"on {c.method}")
    if c.form == "preserves":
        parts.append(f"preserves {c.context + '.' if c.context else ''}{c.argument}")
    elif c.form == "pure":
        parts.append("pure")
    else:
        parts.append(f"text {quote(c.argument or '')}")
    if c.by_construction:
        parts.append("by-construction")
    extra = c.tags - {"for-all-new-methods"}
    if extra:
        parts.append("{ " + _tags(extra) + " }")
    return " ".join(parts)


def _relationship_line(r: Relationship) -> str:
    line = f"{r.kind} {', '.join(r.sources)} -> {r.target}"
    if r.role:
        line += f" role {r.role}"
    if r.multiplicity is not None:
        line += f" mult {quote(r.multiplicity)}"
    if r.tags:
        line += " { " + _tags(r.tags) + " }"
    return line


def format_model(model: Model) -> str:
    """Canonical text: two-space indent, one member per line, tags in registry order."""
    out = [f"model {model.name} {{"]
    if model.instance is not None:
        if model.instance.framework:
            out.append(f"  instantiates {model.instance.framework}")
        for target, values in model.instance.configuration:
            body = " ".join(f"{k} = {'true' if v else 'false'}" for k, v in values)
            out.append(f"  configure {target} {{ {body} }}" if body else f"  configure {target} {{ }}")
    for cls in model.classes:
        head = f"{'abstract ' if cls.is_abstract else ''}{cls.kind} {cls.name}"
        if cls.supertypes:
            head += " : " + ", ".join(cls.supertypes)
        out.append(f"  {head} {{")
        if cls.tags:
            out.append(f"    {_tags(cls.tags)}")
        out.extend(f"    {_attr_line(a)}" for a in cls.attributes)
        out.extend(f"    {_method_line(m, cls.is_interface)}" for m in cls.methods)
        out.extend(f"    {_constraint_line(c)}" for c in cls.constraints)
        out.append("  }")
    out.extend(f"  {_relationship_line(r)}" for r in model.relationships)
    for p in model.patterns:
        out.append(f"  sequence {p.name} for {p.owner_class}.{p.owner_method} {{")
        for e in p.events:
            tags = " { " + ", ".join(sorted_tags(e.tags)) + " }" if e.tags else ""
            out.append(f"    event {e.name}{tags}")
        out.append("  }")
    out.append("}")
    return "\n".join(out) + "\n"
