"""``umlf`` command line: validate, points, transform, generate, instantiate, check."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import TextIO

from ._lexer import SourceError
from .codegen import generate
from .conformance import EffectSummary
from .dsl import format_model, parse
from .instantiator import (
    CONFIGURATION,
    AppClassSpec,
    InstantiationError,
    InstantiationSpec,
    MethodImpl,
    Obligation,
    format_spec,
    instance_report,
    instantiate,
    list_obligations,
    parse_spec,
    verify_instance,
)
from .model import ClassificationError, Diagnostic, Model, classify_variation_points, has_errors
from .transformer import BindingsSyntaxError, TransformError, parse_bindings, resolve_bindings, transform_all
from .validator import validate

OK, REJECTED, USAGE = 0, 1, 2


class UsageError(Exception):
    """Bad invocation or unreadable/unwritable file; exit code 2."""


def _styled(stream: TextIO) -> bool:
    setting = os.environ.get("UMLF_COLOR")
    if setting == "0":
        return False
    return setting == "1" or (hasattr(stream, "isatty") and stream.isatty())


def _paint(text: str, severity: str, stream: TextIO) -> str:
    if not _styled(stream):
        return text
    code = "31" if severity == "error" else "33"
    return f"\x1b[{code}m{text}\x1b[0m"


def _emit(diags: list[Diagnostic], stream: TextIO) -> None:
    for d in diags:
        print(_paint(d.render(), d.severity, stream), file=stream)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _load_model(path: str) -> Model:
    return parse(_read(path), path)


def _output(text: str, path: str | None, out: TextIO) -> None:
    if path:
        _write(path, text)
    else:
        out.write(text)


# --------------------------------------------------------------------------
# Subcommands


def cmd_validate(args, out: TextIO, err: TextIO) -> int:
    diags = validate(_load_model(args.model))
    _emit(diags, out)
    return REJECTED if has_errors(diags) else OK


def cmd_points(args, out: TextIO, err: TextIO) -> int:
    model = _load_model(args.model)
    diags = validate(model)
    if has_errors(diags):
        _emit(diags, err)
        return REJECTED
    for vp in classify_variation_points(model):
        print(vp.describe(), file=out)
    return OK


def cmd_transform(args, out: TextIO, err: TextIO) -> int:
    model = _load_model(args.model)
    lines = parse_bindings(_read(args.bindings))
    result = transform_all(model, resolve_bindings(model, lines))
    _output(format_model(result), args.output, out)
    return OK


def cmd_generate(args, out: TextIO, err: TextIO) -> int:
    model = _load_model(args.model)
    diags = validate(model)
    if has_errors(diags):
        _emit(diags, err)
        return REJECTED
    files = generate(model)
    target = Path(args.output)
    try:
        target.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"cannot create {target}: {exc.strerror or exc}") from exc
    for name, text in files.items():
        _write(str(target / name), text)
    print(f"wrote {len(files)} file(s) to {target}", file=err)
    return OK


def _run_spec(framework: Model, spec: InstantiationSpec, output: str | None, out: TextIO, err: TextIO) -> int:
    try:
        result = instantiate(framework, spec)
    except InstantiationError as exc:
        _emit(exc.diagnostics, err)
        return REJECTED
    _emit(verify_instance(framework, spec), err)
    for line in instance_report(framework, spec):
        print(line, file=err)
    _output(format_model(result), output, out)
    return OK


def cmd_instantiate(args, out: TextIO, err: TextIO, stdin: TextIO) -> int:
    framework = _load_model(args.framework)
    if args.interactive:
        if args.spec:
            raise UsageError("--spec and --interactive are mutually exclusive")
        if not args.emit_spec:
            raise UsageError("--interactive needs --emit-spec <file.inst>")
        spec = Wizard(framework, stdin, out).run()
        text = format_spec(spec)
        _write(args.emit_spec, text)
        # Replay from the written text so batch and interactive runs cannot diverge.
        spec = parse_spec(text, args.emit_spec)
        return _run_spec(framework, spec, args.output, out, err)
    if not args.spec:
        raise UsageError("instantiate needs --spec <file.inst> or --interactive")
    spec = parse_spec(_read(args.spec), args.spec)
    return _run_spec(framework, spec, args.output, out, err)


def cmd_check(args, out: TextIO, err: TextIO) -> int:
    framework = _load_model(args.framework)
    spec = parse_spec(_read(args.spec), args.spec)
    diags = verify_instance(framework, spec)
    _emit(diags, out)
    return REJECTED if has_errors(diags) else OK


# --------------------------------------------------------------------------
# Interactive wizard: one answer per line, so sessions can be replayed from a file.


def _split(answer: str) -> list[str]:
    return [p.strip() for p in answer.split(",") if p.strip()]


class Wizard:
    def __init__(self, framework: Model, stdin: TextIO, out: TextIO):
        self.framework = framework
        self.stdin = stdin
        self.out = out

    def say(self, text: str = "") -> None:
        print(text, file=self.out)

    def ask(self, prompt: str, default: str = "") -> str:
        shown = f"{prompt} [{default}]: " if default else f"{prompt}: "
        self.out.write(shown)
        self.out.flush()
        line = self.stdin.readline()
        if not line:
            raise UsageError(f"input ended while waiting for: {prompt}")
        return line.strip() or default

    def ask_bool(self, prompt: str) -> bool:
        while True:
            answer = self.ask(prompt + " (true/false)").lower()
            if answer in ("true", "false"):
                return answer == "true"
            self.say("  please answer true or false")

    def echo_obligation(self, ob: Obligation) -> None:
        runtime = ", runtime-capable" if ob.runtime_capable else ""
        self.say(f"== {ob.interface_name} ({ob.timing}{runtime})")
        for m in ob.abstract_methods:
            self.say(f"  must implement: {m.signature()}")

    def echo_rules(self, ob: Obligation, method: str, is_new: bool) -> None:
        for c in ob.clauses_for(method, is_new):
            self.say(f"  restriction: {c.key()}")
        for p in ob.patterns:
            if p.owner_method == method:
                self.say(f"  pattern {p.name}: {p.describe()}")

    def effects(self, label: str, with_trace: bool) -> EffectSummary:
        reads = frozenset(_split(self.ask(f"  {label} reads (comma-separated attributes)")))
        writes = frozenset(_split(self.ask(f"  {label} writes (comma-separated attributes)")))
        trace = None
        if with_trace:
            answer = self.ask(f"  {label} trace (comma-separated events, '-' for an empty trace, blank to skip)")
            if answer:
                trace = () if answer == "-" else tuple(_split(answer))
        return EffectSummary(reads, writes, trace)

    def app_class(self, name: str, ob: Obligation) -> AppClassSpec:
        methods = []
        for m in ob.abstract_methods:
            self.say(f"{name}.{m.signature()} implements {ob.interface_name}.{m.name}")
            self.echo_rules(ob, m.name, False)
            methods.append(MethodImpl(m.name, m.params, self.effects(f"{name}.{m.name}", True)))
        for new in _split(self.ask(f"New methods of {name} (comma-separated, blank for none)")):
            self.say(f"{name}.{new}() is a new method")
            self.echo_rules(ob, new, True)
            methods.append(MethodImpl(new, (), self.effects(f"{name}.{new}", False)))
        return AppClassSpec(name, ob.interface_name, tuple(methods))

    def run(self) -> InstantiationSpec:
        fw = self.framework
        name = self.ask("Instance name", f"{fw.name}App")
        apps: list[AppClassSpec] = []
        configs = []
        for ob in list_obligations(fw):
            if ob.kind == CONFIGURATION:
                self.say(f"== {ob.interface_name} (mop, runtime-capable)")
                cls = fw[ob.interface_name]
                values = []
                for param in ob.parameters:
                    doc = cls.attribute(param).doc
                    if doc:
                        self.say(f"  {param}: {doc}")
                    values.append((param, self.ask_bool(f"{ob.interface_name}.{param}")))
                configs.append((ob.interface_name, tuple(values)))
                continue
            self.echo_obligation(ob)
            for app in _split(self.ask(f"Application classes for {ob.interface_name} (comma-separated, blank for none)")):
                apps.append(self.app_class(app, ob))
        return InstantiationSpec(name, fw.name, tuple(apps), tuple(configs))


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="umlf", description="Variation-point modeling toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="report tag and well-formedness diagnostics")
    p.add_argument("model")

    p = sub.add_parser("points", help="list classified variation points")
    p.add_argument("model")

    p = sub.add_parser("transform", help="rewrite variation points into extensible interfaces")
    p.add_argument("model")
    p.add_argument("--bindings", required=True)
    p.add_argument("-o", "--output")

    p = sub.add_parser("generate", help="write one skeleton file per class")
    p.add_argument("model")
    p.add_argument("-o", "--output", required=True, help="target directory")

    p = sub.add_parser("instantiate", help="build an application model from a framework")
    p.add_argument("framework")
    p.add_argument("--spec")
    p.add_argument("--interactive", action="store_true")
    p.add_argument("--emit-spec")
    p.add_argument("-o", "--output")

    p = sub.add_parser("check", help="verify an instantiation spec without building the model")
    p.add_argument("framework")
    p.add_argument("--spec", required=True)
    return parser


def main(
    argv: list[str] | None = None,
    stdin: TextIO | None = None,
    stdout: TextIO | None = None,
    stderr: TextIO | None = None,
) -> int:
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE
    handlers = {
        "validate": cmd_validate,
        "points": cmd_points,
        "transform": cmd_transform,
        "generate": cmd_generate,
        "check": cmd_check,
    }
    try:
        if args.command == "instantiate":
            return cmd_instantiate(args, out, err, stdin or sys.stdin)
        return handlers[args.command](args, out, err)
    except UsageError as exc:
        print(f"umlf: {exc}", file=err)
        return USAGE
    except SourceError as exc:
        for e in exc.errors:
            print(_paint(f"{exc.source}:{e}", "error", err), file=err)
        return REJECTED
    except (TransformError, BindingsSyntaxError, ClassificationError, InstantiationError) as exc:
        if isinstance(exc, InstantiationError):
            _emit(exc.diagnostics, err)
        else:
            print(_paint(f"umlf: {exc}", "error", err), file=err)
        return REJECTED


if __name__ == "__main__":
    sys.exit(main())
