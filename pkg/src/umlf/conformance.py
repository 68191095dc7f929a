"""Trace conformance against sequence patterns, and effect-summary checks."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

from .model import ClassDecl, Diagnostic, SequencePattern, RestrictionClause

Trace = tuple[str, ...]

STRICT = "strict"
LOOSE = "loose"
MAX_OPTIONAL = 16


@dataclass(frozen=True)
class Violation:
    position: int
    expected: str


@dataclass(frozen=True)
class ConformanceResult:
    first_violation: Violation | None = None

    @property
    def conforms(self) -> bool:
        return self.first_violation is None

    def __bool__(self) -> bool:
        return self.conforms


@dataclass(frozen=True)
class EffectSummary:
    """Declared stand-in for a method body."""

    reads: frozenset[str] = frozenset()
    writes: frozenset[str] = frozenset()
    trace: Trace | None = None


def _expected_at(pattern: SequencePattern, k: int) -> str:
    """Events acceptable when the pattern cursor sits at index ``k``."""
    options = []
    for e in pattern.events[k:]:
        options.append(e.name)
        if not e.optional:
            break
    else:
        options.append("end of trace")
    return options[0] if len(options) == 1 else "one of " + ", ".join(options)


def conforms(trace: Sequence[str], pattern: SequencePattern, mode: str = STRICT) -> ConformanceResult:
    """Check ``trace`` against ``pattern``.

    Strict: the trace is the event list with some optional events deleted.
    Loose: events outside the pattern's alphabet are ignored wherever they
    occur; the remaining events must conform strictly. Event names within a
    pattern are unique, so a greedy left-to-right match is exact.
    """
    if mode not in (STRICT, LOOSE):
        raise ValueError(f"unknown mode {mode!r}")
    alphabet = {e.name for e in pattern.events}
    positions = [i for i, ev in enumerate(trace) if mode == STRICT or ev in alphabet]
    events = pattern.events
    k = 0
    for pos in positions:
        ev = trace[pos]
        cursor = k
        while k < len(events) and events[k].name != ev and events[k].optional:
            k += 1
        if k < len(events) and events[k].name == ev:
            k += 1
            continue
        # Foreign, repeated or out-of-order event, or a mandatory one skipped.
        return ConformanceResult(Violation(pos, _expected_at(pattern, cursor)))
    while k < len(events):
        if not events[k].optional:
            return ConformanceResult(Violation(len(trace), events[k].name))
        k += 1
    return ConformanceResult()


def expand(pattern: SequencePattern) -> set[Trace]:
    """Every strict-mode admissible trace: one per subset of optional events."""
    optional = [e for e in pattern.events if e.optional]
    if len(optional) > MAX_OPTIONAL:
        raise ValueError(f"pattern {pattern.name} has {len(optional)} optional events (cap {MAX_OPTIONAL})")
    traces = set()
    for keep in product((True, False), repeat=len(optional)):
        chosen = {e.name for e, k in zip(optional, keep) if k}
        traces.add(tuple(e.name for e in pattern.events if not e.optional or e.name in chosen))
    return traces


def check_effects(
    summary: EffectSummary,
    clauses: Iterable[RestrictionClause],
    owning_class: ClassDecl,
    path: str | None = None,
    trust_construction: bool = True,
) -> list[Diagnostic]:
    """Diagnostics for ``clauses`` violated by ``summary``.

    Clauses flagged ``by_construction`` are skipped unless
    ``trust_construction`` is False, in which case they are checked like any
    other clause.
    """
    where = path or owning_class.name
    out = []
    for c in clauses:
        if c.by_construction and trust_construction:
            continue
        if c.form == "preserves":
            if c.argument in summary.writes:
                out.append(Diagnostic("UMLF-E101", "error", where, f"writes {c.argument}, which must be preserved"))
        elif c.form == "pure":
            if summary.writes:
                written = ", ".join(sorted(summary.writes))
                out.append(Diagnostic("UMLF-E102", "error", where, f"pure method writes {written}"))
        else:
            out.append(Diagnostic("UMLF-W101", "warning", where, f'unchecked clause text "{c.argument}"'))
    return out
