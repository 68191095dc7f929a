"""Variation-point modeling toolkit for object-oriented frameworks.

Models are read from ``.umlf`` text, checked for tag consistency, rewritten so
that every variation point becomes an extension interface, turned into
skeleton files, and finally instantiated against checked application specs.
"""

from ._lexer import ParseError, SourceError
from .codegen import generate
from .conformance import EffectSummary, check_effects, conforms, expand
from .dsl import format_model, parse, parse_file
from .instantiator import (
    InstantiationError,
    InstantiationSpec,
    instantiate,
    list_obligations,
    parse_spec,
    verify_instance,
)
from .model import Diagnostic, Model, classify_variation_points, structural_diff
from .transformer import Binding, TransformError, parse_bindings, resolve_bindings, transform_all
from .validator import validate

__version__ = "0.1.0"

__all__ = [
    "Binding",
    "Diagnostic",
    "EffectSummary",
    "InstantiationError",
    "InstantiationSpec",
    "Model",
    "ParseError",
    "SourceError",
    "TransformError",
    "check_effects",
    "classify_variation_points",
    "conforms",
    "expand",
    "format_model",
    "generate",
    "instantiate",
    "list_obligations",
    "parse",
    "parse_bindings",
    "parse_file",
    "parse_spec",
    "resolve_bindings",
    "structural_diff",
    "transform_all",
    "validate",
    "verify_instance",
]
