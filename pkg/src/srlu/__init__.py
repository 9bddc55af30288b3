"""Conversion, evaluation and scoring for uniform span/dependency semantic roles."""

__version__ = "0.1.0"

from .types import (  # noqa: E402
    ROOT,
    AnnotatedSentence,
    ConstituentNode,
    DependencyTree,
    ExportError,
    FormatError,
    Frame,
    Sentence,
    SpanArgument,
    SpanFrame,
    SrluError,
    Token,
    UniformArgument,
    ValidationError,
)
