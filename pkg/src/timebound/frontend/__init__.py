"""Frontend: lexing, parsing, and annotation binding for MiniC sources."""

from __future__ import annotations

from timebound.diagnostics import SourceUnit
from timebound.frontend.annotations import (
    Annotation,
    AssertTimer,
    DefineTimer,
    ResetTimer,
    WcetFunction,
)
from timebound.frontend.binder import AnnotatedProgram, bind_annotations, constant_globals, fold_const
from timebound.frontend.lexer import Token, TokenKind, tokenize
from timebound.frontend.nodes import Ast
from timebound.frontend.parser import parse, parse_annotation
from timebound.frontend.preprocess import preprocess

__all__ = [
    "Annotation",
    "AnnotatedProgram",
    "AssertTimer",
    "Ast",
    "DefineTimer",
    "ResetTimer",
    "SourceUnit",
    "Token",
    "TokenKind",
    "WcetFunction",
    "bind_annotations",
    "constant_globals",
    "fold_const",
    "load_annotated",
    "parse",
    "parse_annotation",
    "parse_text",
    "preprocess",
    "tokenize",
]


def parse_text(
    text: str,
    path: str = "<input>",
    defines: frozenset[str] | set[str] = frozenset(),
    keep_comments: bool = True,
) -> Ast:
    """Preprocess, tokenize, and parse source text in one step."""
    processed = preprocess(text, defines, path)
    src = SourceUnit(path, processed)
    return parse(tokenize(src, keep_comments=keep_comments), path)


def load_annotated(
    text: str,
    path: str = "<input>",
    defines: frozenset[str] | set[str] = frozenset(),
) -> AnnotatedProgram:
    """Parse and bind an annotated source in one step."""
    return bind_annotations(parse_text(text, path, defines))
