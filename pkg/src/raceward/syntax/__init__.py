"""Go front end: lexer, parser, scope resolution and lock context."""

from .locks import Guard, LockContext, LockMode, resolve_lock_context
from .nodes import NodeKind, SyntaxNode, SyntaxTree
from .parser import parse_source
from .scope import (
    Capture,
    CaptureSet,
    Declaration,
    FileModel,
    FunctionInfo,
    Receiver,
    Use,
    build_model,
    compute_captures,
    function_infos,
)
from .tokens import ParseError, SourcePosition, Span

__all__ = [
    "Capture",
    "CaptureSet",
    "Declaration",
    "FileModel",
    "FunctionInfo",
    "Guard",
    "LockContext",
    "LockMode",
    "NodeKind",
    "ParseError",
    "Receiver",
    "SourcePosition",
    "Span",
    "SyntaxNode",
    "SyntaxTree",
    "Use",
    "build_model",
    "compute_captures",
    "function_infos",
    "parse_source",
    "resolve_lock_context",
]
