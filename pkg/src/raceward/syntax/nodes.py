from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator

from .tokens import Comment, Span


class NodeKind(enum.Enum):
    PackageClause = "PackageClause"
    Import = "Import"
    FuncDecl = "FuncDecl"
    MethodDecl = "MethodDecl"
    ClosureLit = "ClosureLit"
    GoStmt = "GoStmt"
    DeferStmt = "DeferStmt"
    ForRange = "ForRange"
    ForClause = "ForClause"
    Assign = "Assign"
    ShortVarDecl = "ShortVarDecl"
    ReturnStmt = "ReturnStmt"
    NakedReturnStmt = "NakedReturnStmt"
    CallExpr = "CallExpr"
    SelectorExpr = "SelectorExpr"
    IndexExpr = "IndexExpr"
    ChanSend = "ChanSend"
    ChanRecv = "ChanRecv"
    SelectStmt = "SelectStmt"
    SelectCase = "SelectCase"
    StructType = "StructType"
    Field = "Field"
    Ident = "Ident"
    CompositeLit = "CompositeLit"
    IfStmt = "IfStmt"
    Block = "Block"
    Other = "Other"


@dataclass(eq=True)
class SyntaxNode:
    """One node of the parsed tree.

    ``form`` refines ``kind`` for nodes that are only syntactically recognized
    (``kind`` is ``Other`` and ``form`` names the construct, e.g. ``IncDec``).
    ``role`` is the slot this node fills in its parent (``body``, ``lhs``,
    ``args`` ...). ``value`` carries the identifier name, operator or literal
    text where one exists.
    """

    kind: NodeKind
    span: Span
    text: str
    children: list[SyntaxNode] = field(default_factory=list)
    form: str = ""
    role: str = ""
    value: str | None = None

    def __post_init__(self):
        if not self.form:
            self.form = self.kind.value

    def get(self, role: str) -> SyntaxNode | None:
        for child in self.children:
            if child.role == role:
                return child
        return None

    def all(self, role: str) -> list[SyntaxNode]:
        return [c for c in self.children if c.role == role]

    def walk(self) -> Iterator[SyntaxNode]:
        """Pre-order traversal."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    @property
    def start(self) -> int:
        return self.span.start.byte_offset

    @property
    def end(self) -> int:
        return self.span.end.byte_offset

    def __repr__(self) -> str:
        extra = f" {self.value!r}" if self.value is not None else ""
        return f"<{self.form}{extra} @{self.span.start.line}:{self.span.start.column}>"


@dataclass
class SyntaxTree:
    path: str
    source: str
    root: SyntaxNode
    package: str
    comments: list[Comment] = field(default_factory=list, compare=False)

    @property
    def is_test_file(self) -> bool:
        return self.path.endswith("_test.go")

    def walk(self) -> Iterator[SyntaxNode]:
        return self.root.walk()

    def node_at(self, span: Span) -> SyntaxNode | None:
        """Outermost node whose span is exactly ``span``."""
        for node in self.walk():
            if node.span == span:
                return node
        return None
