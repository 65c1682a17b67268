"""Local lock-guard context for a statement.

The walk follows the straight-line prefix from the entry of the innermost
function-like body (top-level function or closure) down to the statement.
Branch statements that never touch a mutex are skipped; a branch that does
makes that mutex ambiguous rather than guessed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .nodes import NodeKind, SyntaxNode
from .scope import FunctionInfo, normalize
from .tokens import Span

K = NodeKind

ACQUIRE = {"Lock": "Exclusive", "RLock": "ReadOnly"}
RELEASE = {"Unlock": "Exclusive", "RUnlock": "ReadOnly"}


class LockMode(enum.Enum):
    Exclusive = "Exclusive"
    ReadOnly = "ReadOnly"


@dataclass(frozen=True)
class Guard:
    mutex: str
    mode: LockMode
    acquired_at: Span
    released_at: Span | None  # None: not released within the function
    deferred: bool = False


@dataclass(frozen=True)
class LockContext:
    guards: tuple[Guard, ...] = ()
    ambiguous: frozenset[str] = field(default_factory=frozenset)
    # guards held on the straight-line prefix of a mutex some branch also touches
    tentative: tuple[Guard, ...] = ()

    @property
    def is_empty(self) -> bool:
        return not self.guards

    @property
    def is_ambiguous(self) -> bool:
        return bool(self.ambiguous)

    def holds(self, mode: LockMode) -> bool:
        return any(g.mode is mode for g in self.guards)

    def mutexes(self) -> set[str]:
        return {g.mutex for g in self.guards}


def lock_call(node: SyntaxNode) -> tuple[str, str] | None:
    """(mutex text, method) if ``node`` is ``X.Lock()`` and friends."""
    if node.kind is not K.CallExpr or node.all("arg"):
        return None
    fun = node.get("fun")
    if fun is None or fun.kind is not K.SelectorExpr:
        return None
    method = fun.value
    if method not in ACQUIRE and method not in RELEASE:
        return None
    return normalize(fun.get("x").text), method


def _calls_outside_closures(node: SyntaxNode):
    stack = [node]
    while stack:
        n = stack.pop()
        if n.kind is K.ClosureLit and n is not node:
            continue
        call = lock_call(n)
        if call is not None:
            yield n, call
        stack.extend(reversed(n.children))


def _stmt_call(stmt: SyntaxNode) -> SyntaxNode | None:
    if stmt.form == "ExprStmt" and stmt.children and stmt.children[0].kind is K.CallExpr:
        return stmt.children[0]
    return None


def _deferred_releases(stmt: SyntaxNode) -> list[tuple[str, str]]:
    call = stmt.get("call")
    if call is None:
        return []
    direct = lock_call(call)
    if direct is not None:
        return [direct] if direct[1] in RELEASE else []
    fun = call.get("fun")
    if fun is not None and fun.kind is K.ClosureLit:
        return [c for _, c in _calls_outside_closures(fun.get("body")) if c[1] in RELEASE]
    return []


def _child_lists(stmt: SyntaxNode) -> list[list[SyntaxNode]]:
    """Statement lists nested directly under a compound statement."""
    if stmt.kind is K.Block:
        return [stmt.children]
    if stmt.form in ("CaseClause",) or stmt.kind is K.SelectCase:
        return [stmt.all("stmt")]
    if stmt.form == "LabeledStmt":
        return [[stmt.get("stmt")]]
    out = []
    for role in ("body", "else"):
        child = stmt.get(role)
        if child is not None:
            out.append([child])
    for clause in stmt.all("clause"):
        out.append([clause])
    return out


class _Walker:
    def __init__(self, target: SyntaxNode):
        self.target = target
        self.held: list[Guard] = []
        self.ambiguous: set[str] = set()

    def contains(self, node: SyntaxNode) -> bool:
        return node.span.contains(self.target.span)

    def run(self, stmts: list[SyntaxNode]) -> bool:
        """Apply effects of statements preceding the target; True once found."""
        for s in stmts:
            if s is None:
                continue
            if self.contains(s) and s.start <= self.target.start:
                if s is self.target or s.kind is K.ClosureLit:
                    return True
                for lst in _child_lists(s):
                    if any(c is not None and self.contains(c) for c in lst):
                        if s.kind in (K.IfStmt, K.ForClause) or s.form in ("SwitchStmt", "TypeSwitchStmt"):
                            init = s.get("init")
                            if init is not None:
                                self.apply(init)
                        return self.run(lst)
                return True
            if s.start >= self.target.end:
                return True
            self.apply(s)
        return False

    def apply(self, s: SyntaxNode):
        call = _stmt_call(s)
        if call is not None:
            lc = lock_call(call)
            if lc is not None:
                self.acquire_or_release(lc, call.span)
                return
        if s.kind is K.DeferStmt:
            for mutex, method in _deferred_releases(s):
                mode = LockMode(RELEASE[method])
                for i, g in enumerate(self.held):
                    if g.mutex == mutex and g.mode is mode and not g.deferred:
                        self.held[i] = Guard(g.mutex, g.mode, g.acquired_at, None, True)
                        break
            return
        if s.kind is K.GoStmt:
            return
        for _, (mutex, _) in _calls_outside_closures(s):
            self.ambiguous.add(mutex)

    def acquire_or_release(self, lc: tuple[str, str], span: Span):
        mutex, method = lc
        if method in ACQUIRE:
            self.held.append(Guard(mutex, LockMode(ACQUIRE[method]), span, None))
            return
        mode = LockMode(RELEASE[method])
        for i in range(len(self.held) - 1, -1, -1):
            g = self.held[i]
            if g.mutex == mutex and g.mode is mode:
                del self.held[i]
                return


def _container_body(stmt: SyntaxNode, enclosing: FunctionInfo) -> SyntaxNode:
    analysis = enclosing.analysis
    closure = analysis.enclosing_closure(stmt)
    if closure is None and analysis.parent_of(stmt) is None:
        # re-parsed node: locate by span
        for c in reversed(analysis.closures):
            if c.span.contains(stmt.span) and c.span != stmt.span:
                closure = c
                break
    return closure.get("body") if closure is not None else enclosing.body


def _release_after(body: SyntaxNode, guard: Guard, after: int) -> Span | None:
    for node, (mutex, method) in _calls_outside_closures(body):
        if node.start >= after and mutex == guard.mutex and method in RELEASE:
            if LockMode(RELEASE[method]) is guard.mode:
                return node.span
    return None


def resolve_lock_context(stmt: SyntaxNode, enclosing: FunctionInfo) -> LockContext:
    if enclosing.body is None:
        return LockContext()
    body = _container_body(stmt, enclosing)
    walker = _Walker(stmt)
    walker.run(body.children)
    end = body.span.end
    guards, tentative = [], []
    for g in walker.held:
        if g.mutex in walker.ambiguous:
            tentative.append(g)
            continue
        if g.deferred:
            released = Span(end, end)
        else:
            released = _release_after(body, g, stmt.end)
        guards.append(Guard(g.mutex, g.mode, g.acquired_at, released, g.deferred))
    return LockContext(tuple(guards), frozenset(walker.ambiguous), tuple(tentative))
