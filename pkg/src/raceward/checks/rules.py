"""The race-idiom checks GR01-GR11.

Every check takes a parsed tree (and optionally a prebuilt :class:`FileModel`)
and returns findings for that file. Checks are independent of each other;
ordering and de-duplication happen in the runner.
"""

from __future__ import annotations

import re
from typing import Callable, Iterable

from ..syntax.locks import LockContext, LockMode, resolve_lock_context
from ..syntax.nodes import NodeKind, SyntaxNode, SyntaxTree
from ..syntax.scope import (
    Declaration,
    FileModel,
    FunctionAnalysis,
    FunctionInfo,
    Use,
    is_map_type,
    is_mutex_type,
    is_slice_type,
    is_waitgroup_type,
    normalize,
)
from ..syntax.tokens import Span
from .finding import Confidence, Finding

K = NodeKind
High, Medium, Low = Confidence.High, Confidence.Medium, Confidence.Low

_ATOMIC_FUNC = re.compile(r"^(Add|Load|Store|Swap|CompareAndSwap|And|Or)(Int32|Int64|Uint32|Uint64|Uintptr|Pointer)$")


class Context:
    """Per-file state shared by the checks: the model and a lock-context cache."""

    def __init__(self, tree: SyntaxTree, model: FileModel | None = None):
        self.tree = tree
        self.model = model or FileModel(tree)
        self._locks: dict[int, LockContext] = {}
        self._use_index: dict[int, dict[int, Use]] = {}

    def lock(self, stmt: SyntaxNode, fn: FunctionInfo) -> LockContext:
        key = id(stmt)
        if key not in self._locks:
            self._locks[key] = resolve_lock_context(stmt, fn)
        return self._locks[key]

    def use_of(self, fn: FunctionInfo, ident: SyntaxNode) -> Use | None:
        key = id(fn.node)
        if key not in self._use_index:
            self._use_index[key] = {id(u.ident): u for u in fn.analysis.uses}
        return self._use_index[key].get(id(ident))

    def decl_of(self, fn: FunctionInfo, expr: SyntaxNode) -> Declaration | None:
        """Declaration behind an identifier, optionally wrapped in ``&`` or parens."""
        while expr.form in ("ParenExpr", "UnaryExpr") and expr.value in (None, "&"):
            expr = expr.children[0]
        if expr.kind is not K.Ident:
            return None
        use = self.use_of(fn, expr)
        return use.decl if use is not None else None


def _span(u: Use) -> Span:
    return (u.stmt or u.ident).span


def _as_context(tree: SyntaxTree, ctx: Context | None) -> Context:
    return ctx if ctx is not None else Context(tree)


def _loop_decls(a: FunctionAnalysis, loops: Iterable[SyntaxNode]) -> list[Declaration]:
    idents: list[SyntaxNode] = []
    for loop in loops:
        if loop.kind is K.ForRange and loop.value == ":=":
            idents += [n for n in (loop.get("key"), loop.get("value")) if n is not None]
        elif loop.kind is K.ForClause:
            init = loop.get("init")
            if init is not None and init.kind is K.ShortVarDecl:
                idents += init.all("lhs")
    ids = {id(i) for i in idents}
    return [d for d in a.decls if id(d.ident) in ids]


def _is_append_write(u: Use) -> bool:
    stmt = u.stmt
    if not u.is_write or stmt is None or stmt.kind not in (K.Assign, K.ShortVarDecl):
        return False
    target = normalize(u.expr.text)
    for rhs in stmt.all("rhs"):
        if rhs.kind is K.CallExpr:
            fun, args = rhs.get("fun"), rhs.all("arg")
            if fun.kind is K.Ident and fun.value == "append" and args and normalize(args[0].text) == target:
                return True
    return False


def _closure_walk(node: SyntaxNode) -> Iterable[SyntaxNode]:
    """Pre-order walk that does not descend into nested closures."""
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        if n.kind is K.ClosureLit and n is not node:
            continue
        stack.extend(reversed(n.children))


def _method_call(node: SyntaxNode, method: str, nargs: int | None = None) -> SyntaxNode | None:
    """Receiver expression of ``X.method(...)``."""
    if node.kind is not K.CallExpr:
        return None
    fun = node.get("fun")
    if fun is None or fun.kind is not K.SelectorExpr or fun.value != method:
        return None
    if nargs is not None and len(node.all("arg")) != nargs:
        return None
    return fun.get("x")


def _names(decls: Iterable[Declaration]) -> str:
    return ", ".join(sorted({d.name for d in decls}))


# -- GR01 ---------------------------------------------------------------------


def check_gr01_loop_capture(tree: SyntaxTree, ctx: Context | None = None) -> list[Finding]:
    ctx = _as_context(tree, ctx)
    out = []
    for fn in ctx.model.functions:
        a = fn.analysis
        for c in a.closures:
            how, site = a.launch(c)
            if how == "arg":
                fun = site.get("fun")
                if not (fun.kind is K.SelectorExpr and fun.value == "Go"):
                    continue
            elif how != "go":
                continue
            loop_decls = _loop_decls(a, a.enclosing_loops(site))
            if not loop_decls:
                continue
            hits = [cap for cap in a.captures(c) if any(cap.decl is d for d in loop_decls)]
            if not hits:
                continue
            first = hits[0]
            names = _names(h.decl for h in hits)
            out.append(
                Finding(
                    "GR01",
                    first.first_use,
                    High,
                    f"goroutine closure captures loop variable {names} by reference; "
                    f"pass it as an argument or copy it ({first.name} := {first.name}) inside the loop",
                    fn.name,
                    tuple(h.decl.ident.span for h in hits),
                )
            )
    return out


# -- GR02 ---------------------------------------------------------------------


def check_gr02_err_capture(tree: SyntaxTree, ctx: Context | None = None) -> list[Finding]:
    ctx = _as_context(tree, ctx)
    out = []
    for fn in ctx.model.functions:
        a = fn.analysis
        for c, go in a.go_closures():
            for cap in a.captures(c):
                d = cap.decl
                if d.kind == "result" or not d.is_error:
                    continue
                uses = a.uses_of(d)
                inner = [u for u in uses if u.inside(c)]
                others = [
                    u
                    for u in uses
                    if u.is_write and not u.inside(c) and (u.closure is not None or u.ident.start >= go.end)
                ]
                if not others:
                    continue
                inner_writes = [u for u in inner if u.is_write]
                if inner_writes:
                    primary, conf = _span(inner_writes[0]), High
                    verb = "writes"
                else:
                    primary, conf = inner[0].ident.span, Medium
                    verb = "reads"
                out.append(
                    Finding(
                        "GR02",
                        primary,
                        conf,
                        f"goroutine {verb} captured error variable {d.name} while the enclosing "
                        f"function also assigns it; declare a fresh error inside the goroutine",
                        fn.name,
                        tuple(_span(u) for u in others),
                    )
                )
    return out


# -- GR03 ---------------------------------------------------------------------


def check_gr03_named_return_capture(tree: SyntaxTree, ctx: Context | None = None) -> list[Finding]:
    ctx = _as_context(tree, ctx)
    out = []
    for fn in ctx.model.functions:
        if not fn.named_results or fn.body is None:
            continue
        a = fn.analysis
        results = [d for d in a.decls if d.kind == "result" and d.closure is None]
        if not results:
            continue
        deferred = [c for c in a.closures if a.launch(c)[0] == "defer"]
        for c, go in a.go_closures():
            hits = [cap for cap in a.captures(c) if any(cap.decl is d for d in results)]
            if not hits:
                continue
            hit_decls = [h.decl for h in hits]
            secondary: list[Span] = []
            for node in _closure_walk(fn.body):
                if node.kind in (K.ReturnStmt, K.NakedReturnStmt) and node.start >= go.end:
                    if a.enclosing_closure(node) is None:
                        secondary.append(node.span)
            for u in a.uses:
                if not u.is_write or not any(u.decl is d for d in hit_decls):
                    continue
                if any(u.inside(dc) for dc in deferred):
                    secondary.append(_span(u))
                elif u.closure is None and u.ident.start >= go.end:
                    secondary.append(_span(u))
            first = hits[0]
            out.append(
                Finding(
                    "GR03",
                    first.first_use,
                    High,
                    f"goroutine captures named result {_names(hit_decls)}; every return "
                    f"(and any deferred assignment) writes it concurrently",
                    fn.name,
                    tuple(sorted(set(secondary), key=lambda s: s.start.byte_offset)),
                )
            )
    return out


# -- GR04 ---------------------------------------------------------------------


def check_gr04_slice_race(tree: SyntaxTree, ctx: Context | None = None) -> list[Finding]:
    ctx = _as_context(tree, ctx)
    out = []
    for fn in ctx.model.functions:
        a = fn.analysis
        for c, go in a.go_closures():
            call = go.get("call")
            flagged: set[int] = set()
            # (a) slice header copied into a goroutine argument
            for arg in call.all("arg"):
                if arg.kind is not K.Ident:
                    continue
                d = ctx.decl_of(fn, arg)
                if d is None or not is_slice_type(d.type_text):
                    continue
                appends = [u for u in a.uses_of(d) if u.closure is not None and _is_append_write(u)]
                if not appends:
                    continue
                flagged.add(id(d))
                out.append(
                    Finding(
                        "GR04",
                        arg.span,
                        High,
                        f"slice {d.name} is passed by value to a goroutine while a closure appends to it; "
                        f"the slice header is copied without holding the lock",
                        fn.name,
                        tuple(_span(u) for u in appends),
                    )
                )
            # (b) unguarded append or shared-index write to a captured slice
            in_loop = bool(a.enclosing_loops(go))
            for cap in a.captures(c):
                d = cap.decl
                if id(d) in flagged or not is_slice_type(d.type_text):
                    continue
                uses = a.uses_of(d)
                outside = any(not u.inside(c) and u.ident.start != d.ident.start for u in uses)
                if not (in_loop or outside):
                    continue
                for u in uses:
                    if not u.inside(c) or not u.is_write:
                        continue
                    if u.target == "index":
                        if _per_goroutine_index(ctx, fn, u, c):
                            continue
                    elif not _is_append_write(u):
                        continue
                    lc = ctx.lock(u.stmt, fn)
                    if lc.guards or lc.tentative:
                        continue
                    out.append(
                        Finding(
                            "GR04",
                            _span(u),
                            Medium,
                            f"goroutine modifies captured slice {d.name} without holding a lock",
                            fn.name,
                            (go.span,),
                        )
                    )
                    break
    return out


def _per_goroutine_index(ctx: Context, fn: FunctionInfo, u: Use, closure: SyntaxNode) -> bool:
    expr = u.expr
    while expr.kind is not K.IndexExpr and expr.children:
        expr = expr.children[0]
    if expr.kind is not K.IndexExpr:
        return False
    idx = expr.get("index")
    if idx is None or idx.kind is not K.Ident:
        return False
    d = ctx.decl_of(fn, idx)
    return d is not None and d.kind == "param" and d.closure is closure


# -- GR05 ---------------------------------------------------------------------


def check_gr05_map_race(tree: SyntaxTree, ctx: Context | None = None) -> list[Finding]:
    ctx = _as_context(tree, ctx)
    out = []
    for fn in ctx.model.functions:
        a = fn.analysis
        for c, go in a.go_closures():
            in_loop = bool(a.enclosing_loops(go))
            for cap in a.captures(c):
                d = cap.decl
                if not is_map_type(d.type_text):
                    continue
                uses = a.uses_of(d)
                if not in_loop and not any(not u.inside(c) for u in uses):
                    continue
                for u in uses:
                    if not (u.inside(c) and u.is_write and u.target == "index"):
                        continue
                    lc = ctx.lock(u.stmt, fn)
                    if lc.guards:
                        continue
                    conf = Low if lc.tentative else (High if in_loop else Medium)
                    out.append(
                        Finding(
                            "GR05",
                            _span(u),
                            conf,
                            f"goroutine writes captured map {d.name} without holding a lock; "
                            f"Go maps are not safe for concurrent writes",
                            fn.name,
                            (go.span,),
                        )
                    )
                    break
    return out


# -- GR06 ---------------------------------------------------------------------


def _param_fields(fn: FunctionInfo) -> list[tuple[int, SyntaxNode]]:
    """(positional index, Field) pairs of a function's parameters."""
    params = fn.node.get("params")
    out, pos = [], 0
    for fld in params.all("param") if params is not None else []:
        out.append((pos, fld))
        pos += max(1, len(fld.all("name")))
    return out


def _callee(ctx: Context, call: SyntaxNode) -> FunctionInfo | None:
    fun = call.get("fun")
    if fun.kind is K.Ident:
        return ctx.model.by_name.get(fun.value or "")
    return None


def check_gr06_mutex_by_value(tree: SyntaxTree, ctx: Context | None = None) -> list[Finding]:
    ctx = _as_context(tree, ctx)
    model = ctx.model
    out = []
    calls = [(fn, n) for fn in model.functions if fn.body is not None for n in fn.body.walk() if n.kind is K.CallExpr]
    method_names = {f.short_name for f in model.functions if f.receiver is not None}
    for fn in model.functions:
        # (a) mutex parameters
        for pos, fld in _param_fields(fn):
            typ = fld.get("type")
            if typ is None or not is_mutex_type(typ.text):
                continue
            width = max(1, len(fld.all("name")))
            sites = []
            for _, call in calls:
                if _callee(ctx, call) is fn:
                    args = call.all("arg")
                    sites += [args[i].span for i in range(pos, min(pos + width, len(args)))]
            out.append(
                Finding(
                    "GR06",
                    fld.span,
                    High,
                    f"{fn.short_name} takes {normalize(typ.text)} by value; each call locks a private copy",
                    fn.name,
                    tuple(sites),
                )
            )
        # (b) value receivers of mutex-holding structs
        if fn.receiver is not None and fn.receiver.is_value:
            struct = model.structs.get(fn.receiver.type_name)
            if struct is not None and struct.has_mutex():
                recv = fn.node.get("recv").children[0]
                out.append(
                    Finding(
                        "GR06",
                        recv.span,
                        High,
                        f"method {fn.short_name} has a value receiver of {struct.name}, which holds a mutex; "
                        f"the receiver copy carries its own lock",
                        fn.name,
                    )
                )
    # (c) mutex values handed to callees declared elsewhere
    for fn, call in calls:
        fun = call.get("fun")
        if _callee(ctx, call) is not None:
            continue
        if fun.kind is K.SelectorExpr and fun.value in method_names:
            continue
        for arg in call.all("arg"):
            if arg.kind is not K.Ident:
                continue
            d = ctx.decl_of(fn, arg)
            if d is not None and is_mutex_type(d.type_text):
                out.append(
                    Finding(
                        "GR06",
                        arg.span,
                        High,
                        f"mutex {d.name} is passed by value to {normalize(fun.text)}",
                        fn.name,
                    )
                )
    return out


# -- GR07 ---------------------------------------------------------------------


def _wg_decl(ctx: Context, fn: FunctionInfo, x: SyntaxNode, closure: SyntaxNode, go: SyntaxNode) -> Declaration | None:
    d = ctx.decl_of(fn, x)
    if d is None or not is_waitgroup_type(d.type_text):
        return None
    if d.kind == "param" and d.closure is closure:
        # WaitGroup handed in as an argument: follow it to the caller's variable
        params = [p for p in fn.analysis.decls if p.kind == "param" and p.closure is closure]
        args = go.get("call").all("arg")
        idx = params.index(d) if d in params else -1
        if 0 <= idx < len(args):
            return ctx.decl_of(fn, args[idx])
        return None
    return d


def _done_param_positions(callee: FunctionInfo) -> set[int]:
    """Parameter positions whose WaitGroup the callee marks Done."""
    if callee.body is None:
        return set()
    names = {name: i for i, (name, t) in enumerate(callee.params) if is_waitgroup_type(t)}
    hits = set()
    for node in callee.body.walk():
        x = _method_call(node, "Done", 0)
        if x is not None and x.kind is K.Ident and x.value in names:
            hits.add(names[x.value])
    return hits


def check_gr07_waitgroup_add(tree: SyntaxTree, ctx: Context | None = None) -> list[Finding]:
    ctx = _as_context(tree, ctx)
    out = []
    for fn in ctx.model.functions:
        if fn.body is None:
            continue
        a = fn.analysis
        waits: list[tuple[Declaration, SyntaxNode]] = []
        for node in fn.body.walk():
            x = _method_call(node, "Wait", 0)
            if x is not None:
                d = ctx.decl_of(fn, x)
                if d is not None and is_waitgroup_type(d.type_text):
                    waits.append((d, node))
        for c, go in a.go_closures():

            def waits_after(d: Declaration) -> list[Span]:
                return [w.span for wd, w in waits if wd is d and w.start >= go.end and not c.span.contains(w.span)]

            captured_writes = [
                u
                for u in a.uses
                if u.inside(c) and u.is_write and u.decl is not None and not c.span.contains(u.decl.ident.span)
            ]
            for node in _closure_walk(c.get("body")):
                x = _method_call(node, "Add", 1)
                if x is not None:
                    d = _wg_decl(ctx, fn, x, c, go)
                    spans = waits_after(d) if d is not None else []
                    if spans:
                        out.append(
                            Finding(
                                "GR07",
                                node.span,
                                High,
                                f"{normalize(x.text)}.Add runs inside the goroutine it accounts for; "
                                f"Wait may return before it executes. Call Add before the go statement",
                                fn.name,
                                tuple(spans),
                            )
                        )
                    continue
                # Done signalled before the goroutine's last writes
                done_wg, done_end = None, None
                x = _method_call(node, "Done", 0)
                if x is not None and a.parent_of(node).form == "ExprStmt":
                    done_wg, done_end = _wg_decl(ctx, fn, x, c, go), node.end
                    anchor = node
                elif node.kind is K.CallExpr:
                    callee = _callee(ctx, node)
                    if callee is not None and callee is not fn:
                        args = node.all("arg")
                        for pos in _done_param_positions(callee):
                            if pos < len(args):
                                done_wg = _wg_decl(ctx, fn, args[pos], c, go)
                                if done_wg is not None:
                                    break
                        # writes of the statement holding the call land after the callee returns
                        done_end = node.start
                        anchor = node
                if done_wg is None or not waits_after(done_wg):
                    continue
                stmt = a.statement_of(anchor)
                later = [
                    u
                    for u in captured_writes
                    if u.ident.start >= done_end or (stmt is u.stmt and stmt.kind in (K.Assign, K.ShortVarDecl))
                ]
                later = [u for u in later if u.decl is not done_wg]
                if later:
                    out.append(
                        Finding(
                            "GR07",
                            anchor.span,
                            Low,
                            f"{done_wg.name}.Done is signalled before the goroutine finishes writing "
                            f"{_names(u.decl for u in later)}; Wait can return while those writes are pending",
                            fn.name,
                            tuple(_span(u) for u in later),
                        )
                    )
    return out


# -- GR08 ---------------------------------------------------------------------


def check_gr08_write_under_rlock(tree: SyntaxTree, ctx: Context | None = None) -> list[Finding]:
    ctx = _as_context(tree, ctx)
    out = []
    for fn in ctx.model.functions:
        if fn.body is None:
            continue
        a = fn.analysis
        advisories: list[tuple[SyntaxNode, LockContext]] | None = None
        for u in a.uses:
            if not u.is_write or u.decl is None or u.stmt is None:
                continue
            d = u.decl
            if d.kind == "receiver":
                shared = u.target != "var"
            else:
                shared = d.package_level or (u.closure is not None and not u.closure.span.contains(d.ident.span))
            if not shared:
                continue
            lc = ctx.lock(u.stmt, fn)
            read_guards = [g for g in lc.guards if g.mode is LockMode.ReadOnly]
            if read_guards and not lc.holds(LockMode.Exclusive):
                conf, guard = High, read_guards[-1]
            elif not lc.guards and any(g.mode is LockMode.ReadOnly for g in lc.tentative):
                conf, guard = Low, [g for g in lc.tentative if g.mode is LockMode.ReadOnly][-1]
            else:
                continue
            if advisories is None:
                advisories = _receiver_field_calls(ctx, fn)
            secondary = [guard.acquired_at]
            for call, clc in advisories:
                if any(g.acquired_at == guard.acquired_at for g in clc.guards + clc.tentative):
                    secondary.append(call.span)
            out.append(
                Finding(
                    "GR08",
                    u.stmt.span,
                    conf,
                    f"write to {normalize(u.expr.text)} while only the read lock {guard.mutex}.RLock is held",
                    fn.name,
                    tuple(secondary),
                )
            )
    return out


def _receiver_field_calls(ctx: Context, fn: FunctionInfo) -> list[tuple[SyntaxNode, LockContext]]:
    """Method calls through receiver fields (``g.gate.Accept()``), which may mutate shared state."""
    out = []
    recv = fn.receiver.name if fn.receiver is not None else None
    if recv is None:
        return out
    for node in fn.body.walk():
        if node.kind is not K.CallExpr:
            continue
        fun = node.get("fun")
        if fun.kind is not K.SelectorExpr:
            continue
        base = fun.get("x")
        if base.kind is not K.SelectorExpr or base.get("x").kind is not K.Ident or base.get("x").value != recv:
            continue
        if fun.value in ("Lock", "Unlock", "RLock", "RUnlock"):
            continue
        stmt = fn.analysis.statement_of(node)
        out.append((node, ctx.lock(stmt, fn)))
    return out


# -- GR09 ---------------------------------------------------------------------


def _field_path(u: Use) -> str | None:
    text = normalize(u.expr.text)
    prefix = f"{u.name}."
    return text[len(prefix):] if text.startswith(prefix) else None


def check_gr09_channel_shared_mix(tree: SyntaxTree, ctx: Context | None = None) -> list[Finding]:
    ctx = _as_context(tree, ctx)
    model = ctx.model
    out = []
    arm_writes_cache: dict[str, list[tuple[str, Use]]] = {}

    def arm_writes(type_name: str) -> list[tuple[str, Use]]:
        if type_name not in arm_writes_cache:
            found = []
            for m in model.methods_of(type_name):
                if m.body is None:
                    continue
                ma = m.analysis
                for sel in m.body.walk():
                    if sel.kind is not K.SelectStmt:
                        continue
                    for clause in sel.all("clause"):
                        for u in ma.uses:
                            if not (u.is_write and u.decl is not None and clause.span.contains(u.ident.span)):
                                continue
                            if u.decl.kind == "receiver" and u.target == "field":
                                found.append((f"field:{_field_path(u)}", u))
                            elif u.decl.package_level:
                                found.append((f"global:{u.name}", u))
            arm_writes_cache[type_name] = found
        return arm_writes_cache[type_name]

    for fn in model.functions:
        if fn.receiver is None:
            continue
        a = fn.analysis
        for c, _go in a.go_closures():
            reported: set[str] = set()
            for u in a.uses:
                if not (u.inside(c) and u.is_write and u.decl is not None):
                    continue
                if u.decl.kind == "receiver" and u.target == "field":
                    key = f"field:{_field_path(u)}"
                elif u.decl.package_level:
                    key = f"global:{u.name}"
                else:
                    continue
                if key in reported:
                    continue
                partners = [w for k, w in arm_writes(fn.receiver.type_name) if k == key]
                if not partners:
                    continue
                reported.add(key)
                out.append(
                    Finding(
                        "GR09",
                        _span(u),
                        Low,
                        f"goroutine writes {normalize(u.expr.text)} which a select case in another method "
                        f"also writes; the channel handshake does not order these writes",
                        fn.name,
                        tuple(_span(w) for w in partners),
                    )
                )
    return out


# -- GR10 ---------------------------------------------------------------------


def _access_key(ctx: Context, fn: FunctionInfo, expr: SyntaxNode) -> tuple[str, str, object] | None:
    """(key, label, anchor node) for an identifier or ``x.field`` access."""
    if expr.kind is K.Ident:
        d = ctx.decl_of(fn, expr)
        return (f"var:{id(d)}", d.name, expr) if d is not None else None
    if expr.kind is K.SelectorExpr:
        base = expr.get("x")
        if base.kind is not K.Ident:
            return None
        d = ctx.decl_of(fn, base)
        if d is None:
            return None
        if d.kind == "receiver" and fn.receiver is not None:
            type_name = fn.receiver.type_name
        elif d.type_text:
            type_name = normalize(d.type_text).lstrip("*&")
        else:
            return None
        if type_name not in ctx.model.structs:
            return None
        return f"field:{type_name}.{expr.value}", f"{type_name}.{expr.value}", expr
    return None


def check_gr10_partial_atomic(tree: SyntaxTree, ctx: Context | None = None) -> list[Finding]:
    ctx = _as_context(tree, ctx)
    atomic: dict[str, list[Span]] = {}
    atomic_nodes: set[int] = set()
    plain: dict[str, list[tuple[Span, str, str]]] = {}
    labels: dict[str, str] = {}
    fns = [fn for fn in ctx.model.functions if fn.body is not None]
    for fn in fns:
        for node in fn.body.walk():
            if node.kind is not K.CallExpr:
                continue
            fun, args = node.get("fun"), node.all("arg")
            if not (fun.kind is K.SelectorExpr and fun.get("x").text == "atomic" and _ATOMIC_FUNC.match(fun.value or "")):
                continue
            if not args or args[0].form != "UnaryExpr" or args[0].value != "&":
                continue
            target = args[0].children[0]
            key = _access_key(ctx, fn, target)
            if key is not None:
                atomic.setdefault(key[0], []).append(node.span)
                atomic_nodes.add(id(target))
                labels[key[0]] = key[1]
    if not atomic:
        return []
    for fn in fns:
        for node in fn.body.walk():
            if id(node) in atomic_nodes or node.kind not in (K.Ident, K.SelectorExpr):
                continue
            if node.kind is K.Ident and (node.form != "Ident" or node.role == "sel"):
                continue
            key = _access_key(ctx, fn, node)
            if key is not None and key[0] in atomic:
                plain.setdefault(key[0], []).append((node.span, fn.name, key[1]))
    out = []
    for key, sites in plain.items():
        sites.sort(key=lambda s: s[0].start.byte_offset)
        span, func, label = sites[0]
        out.append(
            Finding(
                "GR10",
                span,
                Medium,
                f"{label} is updated with sync/atomic elsewhere but accessed plainly here; "
                f"use atomic loads and stores for every access",
                func,
                tuple(atomic[key]),
            )
        )
    return out


# -- GR11 ---------------------------------------------------------------------


def _mutating_methods(model: FileModel) -> set[str]:
    """Names of same-file methods that write through their receiver."""
    names = set()
    for m in model.functions:
        if m.receiver is None or m.body is None:
            continue
        if any(u.is_write and u.decl is not None and u.decl.kind == "receiver" and u.target != "var" for u in m.analysis.uses):
            names.add(m.short_name)
    return names


def check_gr11_parallel_subtest_capture(tree: SyntaxTree, ctx: Context | None = None) -> list[Finding]:
    ctx = _as_context(tree, ctx)
    if not tree.is_test_file:
        return []
    mutating = None
    out = []
    for fn in ctx.model.functions:
        if not fn.is_test:
            continue
        a = fn.analysis
        for c in a.closures:
            how, call = a.launch(c)
            if how != "arg" or _method_call(call, "Run") is None:
                continue
            loops = [l for l in a.enclosing_loops(call) if l.kind is K.ForRange]
            if not loops:
                continue
            parallel = [n for n in _closure_walk(c.get("body")) if _method_call(n, "Parallel", 0) is not None]
            if not parallel:
                continue
            caps = a.captures(c)
            loop_decls = _loop_decls(a, loops)
            hits = [cap for cap in caps if any(cap.decl is d for d in loop_decls)]
            if hits:
                out.append(
                    Finding(
                        "GR11",
                        hits[0].first_use,
                        High,
                        f"parallel subtest captures loop variable {_names(h.decl for h in hits)}; "
                        f"copy it inside the loop before calling Run",
                        fn.name,
                        tuple(p.span for p in parallel),
                    )
                )
                continue
            if mutating is None:
                mutating = _mutating_methods(ctx.model)
            evidence: list[tuple[Span, str]] = []
            for u in a.uses:
                if not u.inside(c) or u.decl is None or u.decl.package_level or c.span.contains(u.decl.ident.span):
                    continue
                if u.is_write:
                    evidence.append((_span(u), u.name))
                    continue
                parent = a.parent_of(u.ident)
                if parent is not None and parent.kind is K.SelectorExpr and parent.value in mutating:
                    gp = a.parent_of(parent)
                    if gp is not None and gp.kind is K.CallExpr and parent.role == "fun":
                        evidence.append((gp.span, u.name))
            if evidence:
                evidence.sort(key=lambda e: e[0].start.byte_offset)
                out.append(
                    Finding(
                        "GR11",
                        evidence[0][0],
                        Medium,
                        f"parallel subtest mutates {', '.join(sorted({n for _, n in evidence}))} "
                        f"shared with sibling subtests",
                        fn.name,
                        tuple(p.span for p in parallel),
                    )
                )
    return out


CHECKS: dict[str, Callable[[SyntaxTree, Context | None], list[Finding]]] = {
    "GR01": check_gr01_loop_capture,
    "GR02": check_gr02_err_capture,
    "GR03": check_gr03_named_return_capture,
    "GR04": check_gr04_slice_race,
    "GR05": check_gr05_map_race,
    "GR06": check_gr06_mutex_by_value,
    "GR07": check_gr07_waitgroup_add,
    "GR08": check_gr08_write_under_rlock,
    "GR09": check_gr09_channel_shared_mix,
    "GR10": check_gr10_partial_atomic,
    "GR11": check_gr11_parallel_subtest_capture,
}
