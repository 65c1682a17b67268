"""Name resolution, closure capture sets and name-based type facts.

Resolution is block scoped and per file. Types are never checked; a
declaration's type is taken from its written type or from the shape of its
initializer (composite literal, ``make``/``new``, a call to a function declared
in the same file), and propagated through plain same-function copies.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator

from .nodes import NodeKind, SyntaxNode, SyntaxTree
from .tokens import Span

K = NodeKind

MUTEX_TYPES = frozenset({"sync.Mutex", "sync.RWMutex"})
_ERR_NAME = re.compile(r"^(err|err[A-Z0-9_]\w*|\w*Err(or)?)$")
_STATEMENT_ROLES = frozenset({"stmt", "init", "post", "comm", "assign"})


def normalize(text: str) -> str:
    return re.sub(r"\s+", "", text)


def is_mutex_type(type_text: str | None) -> bool:
    return type_text is not None and normalize(type_text) in MUTEX_TYPES


def is_waitgroup_type(type_text: str | None) -> bool:
    return type_text is not None and normalize(type_text).lstrip("*") == "sync.WaitGroup"


def is_slice_type(type_text: str | None) -> bool:
    return type_text is not None and normalize(type_text).startswith("[]")


def is_map_type(type_text: str | None) -> bool:
    return type_text is not None and normalize(type_text).startswith("map[")


@dataclass(frozen=True)
class Receiver:
    name: str | None
    type_name: str
    pointer: bool

    @property
    def is_value(self) -> bool:
        return not self.pointer


@dataclass(eq=False)
class Declaration:
    name: str
    kind: str  # var, param, result, receiver, const, type
    ident: SyntaxNode
    scope: SyntaxNode
    type_text: str | None = None
    init: SyntaxNode | None = None
    closure: SyntaxNode | None = None  # innermost closure holding the declaration
    package_level: bool = False
    privatized: bool = False  # `x := x` copy of an outer variable

    @property
    def scope_span(self) -> Span:
        return self.scope.span

    @property
    def is_error(self) -> bool:
        if self.type_text is not None:
            return normalize(self.type_text) == "error"
        return bool(_ERR_NAME.match(self.name))

    def __repr__(self) -> str:
        return f"<{self.kind} {self.name} @{self.ident.span.start.line}>"


@dataclass(eq=False)
class Use:
    """One occurrence of an identifier in expression position."""

    ident: SyntaxNode
    decl: Declaration | None
    access: str  # read | write | addr
    target: str  # var | index | field | deref | call
    expr: SyntaxNode  # the accessed expression (LHS or the identifier itself)
    stmt: SyntaxNode | None
    closures: tuple[SyntaxNode, ...]  # outermost first

    @property
    def name(self) -> str:
        return self.ident.value or ""

    @property
    def is_write(self) -> bool:
        return self.access == "write"

    @property
    def closure(self) -> SyntaxNode | None:
        return self.closures[-1] if self.closures else None

    def inside(self, closure: SyntaxNode) -> bool:
        return any(c is closure for c in self.closures)


@dataclass
class FunctionInfo:
    name: str  # qualified symbol, e.g. pkg.(*T).Method
    short_name: str
    receiver: Receiver | None
    params: list[tuple[str, str]]
    named_results: list[tuple[str, str]]
    result_types: list[str]
    body: SyntaxNode | None
    node: SyntaxNode
    is_test: bool
    model: "FileModel" = field(repr=False, compare=False, default=None)

    @property
    def analysis(self) -> "FunctionAnalysis":
        return self.model.analysis(self)


@dataclass(frozen=True)
class Capture:
    name: str
    decl_scope: Span
    first_use: Span
    decl: Declaration = field(compare=False, hash=False, repr=False)


@dataclass(frozen=True)
class CaptureSet:
    entries: tuple[Capture, ...] = ()

    def names(self) -> set[str]:
        return {c.name for c in self.entries}

    def get(self, name: str) -> Capture | None:
        for c in self.entries:
            if c.name == name:
                return c
        return None

    def __contains__(self, name: str) -> bool:
        return self.get(name) is not None

    def __iter__(self) -> Iterator[Capture]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass
class StructInfo:
    name: str
    fields: list[tuple[str, str, bool]]  # name, type text, embedded

    def has_mutex(self) -> bool:
        return any(is_mutex_type(t) for _, t, _ in self.fields)


def _type_name_of(node: SyntaxNode) -> tuple[str, bool]:
    """Base type name and pointer-ness of a receiver type expression."""
    pointer = False
    while node.form in ("PointerType", "ParenType", "IndexExpr"):
        if node.form == "PointerType":
            pointer = True
        node = node.children[0]
    return node.text, pointer


def _field_names(fld: SyntaxNode) -> list[str]:
    return [c.value for c in fld.all("name") if c.value]


def _field_type(fld: SyntaxNode) -> str:
    typ = fld.get("type")
    return typ.text if typ is not None else ""


class FileModel:
    """File-wide facts shared by every check: functions, structs, globals."""

    def __init__(self, tree: SyntaxTree):
        self.tree = tree
        self.functions: list[FunctionInfo] = []
        self.by_name: dict[str, FunctionInfo] = {}
        self.structs: dict[str, StructInfo] = {}
        self.globals: dict[str, Declaration] = {}
        self._analyses: dict[int, FunctionAnalysis] = {}
        self._collect()

    def _collect(self):
        root = self.tree.root
        for decl in root.all("decl"):
            if decl.kind in (K.FuncDecl, K.MethodDecl):
                info = self._function_info(decl)
                self.functions.append(info)
                if info.receiver is None:
                    self.by_name[info.short_name] = info
            elif decl.form == "TypeDecl":
                for spec in decl.all("spec"):
                    typ = spec.get("type")
                    if typ is not None and typ.kind is K.StructType:
                        self.structs[spec.value] = self._struct_info(spec.value, typ)
            elif decl.form in ("VarDecl", "ConstDecl"):
                for spec in decl.all("spec"):
                    typ = spec.get("type")
                    values = spec.all("value")
                    for i, name in enumerate(spec.all("name")):
                        init = values[i] if i < len(values) else None
                        self.globals[name.value] = Declaration(
                            name=name.value,
                            kind="var" if decl.form == "VarDecl" else "const",
                            ident=name,
                            scope=root,
                            type_text=typ.text if typ is not None else None,
                            init=init,
                            package_level=True,
                        )
        for d in self.globals.values():
            if d.type_text is None and d.init is not None:
                d.type_text = infer_type(d.init, self, {})

    @staticmethod
    def _struct_info(name: str, node: SyntaxNode) -> StructInfo:
        fields = []
        for fld in node.all("field"):
            type_text = _field_type(fld)
            names = _field_names(fld)
            if names:
                fields.extend((n, type_text, False) for n in names)
            else:
                base = type_text.lstrip("*").split(".")[-1]
                fields.append((base, type_text, True))
        return StructInfo(name, fields)

    def _function_info(self, decl: SyntaxNode) -> FunctionInfo:
        pkg = self.tree.package
        receiver = None
        recv = decl.get("recv")
        if recv is not None and recv.children:
            fld = recv.children[0]
            type_name, pointer = _type_name_of(fld.get("type"))
            names = _field_names(fld)
            receiver = Receiver(names[0] if names else None, type_name, pointer)
        params = []
        params_node = decl.get("params")
        for fld in params_node.all("param") if params_node is not None else []:
            for n in _field_names(fld) or ["_"]:
                params.append((n, _field_type(fld)))
        named_results, result_types = [], []
        results = decl.get("results")
        for fld in results.all("result") if results is not None else []:
            names = _field_names(fld)
            type_text = _field_type(fld)
            for n in names:
                named_results.append((n, type_text))
            result_types.extend([type_text] * max(1, len(names)))
        short = decl.value or ""
        if receiver is None:
            qualified = f"{pkg}.{short}"
        elif receiver.pointer:
            qualified = f"{pkg}.(*{receiver.type_name}).{short}"
        else:
            qualified = f"{pkg}.{receiver.type_name}.{short}"
        return FunctionInfo(
            name=qualified,
            short_name=short,
            receiver=receiver,
            params=params,
            named_results=named_results,
            result_types=result_types,
            body=decl.get("body"),
            node=decl,
            is_test=short.startswith("Test") and self.tree.is_test_file,
            model=self,
        )

    def analysis(self, fn: FunctionInfo) -> "FunctionAnalysis":
        key = id(fn.node)
        if key not in self._analyses:
            self._analyses[key] = FunctionAnalysis(fn, self)
        return self._analyses[key]

    def function_for(self, node: SyntaxNode) -> FunctionInfo | None:
        for fn in self.functions:
            if fn.node.span.contains(node.span):
                return fn
        return None

    def methods_of(self, type_name: str) -> list[FunctionInfo]:
        return [f for f in self.functions if f.receiver and f.receiver.type_name == type_name]


def infer_type(expr: SyntaxNode | None, model: FileModel | None, env: dict[str, Declaration], index: int = 0) -> str | None:
    """Best-effort type text of an initializer expression."""
    if expr is None:
        return None
    if expr.kind is K.CompositeLit:
        typ = expr.get("type")
        return typ.text if typ is not None else None
    if expr.form == "UnaryExpr" and expr.value == "&":
        inner = infer_type(expr.children[0], model, env)
        return f"*{inner}" if inner else None
    if expr.form == "ParenExpr":
        return infer_type(expr.children[0], model, env, index)
    if expr.form == "BasicLit":
        v = expr.value or ""
        if v.startswith(('"', "`")):
            return "string"
        if v.startswith("'"):
            return "rune"
        return "float64" if re.search(r"[.eE]", v) and not v.lower().startswith("0x") else "int"
    if expr.kind is K.Ident:
        d = env.get(expr.value or "")
        if d is None and model is not None:
            d = model.globals.get(expr.value or "")
        return d.type_text if d is not None else None
    if expr.kind is K.CallExpr:
        fun = expr.get("fun")
        args = expr.all("arg")
        if fun.kind is K.Ident:
            if fun.value == "make" and args:
                return args[0].text
            if fun.value == "new" and args:
                return f"*{args[0].text}"
            if fun.value == "append" and args:
                return infer_type(args[0], model, env)
            if model is not None and fun.value in model.by_name:
                results = model.by_name[fun.value].result_types
                if index < len(results):
                    return results[index]
        if fun.form in ("SliceType", "ArrayType", "MapType", "ParenExpr"):
            return fun.text
        if fun.kind is K.SelectorExpr and fun.children[0].kind is K.Ident:
            # pkg.New-style constructors are opaque; errors.New is the one we know.
            if fun.text in ("errors.New", "fmt.Errorf"):
                return "error"
    return None


class FunctionAnalysis:
    """Resolved uses and declarations for one top-level function."""

    def __init__(self, fn: FunctionInfo, model: FileModel):
        self.fn = fn
        self.model = model
        self.decls: list[Declaration] = []
        self.uses: list[Use] = []
        self.closures: list[SyntaxNode] = []
        self.parent: dict[int, SyntaxNode] = {}
        self._scopes: list[tuple[SyntaxNode, dict[str, Declaration]]] = []
        self._closure_stack: list[SyntaxNode] = []
        self._stmt: SyntaxNode | None = None
        self._index_parents(fn.node)
        self._resolve()

    # -- structure -------------------------------------------------------

    def _index_parents(self, root: SyntaxNode):
        stack = [root]
        while stack:
            node = stack.pop()
            for child in node.children:
                self.parent[id(child)] = node
                stack.append(child)

    def parent_of(self, node: SyntaxNode) -> SyntaxNode | None:
        return self.parent.get(id(node))

    def ancestors(self, node: SyntaxNode) -> Iterator[SyntaxNode]:
        p = self.parent_of(node)
        while p is not None:
            yield p
            p = self.parent_of(p)

    def enclosing_closure(self, node: SyntaxNode) -> SyntaxNode | None:
        for a in self.ancestors(node):
            if a.kind is K.ClosureLit:
                return a
        return None

    def enclosing_loops(self, node: SyntaxNode, stop: SyntaxNode | None = None) -> list[SyntaxNode]:
        """Loops around ``node`` up to (not crossing) ``stop`` or a closure boundary."""
        loops = []
        for a in self.ancestors(node):
            if a is stop or a.kind is K.ClosureLit:
                break
            if a.kind in (K.ForRange, K.ForClause):
                loops.append(a)
        return loops

    def statement_of(self, node: SyntaxNode) -> SyntaxNode:
        """Innermost statement (node in a statement slot) containing ``node``."""
        cur = node
        while cur is not None:
            if cur.role in _STATEMENT_ROLES:
                return cur
            cur = self.parent_of(cur)
        return node

    def launch(self, closure: SyntaxNode) -> tuple[str, SyntaxNode | None]:
        """How a closure literal is used: ('go'|'defer'|'call'|'arg'|'bound'|'other', site)."""
        p = self.parent_of(closure)
        if p is None:
            return "other", None
        if p.kind is K.CallExpr and closure.role == "fun":
            gp = self.parent_of(p)
            if gp is not None and gp.kind is K.GoStmt:
                return "go", gp
            if gp is not None and gp.kind is K.DeferStmt:
                return "defer", gp
            return "call", p
        if p.kind is K.CallExpr and closure.role == "arg":
            return "arg", p
        if p.kind in (K.ShortVarDecl, K.Assign) or p.form == "ValueSpec":
            return "bound", p
        return "other", p

    def go_closures(self) -> list[tuple[SyntaxNode, SyntaxNode]]:
        """(closure, go statement) for every closure launched with ``go``."""
        out = []
        for c in self.closures:
            how, site = self.launch(c)
            if how == "go":
                out.append((c, site))
        return out

    def uses_of(self, decl: Declaration) -> list[Use]:
        return [u for u in self.uses if u.decl is decl]

    def captures(self, closure: SyntaxNode) -> CaptureSet:
        seen: dict[int, Capture] = {}
        for use in self.uses:
            d = use.decl
            if d is None or d.package_level or d.privatized or not use.inside(closure):
                continue
            if closure.span.contains(d.ident.span):
                continue
            if id(d) not in seen:
                seen[id(d)] = Capture(d.name, d.scope.span, use.ident.span, d)
        entries = sorted(seen.values(), key=lambda c: (c.first_use.start.byte_offset, c.name))
        return CaptureSet(tuple(entries))

    # -- resolution ------------------------------------------------------

    def _lookup(self, name: str) -> Declaration | None:
        for _, names in reversed(self._scopes):
            if name in names:
                return names[name]
        return self.model.globals.get(name)

    def _env(self) -> dict[str, Declaration]:
        env: dict[str, Declaration] = {}
        for _, names in self._scopes:
            env.update(names)
        return env

    def _push(self, node: SyntaxNode):
        self._scopes.append((node, {}))

    def _pop(self):
        self._scopes.pop()

    def _declare(self, ident: SyntaxNode, kind: str, type_text: str | None = None, init: SyntaxNode | None = None) -> Declaration | None:
        name = ident.value or ""
        if name == "_" or not name:
            return None
        scope_node, names = self._scopes[-1]
        d = Declaration(
            name=name,
            kind=kind,
            ident=ident,
            scope=scope_node,
            type_text=type_text,
            init=init,
            closure=self._closure_stack[-1] if self._closure_stack else None,
        )
        names[name] = d
        self.decls.append(d)
        return d

    def _declare_fields(self, fields_node: SyntaxNode | None, kind: str, role: str):
        if fields_node is None:
            return
        for fld in fields_node.all(role):
            typ = fld.get("type")
            for name in fld.all("name"):
                self._declare(name, kind, typ.text if typ is not None else None)

    def _resolve(self):
        fn = self.fn
        self._push(fn.node)
        recv = fn.node.get("recv")
        if recv is not None:
            self._declare_fields(recv, "receiver", "param")
        self._declare_fields(fn.node.get("params"), "param", "param")
        self._declare_fields(fn.node.get("results"), "result", "result")
        if fn.body is not None:
            for stmt in fn.body.children:
                self._stmt_node(stmt)
        self._pop()

    def _stmt_list(self, stmts):
        for s in stmts:
            self._stmt_node(s)

    def _stmt_node(self, s: SyntaxNode | None):
        if s is None:
            return
        saved = self._stmt
        self._stmt = s
        try:
            self._dispatch_stmt(s)
        finally:
            self._stmt = saved

    def _dispatch_stmt(self, s: SyntaxNode):
        k, form = s.kind, s.form
        if k is K.Block:
            self._push(s)
            self._stmt_list(s.children)
            self._pop()
        elif k is K.ShortVarDecl:
            self._short_var_decl(s)
        elif k is K.Assign:
            for rhs in s.all("rhs"):
                self._expr(rhs)
            for lhs in s.all("lhs"):
                self._lvalue(lhs)
        elif form == "IncDec":
            self._lvalue(s.children[0])
        elif form in ("VarDecl", "ConstDecl"):
            for spec in s.all("spec"):
                self._value_spec(spec, "var" if form == "VarDecl" else "const")
        elif form == "TypeDecl":
            for spec in s.all("spec"):
                self._declare(spec.get("name"), "type", spec.get("type").text)
        elif k is K.IfStmt:
            self._push(s)
            self._stmt_node(s.get("init"))
            self._expr(s.get("cond"))
            self._stmt_node(s.get("body"))
            self._stmt_node(s.get("else"))
            self._pop()
        elif k is K.ForClause:
            self._push(s)
            self._stmt_node(s.get("init"))
            self._expr(s.get("cond"))
            self._stmt_node(s.get("post"))
            self._stmt_node(s.get("body"))
            self._pop()
        elif k is K.ForRange:
            self._for_range(s)
        elif form in ("SwitchStmt", "TypeSwitchStmt"):
            self._switch(s)
        elif k is K.SelectStmt:
            for clause in s.all("clause"):
                self._push(clause)
                comm = clause.get("comm")
                if comm is not None:
                    self._stmt_node(comm)
                self._stmt_list(clause.all("stmt"))
                self._pop()
        elif form == "LabeledStmt":
            self._stmt_node(s.get("stmt"))
        elif k in (K.GoStmt, K.DeferStmt):
            self._expr(s.get("call"))
        elif k is K.ReturnStmt:
            for r in s.all("result"):
                self._expr(r)
        elif k is K.ChanSend:
            self._expr(s.get("ch"))
            self._expr(s.get("value"))
        elif form == "ExprStmt":
            self._expr(s.children[0])
        elif form == "BranchStmt" or k is K.NakedReturnStmt:
            pass
        else:
            for c in s.children:
                self._expr(c)

    def _short_var_decl(self, s: SyntaxNode):
        rhs = s.all("rhs")
        for r in rhs:
            self._expr(r)
        env = self._env()
        _, current = self._scopes[-1]
        for i, lhs in enumerate(s.all("lhs")):
            if lhs.kind is not K.Ident:
                self._lvalue(lhs)
                continue
            name = lhs.value or ""
            if name in current:
                self._record(lhs, current[name], "write", "var", lhs)
                continue
            if len(rhs) == len(s.all("lhs")):
                init, type_text = rhs[i], infer_type(rhs[i], self.model, env)
            elif rhs:
                init, type_text = rhs[0], infer_type(rhs[0], self.model, env, index=i)
            else:
                init, type_text = None, None
            d = self._declare(lhs, "var", type_text, init)
            if d is not None and init is not None and init.kind is K.Ident and init.value == name:
                outer = env.get(name) or self.model.globals.get(name)
                if outer is not None:
                    d.privatized = True
                    d.type_text = d.type_text or outer.type_text

    def _value_spec(self, spec: SyntaxNode, kind: str):
        values = spec.all("value")
        for v in values:
            self._expr(v)
        typ = spec.get("type")
        env = self._env()
        names = spec.all("name")
        for i, name in enumerate(names):
            init = values[i] if len(values) == len(names) else (values[0] if values else None)
            if typ is not None:
                type_text = typ.text
            else:
                type_text = infer_type(init, self.model, env, index=i if len(values) != len(names) else 0)
            self._declare(name, kind, type_text, init)

    def _for_range(self, s: SyntaxNode):
        x = s.get("x")
        self._expr(x)
        self._push(s)
        key, value = s.get("key"), s.get("value")
        if s.value == ":=":
            coll = infer_type(x, self.model, self._env()) or ""
            coll = normalize(coll)
            key_type = value_type = None
            if coll.startswith("[]"):
                key_type, value_type = "int", coll[2:]
            elif coll.startswith("map["):
                depth, i = 0, 3
                for i, ch in enumerate(coll[3:], start=3):
                    depth += ch == "["
                    depth -= ch == "]"
                    if depth == 0:
                        break
                key_type, value_type = coll[4:i], coll[i + 1:]
            if key is not None:
                self._declare(key, "var", key_type, x)
            if value is not None:
                self._declare(value, "var", value_type, x)
        else:
            for v in (key, value):
                if v is not None:
                    self._lvalue(v)
        self._stmt_node(s.get("body"))
        self._pop()

    def _switch(self, s: SyntaxNode):
        self._push(s)
        self._stmt_node(s.get("init"))
        tag = s.get("tag")
        if tag is not None:
            self._expr(tag)
        assign = s.get("assign")
        binding = None
        if assign is not None:
            if assign.kind is K.ShortVarDecl:
                binding = assign.all("lhs")[0]
                self._expr(assign.all("rhs")[0])
            else:
                self._expr(assign.children[0])
        for clause in s.all("clause"):
            self._push(clause)
            if binding is not None:
                types = clause.all("expr")
                type_text = types[0].text if len(types) == 1 and types[0].text != "nil" else None
                self._declare(binding, "var", type_text)
            if assign is None:
                for e in clause.all("expr"):
                    self._expr(e)
            self._stmt_list(clause.all("stmt"))
            self._pop()
        self._pop()

    # -- expressions -----------------------------------------------------

    def _record(self, ident: SyntaxNode, decl: Declaration | None, access: str, target: str, expr: SyntaxNode):
        self.uses.append(
            Use(ident, decl, access, target, expr, self._stmt, tuple(self._closure_stack))
        )

    def _lvalue(self, e: SyntaxNode):
        """Record an assignment target: the base identifier is written."""
        target = "var"
        cur = e
        while True:
            if cur.form == "ParenExpr":
                cur = cur.children[0]
                continue
            if cur.kind is K.IndexExpr:
                target = "index" if target == "var" else target
                for idx in cur.all("index"):
                    self._expr(idx)
                cur = cur.get("x")
                continue
            if cur.kind is K.SelectorExpr:
                target = "field" if target == "var" else target
                cur = cur.get("x")
                continue
            if cur.form == "UnaryExpr" and cur.value == "*":
                target = "deref" if target == "var" else target
                cur = cur.children[0]
                continue
            break
        if cur.kind is K.Ident:
            if cur.value != "_":
                self._record(cur, self._lookup(cur.value or ""), "write", target, e)
        else:
            self._expr(cur)

    def _expr(self, e: SyntaxNode | None):
        if e is None:
            return
        k, form = e.kind, e.form
        if k is K.Ident:
            if form == "Ident" and e.value not in ("_", None):
                self._record(e, self._lookup(e.value), "read", "var", e)
            return
        if form == "TypeName" or k is K.Field or form in ("InterfaceType", "TypeParams"):
            return
        if k is K.ClosureLit:
            self.closures.append(e)
            self._closure_stack.append(e)
            self._push(e)
            self._declare_fields(e.get("params"), "param", "param")
            self._declare_fields(e.get("results"), "result", "result")
            body = e.get("body")
            saved = self._stmt
            self._stmt = None
            for stmt in body.children:
                self._stmt_node(stmt)
            self._stmt = saved
            self._pop()
            self._closure_stack.pop()
            return
        if k is K.SelectorExpr:
            self._expr(e.get("x"))
            return
        if k is K.CompositeLit:
            for elt in e.all("elt"):
                if elt.form == "KeyValue":
                    key = elt.get("key")
                    if key.kind is not K.Ident:
                        self._expr(key)
                    self._expr(elt.get("value"))
                else:
                    self._expr(elt)
            return
        if form == "UnaryExpr" and e.value == "&":
            inner = e.children[0]
            base = inner
            while base.kind in (K.SelectorExpr, K.IndexExpr) or base.form == "ParenExpr":
                base = base.children[0]
            if base.kind is K.Ident and base.form == "Ident":
                self._record(base, self._lookup(base.value or ""), "addr", "var", inner)
                if base is not inner:
                    for c in inner.walk():
                        if c is not base and c.role == "index":
                            self._expr(c)
                return
            self._expr(inner)
            return
        if k is K.CallExpr:
            fun = e.get("fun")
            args = e.all("arg")
            if fun.kind is K.Ident and fun.value == "delete" and self._lookup("delete") is None and args:
                self._lvalue_index(args[0])
                for a in args[1:]:
                    self._expr(a)
                return
            self._expr(fun)
            for a in args:
                self._expr(a)
            return
        for c in e.children:
            self._expr(c)

    def _lvalue_index(self, m: SyntaxNode):
        base = m
        while base.kind is K.SelectorExpr or base.form == "ParenExpr":
            base = base.children[0]
        if base.kind is K.Ident:
            self._record(base, self._lookup(base.value or ""), "write", "index", m)
        else:
            self._expr(m)


def build_model(tree: SyntaxTree) -> FileModel:
    return FileModel(tree)


def function_infos(tree: SyntaxTree) -> list[FunctionInfo]:
    return build_model(tree).functions


def compute_captures(closure: SyntaxNode, enclosing: FunctionInfo) -> CaptureSet:
    """Free variables of ``closure`` that resolve to declarations inside ``enclosing``."""
    if closure.kind is not K.ClosureLit:
        raise ValueError(f"expected a closure literal, got {closure.form}")
    if enclosing.body is None or not enclosing.body.span.contains(closure.span):
        raise ValueError("closure is not inside the enclosing function body")
    analysis = enclosing.analysis
    if not any(c is closure for c in analysis.closures):
        # structurally equal node from a re-parse: match by span
        for c in analysis.closures:
            if c.span == closure.span:
                closure = c
                break
    return analysis.captures(closure)
