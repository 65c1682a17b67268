"""Recursive-descent parser for Go source.

The full statement and expression grammar is recognized; constructs the
checks care about get a dedicated :class:`NodeKind`, the rest are ``Other``
nodes whose ``form`` names the construct. Interface bodies and type-parameter
lists are skipped as balanced token runs.
"""

from __future__ import annotations

from .nodes import NodeKind, SyntaxNode, SyntaxTree
from .tokens import ParseError, SourceMap, Token, tokenize

K = NodeKind

_BINARY_PREC = {
    "||": 1,
    "&&": 2,
    "==": 3, "!=": 3, "<": 3, "<=": 3, ">": 3, ">=": 3,
    "+": 4, "-": 4, "|": 4, "^": 4,
    "*": 5, "/": 5, "%": 5, "<<": 5, ">>": 5, "&": 5, "&^": 5,
}
_UNARY_OPS = {"+", "-", "!", "^", "*", "&", "<-", "~"}
_ASSIGN_OPS = {"=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", "&^="}
_TYPE_START_KEYWORDS = {"map", "chan", "func", "struct", "interface"}
_LITERAL_KINDS = {"int", "float", "imag", "char", "string"}


class _RangeClause:
    """Intermediate result of a for-header that turned out to be a range clause."""

    def __init__(self, start: int, lhs: list[SyntaxNode], op: str | None, expr: SyntaxNode):
        self.start = start
        self.lhs = lhs
        self.op = op
        self.expr = expr


class Parser:
    def __init__(self, text: str, path: str):
        self.source = SourceMap(text, path)
        self.text = text
        self.tokens, self.comments = tokenize(self.source)
        self.pos = 0
        self.prev_end = 0
        self.expr_lev = 0

    # -- token plumbing -------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, n: int = 1) -> Token:
        idx = min(self.pos + n, len(self.tokens) - 1)
        return self.tokens[idx]

    def at(self, value: str) -> bool:
        t = self.tok
        if value == ";":
            return t.kind == "semi"
        return t.kind in ("op", "keyword") and t.value == value

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "semi":
            self.prev_end = t.end
        if t.kind != "eof":
            self.pos += 1
        return t

    def error(self, message: str, token: Token | None = None):
        t = token or self.tok
        shown = "newline" if t.kind == "semi" and t.value == "\n" else (t.value or "EOF")
        raise ParseError(f"{message} (found {shown!r})", self.source.position(t.start))

    def expect(self, value: str) -> Token:
        if not self.at(value):
            self.error(f"expected {value!r}")
        return self.advance()

    def expect_ident(self) -> Token:
        if self.tok.kind != "ident":
            self.error("expected identifier")
        return self.advance()

    def skip_semi(self):
        if self.tok.kind == "semi":
            self.advance()
        elif not (self.at(")") or self.at("}") or self.tok.kind == "eof"):
            self.error("expected ';' or newline")

    def node(
        self,
        kind: NodeKind,
        start: int,
        children: list[SyntaxNode] | None = None,
        *,
        form: str = "",
        value: str | None = None,
        end: int | None = None,
    ) -> SyntaxNode:
        end = self.prev_end if end is None else end
        return SyntaxNode(
            kind=kind,
            span=self.source.span(start, end),
            text=self.text[start:end],
            children=[c for c in (children or []) if c is not None],
            form=form,
            value=value,
        )

    @staticmethod
    def role(node: SyntaxNode | None, role: str) -> SyntaxNode | None:
        if node is not None:
            node.role = role
        return node

    def ident(self, form: str = "Ident") -> SyntaxNode:
        t = self.expect_ident()
        return self.node(K.Ident, t.start, form=form, value=t.value, end=t.end)

    # -- file level -----------------------------------------------------

    def parse_file(self) -> SyntaxTree:
        while self.tok.kind == "semi":
            self.advance()
        start = self.tok.start
        if not self.at("package"):
            self.error("expected 'package' clause")
        self.advance()
        name = self.role(self.ident(), "name")
        pkg = self.node(K.PackageClause, start, [name], value=name.value)
        pkg.role = "package"
        items = [pkg]
        self.skip_semi()
        while self.at("import"):
            items.extend(self.parse_import_decl())
            self.skip_semi()
        while self.tok.kind != "eof":
            if self.tok.kind == "semi":
                self.advance()
                continue
            if self.at("func"):
                decl = self.parse_func_decl()
            elif self.at("var") or self.at("const") or self.at("type"):
                decl = self.parse_gen_decl()
            elif self.at("import"):
                self.error("imports must appear before other declarations")
            else:
                self.error("expected declaration")
            items.append(self.role(decl, "decl"))
            self.skip_semi()
        root = self.node(K.Other, 0, items, form="File", end=len(self.text))
        return SyntaxTree(self.source.path, self.text, root, pkg.value or "", self.comments)

    def parse_import_decl(self) -> list[SyntaxNode]:
        self.advance()
        specs = []
        if self.at("("):
            self.advance()
            while not self.at(")"):
                if self.tok.kind == "semi":
                    self.advance()
                    continue
                specs.append(self.parse_import_spec())
                self.skip_semi()
            self.expect(")")
        else:
            specs.append(self.parse_import_spec())
        return specs

    def parse_import_spec(self) -> SyntaxNode:
        start = self.tok.start
        children = []
        if self.tok.kind == "ident":
            children.append(self.role(self.ident(), "name"))
        elif self.at("."):
            t = self.advance()
            children.append(self.node(K.Ident, t.start, form="Ident", value=".", end=t.end))
            children[-1].role = "name"
        if self.tok.kind != "string":
            self.error("expected import path")
        path = self.advance()
        node = self.node(K.Import, start, children, value=path.value.strip('"`'))
        node.role = "import"
        return node

    def parse_func_decl(self) -> SyntaxNode:
        start = self.advance().start
        children = []
        kind = K.FuncDecl
        if self.at("("):
            recv = self.parse_params("Receiver", "param")
            children.append(self.role(recv, "recv"))
            kind = K.MethodDecl
        name = self.role(self.ident(), "name")
        children.append(name)
        if self.at("["):
            children.append(self.role(self.skip_balanced("[", "]", "TypeParams"), "tparams"))
        params, results = self.parse_signature()
        children.append(params)
        if results is not None:
            children.append(results)
        if self.at("{"):
            saved, self.expr_lev = self.expr_lev, 0
            children.append(self.role(self.parse_block(), "body"))
            self.expr_lev = saved
        return self.node(kind, start, children, value=name.value)

    def parse_signature(self) -> tuple[SyntaxNode, SyntaxNode | None]:
        params = self.role(self.parse_params("Params", "param"), "params")
        results = None
        if self.at("("):
            results = self.parse_params("Results", "result")
        elif self.starts_type():
            start = self.tok.start
            typ = self.role(self.parse_type(), "type")
            fld = self.node(K.Field, start, [typ])
            fld.role = "result"
            results = self.node(K.Other, start, [fld], form="Results")
        return params, self.role(results, "results")

    def starts_type(self) -> bool:
        t = self.tok
        if t.kind == "ident":
            return True
        if t.kind == "keyword":
            return t.value in _TYPE_START_KEYWORDS
        return t.kind == "op" and t.value in ("*", "[", "(", "<-")

    def parse_params(self, form: str, item_role: str) -> SyntaxNode:
        start = self.expect("(").start
        items: list[tuple[SyntaxNode | None, SyntaxNode | None, int, int]] = []
        saved, self.expr_lev = self.expr_lev, 0
        while not self.at(")"):
            item_start = self.tok.start
            if self.tok.kind == "ident" and self.param_has_name():
                name = self.ident()
                typ = self.parse_type(allow_ellipsis=True)
                items.append((name, typ, item_start, self.prev_end))
            elif self.tok.kind == "ident" and self.peek().value in (",", ")"):
                # bare identifier: a name in a grouped list or a type
                items.append((self.ident(), None, item_start, self.prev_end))
            else:
                items.append((None, self.parse_type(allow_ellipsis=True), item_start, self.prev_end))
            if not self.at(","):
                break
            self.advance()
        self.expect(")")
        self.expr_lev = saved

        fields: list[SyntaxNode] = []
        named = any(name is not None and typ is not None for name, typ, _, _ in items)
        if named:
            pending: list[tuple[SyntaxNode, int]] = []
            for name, typ, item_start, item_end in items:
                if name is not None and typ is None:
                    pending.append((name, item_start))
                    continue
                if name is None:
                    raise ParseError("mixed named and unnamed parameters", typ.span.start)
                group = pending + [(name, item_start)]
                names = [self.role(n, "name") for n, _ in group]
                fld = self.node(K.Field, group[0][1], [*names, self.role(typ, "type")], end=item_end)
                fields.append(fld)
                pending = []
            if pending:
                raise ParseError("missing parameter type", pending[-1][0].span.end)
        else:
            for name, typ, item_start, item_end in items:
                if typ is None:
                    name.form = "TypeName"
                    typ = name
                fld = self.node(K.Field, item_start, [self.role(typ, "type")], end=item_end)
                fields.append(fld)
        for fld in fields:
            fld.role = item_role
        return self.node(K.Other, start, fields, form=form)

    def param_has_name(self) -> bool:
        """At an identifier inside a parameter list: is it followed by a type?"""
        nxt = self.peek()
        if nxt.kind in ("ident",):
            return True
        if nxt.kind == "keyword":
            return nxt.value in _TYPE_START_KEYWORDS
        if nxt.kind != "op":
            return False
        if nxt.value in ("*", "(", "...", "<-"):
            return True
        if nxt.value == "[":
            after = self.peek(2)
            if after.value in ("]", "...") or after.kind == "int":
                return True
            if after.kind == "ident" and self.peek(3).value == "]":
                follow = self.peek(4)
                return follow.kind == "ident" or follow.value in (
                    "*", "[", "(", "map", "chan", "func", "struct", "interface"
                )
            return False
        return False

    def skip_balanced(self, open_: str, close: str, form: str) -> SyntaxNode:
        start = self.expect(open_).start
        depth = 1
        while depth:
            t = self.tok
            if t.kind == "eof":
                self.error(f"unbalanced {open_!r}")
            if t.kind == "op" and t.value == open_:
                depth += 1
            elif t.kind == "op" and t.value == close:
                depth -= 1
            self.advance()
        return self.node(K.Other, start, form=form)

    # -- declarations ---------------------------------------------------

    def parse_gen_decl(self) -> SyntaxNode:
        t = self.advance()
        form = {"var": "VarDecl", "const": "ConstDecl", "type": "TypeDecl"}[t.value]
        spec = self.parse_type_spec if t.value == "type" else self.parse_value_spec
        specs = []
        if self.at("("):
            self.advance()
            while not self.at(")"):
                if self.tok.kind == "semi":
                    self.advance()
                    continue
                specs.append(self.role(spec(), "spec"))
                self.skip_semi()
            self.expect(")")
        else:
            specs.append(self.role(spec(), "spec"))
        return self.node(K.Other, t.start, specs, form=form, value=t.value)

    def parse_value_spec(self) -> SyntaxNode:
        start = self.tok.start
        names = [self.role(self.ident(), "name")]
        while self.at(","):
            self.advance()
            names.append(self.role(self.ident(), "name"))
        children = list(names)
        if not self.at("=") and self.tok.kind != "semi" and not self.at(")"):
            children.append(self.role(self.parse_type(), "type"))
        if self.at("="):
            self.advance()
            children.extend(self.role(e, "value") for e in self.parse_expr_list())
        return self.node(K.Other, start, children, form="ValueSpec")

    def parse_type_spec(self) -> SyntaxNode:
        start = self.tok.start
        name = self.role(self.ident(), "name")
        children = [name]
        if self.at("[") and self.peek().kind == "ident" and self.peek(2).value != "]":
            children.append(self.role(self.skip_balanced("[", "]", "TypeParams"), "tparams"))
        if self.at("="):
            self.advance()
        children.append(self.role(self.parse_type(), "type"))
        return self.node(K.Other, start, children, form="TypeSpec", value=name.value)

    # -- types ----------------------------------------------------------

    def parse_type(self, allow_ellipsis: bool = False) -> SyntaxNode:
        t = self.tok
        start = t.start
        if allow_ellipsis and self.at("..."):
            self.advance()
            elt = self.role(self.parse_type(), "elt")
            return self.node(K.Other, start, [elt], form="Ellipsis")
        if t.kind == "ident":
            x = self.ident("TypeName")
            if self.at(".") and self.peek().kind == "ident":
                self.advance()
                sel = self.role(self.ident("TypeName"), "sel")
                x = self.node(K.SelectorExpr, start, [self.role(x, "x"), sel], value=sel.value)
            if self.at("["):
                x = self.parse_type_args(x, start)
            return x
        if t.kind == "op":
            if t.value == "*":
                self.advance()
                elt = self.role(self.parse_type(), "elt")
                return self.node(K.Other, start, [elt], form="PointerType")
            if t.value == "(":
                self.advance()
                inner = self.role(self.parse_type(), "x")
                self.expect(")")
                return self.node(K.Other, start, [inner], form="ParenType")
            if t.value == "[":
                return self.parse_array_type()
            if t.value == "<-":
                self.advance()
                self.expect("chan")
                elt = self.role(self.parse_type(), "elt")
                return self.node(K.Other, start, [elt], form="ChanType", value="<-chan")
        if t.kind == "keyword":
            if t.value == "map":
                self.advance()
                self.expect("[")
                key = self.role(self.parse_type(), "key")
                self.expect("]")
                elt = self.role(self.parse_type(), "elt")
                return self.node(K.Other, start, [key, elt], form="MapType")
            if t.value == "chan":
                self.advance()
                direction = "chan"
                if self.at("<-"):
                    self.advance()
                    direction = "chan<-"
                elt = self.role(self.parse_type(), "elt")
                return self.node(K.Other, start, [elt], form="ChanType", value=direction)
            if t.value == "func":
                self.advance()
                params, results = self.parse_signature()
                return self.node(K.Other, start, [params, results], form="FuncType")
            if t.value == "struct":
                return self.parse_struct_type()
            if t.value == "interface":
                self.advance()
                body = self.skip_balanced("{", "}", "InterfaceBody")
                return self.node(K.Other, start, [self.role(body, "body")], form="InterfaceType")
        self.error("expected type")

    def parse_type_args(self, x: SyntaxNode, start: int) -> SyntaxNode:
        self.advance()
        saved, self.expr_lev = self.expr_lev, 0
        args = [self.role(self.parse_type(), "index")]
        while self.at(","):
            self.advance()
            if self.at("]"):
                break
            args.append(self.role(self.parse_type(), "index"))
        self.expect("]")
        self.expr_lev = saved
        return self.node(K.IndexExpr, start, [self.role(x, "x"), *args])

    def parse_array_type(self) -> SyntaxNode:
        start = self.expect("[").start
        if self.at("]"):
            self.advance()
            elt = self.role(self.parse_type(), "elt")
            return self.node(K.Other, start, [elt], form="SliceType")
        saved, self.expr_lev = self.expr_lev, 0
        if self.at("..."):
            t = self.advance()
            length = self.node(K.Other, t.start, form="Ellipsis", end=t.end)
        else:
            length = self.parse_expr()
        self.expr_lev = saved
        self.expect("]")
        elt = self.role(self.parse_type(), "elt")
        return self.node(K.Other, start, [self.role(length, "len"), elt], form="ArrayType")

    def parse_struct_type(self) -> SyntaxNode:
        start = self.expect("struct").start
        self.expect("{")
        fields = []
        while not self.at("}"):
            if self.tok.kind == "semi":
                self.advance()
                continue
            fields.append(self.role(self.parse_field_decl(), "field"))
            self.skip_semi()
        self.expect("}")
        return self.node(K.StructType, start, fields)

    def parse_field_decl(self) -> SyntaxNode:
        start = self.tok.start
        children = []
        nxt = self.peek()
        embedded = self.at("*") or (
            self.tok.kind == "ident"
            and (nxt.kind in ("semi", "string") or nxt.value in ("}", "."))
        )
        if embedded:
            children.append(self.role(self.parse_type(), "type"))
        else:
            children.append(self.role(self.ident(), "name"))
            while self.at(","):
                self.advance()
                children.append(self.role(self.ident(), "name"))
            children.append(self.role(self.parse_type(), "type"))
        if self.tok.kind == "string":
            t = self.advance()
            tag = self.node(K.Other, t.start, form="BasicLit", value=t.value, end=t.end)
            children.append(self.role(tag, "tag"))
        return self.node(K.Field, start, children)

    # -- statements -----------------------------------------------------

    def parse_block(self) -> SyntaxNode:
        start = self.expect("{").start
        stmts = self.parse_stmt_list()
        self.expect("}")
        return self.node(K.Block, start, stmts)

    def parse_stmt_list(self) -> list[SyntaxNode]:
        stmts = []
        while not (self.at("}") or self.at("case") or self.at("default") or self.tok.kind == "eof"):
            if self.tok.kind == "semi":
                self.advance()
                continue
            stmts.append(self.role(self.parse_stmt(), "stmt"))
            if not (self.at("}") or self.at("case") or self.at("default")):
                self.skip_semi()
        return stmts

    def parse_stmt(self) -> SyntaxNode:
        t = self.tok
        if t.kind == "keyword":
            v = t.value
            if v in ("var", "const", "type"):
                return self.parse_gen_decl()
            if v in ("go", "defer"):
                return self.parse_go_defer()
            if v == "return":
                return self.parse_return()
            if v == "if":
                return self.parse_if()
            if v == "for":
                return self.parse_for()
            if v == "switch":
                return self.parse_switch()
            if v == "select":
                return self.parse_select()
            if v in ("break", "continue", "goto", "fallthrough"):
                self.advance()
                children = []
                if v != "fallthrough" and self.tok.kind == "ident":
                    children.append(self.role(self.ident(), "label"))
                return self.node(K.Other, t.start, children, form="BranchStmt", value=v)
        if self.at("{"):
            return self.parse_block()
        stmt = self.parse_simple_stmt(label_ok=True)
        return stmt

    def parse_go_defer(self) -> SyntaxNode:
        t = self.advance()
        call = self.parse_expr()
        if call.kind is not K.CallExpr:
            raise ParseError(f"expression in {t.value} must be function call", call.span.start)
        kind = K.GoStmt if t.value == "go" else K.DeferStmt
        return self.node(kind, t.start, [self.role(call, "call")])

    def parse_return(self) -> SyntaxNode:
        t = self.advance()
        if self.tok.kind == "semi" or self.at("}"):
            return self.node(K.NakedReturnStmt, t.start, end=t.end)
        results = [self.role(e, "result") for e in self.parse_expr_list()]
        return self.node(K.ReturnStmt, t.start, results)

    def parse_simple_stmt(self, label_ok: bool = False, range_ok: bool = False):
        start = self.tok.start
        if range_ok and self.at("range"):
            self.advance()
            return _RangeClause(start, [], None, self.parse_expr())
        lhs = self.parse_expr_list()
        t = self.tok
        if t.kind == "op":
            if t.value in _ASSIGN_OPS or t.value == ":=":
                op = self.advance().value
                if range_ok and op in ("=", ":=") and self.at("range"):
                    self.advance()
                    return _RangeClause(start, lhs, op, self.parse_expr())
                rhs = self.parse_expr_list()
                kind = K.ShortVarDecl if op == ":=" else K.Assign
                children = [self.role(e, "lhs") for e in lhs] + [self.role(e, "rhs") for e in rhs]
                return self.node(kind, start, children, value=op)
            if t.value == ":" and label_ok and len(lhs) == 1 and lhs[0].kind is K.Ident:
                self.advance()
                while self.tok.kind == "semi":
                    self.advance()
                children = [self.role(lhs[0], "label")]
                if not self.at("}"):
                    children.append(self.role(self.parse_stmt(), "stmt"))
                return self.node(K.Other, start, children, form="LabeledStmt", value=lhs[0].value)
            if t.value == "<-":
                self.advance()
                value = self.parse_expr()
                return self.node(K.ChanSend, start, [self.role(lhs[0], "ch"), self.role(value, "value")])
            if t.value in ("++", "--"):
                self.advance()
                return self.node(K.Other, start, [self.role(lhs[0], "x")], form="IncDec", value=t.value)
        if len(lhs) > 1:
            self.error("expected assignment after expression list")
        return self.node(K.Other, start, [self.role(lhs[0], "x")], form="ExprStmt")

    def header_simple_stmt(self, range_ok: bool = False):
        saved, self.expr_lev = self.expr_lev, -1
        try:
            return self.parse_simple_stmt(range_ok=range_ok)
        finally:
            self.expr_lev = saved

    @staticmethod
    def as_expr(stmt: SyntaxNode) -> SyntaxNode:
        if stmt.form != "ExprStmt":
            raise ParseError("expected expression", stmt.span.start)
        return stmt.children[0]

    def parse_if(self) -> SyntaxNode:
        start = self.advance().start
        init = cond = None
        if self.tok.kind == "semi":
            self.advance()
            cond = self.as_expr(self.header_simple_stmt())
        else:
            s = self.header_simple_stmt()
            if self.tok.kind == "semi":
                self.advance()
                init = s
                cond = self.as_expr(self.header_simple_stmt())
            else:
                cond = self.as_expr(s)
        body = self.parse_block()
        children = [self.role(init, "init"), self.role(cond, "cond"), self.role(body, "body")]
        if self.at("else"):
            self.advance()
            alt = self.parse_if() if self.at("if") else self.parse_block()
            children.append(self.role(alt, "else"))
        return self.node(K.IfStmt, start, children)

    def parse_for(self) -> SyntaxNode:
        start = self.advance().start
        init = cond = post = None
        header = None
        if not self.at("{"):
            if self.tok.kind != "semi":
                header = self.header_simple_stmt(range_ok=True)
            if isinstance(header, _RangeClause):
                body = self.parse_block()
                children = []
                if header.lhs:
                    children.append(self.role(header.lhs[0], "key"))
                if len(header.lhs) > 1:
                    children.append(self.role(header.lhs[1], "value"))
                children += [self.role(header.expr, "x"), self.role(body, "body")]
                return self.node(K.ForRange, start, children, value=header.op)
            if self.tok.kind == "semi":
                self.advance()
                init = header
                if self.tok.kind != "semi":
                    cond = self.as_expr(self.header_simple_stmt())
                self.expect(";")
                if not self.at("{"):
                    post = self.header_simple_stmt()
            else:
                cond = self.as_expr(header)
        body = self.parse_block()
        children = [self.role(init, "init"), self.role(cond, "cond"), self.role(post, "post"), self.role(body, "body")]
        return self.node(K.ForClause, start, children)

    def parse_switch(self) -> SyntaxNode:
        start = self.advance().start
        init = tag = None
        if not self.at("{"):
            s1 = None
            if self.tok.kind != "semi":
                s1 = self.header_simple_stmt()
            if self.tok.kind == "semi":
                self.advance()
                init = s1
                if not self.at("{"):
                    tag = self.header_simple_stmt()
            else:
                tag = s1
        type_switch = tag is not None and self.is_type_switch_guard(tag)
        self.expect("{")
        clauses = []
        while not self.at("}"):
            if self.tok.kind == "semi":
                self.advance()
                continue
            clauses.append(self.role(self.parse_case_clause(type_switch), "clause"))
        self.expect("}")
        children = [self.role(init, "init")]
        if tag is not None:
            if type_switch:
                children.append(self.role(tag, "assign"))
            else:
                children.append(self.role(self.as_expr(tag), "tag"))
        children += clauses
        form = "TypeSwitchStmt" if type_switch else "SwitchStmt"
        return self.node(K.Other, start, children, form=form)

    @staticmethod
    def is_type_switch_guard(stmt: SyntaxNode) -> bool:
        if stmt.kind is K.ShortVarDecl and len(stmt.children) == 2:
            expr = stmt.children[1]
        elif stmt.form == "ExprStmt":
            expr = stmt.children[0]
        else:
            return False
        return expr.form == "TypeAssertExpr" and expr.value == "type"

    def parse_case_clause(self, type_switch: bool) -> SyntaxNode:
        start = self.tok.start
        exprs = []
        if self.at("case"):
            self.advance()
            parse_item = self.parse_type if type_switch else self.parse_expr
            exprs.append(self.role(parse_item(), "expr"))
            while self.at(","):
                self.advance()
                exprs.append(self.role(parse_item(), "expr"))
            value = "case"
        else:
            self.expect("default")
            value = "default"
        self.expect(":")
        stmts = self.parse_stmt_list()
        return self.node(K.Other, start, exprs + stmts, form="CaseClause", value=value)

    def parse_select(self) -> SyntaxNode:
        start = self.advance().start
        self.expect("{")
        clauses = []
        while not self.at("}"):
            if self.tok.kind == "semi":
                self.advance()
                continue
            cstart = self.tok.start
            children = []
            if self.at("case"):
                self.advance()
                children.append(self.role(self.parse_simple_stmt(), "comm"))
                value = "case"
            else:
                self.expect("default")
                value = "default"
            self.expect(":")
            children += self.parse_stmt_list()
            clauses.append(self.role(self.node(K.SelectCase, cstart, children, value=value), "clause"))
        self.expect("}")
        return self.node(K.SelectStmt, start, clauses)

    # -- expressions ----------------------------------------------------

    def parse_expr_list(self) -> list[SyntaxNode]:
        exprs = [self.parse_expr()]
        while self.at(","):
            self.advance()
            exprs.append(self.parse_expr())
        return exprs

    def parse_expr(self, min_prec: int = 1) -> SyntaxNode:
        start = self.tok.start
        x = self.parse_unary()
        while True:
            t = self.tok
            prec = _BINARY_PREC.get(t.value) if t.kind == "op" else None
            if prec is None or prec < min_prec:
                return x
            self.advance()
            y = self.parse_expr(prec + 1)
            x = self.node(K.Other, start, [self.role(x, "x"), self.role(y, "y")], form="BinaryExpr", value=t.value)

    def parse_unary(self) -> SyntaxNode:
        t = self.tok
        if t.kind == "op" and t.value in _UNARY_OPS:
            if t.value == "<-" and self.peek().value == "chan":
                return self.parse_primary()
            self.advance()
            x = self.parse_unary()
            if t.value == "<-":
                return self.node(K.ChanRecv, t.start, [self.role(x, "ch")])
            return self.node(K.Other, t.start, [self.role(x, "x")], form="UnaryExpr", value=t.value)
        return self.parse_primary()

    def parse_operand(self) -> SyntaxNode:
        t = self.tok
        if t.kind == "ident":
            return self.ident()
        if t.kind in _LITERAL_KINDS:
            self.advance()
            return self.node(K.Other, t.start, form="BasicLit", value=t.value, end=t.end)
        if t.kind == "op" and t.value == "(":
            self.advance()
            saved, self.expr_lev = self.expr_lev, self.expr_lev + 1
            x = self.parse_expr()
            self.expr_lev = saved
            self.expect(")")
            return self.node(K.Other, t.start, [self.role(x, "x")], form="ParenExpr")
        if t.kind == "keyword" and t.value == "func":
            self.advance()
            params, results = self.parse_signature()
            if self.at("{"):
                saved, self.expr_lev = self.expr_lev, 0
                body = self.role(self.parse_block(), "body")
                self.expr_lev = saved
                return self.node(K.ClosureLit, t.start, [params, results, body])
            return self.node(K.Other, t.start, [params, results], form="FuncType")
        if self.starts_type():
            return self.parse_type()
        self.error("expected expression")

    def parse_primary(self) -> SyntaxNode:
        start = self.tok.start
        x = self.parse_operand()
        while True:
            t = self.tok
            if t.kind != "op":
                return x
            if t.value == ".":
                self.advance()
                if self.at("("):
                    self.advance()
                    if self.at("type"):
                        self.advance()
                        self.expect(")")
                        x = self.node(K.Other, start, [self.role(x, "x")], form="TypeAssertExpr", value="type")
                    else:
                        typ = self.role(self.parse_type(), "type")
                        self.expect(")")
                        x = self.node(K.Other, start, [self.role(x, "x"), typ], form="TypeAssertExpr")
                else:
                    sel = self.role(self.ident(), "sel")
                    x = self.node(K.SelectorExpr, start, [self.role(x, "x"), sel], value=sel.value)
            elif t.value == "[":
                x = self.parse_index_or_slice(x, start)
            elif t.value == "(":
                x = self.parse_call(x, start)
            elif t.value == "{":
                if not self.is_literal_type(x):
                    return x
                if self.expr_lev < 0 and x.kind in (K.Ident, K.SelectorExpr, K.IndexExpr):
                    return x
                x = self.parse_composite_lit(x, start)
            else:
                return x

    @staticmethod
    def is_literal_type(x: SyntaxNode) -> bool:
        if x.kind is K.Ident or x.kind is K.StructType:
            return True
        if x.kind is K.SelectorExpr:
            return x.children[0].kind is K.Ident
        if x.kind is K.IndexExpr:
            return Parser.is_literal_type(x.children[0])
        return x.form in ("ArrayType", "SliceType", "MapType")

    def parse_index_or_slice(self, x: SyntaxNode, start: int) -> SyntaxNode:
        self.advance()
        saved, self.expr_lev = self.expr_lev, self.expr_lev + 1
        parts: list[SyntaxNode | None] = [None]
        colons = 0
        index_list = []
        if not self.at(":"):
            parts[0] = self.parse_expr()
        while self.at(":"):
            self.advance()
            colons += 1
            parts.append(None)
            if not (self.at(":") or self.at("]")):
                parts[-1] = self.parse_expr()
        if colons == 0:
            index_list.append(parts[0])
            while self.at(","):
                self.advance()
                if self.at("]"):
                    break
                index_list.append(self.parse_expr())
        self.expr_lev = saved
        self.expect("]")
        if colons:
            roles = ["lo", "hi", "max"]
            children = [self.role(x, "x")] + [self.role(p, roles[i]) for i, p in enumerate(parts)]
            return self.node(K.Other, start, children, form="SliceExpr")
        children = [self.role(x, "x")] + [self.role(i, "index") for i in index_list]
        return self.node(K.IndexExpr, start, children)

    def parse_call(self, fun: SyntaxNode, start: int) -> SyntaxNode:
        self.advance()
        saved, self.expr_lev = self.expr_lev, self.expr_lev + 1
        args = []
        spread = None
        while not self.at(")"):
            args.append(self.role(self.parse_expr(), "arg"))
            if self.at("..."):
                self.advance()
                spread = "..."
            if not self.at(","):
                break
            self.advance()
        self.expr_lev = saved
        self.expect(")")
        return self.node(K.CallExpr, start, [self.role(fun, "fun"), *args], value=spread)

    def parse_composite_lit(self, typ: SyntaxNode | None, start: int) -> SyntaxNode:
        self.expect("{")
        saved, self.expr_lev = self.expr_lev, 0
        elts = []
        while not self.at("}"):
            if self.tok.kind == "semi":
                self.advance()
                continue
            elts.append(self.role(self.parse_element(), "elt"))
            if not self.at(","):
                while self.tok.kind == "semi":
                    self.advance()
                break
            self.advance()
        self.expr_lev = saved
        self.expect("}")
        children = [self.role(typ, "type")] if typ is not None else []
        return self.node(K.CompositeLit, start, children + elts)

    def parse_element_value(self) -> SyntaxNode:
        if self.at("{"):
            return self.parse_composite_lit(None, self.tok.start)
        return self.parse_expr()

    def parse_element(self) -> SyntaxNode:
        start = self.tok.start
        x = self.parse_element_value()
        if self.at(":"):
            self.advance()
            value = self.parse_element_value()
            return self.node(K.Other, start, [self.role(x, "key"), self.role(value, "value")], form="KeyValue")
        return x


def parse_source(text: str, path: str = "<input>") -> SyntaxTree:
    """Parse Go source text; raises :class:`ParseError` on malformed input."""
    return Parser(text, path).parse_file()
