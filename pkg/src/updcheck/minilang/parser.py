"""Recursive-descent parser for MiniLang.

``parse_module`` turns one source file into a :class:`ModuleAst`.  The parser
enforces purely syntactic rules plus module-local name uniqueness; everything
that needs cross-module knowledge (types, call targets, imports pointing at
real packages) happens later in the checker.

Dotted calls such as ``B.b()`` are ambiguous at parse time — ``B`` may be a
local variable, a class, or an imported package — so they are kept as
:class:`StaticCall` nodes carrying the raw name path, and the checker decides
what the path means.
"""

from __future__ import annotations

from ..errors import DuplicateDefinitionError, ParseError
from . import ast as A
from .lexer import T_EOF, T_IDENT, T_INT, Token, tokenize


def parse_module(text: str, file: str = "<input>") -> A.ModuleAst:
    return _Parser(tokenize(text, file), file).module()


class _Parser:
    def __init__(self, tokens: list[Token], file: str):
        self.tokens = tokens
        self.file = file
        self.pos = 0
        self._saw_this = False  # set while parsing a function body

    # -- token plumbing ----------------------------------------------------

    @property
    def cur(self) -> Token:
        return self.tokens[self.pos]

    def at(self, ttype: str) -> bool:
        return self.cur.type == ttype

    def advance(self) -> Token:
        tok = self.cur
        if tok.type != T_EOF:
            self.pos += 1
        return tok

    def expect(self, ttype: str, what: str | None = None) -> Token:
        if self.cur.type != ttype:
            want = what or f"'{ttype}'"
            raise self.error(f"expected {want}, found {self.cur.value!r}"
                             if self.cur.type != T_EOF
                             else f"expected {want}, found end of file")
        return self.advance()

    def accept(self, ttype: str) -> Token | None:
        if self.cur.type == ttype:
            return self.advance()
        return None

    def error(self, message: str) -> ParseError:
        return ParseError(message, file=self.file, line=self.cur.line,
                          col=self.cur.col)

    def span(self) -> tuple[int, int]:
        return (self.cur.line, self.cur.col)

    # -- module structure --------------------------------------------------

    def module(self) -> A.ModuleAst:
        self.expect("package")
        pkg = self.expect(T_IDENT, "package name").value
        self.expect(";")

        imports: list[str] = []
        while self.accept("import"):
            name = self.expect(T_IDENT, "package name").value
            self.expect(";")
            if name == pkg:
                raise self.error(f"package {pkg!r} cannot import itself")
            if name in imports:
                raise DuplicateDefinitionError(
                    f"duplicate import of {name!r}", file=self.file,
                    line=self.cur.line)
            imports.append(name)

        mod = A.ModuleAst(package_name=pkg, imports=imports, classes=[],
                          interfaces=[], functions=[], source_name=self.file)
        top_names: set[str] = set()

        def declare(name: str, line: int) -> None:
            if name in top_names:
                raise DuplicateDefinitionError(
                    f"duplicate top-level name {name!r} in package {pkg!r}",
                    file=self.file, line=line)
            top_names.add(name)

        while not self.at(T_EOF):
            line = self.cur.line
            if self.at("class"):
                cls = self.class_decl(pkg)
                declare(cls.name, line)
                mod.classes.append(cls)
            elif self.at("interface"):
                iface = self.interface_decl(pkg)
                declare(iface.name, line)
                mod.interfaces.append(iface)
            elif self.at("fn") or self.at("private"):
                fn = self.function_decl(pkg, owner_class=None)
                declare(fn.name, line)
                mod.functions.append(fn)
            else:
                raise self.error(
                    f"expected a class, interface or function declaration, "
                    f"found {self.cur.value!r}")
        return mod

    def class_decl(self, pkg: str) -> A.ClassDecl:
        span = self.span()
        self.expect("class")
        name = self.expect(T_IDENT, "class name").value
        superclass = None
        if self.accept("extends"):
            superclass = self.dotted_name()
        interfaces: list[tuple[str, ...]] = []
        if self.accept("implements"):
            interfaces.append(self.dotted_name())
            while self.accept(","):
                interfaces.append(self.dotted_name())
            if len(set(interfaces)) != len(interfaces):
                raise DuplicateDefinitionError(
                    f"class {name!r} lists an interface twice",
                    file=self.file, line=span[0])
        self.expect("{")
        fields: list[A.FieldDecl] = []
        methods: list[A.FunctionDecl] = []
        member_names: set[str] = set()
        while not self.accept("}"):
            if self.at(T_EOF):
                raise self.error(f"unterminated class {name!r}")
            if self.at("fn") or self.at("private"):
                m = self.function_decl(pkg, owner_class=name)
                if m.name in member_names:
                    raise DuplicateDefinitionError(
                        f"duplicate member {m.name!r} in class {name!r}",
                        file=self.file, line=m.span[0])
                member_names.add(m.name)
                methods.append(m)
            else:
                fspan = self.span()
                fname = self.expect(T_IDENT, "field or method").value
                self.expect(":")
                ftype = self.type_ref()
                self.expect(";")
                if fname in member_names:
                    raise DuplicateDefinitionError(
                        f"duplicate member {fname!r} in class {name!r}",
                        file=self.file, line=fspan[0])
                member_names.add(fname)
                fields.append(A.FieldDecl(fname, ftype, span=fspan))
        return A.ClassDecl(name=name, superclass=superclass,
                           interfaces=interfaces, fields=fields,
                           methods=methods, qualified_name=f"{pkg}.{name}",
                           span=span)

    def interface_decl(self, pkg: str) -> A.InterfaceDecl:
        span = self.span()
        self.expect("interface")
        name = self.expect(T_IDENT, "interface name").value
        self.expect("{")
        methods: list[A.MethodSig] = []
        seen: set[str] = set()
        while not self.accept("}"):
            if self.at(T_EOF):
                raise self.error(f"unterminated interface {name!r}")
            mspan = self.span()
            self.expect("fn")
            mname = self.expect(T_IDENT, "method name").value
            params = self.param_list()
            ret = self.type_ref() if self.accept("->") else None
            self.expect(";")
            if mname in seen:
                raise DuplicateDefinitionError(
                    f"duplicate method {mname!r} in interface {name!r}",
                    file=self.file, line=mspan[0])
            seen.add(mname)
            methods.append(A.MethodSig(mname, params, ret, span=mspan))
        return A.InterfaceDecl(name=name, methods=methods,
                               qualified_name=f"{pkg}.{name}", span=span)

    def function_decl(self, pkg: str, owner_class: str | None) -> A.FunctionDecl:
        span = self.span()
        visibility = "private" if self.accept("private") else "public"
        self.expect("fn")
        name = self.expect(T_IDENT, "function name").value
        params = self.param_list()
        ret = self.type_ref() if self.accept("->") else None
        saved = self._saw_this
        self._saw_this = False
        body = self.block()
        end_span = (self.tokens[self.pos - 1].line, self.tokens[self.pos - 1].col)
        qn = f"{pkg}.{owner_class}.{name}" if owner_class else f"{pkg}.{name}"
        fn = A.FunctionDecl(name=name, params=params, return_type=ret,
                            body=body, visibility=visibility,
                            owner_class=owner_class, qualified_name=qn,
                            span=span, end_span=end_span,
                            source_file=self.file)
        fn.uses_this = self._saw_this
        self._saw_this = saved
        return fn

    def param_list(self) -> list[A.Param]:
        self.expect("(")
        params: list[A.Param] = []
        names: set[str] = set()
        while not self.accept(")"):
            if params:
                self.expect(",")
            pspan = self.span()
            pname = self.expect(T_IDENT, "parameter name").value
            self.expect(":")
            ptype = self.type_ref()
            if pname in names:
                raise DuplicateDefinitionError(
                    f"duplicate parameter {pname!r}", file=self.file,
                    line=pspan[0])
            names.add(pname)
            params.append(A.Param(pname, ptype, span=pspan))
        return params

    def dotted_name(self) -> tuple[str, ...]:
        parts = [self.expect(T_IDENT, "a name").value]
        while self.accept("."):
            parts.append(self.expect(T_IDENT, "a name").value)
        return tuple(parts)

    def type_ref(self) -> A.TypeRef:
        span = self.span()
        if self.accept("int"):
            return A.TypeRef(("int",), span=span)
        if self.accept("bool"):
            return A.TypeRef(("bool",), span=span)
        parts = [self.expect(T_IDENT, "a type").value]
        if self.accept("."):
            parts.append(self.expect(T_IDENT, "a type name").value)
        return A.TypeRef(tuple(parts), span=span)

    # -- statements ----------------------------------------------------------

    def block(self) -> list[A.Stmt]:
        self.expect("{")
        stmts: list[A.Stmt] = []
        while not self.accept("}"):
            if self.at(T_EOF):
                raise self.error("unterminated block")
            stmts.append(self.statement())
        return stmts

    def statement(self) -> A.Stmt:
        span = self.span()
        if self.accept("var"):
            name = self.expect(T_IDENT, "variable name").value
            self.expect(":")
            tref = self.type_ref()
            self.expect("=")
            value = self.expression()
            self.expect(";")
            return A.VarDecl(name, tref, value, span=span)
        if self.accept("if"):
            cond = self.expression()
            then_body = self.block()
            else_body = self.block() if self.accept("else") else None
            return A.If(cond, then_body, else_body, span=span)
        if self.accept("while"):
            cond = self.expression()
            body = self.block()
            return A.While(cond, body, span=span)
        if self.accept("return"):
            value = None if self.at(";") else self.expression()
            self.expect(";")
            return A.Return(value, span=span)
        if self.accept("assert"):
            cond = self.expression()
            self.expect(";")
            return A.Assert(cond, span=span)
        # Either `name = expr;` or a bare expression statement.
        if self.at(T_IDENT) and self.tokens[self.pos + 1].type == "=":
            name = self.advance().value
            self.advance()  # '='
            value = self.expression()
            self.expect(";")
            return A.Assign(name, value, span=span)
        value = self.expression()
        self.expect(";")
        return A.ExprStmt(value, span=span)

    # -- expressions ---------------------------------------------------------
    # Precedence, loosest first:  ||  <  ^  <  &&  <  == !=  <  < <= > >=
    #                             <  + -  <  * / %  <  unary  <  postfix

    def expression(self) -> A.Expr:
        return self.or_expr()

    def _binary_level(self, ops: tuple[str, ...], next_level) -> A.Expr:
        lhs = next_level()
        while self.cur.type in ops:
            span = self.span()
            op = self.advance().value
            rhs = next_level()
            lhs = A.Binary(op, lhs, rhs, span=span,
                           op_code=A.BINARY_OP_CODES[op])
        return lhs

    def or_expr(self) -> A.Expr:
        return self._binary_level(("||",), self.xor_expr)

    def xor_expr(self) -> A.Expr:
        return self._binary_level(("^",), self.and_expr)

    def and_expr(self) -> A.Expr:
        return self._binary_level(("&&",), self.equality)

    def equality(self) -> A.Expr:
        return self._binary_level(("==", "!="), self.relational)

    def relational(self) -> A.Expr:
        return self._binary_level(("<", "<=", ">", ">="), self.additive)

    def additive(self) -> A.Expr:
        return self._binary_level(("+", "-"), self.multiplicative)

    def multiplicative(self) -> A.Expr:
        return self._binary_level(("*", "/", "%"), self.unary)

    def unary(self) -> A.Expr:
        span = self.span()
        if self.accept("-"):
            return A.Unary("-", self.unary(), span=span, op_code=A.U_NEG)
        if self.accept("!"):
            return A.Unary("!", self.unary(), span=span, op_code=A.U_NOT)
        if self.accept("abs"):
            self.expect("(")
            operand = self.expression()
            self.expect(")")
            return A.Unary("abs", operand, span=span, op_code=A.U_ABS)
        return self.postfix()

    def postfix(self) -> A.Expr:
        expr, name_parts = self.primary()
        while True:
            if self.at("."):
                self.advance()
                span = self.span()
                name = self.expect(T_IDENT, "a member name").value
                if self.at("("):
                    args = self.call_args()
                    if name_parts is not None:
                        expr = A.StaticCall(tuple(name_parts) + (name,), args,
                                            span=span)
                    else:
                        expr = A.MethodCall(expr, name, args, span=span)
                    name_parts = None
                else:
                    expr = A.FieldAccess(expr, name, span=span)
                    if name_parts is not None:
                        name_parts.append(name)
            elif self.at("("):
                raise self.error("only named functions and methods are callable")
            else:
                return expr

    def call_args(self) -> list[A.Expr]:
        self.expect("(")
        args: list[A.Expr] = []
        while not self.accept(")"):
            if args:
                self.expect(",")
            args.append(self.expression())
        return args

    def primary(self) -> tuple[A.Expr, list[str] | None]:
        """Returns (expr, name_parts); name_parts tracks bare dotted names so
        that postfix() can turn ``a.b.c(..)`` into a StaticCall path."""
        span = self.span()
        if self.at(T_INT):
            tok = self.advance()
            return A.IntLit(int(tok.value), span=span, ty="int"), None
        if self.accept("true"):
            return A.BoolLit(True, span=span, ty="bool"), None
        if self.accept("false"):
            return A.BoolLit(False, span=span, ty="bool"), None
        if self.accept("this"):
            self._saw_this = True
            return A.This(span=span), None
        if self.accept("new"):
            parts = [self.expect(T_IDENT, "a class name").value]
            if self.accept("."):
                parts.append(self.expect(T_IDENT, "a class name").value)
            args = self.call_args()
            return A.New(tuple(parts), args, span=span), None
        if self.accept("("):
            expr = self.expression()
            self.expect(")")
            return expr, None
        if self.at(T_IDENT):
            tok = self.advance()
            if self.at("("):
                args = self.call_args()
                return A.StaticCall((tok.value,), args, span=span), None
            return A.Var(tok.value, span=span), [tok.value]
        raise self.error(f"expected an expression, found {self.cur.value!r}"
                         if not self.at(T_EOF)
                         else "expected an expression, found end of file")
