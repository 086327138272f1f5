"""Static checker and program linker for MiniLang.

``check_program`` takes every package of a resolved program at once (types
and calls cross package boundaries, so modules cannot be checked in
isolation), verifies the static semantics, and returns a
:class:`ProgramIndex` with the symbol tables the interpreter, call-graph
builder and mutation engine all share.

Checking annotates the AST in place: expression types, local slot numbers,
field indices and call resolutions are written into ``compare=False`` fields.
Re-checking the same modules is idempotent, and all annotations that cross
package boundaries are qualified-name strings rather than object references,
so a package's checked modules stay valid when a sibling package is swapped
out and the program is linked again (the mutation benchmark relies on this).

Name resolution rules, in precedence order, for a dotted call ``a.b(..)``:
local variable (receiver dispatch), class in the current package (static
method call), imported package (free function or ``pkg.Class.method``).
Locals therefore shadow classes and packages.  Top-level names may not
collide with package names, which keeps the ordering unambiguous in
practice.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ..errors import DuplicateDefinitionError, TypeCheckError
from . import ast as A

# The built-in `std` package: qualified name -> (param types, return type).
BUILTIN_PACKAGE = "std"
BUILTIN_FUNCTIONS = {
    "std.print_int": (("int",), "void"),
    "std.print_bool": (("bool",), "void"),
}

T_INT = "int"
T_BOOL = "bool"
T_VOID = "void"


@dataclass
class ProgramIndex:
    """Symbol tables for one fully checked program."""

    functions: dict[str, A.FunctionDecl] = field(default_factory=dict)
    classes: dict[str, A.ClassDecl] = field(default_factory=dict)
    interfaces: dict[str, A.InterfaceDecl] = field(default_factory=dict)
    fn_package: dict[str, str] = field(default_factory=dict)
    class_super: dict[str, str | None] = field(default_factory=dict)
    # class qn -> every class assignable to it (subclasses, itself included)
    subtypes: dict[str, set[str]] = field(default_factory=dict)
    # interface qn -> every class implementing it (directly or via a superclass)
    interface_impls: dict[str, set[str]] = field(default_factory=dict)
    # (class qn, method name) -> implementing function qn (nearest definition)
    dispatch: dict[tuple[str, str], str] = field(default_factory=dict)
    field_layout: dict[str, tuple[str, ...]] = field(default_factory=dict)
    field_types: dict[tuple[str, str], str] = field(default_factory=dict)
    field_index: dict[tuple[str, str], int] = field(default_factory=dict)

    def method_candidates(self, recv_type: str, method: str) -> set[str]:
        """CHA candidate set: every implementation a receiver of static type
        ``recv_type`` could dispatch ``method`` to."""
        if recv_type in self.interfaces:
            impls = self.interface_impls.get(recv_type, set())
        else:
            impls = self.subtypes.get(recv_type, set())
        out = set()
        for cls in impls:
            target = self.dispatch.get((cls, method))
            if target is not None:
                out.add(target)
        return out


def check_program(
    package_modules: Mapping[str, Sequence[A.ModuleAst]],
    allowed_imports: Mapping[str, frozenset[str]] | None = None,
) -> ProgramIndex:
    """Check every module of every package; returns the program index.

    ``allowed_imports`` restricts which packages each package may import
    (its declared dependencies); ``std`` is always permitted.  When omitted,
    any package in the program may be imported.
    """
    return _Checker(package_modules, allowed_imports).run()


class _Checker:
    def __init__(self, package_modules, allowed_imports):
        self.package_modules = package_modules
        self.allowed_imports = allowed_imports
        self.index = ProgramIndex()
        # per package: name -> decl, one shared namespace for classes,
        # interfaces and free functions
        self.spaces: dict[str, dict[str, object]] = {}

    # -- entry ---------------------------------------------------------------

    def run(self) -> ProgramIndex:
        self.collect_namespaces()
        self.check_imports()
        self.resolve_hierarchy()
        self.resolve_signatures()
        self.build_layouts_and_dispatch()
        self.check_interface_conformance()
        for pkg, modules in self.package_modules.items():
            for mod in modules:
                for cls in mod.classes:
                    for m in cls.methods:
                        self.check_body(m, mod)
                for fn in mod.functions:
                    self.check_body(fn, mod)
        return self.index

    # -- namespaces ------------------------------------------------------

    def collect_namespaces(self) -> None:
        all_packages = set(self.package_modules) | {BUILTIN_PACKAGE}
        for pkg, modules in self.package_modules.items():
            space: dict[str, object] = {}
            for mod in modules:
                if mod.package_name != pkg:
                    raise TypeCheckError(
                        f"module declares package {mod.package_name!r} but "
                        f"belongs to {pkg!r}", file=mod.source_name)
                for decl in (*mod.interfaces, *mod.classes, *mod.functions):
                    if decl.name in space:
                        raise DuplicateDefinitionError(
                            f"duplicate top-level name {decl.name!r} in "
                            f"package {pkg!r}", file=mod.source_name,
                            line=decl.span[0] if decl.span else None)
                    if decl.name in all_packages:
                        raise TypeCheckError(
                            f"top-level name {decl.name!r} collides with a "
                            f"package name", file=mod.source_name,
                            line=decl.span[0] if decl.span else None)
                    space[decl.name] = decl
                    if isinstance(decl, A.ClassDecl):
                        self.index.classes[decl.qualified_name] = decl
                    elif isinstance(decl, A.InterfaceDecl):
                        self.index.interfaces[decl.qualified_name] = decl
                    else:
                        if decl.owner_class is None and decl.is_method:
                            raise AssertionError("unreachable")
                        self.register_function(pkg, decl)
                for cls in mod.classes:
                    for m in cls.methods:
                        if m.visibility != "public":
                            raise TypeCheckError(
                                f"method {m.qualified_name} may not be "
                                f"private (only free functions can be)",
                                file=mod.source_name,
                                line=m.span[0] if m.span else None)
                        self.register_function(pkg, m)
            self.spaces[pkg] = space

    def register_function(self, pkg: str, fn: A.FunctionDecl) -> None:
        self.index.functions[fn.qualified_name] = fn
        self.index.fn_package[fn.qualified_name] = pkg

    def check_imports(self) -> None:
        for pkg, modules in self.package_modules.items():
            allowed = None
            if self.allowed_imports is not None:
                allowed = set(self.allowed_imports.get(pkg, ())) | {BUILTIN_PACKAGE}
            for mod in modules:
                for imp in mod.imports:
                    if imp != BUILTIN_PACKAGE and imp not in self.package_modules:
                        raise TypeCheckError(
                            f"import of unknown package {imp!r}",
                            file=mod.source_name)
                    if allowed is not None and imp not in allowed:
                        raise TypeCheckError(
                            f"package {pkg!r} imports {imp!r} which is not "
                            f"among its declared dependencies",
                            file=mod.source_name)

    # -- types and hierarchy -----------------------------------------------

    def resolve_type_name(self, parts: tuple[str, ...], mod: A.ModuleAst,
                          span) -> str:
        """Resolve a (possibly dotted) class/interface reference to its
        qualified name."""
        err_line = span[0] if span else None
        if len(parts) == 1:
            name = parts[0]
            decl = self.spaces[mod.package_name].get(name)
            if isinstance(decl, (A.ClassDecl, A.InterfaceDecl)):
                return decl.qualified_name
            raise TypeCheckError(f"unknown type {name!r}",
                                 file=mod.source_name, line=err_line)
        pkg, name = parts
        if pkg != mod.package_name and pkg not in mod.imports:
            raise TypeCheckError(
                f"type {pkg}.{name} refers to package {pkg!r} which is not "
                f"imported", file=mod.source_name, line=err_line)
        if pkg == BUILTIN_PACKAGE:
            raise TypeCheckError(f"package 'std' declares no types",
                                 file=mod.source_name, line=err_line)
        decl = self.spaces[pkg].get(name)
        if isinstance(decl, (A.ClassDecl, A.InterfaceDecl)):
            return decl.qualified_name
        raise TypeCheckError(f"unknown type {pkg}.{name}",
                             file=mod.source_name, line=err_line)

    def resolve_type_ref(self, tref: A.TypeRef, mod: A.ModuleAst) -> str:
        if tref.parts == ("int",):
            tref.resolved = T_INT
        elif tref.parts == ("bool",):
            tref.resolved = T_BOOL
        else:
            tref.resolved = self.resolve_type_name(tref.parts, mod, tref.span)
        return tref.resolved

    def resolve_hierarchy(self) -> None:
        for pkg, modules in self.package_modules.items():
            for mod in modules:
                for cls in mod.classes:
                    qn = cls.qualified_name
                    super_qn = None
                    if cls.superclass is not None:
                        super_qn = self.resolve_type_name(
                            cls.superclass, mod, cls.span)
                        if super_qn not in self.index.classes:
                            raise TypeCheckError(
                                f"class {qn} extends {super_qn} which is "
                                f"not a class", file=mod.source_name,
                                line=cls.span[0] if cls.span else None)
                    self.index.class_super[qn] = super_qn
        # reject inheritance cycles
        for qn in self.index.classes:
            seen = {qn}
            cur = self.index.class_super[qn]
            while cur is not None:
                if cur in seen:
                    raise TypeCheckError(f"inheritance cycle through {qn}")
                seen.add(cur)
                cur = self.index.class_super[cur]

    def ancestry(self, cls_qn: str) -> list[str]:
        """Chain from the root superclass down to cls_qn itself."""
        chain = []
        cur: str | None = cls_qn
        while cur is not None:
            chain.append(cur)
            cur = self.index.class_super[cur]
        chain.reverse()
        return chain

    def resolve_signatures(self) -> None:
        def resolve_params(params, mod):
            for p in params:
                ty = self.resolve_type_ref(p.type_ref, mod)
                if ty == T_VOID:
                    raise TypeCheckError("parameter of type void",
                                         file=mod.source_name)

        for pkg, modules in self.package_modules.items():
            for mod in modules:
                for iface in mod.interfaces:
                    for sig in iface.methods:
                        resolve_params(sig.params, mod)
                        if sig.return_type is not None:
                            self.resolve_type_ref(sig.return_type, mod)
                for cls in mod.classes:
                    for f in cls.fields:
                        self.resolve_type_ref(f.type_ref, mod)
                    for m in cls.methods:
                        resolve_params(m.params, mod)
                        if m.return_type is not None:
                            self.resolve_type_ref(m.return_type, mod)
                for fn in mod.functions:
                    resolve_params(fn.params, mod)
                    if fn.return_type is not None:
                        self.resolve_type_ref(fn.return_type, mod)

    @staticmethod
    def signature_of(fn) -> tuple:
        ret = fn.return_type.resolved if fn.return_type is not None else T_VOID
        return (tuple(p.type_ref.resolved for p in fn.params), ret)

    def build_layouts_and_dispatch(self) -> None:
        idx = self.index
        # Order classes so superclasses are processed first.
        done: set[str] = set()
        order: list[str] = []

        def visit(qn: str) -> None:
            if qn in done:
                return
            sup = idx.class_super[qn]
            if sup is not None:
                visit(sup)
            done.add(qn)
            order.append(qn)

        for qn in idx.classes:
            visit(qn)

        for qn in order:
            cls = idx.classes[qn]
            sup = idx.class_super[qn]
            layout: list[str] = list(idx.field_layout[sup]) if sup else []
            methods: dict[str, str] = (
                {m: t for (c, m), t in idx.dispatch.items() if c == sup}
                if sup else {})
            for f in cls.fields:
                if f.name in layout:
                    raise TypeCheckError(
                        f"field {f.name!r} of class {qn} shadows an "
                        f"inherited field")
                layout.append(f.name)
                idx.field_types[(qn, f.name)] = f.type_ref.resolved
            if sup:
                for fname in idx.field_layout[sup]:
                    idx.field_types[(qn, fname)] = idx.field_types[(sup, fname)]
            for m in cls.methods:
                if m.name in methods:
                    inherited = idx.functions[methods[m.name]]
                    if self.signature_of(inherited) != self.signature_of(m):
                        raise TypeCheckError(
                            f"{m.qualified_name} overrides "
                            f"{inherited.qualified_name} with a different "
                            f"signature")
                methods[m.name] = m.qualified_name
            idx.field_layout[qn] = tuple(layout)
            for i, fname in enumerate(layout):
                idx.field_index[(qn, fname)] = i
            for mname, target in methods.items():
                idx.dispatch[(qn, mname)] = target

        # subtype sets (reflexive)
        for qn in idx.classes:
            for anc in self.ancestry(qn):
                idx.subtypes.setdefault(anc, set()).add(qn)
            idx.subtypes.setdefault(qn, set()).add(qn)

        # interface implementation sets, inherited through subclassing
        direct: dict[str, set[str]] = {}
        for pkg, modules in self.package_modules.items():
            for mod in modules:
                for cls in mod.classes:
                    ifaces = set()
                    for ref in cls.interfaces:
                        iq = self.resolve_type_name(ref, mod, cls.span)
                        if iq not in idx.interfaces:
                            raise TypeCheckError(
                                f"class {cls.qualified_name} implements "
                                f"{iq} which is not an interface",
                                file=mod.source_name)
                        ifaces.add(iq)
                    direct[cls.qualified_name] = ifaces
        for qn in idx.classes:
            for anc in self.ancestry(qn):
                for iq in direct.get(anc, ()):
                    idx.interface_impls.setdefault(iq, set()).add(qn)
        for iq in idx.interfaces:
            idx.interface_impls.setdefault(iq, set())

    def check_interface_conformance(self) -> None:
        idx = self.index
        for iq, impls in idx.interface_impls.items():
            iface = idx.interfaces[iq]
            for cls_qn in impls:
                for sig in iface.methods:
                    target = idx.dispatch.get((cls_qn, sig.name))
                    if target is None:
                        raise TypeCheckError(
                            f"class {cls_qn} implements {iq} but has no "
                            f"method {sig.name!r}")
                    impl = idx.functions[target]
                    if self.signature_of(impl) != self.signature_of(sig):
                        raise TypeCheckError(
                            f"{impl.qualified_name} does not match the "
                            f"signature of {iq}.{sig.name}")

    # -- assignability -------------------------------------------------------

    def assignable(self, src: str, dst: str) -> bool:
        if src == dst:
            return src != T_VOID
        if src in self.index.classes:
            if dst in self.index.interfaces:
                return src in self.index.interface_impls.get(dst, ())
            if dst in self.index.classes:
                return src in self.index.subtypes.get(dst, ())
        return False

    # -- function bodies -------------------------------------------------

    def check_body(self, fn: A.FunctionDecl, mod: A.ModuleAst) -> None:
        env = _Env(fn, mod, self)
        self.check_block(fn.body, env, top_level=True)
        fn.n_slots = env.n_slots

    def check_block(self, stmts: list[A.Stmt], env: "_Env",
                    top_level: bool) -> None:
        for stmt in stmts:
            self.check_stmt(stmt, env, top_level)

    def check_stmt(self, stmt: A.Stmt, env: "_Env", top_level: bool) -> None:
        k = stmt.kind
        if k == A.K_VAR_DECL:
            if not top_level:
                raise env.err(stmt.span,
                              "variable declarations must appear in the "
                              "outermost block of a function body")
            ty = self.resolve_type_ref(stmt.type_ref, env.mod)
            vty = self.check_expr(stmt.value, env)
            if not self.assignable(vty, ty):
                raise env.err(stmt.span,
                              f"cannot initialise {stmt.name}: {ty} with a "
                              f"value of type {vty}")
            stmt.slot = env.declare(stmt.name, ty, stmt.span)
        elif k == A.K_ASSIGN:
            slot_ty = env.lookup(stmt.name)
            if slot_ty is None:
                raise env.err(stmt.span,
                              f"assignment to undeclared variable "
                              f"{stmt.name!r}")
            slot, ty = slot_ty
            vty = self.check_expr(stmt.value, env)
            if not self.assignable(vty, ty):
                raise env.err(stmt.span,
                              f"cannot assign {vty} to {stmt.name}: {ty}")
            stmt.slot = slot
        elif k == A.K_IF:
            self.expect_bool(stmt.cond, env, "if condition")
            self.check_block(stmt.then_body, env, top_level=False)
            if stmt.else_body is not None:
                self.check_block(stmt.else_body, env, top_level=False)
        elif k == A.K_WHILE:
            self.expect_bool(stmt.cond, env, "while condition")
            self.check_block(stmt.body, env, top_level=False)
        elif k == A.K_RETURN:
            want = (env.fn.return_type.resolved
                    if env.fn.return_type is not None else T_VOID)
            if stmt.value is None:
                if want != T_VOID:
                    raise env.err(stmt.span,
                                  f"{env.fn.qualified_name} must return "
                                  f"{want}")
            else:
                got = self.check_expr(stmt.value, env)
                if want == T_VOID:
                    raise env.err(stmt.span,
                                  f"{env.fn.qualified_name} returns no value")
                if not self.assignable(got, want):
                    raise env.err(stmt.span,
                                  f"return type mismatch: expected {want}, "
                                  f"got {got}")
        elif k == A.K_ASSERT:
            self.expect_bool(stmt.cond, env, "assert condition")
        elif k == A.K_EXPR_STMT:
            self.check_expr(stmt.value, env)
        else:
            raise AssertionError(f"unknown statement: {stmt!r}")

    def expect_bool(self, e: A.Expr, env: "_Env", what: str) -> None:
        ty = self.check_expr(e, env)
        if ty != T_BOOL:
            raise env.err(e.span, f"{what} must be bool, got {ty}")

    # -- expressions -------------------------------------------------

    def check_expr(self, e: A.Expr, env: "_Env") -> str:
        ty = self._expr_type(e, env)
        e.ty = ty
        return ty

    def _expr_type(self, e: A.Expr, env: "_Env") -> str:
        k = e.kind
        if k == A.K_INT_LIT:
            return T_INT
        if k == A.K_BOOL_LIT:
            return T_BOOL
        if k == A.K_VAR:
            slot_ty = env.lookup(e.name)
            if slot_ty is None:
                raise env.err(e.span, f"unknown variable {e.name!r}")
            e.slot, ty = slot_ty
            return ty
        if k == A.K_THIS:
            if env.this_type is None:
                raise env.err(e.span, "this outside of a method")
            return env.this_type
        if k == A.K_FIELD_ACCESS:
            oty = self.check_expr(e.obj, env)
            return self.field_type(e, oty, env)
        if k == A.K_UNARY:
            ity = self.check_expr(e.operand, env)
            if e.op == "!":
                if ity != T_BOOL:
                    raise env.err(e.span, f"operator ! needs bool, got {ity}")
                return T_BOOL
            if ity != T_INT:
                raise env.err(e.span, f"operator {e.op} needs int, got {ity}")
            return T_INT
        if k == A.K_BINARY:
            lty = self.check_expr(e.lhs, env)
            rty = self.check_expr(e.rhs, env)
            op = e.op
            if op in A.ARITH_OPS:
                if lty != T_INT or rty != T_INT:
                    raise env.err(e.span,
                                  f"operator {op} needs int operands, got "
                                  f"{lty} and {rty}")
                return T_INT
            if op in A.REL_OPS:
                if lty != T_INT or rty != T_INT:
                    raise env.err(e.span,
                                  f"operator {op} needs int operands, got "
                                  f"{lty} and {rty}")
                return T_BOOL
            if op in A.EQ_OPS:
                if lty != rty or lty not in (T_INT, T_BOOL):
                    raise env.err(e.span,
                                  f"operator {op} needs two ints or two "
                                  f"bools, got {lty} and {rty}")
                return T_BOOL
            # logical
            if lty != T_BOOL or rty != T_BOOL:
                raise env.err(e.span,
                              f"operator {op} needs bool operands, got "
                              f"{lty} and {rty}")
            return T_BOOL
        if k == A.K_NEW:
            return self.check_new(e, env)
        if k == A.K_STATIC_CALL:
            return self.check_static_call(e, env)
        if k == A.K_METHOD_CALL:
            recv_ty = self.check_expr(e.receiver, env)
            return self.check_dispatch(e, recv_ty, e.method, e.args, env)
        raise AssertionError(f"unknown expression: {e!r}")

    def field_type(self, e: A.FieldAccess, obj_ty: str, env: "_Env") -> str:
        if obj_ty not in self.index.classes:
            raise env.err(e.span,
                          f"type {obj_ty} has no fields")
        fty = self.index.field_types.get((obj_ty, e.name))
        if fty is None:
            raise env.err(e.span, f"class {obj_ty} has no field {e.name!r}")
        e.field_index = self.index.field_index[(obj_ty, e.name)]
        return fty

    def check_new(self, e: A.New, env: "_Env") -> str:
        cls_qn = self.resolve_type_name(e.path, env.mod, e.span)
        if cls_qn not in self.index.classes:
            raise env.err(e.span, f"cannot instantiate {cls_qn}: not a class")
        layout = self.index.field_layout[cls_qn]
        if len(e.args) != len(layout):
            raise env.err(e.span,
                          f"new {cls_qn} takes {len(layout)} arguments "
                          f"(one per field, inherited first), got "
                          f"{len(e.args)}")
        for arg, fname in zip(e.args, layout):
            aty = self.check_expr(arg, env)
            want = self.index.field_types[(cls_qn, fname)]
            if not self.assignable(aty, want):
                raise env.err(arg.span,
                              f"field {fname} of {cls_qn} is {want}, got "
                              f"{aty}")
        e.res_cls = cls_qn
        e.res_nfields = len(layout)
        return cls_qn

    def check_args(self, fn_qn: str, params, args, env: "_Env", span) -> None:
        if len(args) != len(params):
            raise env.err(span,
                          f"{fn_qn} takes {len(params)} arguments, got "
                          f"{len(args)}")
        for arg, p in zip(args, params):
            aty = self.check_expr(arg, env)
            if not self.assignable(aty, p.type_ref.resolved):
                raise env.err(arg.span,
                              f"argument {p.name} of {fn_qn} is "
                              f"{p.type_ref.resolved}, got {aty}")

    def check_dispatch(self, e, recv_ty: str, method: str, args,
                       env: "_Env") -> str:
        """Type a receiver-based (dynamically dispatched) call."""
        idx = self.index
        if recv_ty in idx.interfaces:
            sig = next((s for s in idx.interfaces[recv_ty].methods
                        if s.name == method), None)
            if sig is None:
                raise env.err(e.span,
                              f"interface {recv_ty} has no method "
                              f"{method!r}")
            self.check_args(f"{recv_ty}.{method}", sig.params, args, env,
                            e.span)
            e.res_recv_type = recv_ty
            return (sig.return_type.resolved
                    if sig.return_type is not None else T_VOID)
        if recv_ty in idx.classes:
            target = idx.dispatch.get((recv_ty, method))
            if target is None:
                raise env.err(e.span,
                              f"class {recv_ty} has no method {method!r}")
            impl = idx.functions[target]
            self.check_args(target, impl.params, args, env, e.span)
            e.res_recv_type = recv_ty
            return (impl.return_type.resolved
                    if impl.return_type is not None else T_VOID)
        raise env.err(e.span,
                      f"type {recv_ty} has no methods")

    def static_call_to(self, e: A.StaticCall, fn: A.FunctionDecl,
                       env: "_Env") -> str:
        if fn.is_method and fn.uses_this:
            raise env.err(e.span,
                          f"{fn.qualified_name} uses this and can only be "
                          f"called through a receiver")
        self.check_args(fn.qualified_name, fn.params, e.args, env, e.span)
        e.res_kind = A.RES_STATIC
        e.res_target = fn.qualified_name
        return (fn.return_type.resolved
                if fn.return_type is not None else T_VOID)

    def check_static_call(self, e: A.StaticCall, env: "_Env") -> str:
        idx = self.index
        path = e.path
        head = path[0]

        # 1. receiver dispatch through a local variable
        if env.lookup(head) is not None and len(path) >= 2:
            slot, ty = env.lookup(head)
            fpath: list[int] = []
            for step in path[1:-1]:
                if ty not in idx.classes:
                    raise env.err(e.span,
                                  f"type {ty} has no field {step!r}")
                fty = idx.field_types.get((ty, step))
                if fty is None:
                    raise env.err(e.span,
                                  f"class {ty} has no field {step!r}")
                fpath.append(idx.field_index[(ty, step)])
                ty = fty
            ret = self.check_dispatch(e, ty, path[-1], e.args, env)
            e.res_kind = A.RES_DYNAMIC
            e.res_slot = slot
            e.res_fpath = tuple(fpath)
            e.res_method = path[-1]
            return ret

        # 2. unqualified: sibling method, then free function in this package
        if len(path) == 1:
            if env.this_class is not None:
                target = idx.dispatch.get((env.this_class, head))
                if target is not None:
                    return self.static_call_to(e, idx.functions[target], env)
            decl = self.spaces[env.pkg].get(head)
            if isinstance(decl, A.FunctionDecl):
                return self.static_call_to(e, decl, env)
            raise env.err(e.span, f"unknown function {head!r}")

        # 3. Class.method within this package
        decl = self.spaces[env.pkg].get(head)
        if isinstance(decl, A.ClassDecl) and len(path) == 2:
            target = idx.dispatch.get((decl.qualified_name, path[1]))
            if target is None:
                raise env.err(e.span,
                              f"class {decl.qualified_name} has no method "
                              f"{path[1]!r}")
            return self.static_call_to(e, idx.functions[target], env)

        # 4. imported package (or explicit own-package qualification)
        if head == env.pkg or head in env.mod.imports:
            if head == BUILTIN_PACKAGE:
                return self.check_builtin(e, env)
            if len(path) == 2:
                decl = self.spaces[head].get(path[1])
                if isinstance(decl, A.FunctionDecl):
                    if decl.visibility == "private" and head != env.pkg:
                        raise env.err(e.span,
                                      f"{decl.qualified_name} is private to "
                                      f"package {head!r}")
                    return self.static_call_to(e, decl, env)
                raise env.err(e.span,
                              f"package {head!r} has no function "
                              f"{path[1]!r}")
            if len(path) == 3:
                decl = self.spaces[head].get(path[1])
                if isinstance(decl, A.ClassDecl):
                    target = idx.dispatch.get((decl.qualified_name, path[2]))
                    if target is None:
                        raise env.err(e.span,
                                      f"class {decl.qualified_name} has no "
                                      f"method {path[2]!r}")
                    return self.static_call_to(e, idx.functions[target], env)
                raise env.err(e.span,
                              f"package {head!r} has no class {path[1]!r}")
            raise env.err(e.span, f"cannot resolve call to "
                                  f"{'.'.join(path)}")

        raise env.err(e.span, f"unknown name {head!r} in call to "
                              f"{'.'.join(path)}")

    def check_builtin(self, e: A.StaticCall, env: "_Env") -> str:
        qn = ".".join(e.path)
        sig = BUILTIN_FUNCTIONS.get(qn)
        if sig is None:
            raise env.err(e.span, f"unknown builtin {qn}")
        param_tys, ret = sig
        if len(e.args) != len(param_tys):
            raise env.err(e.span,
                          f"{qn} takes {len(param_tys)} arguments, got "
                          f"{len(e.args)}")
        for arg, want in zip(e.args, param_tys):
            aty = self.check_expr(arg, env)
            if aty != want:
                raise env.err(arg.span,
                              f"argument of {qn} must be {want}, got {aty}")
        e.res_kind = A.RES_BUILTIN
        e.res_target = qn
        return ret


class _Env:
    """Per-function scope: flat, declaration-ordered local slots."""

    def __init__(self, fn: A.FunctionDecl, mod: A.ModuleAst,
                 checker: _Checker):
        self.fn = fn
        self.mod = mod
        self.checker = checker
        self.pkg = mod.package_name
        self.this_class = (f"{self.pkg}.{fn.owner_class}"
                           if fn.owner_class is not None else None)
        self.this_type = self.this_class
        self.vars: dict[str, tuple[int, str]] = {}
        self.n_slots = 1 if fn.owner_class is not None else 0
        for p in fn.params:
            if p.type_ref.resolved is None:  # pragma: no cover - defensive
                raise AssertionError("signatures must be resolved first")
            self.vars[p.name] = (self.n_slots, p.type_ref.resolved)
            self.n_slots += 1

    def declare(self, name: str, ty: str, span) -> int:
        if name in self.vars:
            raise self.err(span, f"variable {name!r} is already declared "
                                 f"in this function")
        slot = self.n_slots
        self.vars[name] = (slot, ty)
        self.n_slots += 1
        return slot

    def lookup(self, name: str) -> tuple[int, str] | None:
        return self.vars.get(name)

    def err(self, span, message: str) -> TypeCheckError:
        line = span[0] if span else None
        col = span[1] if span else None
        return TypeCheckError(message, file=self.mod.source_name, line=line,
                              col=col)
