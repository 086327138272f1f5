"""Static checking: types, name resolution, visibility, hierarchy rules."""

import pytest

from updcheck.errors import DuplicateDefinitionError, TypeCheckError
from updcheck.minilang import ast as A

from helpers import client, link, pkg


def check_src(src: str):
    """Link a single-package client program from one module."""
    return link(client("app", {"src/m.ml0": src}))


def fails(src: str, needle: str):
    with pytest.raises(TypeCheckError) as err:
        check_src(src)
    assert needle in str(err.value), str(err.value)


# --------------------------------------------------------------------------
# expressions and statements


def test_arithmetic_needs_ints():
    fails("package app;\nfn f(b: bool) -> int {\n    return b + 1;\n}\n",
          "needs int operands")


def test_relational_needs_ints():
    fails("package app;\nfn f(b: bool) -> bool {\n    return b < true;\n}\n",
          "needs int operands")


def test_equality_needs_matching_scalars():
    fails("package app;\nfn f(b: bool) -> bool {\n    return b == 1;\n}\n",
          "two ints or two bools")
    # both-bool and both-int are fine
    check_src("package app;\nfn f(b: bool) -> bool {\n"
              "    return (b == true) == (1 != 2);\n}\n")


def test_logical_needs_bools():
    fails("package app;\nfn f(x: int) -> bool {\n    return x && true;\n}\n",
          "needs bool operands")
    fails("package app;\nfn f(x: int) -> bool {\n    return x ^ x;\n}\n",
          "needs bool operands")


def test_unary_types():
    fails("package app;\nfn f(x: int) -> bool {\n    return !x;\n}\n",
          "needs bool")
    fails("package app;\nfn f(b: bool) -> int {\n    return -b;\n}\n",
          "needs int")
    fails("package app;\nfn f(b: bool) -> int {\n    return abs(b);\n}\n",
          "needs int")


def test_conditions_must_be_bool():
    fails("package app;\nfn f(x: int) -> int {\n"
          "    if x {\n        return 1;\n    }\n    return 0;\n}\n",
          "if condition")
    fails("package app;\nfn f(x: int) -> int {\n"
          "    while x {\n        return 1;\n    }\n    return 0;\n}\n",
          "while condition")
    fails("package app;\nfn f(x: int) {\n    assert x;\n}\n",
          "assert condition")


def test_var_decl_type_and_scope():
    fails("package app;\nfn f() -> int {\n"
          "    var x: int = true;\n    return x;\n}\n",
          "cannot initialise")
    fails("package app;\nfn f(x: int) -> int {\n"
          "    var x: int = 1;\n    return x;\n}\n",
          "already declared")
    fails("package app;\nfn f() -> int {\n    x = 3;\n    return 0;\n}\n",
          "undeclared variable")
    fails("package app;\nfn f(x: int) -> int {\n"
          "    x = true;\n    return x;\n}\n",
          "cannot assign")


def test_var_decl_only_in_outermost_block():
    fails("package app;\nfn f(b: bool) -> int {\n"
          "    if b {\n        var x: int = 1;\n        return x;\n    }\n"
          "    return 0;\n}\n",
          "outermost block")


def test_unknown_variable():
    fails("package app;\nfn f() -> int {\n    return y;\n}\n",
          "unknown variable")


def test_return_type_checked():
    fails("package app;\nfn f() -> int {\n    return true;\n}\n",
          "return type mismatch")
    fails("package app;\nfn f() -> int {\n    return;\n}\n",
          "must return")
    fails("package app;\nfn f() {\n    return 3;\n}\n",
          "returns no value")


def test_call_arity_and_types():
    fails("package app;\nfn g(x: int) -> int {\n    return x;\n}\n"
          "fn f() -> int {\n    return g();\n}\n",
          "takes 1 arguments")
    fails("package app;\nfn g(x: int) -> int {\n    return x;\n}\n"
          "fn f() -> int {\n    return g(true);\n}\n",
          "argument x")
    fails("package app;\nfn f() -> int {\n    return nope();\n}\n",
          "unknown function")


def test_void_value_cannot_be_used():
    fails("package app;\nfn g() {\n    return;\n}\n"
          "fn f() -> int {\n    var x: int = g();\n    return x;\n}\n",
          "cannot initialise")


def test_builtins_typed():
    check_src("package app;\nimport std;\nfn f() {\n"
              "    std.print_int(3);\n    std.print_bool(true);\n}\n")
    fails("package app;\nimport std;\nfn f() {\n    std.print_int(true);\n}\n",
          "must be int")
    fails("package app;\nimport std;\nfn f() {\n    std.nope(1);\n}\n",
          "unknown builtin")


# --------------------------------------------------------------------------
# classes, interfaces, dispatch


DISPATCH_SRC = """\
package app;

interface Shape {
    fn area(w: int) -> int;
}

class Square implements Shape {
    side: int;

    fn area(w: int) -> int {
        return this.side * w;
    }
}

class Wide extends Square {
    fn area(w: int) -> int {
        return w * 4;
    }
}
"""


def test_interface_dispatch_types():
    program = link(client("app", {"src/m.ml0": DISPATCH_SRC + """
fn f(wide: bool) -> int {
    var s: Shape = new Square(2);
    if wide {
        s = new Wide(3);
    }
    return s.area(5);
}
"""}))
    fn = program.index.functions["app.f"]
    ret = fn.body[-1]
    assert ret.value.ty == "int"


def test_interface_requires_method():
    fails(DISPATCH_SRC.replace(
        "    fn area(w: int) -> int {\n        return this.side * w;\n    }\n",
        ""), "has no method 'area'")


def test_interface_signature_must_match():
    fails("package app;\n"
          "interface Shape {\n    fn area(w: int) -> int;\n}\n"
          "class Blob implements Shape {\n"
          "    fn area(w: bool) -> int {\n        return 1;\n    }\n}\n",
          "does not match the signature")


def test_override_signature_must_match():
    fails(DISPATCH_SRC.replace("fn area(w: int) -> int {\n        return w * 4;",
                               "fn area(w: int, h: int) -> int {\n"
                               "        return w * h;"),
          "different signature")


def test_methods_cannot_be_private():
    fails("package app;\nclass C {\n    private fn m() -> int {\n"
          "        return 1;\n    }\n}\n",
          "may not be private")


def test_new_takes_one_arg_per_field_inherited_first():
    src = DISPATCH_SRC + """
fn f() -> int {
    var w: Wide = new Wide(7);
    return w.side;
}
"""
    program = link(client("app", {"src/m.ml0": src}))
    assert program.index.field_layout["app.Wide"] == ("side",)
    fails(DISPATCH_SRC + "fn f() -> Square {\n    return new Square();\n}\n",
          "takes 1 arguments")
    fails(DISPATCH_SRC + "fn f() -> Square {\n"
          "    return new Square(true);\n}\n",
          "field side")


def test_field_access_and_errors():
    fails("package app;\nfn f(x: int) -> int {\n    return x.side;\n}\n",
          "has no fields")
    fails(DISPATCH_SRC + "fn f(s: Square) -> int {\n    return s.nope;\n}\n",
          "no field 'nope'")


def test_field_shadowing_rejected():
    fails(DISPATCH_SRC.replace("class Wide extends Square {",
                               "class Wide extends Square {\n    side: int;"),
          "shadows an inherited field")


def test_inheritance_cycle_rejected():
    fails("package app;\nclass A extends B {\n}\nclass B extends A {\n}\n",
          "inheritance cycle")


def test_this_outside_method():
    fails("package app;\nfn f() -> int {\n    return this.x;\n}\n",
          "this outside of a method")


def test_method_using_this_needs_receiver():
    fails(DISPATCH_SRC + "fn f() -> int {\n    return Square.area(2);\n}\n",
          "uses this")
    # a method that never touches `this` is statically callable
    check_src(DISPATCH_SRC + "fn f() -> int {\n    return Wide.area(2);\n}\n")


def test_subclass_assignable_to_superclass_and_interface():
    check_src(DISPATCH_SRC + """
fn f() -> int {
    var q: Square = new Wide(1);
    var s: Shape = q;
    return s.area(2);
}
""")
    fails(DISPATCH_SRC + """
fn f() -> Wide {
    var q: Square = new Square(1);
    return q;
}
""", "return type mismatch")


def test_interface_has_no_such_method():
    fails(DISPATCH_SRC + "fn f(s: Shape) -> int {\n    return s.grow(1);\n}\n",
          "has no method 'grow'")


# --------------------------------------------------------------------------
# packages, imports, visibility


LIB = """\
package lib;

fn pub() -> int {
    return 1;
}

private fn hidden() -> int {
    return pub();
}

class C {
    fn m() -> int {
        return hidden();
    }
}
"""


def test_cross_package_calls_and_privacy():
    ok = link(
        client("app", {"src/m.ml0": "package app;\nimport lib;\n"
                       "fn f() -> int {\n    return lib.pub() "
                       "+ lib.C.m();\n}\n"},
               deps={"lib"}),
        pkg("lib", {"src/l.ml0": LIB}))
    assert "lib.hidden" in ok.index.functions

    with pytest.raises(TypeCheckError) as err:
        link(client("app", {"src/m.ml0": "package app;\nimport lib;\n"
                            "fn f() -> int {\n    return lib.hidden();\n}\n"},
                    deps={"lib"}),
             pkg("lib", {"src/l.ml0": LIB}))
    assert "private" in str(err.value)


def test_import_must_be_declared_dependency():
    with pytest.raises(TypeCheckError) as err:
        link(client("app", {"src/m.ml0": "package app;\nimport lib;\n"
                            "fn f() -> int {\n    return lib.pub();\n}\n"}),
             pkg("lib", {"src/l.ml0": LIB}))
    assert "declared dependencies" in str(err.value)


def test_import_of_unknown_package():
    fails("package app;\nimport ghost;\nfn f() -> int {\n    return 1;\n}\n",
          "unknown package")


def test_calls_require_import():
    with pytest.raises(TypeCheckError) as err:
        link(client("app", {"src/m.ml0": "package app;\n"
                            "fn f() -> int {\n    return lib.pub();\n}\n"},
                    deps={"lib"}),
             pkg("lib", {"src/l.ml0": LIB}))
    assert "unknown name 'lib'" in str(err.value)


def test_top_level_name_may_not_collide_with_package():
    with pytest.raises(TypeCheckError) as err:
        link(client("app", {"src/m.ml0": "package app;\nimport lib;\n"
                            "class lib {\n}\n"},
                    deps={"lib"}),
             pkg("lib", {"src/l.ml0": LIB}))
    assert "collides with a package name" in str(err.value)


def test_duplicate_top_level_across_modules_of_one_package():
    with pytest.raises(DuplicateDefinitionError):
        link(client("app", {"src/a.ml0": "package app;\nfn f() -> int {\n"
                            "    return 1;\n}\n",
                            "src/b.ml0": "package app;\nfn f() -> int {\n"
                            "    return 2;\n}\n"}))


def test_module_must_declare_its_package():
    from updcheck.errors import InvalidManifestError
    with pytest.raises(InvalidManifestError) as err:
        link(client("app", {"src/m.ml0": "package other;\n"
                            "fn f() -> int {\n    return 1;\n}\n"}))
    assert "declares package" in str(err.value)


# --------------------------------------------------------------------------
# annotations the rest of the toolkit relies on


def test_every_expression_gets_a_type():
    program = link(client("app", {"src/m.ml0": DISPATCH_SRC + """
fn f(wide: bool) -> int {
    var s: Shape = new Square(2);
    var acc: int = 0;
    while acc < 10 {
        acc = acc + s.area(3);
    }
    if wide && acc > 0 {
        return abs(acc - 1);
    }
    return acc;
}
"""}))
    for fn in program.index.functions.values():
        for e in A.function_exprs(fn):
            assert e.ty is not None, f"{fn.qualified_name}: {e!r}"


def test_local_slots_are_stable_and_dense():
    program = check_src("package app;\n"
                        "fn f(a: int, b: bool) -> int {\n"
                        "    var c: int = a;\n    var d: int = c + 1;\n"
                        "    return d;\n}\n")
    fn = program.index.functions["app.f"]
    assert fn.n_slots == 4  # a, b, c, d — free function, no this slot
    var_c, var_d = fn.body[0], fn.body[1]
    assert (var_c.slot, var_d.slot) == (2, 3)


def test_method_slot_zero_is_this():
    program = check_src(DISPATCH_SRC)
    area = program.index.functions["app.Square.area"]
    assert area.n_slots == 2  # this + w
    assert area.uses_this


def test_checking_is_idempotent():
    src = DISPATCH_SRC + """
fn f() -> int {
    var s: Shape = new Wide(1);
    return s.area(2);
}
"""
    once = link(client("app", {"src/m.ml0": src}))
    again = link(client("app", {"src/m.ml0": src}))
    assert (once.packages["app"].modules[0]
            == again.packages["app"].modules[0])
