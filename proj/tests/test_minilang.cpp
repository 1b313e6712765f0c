#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "typesteer/minilang/check.hpp"
#include "typesteer/minilang/interp.hpp"
#include "typesteer/minilang/parser.hpp"
#include "typesteer/minilang/render.hpp"
#include "typesteer/minilang/scope.hpp"

using namespace typesteer::minilang;

namespace {

// Shared toy analog of a record-mutating function: a Point record plus a
// function with one annotated and one unannotated parameter.
const char* kDeltaP =
    "record Point:\n"
    "    x: int\n"
    "    y: int\n"
    "def delta_x(p: Point, x) -> int:\n"
    "    p.x = p.x + x\n"
    "    return p.x\n";

}  // namespace

TEST_CASE("parse single T function") {
    Program p = parse("function f(x: number) { return x; }", Dialect::T);
    REQUIRE(p.decls.size() == 1);
    const auto& f = std::get<FuncDecl>(p.decls[0]);
    CHECK(f.name == "f");
    REQUIRE(f.params.size() == 1);
    REQUIRE(f.params[0].annot.has_value());
    CHECK((*f.params[0].annot)->kind == Type::Kind::Int);
}

TEST_CASE("parse empty file") {
    CHECK(parse("", Dialect::P).decls.empty());
    CHECK(parse("", Dialect::T).decls.empty());
}

TEST_CASE("delta_x analog has 5 annotation sites, 4 present") {
    Program p = parse(kDeltaP, Dialect::P);
    auto sites = list_annotation_sites(p);
    // 2 record fields + 2 params + return
    REQUIRE(sites.size() == 5);
    int present = 0;
    for (const auto& s : sites) present += s.present;
    CHECK(present == 4);
    CHECK(sites[2].slot == AnnotationSite::Slot::Param);
    CHECK(sites[3].present == false);
}

TEST_CASE("round trip both dialects") {
    Program p = parse(kDeltaP, Dialect::P);
    for (Dialect d : {Dialect::P, Dialect::T}) {
        Program q = p;
        q.dialect = d;
        std::string text = render(q, d);
        Program back = parse(text, d);
        back.dialect = q.dialect;
        CHECK(program_equal(q, back));
        CHECK(render(back, d) == text);
    }
}

TEST_CASE("builtin type name table per dialect") {
    CHECK(render_type(type_int(), Dialect::P) == "int");
    CHECK(render_type(type_int(), Dialect::T) == "number");
    CHECK(render_type(type_list(type_str()), Dialect::P) == "list[str]");
    CHECK(render_type(type_list(type_str()), Dialect::T) == "string[]");
    CHECK(render_type(type_list(type_list(type_bool())), Dialect::T) == "boolean[][]");
}

TEST_CASE("alias renders per dialect grammar") {
    Program p;
    p.decls.emplace_back(AliasDecl{"A0", type_int(), {}});
    CHECK(render(p, Dialect::P) == "type A0 = int\n");
    CHECK(render(p, Dialect::T) == "type A0 = number;\n");
}

TEST_CASE("syntax errors carry position and never crash") {
    CHECK_THROWS_AS(parse("def f(:", Dialect::P), SyntaxError);
    CHECK_THROWS_AS(parse("function f( {}", Dialect::T), SyntaxError);
    CHECK_THROWS_AS(parse("@", Dialect::P), SyntaxError);
    CHECK_THROWS_AS(parse("def f():\n   let x = 1\n", Dialect::P), SyntaxError);  // bad indent
}

TEST_CASE("fully unannotated program checks ok") {
    Program p = parse("def f(x):\n    return x\n", Dialect::P);
    CHECK(type_check(p).ok);
}

TEST_CASE("let with mismatched annotation is one error") {
    Program p = parse("def f() -> int:\n    let v: int = \"a\"\n    return 0\n", Dialect::P);
    auto r = type_check(p);
    CHECK_FALSE(r.ok);
    CHECK(r.errors.size() == 1);
}

TEST_CASE("removing an annotation keeps the program well typed") {
    Program p = parse(kDeltaP, Dialect::P);
    CHECK(type_check(p).ok);
    // Remove `p: Point` (site index 2).
    Program q = with_site_annotation(p, 2, std::nullopt);
    CHECK(type_check(q).ok);
}

TEST_CASE("dialect isomorphism: verdict is dialect independent") {
    Program p = parse(kDeltaP, Dialect::P);
    Program q = p;
    q.dialect = Dialect::T;
    auto rp = type_check(p);
    auto rq = type_check(q);
    CHECK(rp.ok == rq.ok);
    REQUIRE(rp.siteInferred.size() == rq.siteInferred.size());
    for (size_t i = 0; i < rp.siteInferred.size(); ++i) {
        CHECK(type_equal(rp.siteInferred[i], rq.siteInferred[i]));
    }
}

TEST_CASE("alias cycle rejected") {
    Program p = parse("type A = B\ntype B = A\n", Dialect::P);
    CHECK_FALSE(type_check(p).ok);
}

TEST_CASE("annotation_passes probes candidate types") {
    Program p = parse(kDeltaP, Dialect::P);
    CHECK(annotation_passes(p, 2, type_named("Point")));
    CHECK_FALSE(annotation_passes(p, 2, type_int()));  // p.x access fails on int
}

TEST_CASE("identity function evaluates") {
    Program p = parse("def id(x):\n    return x\n", Dialect::P);
    Value v = evaluate(p, "id", {Value(7ll)});
    CHECK(std::get<long long>(v.v) == 7);
}

TEST_CASE("delta_x analog mutates a record field") {
    Program p = parse(
        "record Point:\n    x: int\n    y: int\n"
        "def delta_x(p: Point, x: int) -> Point:\n"
        "    p.x = p.x + x\n"
        "    return p\n",
        Dialect::P);
    auto rec = std::make_shared<RecordVal>();
    rec->typeName = "Point";
    rec->fields["x"] = Value(1ll);
    rec->fields["y"] = Value(2ll);
    Value v = evaluate(p, "delta_x", {Value(rec), Value(10ll)});
    auto out = std::get<RecordPtr>(v.v);
    CHECK(std::get<long long>(out->fields["x"].v) == 11);
    CHECK(std::get<long long>(out->fields["y"].v) == 2);
}

TEST_CASE("dynamic mismatch is a deterministic trap") {
    Program p = parse("def f(x):\n    return x + 1\n", Dialect::P);
    Value v = evaluate(p, "f", {Value(std::string("a"))});
    CHECK(v.is_trap());
    Value w = evaluate(p, "f", {Value(std::string("a"))});
    CHECK(value_equal_mapped(v, w, {}));
}

TEST_CASE("evaluate entry errors") {
    Program p = parse("def f(x):\n    return x\n", Dialect::P);
    CHECK_THROWS_AS(evaluate(p, "nope", {}), UnknownEntry);
    CHECK_THROWS_AS(evaluate(p, "f", {}), UnknownEntry);
}

TEST_CASE("step cap terminates runaway recursion") {
    Program p = parse("def f(x):\n    return f(x)\n", Dialect::P);
    CHECK_THROWS_AS(evaluate(p, "f", {Value(1ll)}), StepLimitExceeded);
}

TEST_CASE("scopes: two functions each binding x") {
    Program p = parse(
        "def f(x):\n    return x\n"
        "def g(x):\n    return x\n",
        Dialect::P);
    auto sc = resolve_scopes(p);
    for (const auto& [use, binding] : sc.varUses) {
        const auto& func = std::get<FuncDecl>(p.decls[static_cast<size_t>(binding.declIndex)]);
        CHECK(func.params[static_cast<size_t>(binding.itemIndex)].name == use->name);
    }
    CHECK(sc.varUses.size() == 2);
}

TEST_CASE("scopes: let shadows param innermost-first") {
    Program p = parse(
        "def f(x: int) -> int:\n"
        "    let y = x + 1\n"
        "    let x = 2\n"
        "    let z = x + y\n"
        "    return z\n",
        Dialect::P);
    auto sc = resolve_scopes(p);
    const auto& f = std::get<FuncDecl>(p.decls[0]);
    // Use in `let y = x + 1` resolves to the param.
    const Expr* firstX = f.body[0].expr->args[0].get();
    REQUIRE(firstX->kind == Expr::Kind::Var);
    CHECK(sc.varUses.at(firstX).kind == BindingRef::Kind::Param);
    // Use in `let z = x + y` resolves to the shadowing let.
    const Expr* laterX = f.body[2].expr->args[0].get();
    CHECK(sc.varUses.at(laterX).kind == BindingRef::Kind::Let);
    CHECK(sc.varUses.at(laterX).itemIndex == 1);
}

TEST_CASE("scopes: undeclared use raises") {
    Program p = parse("def f():\n    return ghost\n", Dialect::P);
    CHECK_THROWS_AS(resolve_scopes(p), UnresolvedIdentifier);
}

TEST_CASE("with_site_annotation flips the present flag") {
    Program p = parse(kDeltaP, Dialect::P);
    auto before = list_annotation_sites(p);
    Program q = with_site_annotation(p, 0, std::nullopt);
    auto after = list_annotation_sites(q);
    REQUIRE(before.size() == after.size());
    CHECK(before[0].present);
    CHECK_FALSE(after[0].present);
    for (size_t i = 1; i < before.size(); ++i) CHECK(before[i].present == after[i].present);
}

TEST_CASE("render_with_sites ranges cover exactly the type text") {
    Program p = parse(kDeltaP, Dialect::P);
    for (Dialect d : {Dialect::P, Dialect::T}) {
        auto rr = render_with_sites(p, d);
        auto sites = list_annotation_sites(p);
        REQUIRE(rr.sites.size() == sites.size());
        for (size_t i = 0; i < sites.size(); ++i) {
            CHECK(rr.sites[i].present == sites[i].present);
            if (sites[i].present) {
                std::string got = rr.text.substr(rr.sites[i].begin,
                                                 rr.sites[i].end - rr.sites[i].begin);
                CHECK(got == render_type(*sites[i].annotation, d));
            }
        }
    }
}

TEST_CASE("parse_type_text both dialects") {
    CHECK(type_equal(parse_type_text("list[int]", Dialect::P), type_list(type_int())));
    CHECK(type_equal(parse_type_text("number[]", Dialect::T), type_list(type_int())));
    CHECK(type_equal(parse_type_text("Point", Dialect::T), type_named("Point")));
    CHECK_THROWS_AS(parse_type_text("list[", Dialect::P), SyntaxError);
}
