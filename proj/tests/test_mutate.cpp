#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "typesteer/corpusgen/generator.hpp"
#include "typesteer/minilang/check.hpp"
#include "typesteer/minilang/interp.hpp"
#include "typesteer/minilang/parser.hpp"
#include "typesteer/minilang/render.hpp"
#include "typesteer/mutate/edits.hpp"

using namespace typesteer;
using namespace typesteer::minilang;
using namespace typesteer::mutate;

namespace {

const char* kDeltaX =
    "record Point:\n"
    "    x: int\n"
    "    y: int\n"
    "def delta_x(p: Point, x: int) -> int:\n"
    "    return p.x - x\n";

Program delta_x() { return parse(kDeltaX, Dialect::P); }

// Deep copy with record type tags translated; evaluation can mutate record
// fields, so each run needs its own copy of the arguments.
Value clone_value(const Value& v, const std::map<std::string, std::string>& nameMap) {
    if (const auto* l = std::get_if<ListVal>(&v.v)) {
        auto out = std::make_shared<std::vector<Value>>();
        for (const auto& x : **l) out->push_back(clone_value(x, nameMap));
        return Value(out);
    }
    if (const auto* r = std::get_if<RecordPtr>(&v.v)) {
        auto out = std::make_shared<RecordVal>();
        auto it = nameMap.find((*r)->typeName);
        out->typeName = it == nameMap.end() ? (*r)->typeName : it->second;
        for (const auto& [k, x] : (*r)->fields) out->fields[k] = clone_value(x, nameMap);
        return Value(out);
    }
    return v;
}

// Independent reference implementation: plain recursion with memoization.
size_t lev_oracle(const std::string& a, const std::string& b) {
    std::map<std::pair<size_t, size_t>, size_t> memo;
    auto go = [&](auto&& self, size_t i, size_t j) -> size_t {
        if (i == 0) return j;
        if (j == 0) return i;
        auto key = std::make_pair(i, j);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        size_t r = std::min({self(self, i - 1, j) + 1, self(self, i, j - 1) + 1,
                             self(self, i - 1, j - 1) + (a[i - 1] != b[j - 1])});
        memo[key] = r;
        return r;
    };
    return go(go, a.size(), b.size());
}

}  // namespace

TEST_CASE("renaming a parameter renames its uses but not same-named fields") {
    Program p = delta_x();
    BindingRef b{BindingRef::Kind::Param, 1, 1};  // the `x: int` param
    Program q = rename_variable(p, b, "tmp");
    Program expect = parse(
        "record Point:\n"
        "    x: int\n"
        "    y: int\n"
        "def delta_x(p: Point, tmp: int) -> int:\n"
        "    return p.x - tmp\n",
        Dialect::P);
    CHECK(program_equal(q, expect));
}

TEST_CASE("renaming a binding with zero uses changes only the binding token") {
    Program p = parse("def f(x: int) -> int:\n    return 1\n", Dialect::P);
    Program q = rename_variable(p, {BindingRef::Kind::Param, 0, 0}, "x2");
    std::string pre = render(p, Dialect::P), post = render(q, Dialect::P);
    CHECK(edit_distance(pre, post) == std::string("x2").size() - 1);
}

TEST_CASE("renaming an outer binding leaves shadowed uses unchanged") {
    Program p = parse(
        "def f(x: int) -> int:\n"
        "    x + 1\n"
        "    let x: str = \"a\"\n"
        "    x + \"b\"\n"
        "    return 1\n",
        Dialect::P);
    Program q = rename_variable(p, {BindingRef::Kind::Param, 0, 0}, "__tmp0");
    Program expect = parse(
        "def f(__tmp0: int) -> int:\n"
        "    __tmp0 + 1\n"
        "    let x: str = \"a\"\n"
        "    x + \"b\"\n"
        "    return 1\n",
        Dialect::P);
    CHECK(program_equal(q, expect));
}

TEST_CASE("rename_variable error cases") {
    Program p = delta_x();
    CHECK_THROWS_AS(rename_variable(p, {BindingRef::Kind::Param, 1, 0}, "x"), NameConflict);
    CHECK_THROWS_AS(rename_variable(p, {BindingRef::Kind::Param, 1, 7}, "__tmp0"), UnknownBinding);
    CHECK_THROWS_AS(rename_variable(p, {BindingRef::Kind::Let, 0, 0}, "__tmp0"), UnknownBinding);
    Program q = rename_variable(p, {BindingRef::Kind::Param, 1, 1}, "__tmp0");
    // Edits are single-shot: the same edit conflicts the second time.
    CHECK_THROWS_AS(rename_variable(q, {BindingRef::Kind::Param, 1, 1}, "__tmp0"), NameConflict);
}

TEST_CASE("remove_annotation deletes one site and honors the protected target") {
    Program p = delta_x();
    // Sites: Point.x, Point.y, param p, param x, return.
    size_t target = 4;
    Program q = remove_annotation(p, 2, target);
    Program expect = parse(
        "record Point:\n"
        "    x: int\n"
        "    y: int\n"
        "def delta_x(p, x: int) -> int:\n"
        "    return p.x - x\n",
        Dialect::P);
    CHECK(program_equal(q, expect));
    CHECK(type_check(q).ok);

    CHECK_THROWS_AS(remove_annotation(p, target, target), ProtectedSite);
    CHECK_THROWS_AS(remove_annotation(q, 2, target), AbsentSite);
    CHECK_THROWS_AS(remove_annotation(p, 99, target), AbsentSite);

    for (size_t i : {0, 1, 3}) q = remove_annotation(q, static_cast<size_t>(i), target);
    int present = 0;
    for (const auto& s : list_annotation_sites(q)) present += s.present;
    CHECK(present == 1);
    CHECK(list_annotation_sites(q)[target].present);
}

TEST_CASE("rename_user_type co-renames annotations and constructors") {
    Program p = parse(
        "record Point:\n"
        "    x: int\n"
        "def mk(v: int) -> Point:\n"
        "    return Point(v)\n",
        Dialect::P);
    Program q = rename_user_type(p, 0, "Type0");
    Program expect = parse(
        "record Type0:\n"
        "    x: int\n"
        "def mk(v: int) -> Type0:\n"
        "    return Type0(v)\n",
        Dialect::P);
    CHECK(program_equal(q, expect));
    CHECK(type_check(q).ok);

    // Renaming the target's own type: the passing annotation is the new name.
    size_t returnSite = 2;  // Point.x, param v, return
    CHECK(annotation_passes(q, returnSite, type_named("Type0")));
    CHECK_FALSE(annotation_passes(q, returnSite, type_named("Point")));

    CHECK_THROWS_AS(rename_user_type(p, 0, "mk"), NameConflict);
    CHECK_THROWS_AS(rename_user_type(p, 1, "Type0"), UnknownDecl);
    CHECK_THROWS_AS(rename_user_type(p, 9, "Type0"), UnknownDecl);
}

TEST_CASE("alias_builtin rewrites raw builtin annotations only") {
    Program p = parse(
        "def f(x: int, s: str) -> int:\n"
        "    let y: list[int] = [x]\n"
        "    return x\n",
        Dialect::P);
    Program q = alias_builtin(p, type_int(), "AliasB0");
    Program expect = parse(
        "type AliasB0 = int\n"
        "def f(x: AliasB0, s: str) -> AliasB0:\n"
        "    let y: list[AliasB0] = [x]\n"
        "    return x\n",
        Dialect::P);
    CHECK(program_equal(q, expect));
    CHECK(type_check(q).ok);

    // No bool annotations: only the declaration is added.
    Program r = alias_builtin(p, type_bool(), "AliasB1");
    CHECK(r.decls.size() == p.decls.size() + 1);
    CHECK(program_equal(rename_user_type(r, 0, "Zzz"),
                        parse("type Zzz = bool\ndef f(x: int, s: str) -> int:\n"
                              "    let y: list[int] = [x]\n    return x\n",
                              Dialect::P)));

    // Double aliasing: the first alias's declaration and uses are untouched.
    Program qq = alias_builtin(q, type_int(), "AliasB1");
    Program expect2 = parse(
        "type AliasB1 = int\n"
        "type AliasB0 = int\n"
        "def f(x: AliasB0, s: str) -> AliasB0:\n"
        "    let y: list[AliasB0] = [x]\n"
        "    return x\n",
        Dialect::P);
    CHECK(program_equal(qq, expect2));
}

TEST_CASE("apply_random_edit samples uniform legal targets") {
    Program p = parse(
        "record A:\n    x: int\nrecord B:\n    y: str\n"
        "def f(a: A) -> int:\n    return 1\n",
        Dialect::P);

    SUBCASE("single-kind subset picks one of the legal declarations") {
        Rng rng(1);
        bool sawA = false, sawB = false;
        for (int i = 0; i < 40; ++i) {
            auto [q, e] = apply_random_edit(p, rng, 4, {EditKind::RenameUserType});
            CHECK(e.kind == EditKind::RenameUserType);
            CHECK((e.from == "A" || e.from == "B"));
            sawA |= e.from == "A";
            sawB |= e.from == "B";
            CHECK(type_check(q).ok);
        }
        CHECK(sawA);
        CHECK(sawB);
    }

    SUBCASE("one removable site is removed deterministically") {
        // Sites: A.x, B.y, param a, return. Protect all but B.y by removing
        // the others first, then the only legal removal is forced.
        size_t target = 3;
        Program q = remove_annotation(remove_annotation(p, 0, target), 2, target);
        Rng rng(7);
        auto [r, e] = apply_random_edit(q, rng, target, {EditKind::RemoveAnnotation});
        CHECK(e.siteIndex == 1);
        CHECK_FALSE(list_annotation_sites(r)[1].present);
    }

    SUBCASE("kind ratio is near 50/50 over 1000 draws") {
        Rng rng(99);
        int vars = 0;
        for (int i = 0; i < 1000; ++i) {
            auto [q, e] =
                apply_random_edit(p, rng, 4, {EditKind::RenameVariable, EditKind::RenameUserType});
            vars += e.kind == EditKind::RenameVariable;
        }
        CHECK(vars > 450);
        CHECK(vars < 550);
    }

    SUBCASE("NoLegalEdit when only the protected site is annotated") {
        size_t target = 3;
        Program q = remove_annotation(
            remove_annotation(remove_annotation(p, 0, target), 1, target), 2, target);
        Rng rng(3);
        CHECK_THROWS_AS(apply_random_edit(q, rng, target, {EditKind::RemoveAnnotation}),
                        NoLegalEdit);
    }
}

TEST_CASE("edit_distance matches a reference implementation") {
    CHECK(edit_distance("", "") == 0);
    CHECK(edit_distance("same text", "same text") == 0);
    CHECK(edit_distance("int", "str") == 3);
    CHECK(edit_distance("kitten", "sitting") == 3);

    Program p = delta_x();
    Program q = rename_user_type(p, 0, "Type0");
    std::string a = render(p, Dialect::P), b = render(q, Dialect::P);
    CHECK(edit_distance(a, b) == lev_oracle(a, b));
    CHECK(edit_distance(a, b) >= 1);
}

TEST_CASE("random edit sequences preserve typing and evaluation") {
    corpusgen::GenConfig cfg;
    Rng rng(2026);
    for (int trial = 0; trial < 30; ++trial) {
        Program p = corpusgen::gen_program(rng, cfg);
        auto sites = list_annotation_sites(p);
        std::vector<size_t> present;
        for (size_t i = 0; i < sites.size(); ++i) {
            if (sites[i].present) present.push_back(i);
        }
        size_t target = present[rng.below(present.size())];

        Program q = clone_program(p);
        std::map<std::string, std::string> nameMap;
        int nEdits = 1 + static_cast<int>(rng.below(5));
        std::vector<EditKind> kinds = {EditKind::RenameVariable, EditKind::RemoveAnnotation,
                                       EditKind::RenameUserType, EditKind::AliasBuiltin};
        for (int i = 0; i < nEdits; ++i) {
            std::string pre = render(q, q.dialect);
            Program next;
            Edit e;
            try {
                std::tie(next, e) = apply_random_edit(q, rng, target, kinds);
            } catch (const NoLegalEdit&) {
                break;
            }
            CHECK(edit_distance(pre, render(next, next.dialect)) >= 1);
            if (e.kind == EditKind::RenameUserType &&
                std::holds_alternative<RecordDecl>(q.decls[e.declIndex])) {
                bool chained = false;
                for (auto& [from, to] : nameMap) {
                    if (to == e.from) to = e.to, chained = true;
                }
                if (!chained) nameMap[e.from] = e.to;
            }
            q = std::move(next);
        }

        CHECK(type_check(q).ok);
        CHECK(list_annotation_sites(q)[target].present);

        const FuncDecl& entry = corpusgen::entry_function(p);
        for (int k = 0; k < 5; ++k) {
            Rng argRng = rng.child(static_cast<uint64_t>(k));
            auto args = corpusgen::gen_args(argRng, p, entry);
            std::vector<Value> argsPre, argsPost;
            for (const auto& v : args) {
                argsPre.push_back(clone_value(v, {}));
                argsPost.push_back(clone_value(v, nameMap));
            }
            Value a = evaluate(p, entry.name, argsPre);
            Value b = evaluate(q, corpusgen::entry_function(q).name, argsPost);
            CHECK(value_equal_mapped(a, b, nameMap));
        }
    }
}
