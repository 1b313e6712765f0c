#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>

#include "typesteer/corpusgen/corpus.hpp"
#include "typesteer/minilang/check.hpp"
#include "typesteer/minilang/interp.hpp"
#include "typesteer/minilang/parser.hpp"
#include "typesteer/minilang/render.hpp"

using namespace typesteer;
using namespace typesteer::minilang;
using namespace typesteer::corpusgen;

TEST_CASE("dropProb 0 keeps every annotation slot filled") {
    GenConfig cfg;
    cfg.annotationDropProb = 0.0;
    Rng rng(7);
    for (int i = 0; i < 50; ++i) {
        Program p = gen_program(rng, cfg);
        for (const auto& s : list_annotation_sites(p)) CHECK(s.present);
    }
}

TEST_CASE("dropProb 1 keeps only the forced minimum") {
    GenConfig cfg;
    cfg.annotationDropProb = 1.0;
    Rng rng(7);
    for (int i = 0; i < 50; ++i) {
        bool force = rng.bernoulli(0.5);
        Program p = gen_program_forced(rng, cfg, force);
        int present = 0;
        for (const auto& s : list_annotation_sites(p)) present += s.present;
        // One uniformly kept site, plus the user-type site when forced
        // (which may coincide with it).
        CHECK(present >= 1);
        CHECK(present <= 2);
        if (force) {
            bool userPresent = false;
            for (const auto& s : list_annotation_sites(p)) {
                if (s.present && (*s.annotation)->kind == Type::Kind::Named) userPresent = true;
            }
            CHECK(userPresent);
        }
    }
}

TEST_CASE("generated programs type-check, round-trip, and run") {
    GenConfig cfg;
    Rng rng(42);
    int trapCount = 0;
    for (int i = 0; i < 200; ++i) {
        Program p = gen_program(rng, cfg);
        CHECK(type_check(p).ok);

        std::string text = render(p, p.dialect);
        Program back = parse(text, p.dialect);
        CHECK(program_equal(p, back));

        const FuncDecl& entry = entry_function(p);
        auto args = gen_args(rng, p, entry);
        Value v = evaluate(p, entry.name, args);
        trapCount += v.is_trap();
    }
    // Generation is type-directed, so clean runs dominate. Traps come from
    // Dyn-typed slots after annotation dropping: entry arguments for those
    // are random-typed, and every annotated slot is exercised by a usage
    // statement (the usage is what makes the annotation recoverable from the
    // text), so a wrong-typed value forwarded into one traps there. Measured
    // 40-51/200 across seeds; bound leaves headroom above that.
    CHECK(trapCount < 60);
}

TEST_CASE("same seed gives identical programs") {
    GenConfig cfg;
    Rng a(123), b(123);
    for (int i = 0; i < 20; ++i) {
        CHECK(ast_digest(gen_program(a, cfg)) == ast_digest(gen_program(b, cfg)));
    }
}

TEST_CASE("corpus entries are split by programId and independent of count") {
    GenConfig cfg;
    cfg.programCount = 200;
    Corpus c = gen_corpus(cfg);
    REQUIRE(c.entries.size() == 200);

    int counts[3] = {0, 0, 0};
    for (const auto& e : c.entries) {
        CHECK(e.split == split_of(e.programId));
        ++counts[static_cast<int>(e.split)];
    }
    CHECK(counts[0] == 140);
    CHECK(counts[1] == 20);
    CHECK(counts[2] == 40);

    GenConfig small = cfg;
    small.programCount = 50;
    Corpus c2 = gen_corpus(small);
    for (int i = 0; i < 50; ++i) {
        CHECK(c2.entries[i].text == c.entries[i].text);
        CHECK(c2.entries[i].astDigest == c.entries[i].astDigest);
    }
}

TEST_CASE("dialect mix lands near the configured fraction") {
    GenConfig cfg;
    cfg.programCount = 1000;
    Corpus c = gen_corpus(cfg);
    int pCount = 0;
    for (const auto& e : c.entries) pCount += e.dialect == Dialect::P;
    CHECK(pCount > 450);
    CHECK(pCount < 550);
}

TEST_CASE("user types appear as annotation targets in at least a quarter of programs") {
    GenConfig cfg;
    cfg.programCount = 400;
    Corpus c = gen_corpus(cfg);
    int withUser = 0;
    for (const auto& e : c.entries) {
        Program p = entry_program(e);
        bool found = false;
        std::set<std::string> recs;
        for (const auto& d : p.decls) {
            if (const auto* r = std::get_if<RecordDecl>(&d)) recs.insert(r->name);
        }
        for (const auto& s : list_annotation_sites(p)) {
            if (s.present && (*s.annotation)->kind == Type::Kind::Named &&
                recs.count((*s.annotation)->name)) {
                found = true;
            }
        }
        withUser += found;
    }
    CHECK(withUser >= 100);
}

TEST_CASE("write/load round-trips and reruns produce the identical manifest") {
    namespace fs = std::filesystem;
    GenConfig cfg;
    cfg.programCount = 60;
    Corpus c = gen_corpus(cfg);
    fs::path dir = fs::temp_directory_path() / "ts_corpus_test";
    fs::remove_all(dir);
    write_corpus(c, dir.string());

    Corpus back = load_corpus(dir.string());
    REQUIRE(back.entries.size() == c.entries.size());
    CHECK(corpus_digest(back) == corpus_digest(c));
    CHECK(back.cfg.seed == cfg.seed);

    std::ifstream m1(dir / "manifest.json");
    std::string first((std::istreambuf_iterator<char>(m1)), std::istreambuf_iterator<char>());
    write_corpus(gen_corpus(cfg), dir.string());
    std::ifstream m2(dir / "manifest.json");
    std::string second((std::istreambuf_iterator<char>(m2)), std::istreambuf_iterator<char>());
    CHECK(first == second);
    fs::remove_all(dir);
}
