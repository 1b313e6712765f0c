#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "typesteer/corpusgen/generator.hpp"
#include "typesteer/minilang/render.hpp"
#include "typesteer/tinymodel/fim.hpp"
#include "typesteer/tinymodel/token_table.hpp"

using namespace typesteer;
using namespace typesteer::minilang;
using namespace typesteer::tinymodel;

TEST_CASE("token table is a bijection with stable sentinels") {
    const TokenTable& tt = TokenTable::instance();
    CHECK(tt.size() > 500);
    CHECK(tt.size() < 540);
    std::set<std::string> seen;
    for (int i = 0; i < tt.size(); ++i) {
        CHECK(seen.insert(tt.text(i)).second);
        CHECK(tt.id(tt.text(i)) == i);
    }
    CHECK(tt.text(tt.fimPrefix()) == "<fim_prefix>");
    CHECK(tt.text(tt.eos()) == "<eos>");
    CHECK_THROWS_AS(tt.id("not_a_token"), UnknownToken);
    CHECK(tt.digest() == TokenTable::instance().digest());
}

TEST_CASE("sentinels are never produced by the lexer") {
    // '<' lexes as a comparison operator, so the sentinel spelling cannot
    // survive lexing as a single token.
    CHECK_THROWS(encode("<fim_prefix>", Dialect::T));
}

TEST_CASE("every generated program encodes and the spans cover the text") {
    corpusgen::GenConfig cfg;
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        Program p = corpusgen::gen_program(rng, cfg);
        std::string text = render(p, p.dialect);
        auto spans = encode_with_spans(text, p.dialect);
        CHECK(!spans.empty());
        size_t cursor = 0;
        for (const auto& s : spans) {
            CHECK(s.begin >= cursor);
            CHECK(s.end >= s.begin);
            cursor = s.begin;
        }
    }
}

TEST_CASE("unknown identifiers are rejected") {
    CHECK_THROWS_AS(encode("def zebra(x: int) -> int:\n    return x\n", Dialect::P),
                    UnknownToken);
}

TEST_CASE("fim with rate 0 appends eos only") {
    Rng rng(1);
    std::vector<int> toks = {10, 11, 12, 13};
    auto out = fim_transform(toks, rng, 0.0);
    std::vector<int> expect = toks;
    expect.push_back(TokenTable::instance().eos());
    CHECK(out == expect);
}

TEST_CASE("fim rejects short sequences") {
    Rng rng(1);
    std::vector<int> toks = {10, 11};
    CHECK_THROWS_AS(fim_transform(toks, rng, 0.5), SequenceTooShort);
}

TEST_CASE("fim splits re-assemble to the original sequence") {
    const TokenTable& tt = TokenTable::instance();
    Rng rng(9);
    int fimCount = 0;
    for (int i = 0; i < 1000; ++i) {
        size_t n = 3 + rng.below(40);
        std::vector<int> toks;
        for (size_t j = 0; j < n; ++j) toks.push_back(static_cast<int>(8 + rng.below(100)));
        auto out = fim_transform(toks, rng, 0.5);
        CHECK(out.back() == tt.eos());
        fimCount += out.front() == tt.fimPrefix();
        auto back = fim_detransform(out);
        REQUIRE(back.has_value());
        CHECK(*back == toks);
    }
    CHECK(fimCount > 420);
    CHECK(fimCount < 580);
}

TEST_CASE("degenerate cuts put the whole sequence in the middle") {
    const TokenTable& tt = TokenTable::instance();
    std::vector<int> toks = {10, 11, 12};
    std::vector<int> expect = {tt.fimPrefix(), tt.fimSuffix(), tt.fimMiddle(), 10, 11, 12,
                               tt.eos()};
    bool found = false;
    for (uint64_t seed = 0; seed < 5000 && !found; ++seed) {
        Rng rng(seed);
        found = fim_transform(toks, rng, 1.0) == expect;
    }
    CHECK(found);
}

TEST_CASE("malformed fim sequences are rejected by the de-transform") {
    const TokenTable& tt = TokenTable::instance();
    CHECK_FALSE(fim_detransform({tt.fimPrefix(), 10, tt.fimMiddle(), 11, tt.fimSuffix()}));
    CHECK_FALSE(fim_detransform({10, tt.fimMiddle(), 11}));
}
