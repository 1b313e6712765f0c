#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "typesteer/corpusgen/generator.hpp"
#include "typesteer/minilang/check.hpp"
#include "typesteer/minilang/parser.hpp"
#include "typesteer/minilang/render.hpp"
#include "typesteer/mutate/edits.hpp"
#include "typesteer/steering/eval.hpp"
#include "typesteer/steering/pairs.hpp"
#include "typesteer/steering/prompts.hpp"
#include "typesteer/steering/vectors.hpp"
#include "typesteer/tinymodel/token_table.hpp"

using namespace typesteer;
using namespace typesteer::minilang;
using namespace typesteer::steering;
using typesteer::tinymodel::Model;
using typesteer::tinymodel::ModelConfig;
using typesteer::tinymodel::TokenTable;

namespace {

Model small_model(uint64_t seed = 11) {
    ModelConfig cfg;
    cfg.nLayers = 2;
    cfg.dModel = 32;
    cfg.nHeads = 2;
    cfg.ctxLen = 512;
    cfg.vocabSize = TokenTable::instance().size();
    cfg.seed = seed;
    return Model(cfg);
}

SteeringTriple toy_triple(int programId) {
    Program p = parse(
        "record Type0:\n    f0: int\ndef id0(id1: Type0, id2: str) -> int:\n"
        "    return id1.f0\n",
        Dialect::P);
    // Sites: Type0.f0, id1, id2, return.
    SteeringTriple t;
    t.positive = build_fim_type_prompt(p, 1, programId);
    Program q = mutate::rename_user_type(p, 0, "TypeR0");
    t.negative = build_fim_type_prompt(q, 1, programId);
    t.expectedType = "TypeR0";
    t.editTrace.applied.push_back({mutate::EditKind::RenameUserType, "Type0", "TypeR0", -1,
                                   {}, 0});
    t.editTrace.typeNameMap["Type0"] = "TypeR0";
    t.editTrace.editDistance = static_cast<int>(
        mutate::edit_distance(render(p, Dialect::P), render(q, Dialect::P)));
    t.negativePrediction = "int";
    return t;
}

}  // namespace

TEST_CASE("prompt splits exactly at the annotation and reassembles") {
    Program p = parse("def id0(id1: str) -> bool:\n    return true\n", Dialect::P);
    FimPrompt prompt = build_fim_type_prompt(p, 0, 7);
    CHECK(prompt.expectedType == "str");
    CHECK(prompt.prefixText.substr(prompt.prefixText.size() - 6) == "(id1: ");
    CHECK(prompt.suffixText.substr(0, 1) == ")");
    CHECK(prompt.sourceProgramId == 7);

    Program back = parse(prompt.prefixText + prompt.expectedType + prompt.suffixText,
                         Dialect::P);
    CHECK(program_equal(p, back));
    CHECK(type_check(back).ok);

    CHECK_THROWS_AS(build_fim_type_prompt(p, 99, 7), mutate::AbsentSite);
    Program q = mutate::remove_annotation(p, 0, 1);
    CHECK_THROWS_AS(build_fim_type_prompt(q, 0, 7), mutate::AbsentSite);
}

TEST_CASE("annotation at the end of the file leaves only punctuation in the suffix") {
    Program p = parse("function id0(): number { return 1; }\nrecord Type0 { f0: boolean; }\n",
                      Dialect::T);
    auto sites = list_annotation_sites(p);
    FimPrompt prompt = build_fim_type_prompt(p, sites.size() - 1, 0);
    CHECK(prompt.expectedType == "boolean");
    CHECK(prompt.suffixText == ";\n}\n");
}

TEST_CASE("prompt tokens use the full-program token stream") {
    corpusgen::GenConfig cfg;
    Rng rng(31);
    const TokenTable& tt = TokenTable::instance();
    for (int i = 0; i < 30; ++i) {
        Program p = corpusgen::gen_program(rng, cfg);
        auto sites = list_annotation_sites(p);
        std::vector<size_t> present;
        for (size_t s = 0; s < sites.size(); ++s) {
            if (sites[s].present) present.push_back(s);
        }
        size_t site = present[rng.below(present.size())];
        FimPrompt prompt = build_fim_type_prompt(p, site, i);
        auto toks = prompt_tokens(prompt);
        CHECK(toks.front() == tt.fimPrefix());
        CHECK(toks.back() == tt.fimMiddle());

        // Prefix+type+suffix tokens must equal the full program encoding.
        RenderResult rr = render_with_sites(p, p.dialect);
        auto full = tinymodel::encode(rr.text, p.dialect);
        std::string typeText = prompt.expectedType;
        auto typeToks = tinymodel::encode(typeText, Dialect::T);  // types lex layout-free
        std::vector<int> rebuilt = prompt.prefixTokens;
        rebuilt.insert(rebuilt.end(), typeToks.begin(), typeToks.end());
        rebuilt.insert(rebuilt.end(), prompt.suffixTokens.begin(), prompt.suffixTokens.end());
        CHECK(rebuilt == full);
    }
}

TEST_CASE("predict_type is deterministic and checker-validates its output") {
    Model model = small_model();
    Program p = parse("def id0(id1: str) -> bool:\n    return true\n", Dialect::P);
    FimPrompt prompt = build_fim_type_prompt(p, 0, 0);
    Prediction a = predict_type(model, prompt);
    Prediction b = predict_type(model, prompt);
    CHECK(a.typeText == b.typeText);
    CHECK(a.exactMatch == b.exactMatch);
    if (a.passesChecker) {
        Program q = parse(prompt.prefixText + a.typeText + prompt.suffixText, Dialect::P);
        CHECK(type_check(q).ok);
    }
}

TEST_CASE("balance_dataset caps per-type counts, keeping the earliest") {
    std::vector<SteeringTriple> triples;
    for (int i = 0; i < 30; ++i) {
        SteeringTriple t = toy_triple(i);
        t.expectedType = "int";
        triples.push_back(t);
    }
    for (int i = 30; i < 35; ++i) {
        SteeringTriple t = toy_triple(i);
        t.expectedType = "str";
        triples.push_back(t);
    }
    auto out = balance_dataset(triples, 25);
    CHECK(out.size() == 30);
    int ints = 0;
    for (const auto& t : out) ints += t.expectedType == "int";
    CHECK(ints == 25);
    CHECK(out[0].positive.sourceProgramId == 0);  // earliest kept

    CHECK(balance_dataset(triples, 40).size() == triples.size());
    auto one = balance_dataset(triples, 1);
    CHECK(one.size() == 2);
}

TEST_CASE("steer/held-out split never straddles a program") {
    std::vector<SteeringTriple> triples;
    for (int prog = 0; prog < 100; ++prog) {
        for (int k = 0; k < 2; ++k) triples.push_back(toy_triple(prog));
    }
    auto [steer, held] = split_steer_heldout(triples, 0.7, 99);
    CHECK(steer.size() + held.size() == triples.size());
    std::set<int> steerIds, heldIds;
    for (const auto& t : steer) steerIds.insert(t.positive.sourceProgramId);
    for (const auto& t : held) heldIds.insert(t.positive.sourceProgramId);
    for (int id : steerIds) CHECK(heldIds.count(id) == 0);
    CHECK(steerIds.size() == 70);

    auto [steer2, held2] = split_steer_heldout(triples, 0.7, 99);
    CHECK(steer2.size() == steer.size());
    for (size_t i = 0; i < steer.size(); ++i) {
        CHECK(steer2[i].positive.sourceProgramId == steer[i].positive.sourceProgramId);
    }

    std::vector<SteeringTriple> oneProg = {toy_triple(5), toy_triple(5)};
    auto [s1, h1] = split_steer_heldout(oneProg, 0.7, 1);
    CHECK((s1.empty() || h1.empty()));
    CHECK(s1.size() + h1.size() == 2);
}

TEST_CASE("steering vectors equal an independent accumulation") {
    Model model = small_model();
    std::vector<SteeringTriple> set = {toy_triple(0), toy_triple(1), toy_triple(2)};
    // Distinct negatives so the mean is non-trivial.
    Program base = parse(
        "record Type0:\n    f0: int\ndef id0(id1: Type0, id2: str) -> int:\n"
        "    return id1.f0\n",
        Dialect::P);
    set[1].negative = build_fim_type_prompt(mutate::alias_builtin(base, type_str(), "AliasB0"),
                                            1, 1);
    set[2].negative = build_fim_type_prompt(
        mutate::rename_variable(base, {BindingRef::Kind::Param, 1, 1}, "__tmp0"), 1, 2);

    SteeringVectorSet vs = compute_steering_vectors(model, set);
    REQUIRE(vs.vectors.size() == 2);
    CHECK(vs.pairCount == 3);

    // Oracle: separate tap path, summing differences then dividing.
    std::vector<Eigen::VectorXd> acc(2, Eigen::VectorXd::Zero(32));
    for (const auto& t : set) {
        for (int side = 0; side < 2; ++side) {
            const FimPrompt& pr = side == 0 ? t.positive : t.negative;
            auto toks = prompt_tokens(pr);
            std::map<int, std::vector<Model::Vec>> taps;
            taps[static_cast<int>(toks.size()) - 1] = {};
            model.hidden_final(toks, nullptr, -1, &taps);
            for (int l = 0; l < 2; ++l) {
                acc[l] += (side == 0 ? 1.0 : -1.0) * taps.begin()->second[l].cast<double>();
            }
        }
    }
    for (int l = 0; l < 2; ++l) {
        Eigen::VectorXf oracle = (acc[l] / 3).cast<float>();
        CHECK((oracle - vs.vectors[l]).lpNorm<Eigen::Infinity>() <=
              1e-6f * std::max(1.0f, oracle.lpNorm<Eigen::Infinity>()));
    }

    // |D|=1 equals the single difference; duplication leaves the mean fixed.
    std::vector<SteeringTriple> single = {set[0]};
    SteeringVectorSet v1 = compute_steering_vectors(model, single);
    std::vector<SteeringTriple> doubled = {set[0], set[0]};
    SteeringVectorSet v2 = compute_steering_vectors(model, doubled);
    for (int l = 0; l < 2; ++l) {
        CHECK((v1.vectors[l] - v2.vectors[l]).lpNorm<Eigen::Infinity>() <= 1e-6f);
    }

    // Linearity: union mean is the pair-count-weighted average.
    std::vector<SteeringTriple> d1 = {set[0]}, d2 = {set[1], set[2]};
    auto u1 = compute_steering_vectors(model, d1);
    auto u2 = compute_steering_vectors(model, d2);
    for (int l = 0; l < 2; ++l) {
        Eigen::VectorXf weighted = (u1.vectors[l] * 1 + u2.vectors[l] * 2) / 3;
        CHECK((weighted - vs.vectors[l]).lpNorm<Eigen::Infinity>() <= 1e-5f);
    }
}

TEST_CASE("random vector baseline is norm-matched and uncorrelated") {
    SteeringVectorSet like;
    Rng rng(17);
    for (int l = 0; l < 8; ++l) {
        Model::Vec v(192);
        for (int i = 0; i < 192; ++i) v(i) = static_cast<float>(rng.normal());
        like.vectors.push_back(v);
    }
    like.pairCount = 4;

    SteeringVectorSet r1 = random_vector_set(like, 1);
    SteeringVectorSet r2 = random_vector_set(like, 2);
    double cosSum = 0;
    for (int l = 0; l < 8; ++l) {
        CHECK(r1.vectors[l].norm() ==
              doctest::Approx(like.vectors[l].norm()).epsilon(1e-6));
        CHECK((r1.vectors[l] - r2.vectors[l]).norm() > 0);
        cosSum += r1.vectors[l].dot(like.vectors[l]) /
                  (r1.vectors[l].norm() * like.vectors[l].norm());
    }
    CHECK(std::abs(cosSum / 8) < 0.2);
}

TEST_CASE("zero steering reproduces unsteered predictions") {
    Model model = small_model();
    std::vector<SteeringTriple> set = {toy_triple(0), toy_triple(1)};
    SteeringVectorSet zero;
    for (int l = 0; l < 2; ++l) zero.vectors.push_back(Model::Vec::Zero(32));
    zero.pairCount = 1;

    EvalReport none = steer_and_eval(model, zero, {}, set);
    EvalReport zeroed = steer_and_eval(model, zero, {0, 1}, set);
    CHECK(none.total == zeroed.total);
    CHECK(none.exact == zeroed.exact);
    CHECK(none.checker == zeroed.checker);
}

TEST_CASE("triples and vector sets round-trip through their files") {
    namespace fs = std::filesystem;
    std::vector<SteeringTriple> set = {toy_triple(3), toy_triple(4)};
    fs::path dir = fs::temp_directory_path() / "ts_steering_test";
    fs::create_directories(dir);

    write_triples((dir / "pairs.jsonl").string(), set);
    auto back = load_triples((dir / "pairs.jsonl").string());
    REQUIRE(back.size() == set.size());
    for (size_t i = 0; i < set.size(); ++i) {
        CHECK(back[i].positive.prefixText == set[i].positive.prefixText);
        CHECK(back[i].positive.prefixTokens == set[i].positive.prefixTokens);
        CHECK(back[i].negative.suffixTokens == set[i].negative.suffixTokens);
        CHECK(back[i].expectedType == set[i].expectedType);
        CHECK(back[i].editTrace.editDistance == set[i].editTrace.editDistance);
        CHECK(back[i].editTrace.applied.size() == 1);
        CHECK(back[i].editTrace.typeNameMap.at("Type0") == "TypeR0");
        CHECK(back[i].negativePrediction == set[i].negativePrediction);
    }
    CHECK(dataset_digest(back) == dataset_digest(set));

    Model model = small_model();
    SteeringVectorSet vs = compute_steering_vectors(model, set);
    save_vectors((dir / "vecs.tsv1").string(), vs);
    SteeringVectorSet vb = load_vectors((dir / "vecs.tsv1").string());
    CHECK(vb.pairCount == vs.pairCount);
    CHECK(vb.datasetDigest == vs.datasetDigest);
    REQUIRE(vb.vectors.size() == vs.vectors.size());
    for (size_t l = 0; l < vs.vectors.size(); ++l) {
        CHECK((vb.vectors[l] - vs.vectors[l]).lpNorm<Eigen::Infinity>() == 0.0f);
    }
    fs::remove_all(dir);
}

TEST_CASE("make_steering_pair discards entries the model gets wrong") {
    // An untrained model essentially never predicts the exact type, so pair
    // construction must return nothing rather than fabricate a triple.
    Model model = small_model();
    corpusgen::GenConfig cfg;
    cfg.programCount = 6;
    auto corpus = corpusgen::gen_corpus(cfg);
    SteeringDatasetSpec spec;
    spec.editKinds = {mutate::EditKind::RenameVariable, mutate::EditKind::RenameUserType};
    Rng rng(3);
    int made = 0;
    for (const auto& e : corpus.entries) {
        spec.dialect = e.dialect;
        auto t = make_steering_pair(model, e, spec, rng);
        if (t) {
            ++made;
            CHECK(t->positive.sourceProgramId == t->negative.sourceProgramId);
            CHECK(!t->editTrace.applied.empty());
        }
    }
    CHECK(made <= 1);
}
