#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "typesteer/experiments/config.hpp"
#include "typesteer/experiments/pipeline.hpp"
#include "typesteer/experiments/report.hpp"
#include "typesteer/minilang/parser.hpp"
#include "typesteer/tinymodel/token_table.hpp"

using namespace typesteer;
using namespace typesteer::experiments;
using minilang::Dialect;
using tinymodel::Model;
using tinymodel::ModelConfig;
using tinymodel::TokenTable;

namespace {

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Model small_model() {
    ModelConfig cfg;
    cfg.nLayers = 4;
    cfg.dModel = 32;
    cfg.nHeads = 2;
    cfg.ctxLen = 512;
    cfg.vocabSize = TokenTable::instance().size();
    cfg.seed = 5;
    return Model(cfg);
}

steering::SteeringTriple toy_triple(int programId, const std::string& expected) {
    minilang::Program p = minilang::parse(
        "record Type0:\n    f0: int\ndef id0(id1: Type0, id2: str) -> int:\n"
        "    return id1.f0\n",
        Dialect::P);
    steering::SteeringTriple t;
    t.positive = steering::build_fim_type_prompt(p, 1, programId);
    t.negative = steering::build_fim_type_prompt(mutate::rename_user_type(p, 0, "TypeR0"), 1,
                                                 programId);
    t.expectedType = expected;
    return t;
}

}  // namespace

TEST_CASE("config files parse with defaults, overrides, and strict errors") {
    Config def = parse_config_text("");
    CHECK(def.model.nLayers == 8);
    CHECK(def.model.dModel == 192);
    CHECK(def.cap == 25);
    CHECK(def.finetuneLr == doctest::Approx(3e-5));
    CHECK(def.layerWindows == std::vector<int>{1, 3, 5});

    Config cfg = parse_config_text(
        "# comment\n[corpus]\nprogramCount = 500\nseed=7\n\n[model]\nepochs = 3 # trailing\n"
        "[steering]\ncap = 10\nlayerBegin = 1\nlayerEnd = 2\n"
        "[experiments]\nlayerWindows = 1, 3\noutputDir = runs/a\n");
    CHECK(cfg.corpus.programCount == 500);
    CHECK(cfg.corpus.seed == 7);
    CHECK(cfg.model.epochs == 3);
    CHECK(cfg.cap == 10);
    CHECK(cfg.layerWindows == std::vector<int>{1, 3});
    CHECK(cfg.outputDir == "runs/a");

    CHECK_THROWS_AS(parse_config_text("[nosuch]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[model]\nbogusKey = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[model]\nepochs = two\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("epochs = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[steering]\nlayerEnd = 99\n"), ConfigError);

    uint64_t d1 = config_digest(def);
    uint64_t d2 = config_digest(cfg);
    CHECK(d1 != d2);
    CHECK(config_digest(parse_config_text(render_config(cfg))) == d2);

    override_seed(cfg, 9);
    CHECK(cfg.corpus.seed == 9);
    CHECK(cfg.model.seed == 9);
    CHECK(cfg.steerSeed == 9);
    CHECK(cfg.randomBaselineSeed != 9);
}

TEST_CASE("the edit-combination matrix matches the seven-row structure") {
    const auto& combos = combo_list();
    REQUIRE(combos.size() == 7);
    CHECK(combos[0].name == "rename_vars");
    CHECK(combos[6].name == "all_edits");
    CHECK(combo_by_name("rename_types").kinds ==
          std::vector<mutate::EditKind>{mutate::EditKind::RenameUserType,
                                        mutate::EditKind::AliasBuiltin});
    CHECK(combo_by_name("all_edits").kinds.size() == 4);
    CHECK(combo_by_name("remove_annotations").kinds ==
          std::vector<mutate::EditKind>{mutate::EditKind::RemoveAnnotation});
    CHECK_THROWS_AS(combo_by_name("nope"), ConfigError);
}

TEST_CASE("dataset matrix covers 7 combos x 2 dialects even when cells are empty") {
    // An untrained model mispredicts nearly every clean prompt, so cells are
    // (close to) empty — the matrix structure and warnings must still hold.
    Model model = small_model();
    Config cfg = parse_config_text("[steering]\nlayerBegin = 1\nlayerEnd = 2\n");
    cfg.corpus.programCount = 110;  // 22 steer-source entries
    corpusgen::Corpus corpus = corpusgen::gen_corpus(cfg.corpus);

    std::ostringstream log;
    auto matrix = run_dataset_matrix(model, corpus, cfg, &log);
    REQUIRE(matrix.size() == 14);
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& cell : matrix) {
        seen.insert({cell.combo, minilang::dialect_name(cell.dialect)});
        CHECK(cell.steer.size() + cell.heldOut.size() <=
              static_cast<size_t>(cell.builtBeforeBalance));
        std::set<int> steerIds, heldIds;
        for (const auto& t : cell.steer) steerIds.insert(t.positive.sourceProgramId);
        for (const auto& t : cell.heldOut) heldIds.insert(t.positive.sourceProgramId);
        for (int id : steerIds) CHECK(heldIds.count(id) == 0);
    }
    CHECK(seen.size() == 14);
    CHECK(log.str().find("warning") != std::string::npos);

    // Rebuilding a single cell reproduces the matrix cell.
    auto cell = build_dataset_cell(model, corpus, combo_by_name("all_edits"), Dialect::P, cfg,
                                   nullptr);
    const DatasetCell* inMatrix = nullptr;
    for (const auto& c : matrix) {
        if (c.combo == "all_edits" && c.dialect == Dialect::P) inMatrix = &c;
    }
    REQUIRE(inMatrix);
    CHECK(cell.builtBeforeBalance == inMatrix->builtBeforeBalance);
    CHECK(cell.steer.size() == inMatrix->steer.size());
}

TEST_CASE("layer ablation enumerates every window placement") {
    Model model = small_model();  // 4 layers
    steering::SteeringVectorSet vectors;
    for (int l = 0; l < 4; ++l) vectors.vectors.push_back(Model::Vec::Zero(32));
    std::vector<steering::SteeringTriple> held = {toy_triple(0, "TypeR0"),
                                                  toy_triple(1, "TypeR0")};

    auto grid = layer_ablation(model, vectors, held, {1, 3});
    REQUIRE(grid.size() == 4 + 2);  // window 1: 4 placements, window 3: 2
    CHECK(grid[0].window == 1);
    CHECK(grid[0].start == 0);
    CHECK(grid[4].window == 3);
    CHECK(grid[5].start == 1);
    for (const auto& cell : grid) {
        CHECK(cell.report.total == 2);
        // Zero vectors: every placement behaves identically to unsteered.
        CHECK(cell.report.exact == grid[0].report.exact);
    }
}

TEST_CASE("steering_layers reflects the configured band") {
    Config cfg = parse_config_text("[steering]\nlayerBegin = 2\nlayerEnd = 6\n");
    CHECK(steering_layers(cfg) == std::vector<int>{2, 3, 4, 5, 6});
}

TEST_CASE("spearman matches hand-computed values and handles ties") {
    CHECK(spearman_rho({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
    CHECK(spearman_rho({1, 2, 3, 4}, {9, 7, 5, 3}) == doctest::Approx(-1.0));
    CHECK(spearman_rho({1, 2, 3}, {5, 5, 5}) == doctest::Approx(0.0));
    CHECK(spearman_rho({1}, {2}) == doctest::Approx(0.0));
    // Hand-computed with average ranks: x = {1,2,2,4}, y = {1,3,2,4}.
    // ranks x = {1, 2.5, 2.5, 4}, ranks y = {1,3,2,4} -> rho = cov/sqrt(va*vb).
    double rho = spearman_rho({1, 2, 2, 4}, {1, 3, 2, 4});
    CHECK(rho == doctest::Approx(0.9486832980505138));
}

TEST_CASE("type frequency report buckets by steering-set frequency") {
    std::map<std::string, int> freq = {{"int", 3}, {"str", 3}, {"bool", 1}, {"ghost", 2}};
    std::map<std::string, steering::TypeStats> perType;
    perType["int"] = {10, 8, 9};
    perType["str"] = {10, 4, 6};
    perType["bool"] = {5, 5, 5};
    perType["absent"] = {4, 2, 2};  // no steering-set frequency: excluded

    FreqReport report = type_frequency_report(freq, perType);
    CHECK(report.nTypes == 3);
    REQUIRE(report.buckets.size() == 2);
    CHECK(report.buckets[0].freq == 1);
    CHECK(report.buckets[0].nTypes == 1);
    CHECK(report.buckets[0].meanAcc == doctest::Approx(1.0));
    CHECK(report.buckets[0].q1 == doctest::Approx(1.0));
    CHECK(report.buckets[1].freq == 3);
    CHECK(report.buckets[1].nTypes == 2);
    CHECK(report.buckets[1].meanAcc == doctest::Approx(0.6));
    CHECK(report.buckets[1].q1 == doctest::Approx(0.5));
    CHECK(report.buckets[1].q3 == doctest::Approx(0.7));

    FreqReport single = type_frequency_report({{"int", 2}}, {{"int", {4, 2, 3}}});
    CHECK(single.buckets.size() == 1);
    CHECK(single.spearman == doctest::Approx(0.0));
}

TEST_CASE("finetune_baseline records a curve with a pre-finetune point") {
    Model model = small_model();
    std::vector<steering::SteeringTriple> steerSet, heldOut;
    for (int i = 0; i < 4; ++i) steerSet.push_back(toy_triple(i, "TypeR0"));
    for (int i = 4; i < 6; ++i) heldOut.push_back(toy_triple(i, "TypeR0"));
    Config cfg = parse_config_text("[steering]\nlayerBegin = 1\nlayerEnd = 2\n");
    cfg.finetuneEpochs = 2;
    cfg.finetuneLr = 1e-3;

    FinetuneCurve curve = finetune_baseline(model, steerSet, heldOut, 0.5, cfg, nullptr);
    REQUIRE(curve.perEpoch.size() == 3);  // epoch 0 + 2 fine-tuning epochs
    CHECK(curve.steeredReference == doctest::Approx(0.5));
    for (const auto& report : curve.perEpoch) CHECK(report.total == 2);
}

TEST_CASE("emit_report is deterministic and renders missing cells as dashes") {
    ExperimentReport r;
    r.configDigest = "aaaa";
    r.checkpointDigest = "bbbb";
    r.datasetDigests["rename_types/P"] = "cccc";
    r.randomBaselineSeed = 1234;
    r.sizes.push_back({"P", "rename_types", 40, 25, 10});
    r.accuracy.push_back({"P", "rename_types", "steered", 8, 9, 10});
    r.accuracy.push_back({"P", "rename_types", "unsteered", 0, 3, 10});
    r.accuracy.push_back({"T", "all_edits", "steered", 0, 0, 0});  // empty cell
    r.layers.push_back({"P", "rename_types", 3, 2, 7, 10});
    r.transfer.push_back({"P", "T", "rename_types", "steered", 5, 10});
    r.finetune.push_back({0, 0, 10});
    r.finetune.push_back({1, 7, 10});
    r.finetuneSteeredReference = 0.8;
    r.hasFreq = true;
    r.freq.spearman = 0.1;
    r.freq.nTypes = 2;
    r.freq.buckets.push_back({3, 0.75, 0.6, 0.9, 2});
    r.wallClockSeconds = 123.0;

    namespace fs = std::filesystem;
    fs::path dirA = fs::temp_directory_path() / "ts_report_a";
    fs::path dirB = fs::temp_directory_path() / "ts_report_b";
    emit_report(r, dirA.string());
    r.wallClockSeconds = 456.0;  // must not influence any CSV
    emit_report(r, dirB.string());

    for (const char* name : {"sizes.csv", "accuracy.csv", "layers.csv", "transfer.csv",
                             "finetune.csv", "type_frequency.csv"}) {
        CHECK(read_file(dirA / name) == read_file(dirB / name));
    }

    std::string acc = read_file(dirA / "accuracy.csv");
    CHECK(acc.find("P,rename_types,steered,8,9,10,0.8000,0.9000") != std::string::npos);
    CHECK(acc.find("T,all_edits,steered,0,0,0,—,—") != std::string::npos);

    std::string md = read_file(dirA / "summary.md");
    CHECK(md.find("| P | rename_types | 0.0000 | 0.8000 | — | — |") != std::string::npos);
    CHECK(md.find("— | —") != std::string::npos);  // missing T sizes
    CHECK(md.find("Spearman rho: 0.1000") != std::string::npos);
    CHECK(md.find("bbbb") != std::string::npos);

    ExperimentReport back = load_report_json((dirA / "report.json").string());
    CHECK(back.checkpointDigest == r.checkpointDigest);
    CHECK(back.accuracy.size() == r.accuracy.size());
    CHECK(back.freq.buckets.size() == 1);
    CHECK(back.wallClockSeconds == doctest::Approx(123.0));
    CHECK(back.finetuneSteeredReference == doctest::Approx(0.8));
    fs::remove_all(dirA);
    fs::remove_all(dirB);
}

TEST_CASE("format_accuracy") {
    CHECK(format_accuracy(1, 3) == "0.3333");
    CHECK(format_accuracy(0, 0) == "—");
    CHECK(format_accuracy(2, 2) == "1.0000");
}
