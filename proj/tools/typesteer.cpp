#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "typesteer/experiments/config.hpp"
#include "typesteer/experiments/pipeline.hpp"
#include "typesteer/experiments/report.hpp"
#include "typesteer/minilang/check.hpp"
#include "typesteer/minilang/parser.hpp"
#include "typesteer/minilang/render.hpp"
#include "typesteer/tinymodel/checkpoint.hpp"
#include "typesteer/tinymodel/token_table.hpp"
#include "typesteer/util/hash.hpp"

namespace ex = typesteer::experiments;
namespace st = typesteer::steering;
namespace tmdl = typesteer::tinymodel;
namespace cg = typesteer::corpusgen;
namespace ml = typesteer::minilang;

namespace {

struct Common {
    std::string configPath;
    std::optional<uint64_t> seed;
};

void add_common(CLI::App* cmd, Common& common) {
    cmd->add_option("--config", common.configPath, "plain-text key-value config file");
    cmd->add_option("--seed", common.seed, "override every seed in the config");
}

ex::Config load_config(const Common& common) {
    ex::Config cfg = common.configPath.empty() ? ex::parse_config_text("")
                                               : ex::parse_config_file(common.configPath);
    if (common.seed) ex::override_seed(cfg, *common.seed);
    return cfg;
}

ml::Dialect parse_dialect(const std::string& name) {
    if (name == "P") return ml::Dialect::P;
    if (name == "T") return ml::Dialect::T;
    throw ex::ConfigError("dialect must be P or T, got '" + name + "'");
}

void print_eval(const char* label, const st::EvalReport& r) {
    std::cout << label << ": exact " << r.exact << "/" << r.total << " ("
              << ex::format_accuracy(r.exact, r.total) << "), checker " << r.checker << "/"
              << r.total << " (" << ex::format_accuracy(r.checker, r.total) << ")\n";
}

std::vector<std::vector<int>> train_sequences(const cg::Corpus& corpus) {
    std::vector<std::vector<int>> seqs;
    for (const auto& entry : corpus.entries) {
        if (entry.split != cg::Split::Train) continue;
        seqs.push_back(tmdl::encode(entry.text, entry.dialect));
    }
    return seqs;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"edit-induced type-misprediction steering laboratory"};
    app.require_subcommand(1);

    Common common;

    auto* genCorpus = app.add_subcommand("gen-corpus", "generate the seeded program corpus");
    std::string genOut;
    genCorpus->add_option("--out", genOut, "output directory")->required();
    add_common(genCorpus, common);

    auto* train = app.add_subcommand("train", "pretrain the FIM model on the train split");
    std::string trainCorpus, trainOut;
    bool trainEval = false;
    train->add_option("--corpus", trainCorpus, "corpus directory")->required();
    train->add_option("--out", trainOut, "checkpoint path")->required();
    train->add_flag("--eval", trainEval, "report clean-split accuracy after training");
    add_common(train, common);

    auto* buildPairs =
        app.add_subcommand("build-pairs", "build one steering dataset (combo x dialect)");
    std::string bpCorpus, bpCkpt, bpCombo, bpDialect, bpOut;
    buildPairs->add_option("--corpus", bpCorpus, "corpus directory")->required();
    buildPairs->add_option("--ckpt", bpCkpt, "checkpoint path")->required();
    buildPairs->add_option("--combo", bpCombo, "edit combination name")->required();
    buildPairs->add_option("--dialect", bpDialect, "P or T")->required();
    buildPairs->add_option("--out", bpOut, "output prefix for .steer/.heldout.jsonl")
        ->required();
    add_common(buildPairs, common);

    auto* steer = app.add_subcommand("steer", "compute vectors and evaluate steering");
    std::string stCkpt, stSteer, stHeld, stVectorsOut;
    bool stRandom = false;
    steer->add_option("--ckpt", stCkpt, "checkpoint path")->required();
    steer->add_option("--steer", stSteer, "steering-set triples (jsonl)")->required();
    steer->add_option("--heldout", stHeld, "held-out triples (jsonl)")->required();
    steer->add_option("--vectors-out", stVectorsOut, "save the steering vectors here");
    steer->add_flag("--random", stRandom, "also run the norm-matched random baseline");
    add_common(steer, common);

    auto* ablate = app.add_subcommand("ablate-layers", "accuracy over every window placement");
    std::string abCkpt, abSteer, abHeld, abOut;
    ablate->add_option("--ckpt", abCkpt, "checkpoint path")->required();
    ablate->add_option("--steer", abSteer, "steering-set triples (jsonl)")->required();
    ablate->add_option("--heldout", abHeld, "held-out triples (jsonl)")->required();
    ablate->add_option("--out", abOut, "write the grid CSV here (default stdout)");
    add_common(ablate, common);

    auto* transfer = app.add_subcommand("transfer", "evaluate vectors across dialects");
    std::string trCkpt, trSteerFrom, trHeldTo;
    transfer->add_option("--ckpt", trCkpt, "checkpoint path")->required();
    transfer->add_option("--steer-from", trSteerFrom, "source-dialect steering set (jsonl)")
        ->required();
    transfer->add_option("--heldout-to", trHeldTo, "target-dialect held-out set (jsonl)")
        ->required();
    add_common(transfer, common);

    auto* finetune =
        app.add_subcommand("finetune-baseline", "fine-tuning baseline with per-epoch accuracy");
    std::string ftCkpt, ftSteer, ftHeld;
    finetune->add_option("--ckpt", ftCkpt, "checkpoint path")->required();
    finetune->add_option("--steer", ftSteer, "steering-set triples (jsonl)")->required();
    finetune->add_option("--heldout", ftHeld, "held-out triples (jsonl)")->required();
    add_common(finetune, common);

    auto* report = app.add_subcommand("report", "run the full experiment grid and emit reports");
    std::string rpCorpus, rpCkpt, rpOut;
    report->add_option("--corpus", rpCorpus, "corpus directory")->required();
    report->add_option("--ckpt", rpCkpt, "checkpoint path")->required();
    report->add_option("--out", rpOut, "report directory (default: config outputDir)");
    add_common(report, common);

    auto* mut = app.add_subcommand("mutate", "apply seeded semantics-preserving edits");
    std::string muIn, muDialect = "P", muKinds;
    int muTarget = -1, muCount = 1;
    mut->add_option("--in", muIn, "program file")->required();
    mut->add_option("--dialect", muDialect, "P or T");
    mut->add_option("--kinds", muKinds, "comma-separated edit kinds (default: all)");
    mut->add_option("--target", muTarget, "protected annotation site (default: first present)");
    mut->add_option("--count", muCount, "number of edits to apply");
    add_common(mut, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        ex::Config cfg = load_config(common);

        if (*genCorpus) {
            cg::Corpus corpus = cg::gen_corpus(cfg.corpus);
            cg::write_corpus(corpus, genOut);
            std::cout << "wrote " << corpus.entries.size() << " programs to " << genOut
                      << " (digest " << typesteer::hex64(cg::corpus_digest(corpus)) << ")\n";
        } else if (*train) {
            cg::Corpus corpus = cg::load_corpus(trainCorpus);
            tmdl::TrainOptions opt;
            opt.cfg = cfg.model;
            opt.cfg.vocabSize = tmdl::TokenTable::instance().size();
            opt.fimRate = cfg.fimRate;
            opt.nThreads = cfg.threads;
            opt.anchored = ex::anchored_fim_items(corpus);
            tmdl::Model model = tmdl::train_model(train_sequences(corpus), opt, &std::cerr);
            tmdl::save_checkpoint(model, trainOut);
            std::cout << "saved checkpoint " << trainOut << " (digest "
                      << typesteer::hex64(ex::file_digest(trainOut)) << ")\n";
            if (trainEval) {
                print_eval("clean eval", ex::clean_fim_eval(model, corpus, &std::cerr));
            }
        } else if (*buildPairs) {
            cg::Corpus corpus = cg::load_corpus(bpCorpus);
            tmdl::Model model = tmdl::load_checkpoint(bpCkpt);
            ex::DatasetCell cell =
                ex::build_dataset_cell(model, corpus, ex::combo_by_name(bpCombo),
                                       parse_dialect(bpDialect), cfg, &std::cerr);
            st::write_triples(bpOut + ".steer.jsonl", cell.steer);
            st::write_triples(bpOut + ".heldout.jsonl", cell.heldOut);
            std::cout << "built " << cell.builtBeforeBalance << " triples -> "
                      << cell.steer.size() << " steer + " << cell.heldOut.size()
                      << " held-out\n";
        } else if (*steer) {
            tmdl::Model model = tmdl::load_checkpoint(stCkpt);
            auto steerSet = st::load_triples(stSteer);
            auto heldOut = st::load_triples(stHeld);
            st::SteeringVectorSet vectors =
                st::compute_steering_vectors(model, steerSet, &std::cerr);
            if (!stVectorsOut.empty()) st::save_vectors(stVectorsOut, vectors);
            std::vector<int> layers = ex::steering_layers(cfg);
            print_eval("unsteered", st::steer_and_eval(model, vectors, {}, heldOut));
            print_eval("steered", st::steer_and_eval(model, vectors, layers, heldOut));
            if (stRandom) {
                auto random = st::random_vector_set(vectors, cfg.randomBaselineSeed);
                print_eval("random", st::steer_and_eval(model, random, layers, heldOut));
            }
        } else if (*ablate) {
            tmdl::Model model = tmdl::load_checkpoint(abCkpt);
            auto vectors =
                st::compute_steering_vectors(model, st::load_triples(abSteer), &std::cerr);
            auto heldOut = st::load_triples(abHeld);
            std::ostringstream csv;
            csv << "window,start,exact,total,exactAccuracy\n";
            for (const auto& cell :
                 ex::layer_ablation(model, vectors, heldOut, cfg.layerWindows)) {
                csv << cell.window << ',' << cell.start << ',' << cell.report.exact << ','
                    << cell.report.total << ','
                    << ex::format_accuracy(cell.report.exact, cell.report.total) << '\n';
            }
            if (abOut.empty()) {
                std::cout << csv.str();
            } else {
                std::ofstream out(abOut, std::ios::binary);
                if (!out) throw std::runtime_error("cannot write " + abOut);
                out << csv.str();
            }
        } else if (*transfer) {
            tmdl::Model model = tmdl::load_checkpoint(trCkpt);
            auto vectors =
                st::compute_steering_vectors(model, st::load_triples(trSteerFrom), &std::cerr);
            auto heldOut = st::load_triples(trHeldTo);
            std::vector<int> layers = ex::steering_layers(cfg);
            print_eval("cross-dialect steered", st::steer_and_eval(model, vectors, layers,
                                                                   heldOut));
            auto random = st::random_vector_set(vectors, cfg.randomBaselineSeed);
            print_eval("cross-dialect random", st::steer_and_eval(model, random, layers,
                                                                  heldOut));
        } else if (*finetune) {
            tmdl::Model model = tmdl::load_checkpoint(ftCkpt);
            auto steerSet = st::load_triples(ftSteer);
            auto heldOut = st::load_triples(ftHeld);
            auto vectors = st::compute_steering_vectors(model, steerSet, &std::cerr);
            auto steered =
                st::steer_and_eval(model, vectors, ex::steering_layers(cfg), heldOut);
            ex::FinetuneCurve curve = ex::finetune_baseline(
                model, steerSet, heldOut, steered.exactAccuracy(), cfg, &std::cerr);
            std::cout << "steered reference: "
                      << ex::format_accuracy(steered.exact, steered.total) << "\n";
            for (size_t e = 0; e < curve.perEpoch.size(); ++e) {
                std::cout << "epoch " << e << ": "
                          << ex::format_accuracy(curve.perEpoch[e].exact,
                                                 curve.perEpoch[e].total)
                          << "\n";
            }
        } else if (*report) {
            if (!rpOut.empty()) cfg.outputDir = rpOut;
            cg::Corpus corpus = cg::load_corpus(rpCorpus);
            tmdl::Model model = tmdl::load_checkpoint(rpCkpt);
            ex::ExperimentReport result = ex::run_full_experiments(
                model, corpus, cfg, typesteer::hex64(ex::file_digest(rpCkpt)), &std::cerr);
            ex::emit_report(result, cfg.outputDir);
            std::cout << "report written to " << cfg.outputDir << "\n";
        } else if (*mut) {
            std::ifstream in(muIn, std::ios::binary);
            if (!in) throw std::runtime_error("cannot open " + muIn);
            std::ostringstream buf;
            buf << in.rdbuf();
            ml::Dialect dialect = parse_dialect(muDialect);
            ml::Program p = ml::parse(buf.str(), dialect);

            std::vector<typesteer::mutate::EditKind> kinds;
            if (muKinds.empty()) {
                kinds = ex::combo_by_name("all_edits").kinds;
            } else {
                std::istringstream ks(muKinds);
                std::string item;
                while (std::getline(ks, item, ',')) {
                    auto kind = typesteer::mutate::edit_kind_from_name(item);
                    if (!kind) throw ex::ConfigError("unknown edit kind: " + item);
                    kinds.push_back(*kind);
                }
            }
            size_t target = 0;
            if (muTarget >= 0) {
                target = static_cast<size_t>(muTarget);
            } else {
                auto sites = ml::list_annotation_sites(p);
                while (target < sites.size() && !sites[target].present) ++target;
                if (target == sites.size()) throw std::runtime_error("no annotated site");
            }
            typesteer::Rng rng(common.seed.value_or(cfg.steerSeed));
            for (int i = 0; i < muCount; ++i) {
                auto [q, edit] = typesteer::mutate::apply_random_edit(p, rng, target, kinds);
                std::cerr << typesteer::mutate::edit_kind_name(edit.kind) << ": '" << edit.from
                          << "' -> '" << edit.to << "'\n";
                p = std::move(q);
            }
            std::cout << ml::render(p, dialect);
        }
        return 0;
    } catch (const ex::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
