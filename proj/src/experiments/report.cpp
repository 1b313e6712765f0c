#include "typesteer/experiments/report.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "typesteer/util/hash.hpp"

#include <json.hpp>

namespace typesteer::experiments {

using json = nlohmann::json;

namespace {

std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

const AccuracyRow* find_accuracy(const ExperimentReport& r, const std::string& dialect,
                                 const std::string& combo, const std::string& condition) {
    for (const auto& row : r.accuracy) {
        if (row.dialect == dialect && row.combo == combo && row.condition == condition) {
            return &row;
        }
    }
    return nullptr;
}

}  // namespace

std::string format_accuracy(int exact, int total) {
    if (total <= 0) return "—";
    return fixed4(static_cast<double>(exact) / total);
}

void emit_report(const ExperimentReport& r, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    std::ostringstream sizes;
    sizes << "dialect,combo,built,steer,heldOut\n";
    for (const auto& row : r.sizes) {
        sizes << row.dialect << ',' << row.combo << ',' << row.built << ',' << row.steer << ','
              << row.heldOut << '\n';
    }
    write_file(fs::path(dir) / "sizes.csv", sizes.str());

    std::ostringstream acc;
    acc << "dialect,combo,condition,exact,checker,total,exactAccuracy,checkerAccuracy\n";
    for (const auto& row : r.accuracy) {
        acc << row.dialect << ',' << row.combo << ',' << row.condition << ',' << row.exact << ','
            << row.checker << ',' << row.total << ',' << format_accuracy(row.exact, row.total)
            << ',' << format_accuracy(row.checker, row.total) << '\n';
    }
    write_file(fs::path(dir) / "accuracy.csv", acc.str());

    std::ostringstream layers;
    layers << "dialect,combo,window,start,exact,total,exactAccuracy\n";
    for (const auto& row : r.layers) {
        layers << row.dialect << ',' << row.combo << ',' << row.window << ',' << row.start << ','
               << row.exact << ',' << row.total << ',' << format_accuracy(row.exact, row.total)
               << '\n';
    }
    write_file(fs::path(dir) / "layers.csv", layers.str());

    std::ostringstream transfer;
    transfer << "fromDialect,toDialect,combo,condition,exact,total,exactAccuracy\n";
    for (const auto& row : r.transfer) {
        transfer << row.fromDialect << ',' << row.toDialect << ',' << row.combo << ','
                 << row.condition << ',' << row.exact << ',' << row.total << ','
                 << format_accuracy(row.exact, row.total) << '\n';
    }
    write_file(fs::path(dir) / "transfer.csv", transfer.str());

    std::ostringstream ft;
    ft << "epoch,exact,total,exactAccuracy,steeredReference\n";
    for (const auto& row : r.finetune) {
        ft << row.epoch << ',' << row.exact << ',' << row.total << ','
           << format_accuracy(row.exact, row.total) << ','
           << (r.finetuneSteeredReference < 0 ? std::string("—")
                                              : fixed4(r.finetuneSteeredReference))
           << '\n';
    }
    write_file(fs::path(dir) / "finetune.csv", ft.str());

    std::ostringstream freq;
    freq << "freq,meanAccuracy,q1,q3,nTypes\n";
    if (r.hasFreq) {
        for (const auto& b : r.freq.buckets) {
            freq << b.freq << ',' << fixed4(b.meanAcc) << ',' << fixed4(b.q1) << ','
                 << fixed4(b.q3) << ',' << b.nTypes << '\n';
        }
    }
    write_file(fs::path(dir) / "type_frequency.csv", freq.str());

    save_report_json(r, (fs::path(dir) / "report.json").string());

    // Human-readable summary.
    std::ostringstream md;
    md << "# Experiment summary\n\n";
    md << "- config digest: `" << r.configDigest << "`\n";
    md << "- checkpoint digest: `" << r.checkpointDigest << "`\n";
    md << "- random baseline seed: " << r.randomBaselineSeed << "\n\n";

    std::set<std::string> combos;
    for (const auto& row : r.sizes) combos.insert(row.combo);
    for (const auto& row : r.accuracy) combos.insert(row.combo);
    std::vector<std::string> comboOrder;
    for (const auto& c : combo_list()) {
        if (combos.count(c.name)) comboOrder.push_back(c.name);
    }
    for (const auto& c : combos) {
        if (std::find(comboOrder.begin(), comboOrder.end(), c) == comboOrder.end()) {
            comboOrder.push_back(c);
        }
    }

    if (!r.sizes.empty()) {
        md << "## Dataset sizes\n\n";
        md << "| combo | P steer | P held-out | T steer | T held-out |\n";
        md << "|---|---|---|---|---|\n";
        for (const auto& combo : comboOrder) {
            md << "| " << combo;
            for (const char* dialect : {"P", "T"}) {
                const SizesRow* found = nullptr;
                for (const auto& row : r.sizes) {
                    if (row.combo == combo && row.dialect == dialect) found = &row;
                }
                if (found) {
                    md << " | " << found->steer << " | " << found->heldOut;
                } else {
                    md << " | — | —";
                }
            }
            md << " |\n";
        }
        md << '\n';
    }

    if (!r.accuracy.empty()) {
        md << "## Steering accuracy (exact match, held-out)\n\n";
        md << "| dialect | combo | unsteered | steered | random | steer-set |\n";
        md << "|---|---|---|---|---|---|\n";
        for (const char* dialect : {"P", "T"}) {
            for (const auto& combo : comboOrder) {
                bool any = false;
                for (const char* cond : {"unsteered", "steered", "random", "steerSet"}) {
                    any = any || find_accuracy(r, dialect, combo, cond);
                }
                if (!any) continue;
                md << "| " << dialect << " | " << combo;
                for (const char* cond : {"unsteered", "steered", "random", "steerSet"}) {
                    const AccuracyRow* row = find_accuracy(r, dialect, combo, cond);
                    md << " | "
                       << (row ? format_accuracy(row->exact, row->total) : "—");
                }
                md << " |\n";
            }
        }
        md << '\n';
    }

    if (!r.layers.empty()) {
        md << "## Layer ablation (exact match)\n\n";
        md << "| window | start | accuracy |\n|---|---|---|\n";
        for (const auto& row : r.layers) {
            md << "| " << row.window << " | " << row.start << " | "
               << format_accuracy(row.exact, row.total) << " |\n";
        }
        md << '\n';
    }

    if (!r.transfer.empty()) {
        md << "## Cross-dialect transfer (exact match)\n\n";
        md << "| combo | from | to | condition | accuracy |\n|---|---|---|---|---|\n";
        for (const auto& row : r.transfer) {
            md << "| " << row.combo << " | " << row.fromDialect << " | " << row.toDialect
               << " | " << row.condition << " | " << format_accuracy(row.exact, row.total)
               << " |\n";
        }
        md << '\n';
    }

    if (!r.finetune.empty()) {
        md << "## Fine-tuning baseline (held-out exact match)\n\n";
        md << "steered reference: "
           << (r.finetuneSteeredReference < 0 ? std::string("—")
                                              : fixed4(r.finetuneSteeredReference))
           << "\n\n";
        md << "| epoch | accuracy |\n|---|---|\n";
        for (const auto& row : r.finetune) {
            md << "| " << row.epoch << " | " << format_accuracy(row.exact, row.total) << " |\n";
        }
        md << '\n';
    }

    if (r.hasFreq) {
        md << "## Type frequency vs accuracy\n\n";
        md << "Spearman rho: " << fixed4(r.freq.spearman) << " over " << r.freq.nTypes
           << " types\n\n";
        md << "| steering-set frequency | mean accuracy | q1 | q3 | types |\n";
        md << "|---|---|---|---|---|\n";
        for (const auto& b : r.freq.buckets) {
            md << "| " << b.freq << " | " << fixed4(b.meanAcc) << " | " << fixed4(b.q1) << " | "
               << fixed4(b.q3) << " | " << b.nTypes << " |\n";
        }
        md << '\n';
    }
    write_file(fs::path(dir) / "summary.md", md.str());
}

void save_report_json(const ExperimentReport& r, const std::string& path) {
    json j;
    j["configDigest"] = r.configDigest;
    j["checkpointDigest"] = r.checkpointDigest;
    j["datasetDigests"] = r.datasetDigests;
    j["randomBaselineSeed"] = r.randomBaselineSeed;
    j["wallClockSeconds"] = r.wallClockSeconds;
    j["sizes"] = json::array();
    for (const auto& row : r.sizes) {
        j["sizes"].push_back({{"dialect", row.dialect},
                              {"combo", row.combo},
                              {"built", row.built},
                              {"steer", row.steer},
                              {"heldOut", row.heldOut}});
    }
    j["accuracy"] = json::array();
    for (const auto& row : r.accuracy) {
        j["accuracy"].push_back({{"dialect", row.dialect},
                                 {"combo", row.combo},
                                 {"condition", row.condition},
                                 {"exact", row.exact},
                                 {"checker", row.checker},
                                 {"total", row.total}});
    }
    j["layers"] = json::array();
    for (const auto& row : r.layers) {
        j["layers"].push_back({{"dialect", row.dialect},
                               {"combo", row.combo},
                               {"window", row.window},
                               {"start", row.start},
                               {"exact", row.exact},
                               {"total", row.total}});
    }
    j["transfer"] = json::array();
    for (const auto& row : r.transfer) {
        j["transfer"].push_back({{"fromDialect", row.fromDialect},
                                 {"toDialect", row.toDialect},
                                 {"combo", row.combo},
                                 {"condition", row.condition},
                                 {"exact", row.exact},
                                 {"total", row.total}});
    }
    j["finetune"] = json::array();
    for (const auto& row : r.finetune) {
        j["finetune"].push_back({{"epoch", row.epoch}, {"exact", row.exact}, {"total", row.total}});
    }
    j["finetuneSteeredReference"] = r.finetuneSteeredReference;
    j["hasFreq"] = r.hasFreq;
    if (r.hasFreq) {
        j["freq"] = {{"spearman", r.freq.spearman}, {"nTypes", r.freq.nTypes}};
        j["freq"]["buckets"] = json::array();
        for (const auto& b : r.freq.buckets) {
            j["freq"]["buckets"].push_back({{"freq", b.freq},
                                            {"meanAcc", b.meanAcc},
                                            {"q1", b.q1},
                                            {"q3", b.q3},
                                            {"nTypes", b.nTypes}});
        }
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << '\n';
}

ExperimentReport load_report_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j = json::parse(in);
    ExperimentReport r;
    r.configDigest = j.at("configDigest").get<std::string>();
    r.checkpointDigest = j.at("checkpointDigest").get<std::string>();
    r.datasetDigests = j.at("datasetDigests").get<std::map<std::string, std::string>>();
    r.randomBaselineSeed = j.at("randomBaselineSeed").get<uint64_t>();
    r.wallClockSeconds = j.at("wallClockSeconds").get<double>();
    for (const auto& row : j.at("sizes")) {
        r.sizes.push_back({row.at("dialect").get<std::string>(),
                           row.at("combo").get<std::string>(), row.at("built").get<int>(),
                           row.at("steer").get<int>(), row.at("heldOut").get<int>()});
    }
    for (const auto& row : j.at("accuracy")) {
        r.accuracy.push_back({row.at("dialect").get<std::string>(),
                              row.at("combo").get<std::string>(),
                              row.at("condition").get<std::string>(), row.at("exact").get<int>(),
                              row.at("checker").get<int>(), row.at("total").get<int>()});
    }
    for (const auto& row : j.at("layers")) {
        r.layers.push_back({row.at("dialect").get<std::string>(),
                            row.at("combo").get<std::string>(), row.at("window").get<int>(),
                            row.at("start").get<int>(), row.at("exact").get<int>(),
                            row.at("total").get<int>()});
    }
    for (const auto& row : j.at("transfer")) {
        r.transfer.push_back({row.at("fromDialect").get<std::string>(),
                              row.at("toDialect").get<std::string>(),
                              row.at("combo").get<std::string>(),
                              row.at("condition").get<std::string>(), row.at("exact").get<int>(),
                              row.at("total").get<int>()});
    }
    for (const auto& row : j.at("finetune")) {
        r.finetune.push_back(
            {row.at("epoch").get<int>(), row.at("exact").get<int>(), row.at("total").get<int>()});
    }
    r.finetuneSteeredReference = j.at("finetuneSteeredReference").get<double>();
    r.hasFreq = j.at("hasFreq").get<bool>();
    if (r.hasFreq) {
        r.freq.spearman = j.at("freq").at("spearman").get<double>();
        r.freq.nTypes = j.at("freq").at("nTypes").get<int>();
        for (const auto& b : j.at("freq").at("buckets")) {
            r.freq.buckets.push_back({b.at("freq").get<int>(), b.at("meanAcc").get<double>(),
                                      b.at("q1").get<double>(), b.at("q3").get<double>(),
                                      b.at("nTypes").get<int>()});
        }
    }
    return r;
}

namespace {

std::vector<steering::SteeringTriple> concat_triples(
    const std::vector<steering::SteeringTriple>& a,
    const std::vector<steering::SteeringTriple>& b) {
    std::vector<steering::SteeringTriple> out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

}  // namespace

ExperimentReport run_full_experiments(const tinymodel::Model& model,
                                      const corpusgen::Corpus& corpus, const Config& cfg,
                                      const std::string& checkpointDigest, std::ostream* log) {
    namespace fs = std::filesystem;
    using steering::EvalReport;
    using steering::SteeringVectorSet;
    const auto t0 = std::chrono::steady_clock::now();

    ExperimentReport report;
    report.configDigest = hex64(config_digest(cfg));
    report.checkpointDigest = checkpointDigest;
    report.randomBaselineSeed = cfg.randomBaselineSeed;
    const std::vector<int> layers = steering_layers(cfg);

    if (log) *log << "building the 7x2 dataset matrix\n";
    std::vector<DatasetCell> matrix = run_dataset_matrix(model, corpus, cfg, log);
    fs::create_directories(fs::path(cfg.outputDir) / "datasets");

    std::map<std::string, SteeringVectorSet> vectorsByCell;   // "combo/dialect"
    std::map<std::string, EvalReport> steeredByCell;          // held-out steered runs

    for (const auto& cell : matrix) {
        const std::string dialect = minilang::dialect_name(cell.dialect);
        const std::string key = cell.combo + "/" + dialect;
        report.sizes.push_back({dialect, cell.combo, cell.builtBeforeBalance,
                                static_cast<int>(cell.steer.size()),
                                static_cast<int>(cell.heldOut.size())});
        auto all = concat_triples(cell.steer, cell.heldOut);
        report.datasetDigests[key] = hex64(steering::dataset_digest(all));

        fs::path base = fs::path(cfg.outputDir) / "datasets" / (cell.combo + "." + dialect);
        steering::write_triples(base.string() + ".steer.jsonl", cell.steer);
        steering::write_triples(base.string() + ".heldout.jsonl", cell.heldOut);

        if (cell.steer.empty() || cell.heldOut.empty()) {
            if (log) *log << "skipping evaluations for empty cell " << key << "\n";
            continue;
        }
        if (log) *log << "evaluating " << key << " (" << cell.steer.size() << " steer, "
                      << cell.heldOut.size() << " held-out)\n";

        SteeringVectorSet vectors = steering::compute_steering_vectors(model, cell.steer, log);
        SteeringVectorSet random = steering::random_vector_set(vectors, cfg.randomBaselineSeed);

        EvalReport unsteered = steering::steer_and_eval(model, vectors, {}, cell.heldOut);
        EvalReport steered = steering::steer_and_eval(model, vectors, layers, cell.heldOut);
        EvalReport randomEval = steering::steer_and_eval(model, random, layers, cell.heldOut);
        EvalReport onSteer = steering::steer_and_eval(model, vectors, layers, cell.steer);
        report.accuracy.push_back({dialect, cell.combo, "unsteered", unsteered.exact,
                                   unsteered.checker, unsteered.total});
        report.accuracy.push_back(
            {dialect, cell.combo, "steered", steered.exact, steered.checker, steered.total});
        report.accuracy.push_back({dialect, cell.combo, "random", randomEval.exact,
                                   randomEval.checker, randomEval.total});
        report.accuracy.push_back(
            {dialect, cell.combo, "steerSet", onSteer.exact, onSteer.checker, onSteer.total});
        vectorsByCell[key] = std::move(vectors);
        steeredByCell[key] = std::move(steered);
    }

    auto findCell = [&](const std::string& combo, minilang::Dialect d) -> const DatasetCell* {
        for (const auto& cell : matrix) {
            if (cell.combo == combo && cell.dialect == d) return &cell;
        }
        return nullptr;
    };

    // Layer ablation on the rename_types cell with the most held-out data.
    {
        const DatasetCell* best = nullptr;
        for (minilang::Dialect d : {minilang::Dialect::P, minilang::Dialect::T}) {
            const DatasetCell* cell = findCell("rename_types", d);
            if (cell && !cell->steer.empty() && !cell->heldOut.empty() &&
                (!best || cell->heldOut.size() > best->heldOut.size())) {
                best = cell;
            }
        }
        if (best) {
            const std::string dialect = minilang::dialect_name(best->dialect);
            if (log) *log << "layer ablation on rename_types/" << dialect << "\n";
            const auto& vectors = vectorsByCell.at("rename_types/" + dialect);
            for (const auto& cell :
                 layer_ablation(model, vectors, best->heldOut, cfg.layerWindows)) {
                report.layers.push_back({dialect, "rename_types", cell.window, cell.start,
                                         cell.report.exact, cell.report.total});
            }
        }
    }

    // Cross-dialect transfer, both directions, steered + random conditions.
    for (const std::string combo : {"rename_types", "all_edits"}) {
        for (auto [from, to] :
             {std::pair{minilang::Dialect::P, minilang::Dialect::T},
              std::pair{minilang::Dialect::T, minilang::Dialect::P}}) {
            const std::string fromName = minilang::dialect_name(from);
            const std::string toName = minilang::dialect_name(to);
            auto it = vectorsByCell.find(combo + "/" + fromName);
            const DatasetCell* target = findCell(combo, to);
            if (it == vectorsByCell.end() || !target || target->heldOut.empty()) continue;
            if (log) *log << "transfer " << combo << " " << fromName << "->" << toName << "\n";
            EvalReport cross = steering::steer_and_eval(model, it->second, layers,
                                                        target->heldOut);
            EvalReport crossRandom = steering::steer_and_eval(
                model, steering::random_vector_set(it->second, cfg.randomBaselineSeed), layers,
                target->heldOut);
            report.transfer.push_back(
                {fromName, toName, combo, "steered", cross.exact, cross.total});
            report.transfer.push_back(
                {fromName, toName, combo, "random", crossRandom.exact, crossRandom.total});
        }
    }

    // Fine-tuning baseline on rename_types, both dialects pooled.
    {
        const DatasetCell* p = findCell("rename_types", minilang::Dialect::P);
        const DatasetCell* t = findCell("rename_types", minilang::Dialect::T);
        auto steerSet = concat_triples(p ? p->steer : std::vector<steering::SteeringTriple>{},
                                       t ? t->steer : std::vector<steering::SteeringTriple>{});
        auto heldOut = concat_triples(p ? p->heldOut : std::vector<steering::SteeringTriple>{},
                                      t ? t->heldOut : std::vector<steering::SteeringTriple>{});
        if (!steerSet.empty() && !heldOut.empty()) {
            if (log) *log << "fine-tuning baseline on rename_types (" << steerSet.size()
                          << " pairs)\n";
            int steeredExact = 0, steeredTotal = 0;
            for (const char* d : {"P", "T"}) {
                auto it = steeredByCell.find(std::string("rename_types/") + d);
                if (it != steeredByCell.end()) {
                    steeredExact += it->second.exact;
                    steeredTotal += it->second.total;
                }
            }
            double reference =
                steeredTotal ? static_cast<double>(steeredExact) / steeredTotal : 0.0;
            FinetuneCurve curve =
                finetune_baseline(model, steerSet, heldOut, reference, cfg, log);
            report.finetuneSteeredReference = curve.steeredReference;
            for (size_t e = 0; e < curve.perEpoch.size(); ++e) {
                report.finetune.push_back({static_cast<int>(e), curve.perEpoch[e].exact,
                                           curve.perEpoch[e].total});
            }
        }
    }

    // Type-frequency analysis on all_edits, both dialects pooled.
    {
        std::map<std::string, int> steerFreq;
        std::map<std::string, steering::TypeStats> perType;
        bool any = false;
        for (minilang::Dialect d : {minilang::Dialect::P, minilang::Dialect::T}) {
            const DatasetCell* cell = findCell("all_edits", d);
            if (!cell) continue;
            for (const auto& triple : cell->steer) ++steerFreq[triple.expectedType];
            auto it = steeredByCell.find(std::string("all_edits/") +
                                         minilang::dialect_name(d));
            if (it == steeredByCell.end()) continue;
            any = true;
            for (const auto& [type, stats] : it->second.perType) {
                steering::TypeStats& acc = perType[type];
                acc.total += stats.total;
                acc.exact += stats.exact;
                acc.checker += stats.checker;
            }
        }
        if (any) {
            report.freq = type_frequency_report(steerFreq, perType);
            report.hasFreq = true;
        }
    }

    report.wallClockSeconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

}  // namespace typesteer::experiments
