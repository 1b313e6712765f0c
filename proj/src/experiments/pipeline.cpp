#include "typesteer/experiments/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>

#include "typesteer/minilang/render.hpp"

#include "typesteer/tinymodel/token_table.hpp"
#include "typesteer/util/hash.hpp"

namespace typesteer::experiments {

using minilang::Dialect;
using mutate::EditKind;
using steering::SteeringTriple;
using tinymodel::Model;

const std::vector<ComboSpec>& combo_list() {
    static const std::vector<ComboSpec> combos = {
        {"rename_vars", {EditKind::RenameVariable}},
        {"rename_types", {EditKind::RenameUserType, EditKind::AliasBuiltin}},
        {"remove_annotations", {EditKind::RemoveAnnotation}},
        {"rename_vars_types",
         {EditKind::RenameVariable, EditKind::RenameUserType, EditKind::AliasBuiltin}},
        {"rename_vars_remove", {EditKind::RenameVariable, EditKind::RemoveAnnotation}},
        {"rename_types_remove",
         {EditKind::RenameUserType, EditKind::AliasBuiltin, EditKind::RemoveAnnotation}},
        {"all_edits",
         {EditKind::RenameVariable, EditKind::RemoveAnnotation, EditKind::RenameUserType,
          EditKind::AliasBuiltin}},
    };
    return combos;
}

const ComboSpec& combo_by_name(const std::string& name) {
    for (const auto& c : combo_list()) {
        if (c.name == name) return c;
    }
    throw ConfigError("unknown edit combination: " + name);
}

DatasetCell build_dataset_cell(const Model& model, const corpusgen::Corpus& corpus,
                               const ComboSpec& combo, Dialect dialect, const Config& cfg,
                               std::ostream* log) {
    steering::SteeringDatasetSpec spec;
    spec.editKinds = combo.kinds;
    spec.dialect = dialect;
    spec.cap = cfg.cap;
    spec.maxEditsPerPair = cfg.maxEditsPerPair;
    spec.seed = cfg.steerSeed;

    // Cell-local stream so every cell is reproducible in isolation, with
    // per-program children so results don't depend on corpus size.
    Rng cellRng(cfg.steerSeed ^ fnv1a64(combo.name) ^ (dialect == Dialect::P ? 0x50u : 0x54u));

    std::vector<SteeringTriple> triples;
    for (const auto& entry : corpus.entries) {
        if (entry.split != corpusgen::Split::SteerSource || entry.dialect != dialect) continue;
        Rng entryRng = cellRng.child(static_cast<uint64_t>(entry.programId) + 1);
        auto triple = steering::make_steering_pair(model, entry, spec, entryRng);
        if (triple) triples.push_back(std::move(*triple));
    }

    DatasetCell cell;
    cell.dialect = dialect;
    cell.combo = combo.name;
    cell.builtBeforeBalance = static_cast<int>(triples.size());
    auto balanced = steering::balance_dataset(triples, cfg.cap);
    auto [steer, held] = steering::split_steer_heldout(
        balanced, cfg.steerRatio, cfg.steerSeed ^ fnv1a64(combo.name + "/split"));
    cell.steer = std::move(steer);
    cell.heldOut = std::move(held);
    if (log && cell.steer.size() + cell.heldOut.size() < 20) {
        *log << "warning: dataset " << combo.name << "/" << dialect_name(dialect)
             << " has only " << cell.steer.size() + cell.heldOut.size() << " triples\n";
    }
    return cell;
}

std::vector<DatasetCell> run_dataset_matrix(const Model& model, const corpusgen::Corpus& corpus,
                                            const Config& cfg, std::ostream* log) {
    std::vector<DatasetCell> matrix;
    for (const auto& combo : combo_list()) {
        for (Dialect d : {Dialect::P, Dialect::T}) {
            matrix.push_back(build_dataset_cell(model, corpus, combo, d, cfg, log));
        }
    }
    return matrix;
}

std::vector<int> steering_layers(const Config& cfg) {
    std::vector<int> layers;
    for (int l = cfg.steerLayerBegin; l <= cfg.steerLayerEnd; ++l) layers.push_back(l);
    return layers;
}

std::vector<LayerCell> layer_ablation(const Model& model,
                                      const steering::SteeringVectorSet& vectors,
                                      const std::vector<SteeringTriple>& heldOut,
                                      const std::vector<int>& windows) {
    const int nLayers = model.config().nLayers;
    std::vector<LayerCell> grid;
    for (int w : windows) {
        for (int start = 0; start + w <= nLayers; ++start) {
            std::vector<int> layers(static_cast<size_t>(w));
            std::iota(layers.begin(), layers.end(), start);
            LayerCell cell;
            cell.start = start;
            cell.window = w;
            cell.report = steering::steer_and_eval(model, vectors, layers, heldOut);
            grid.push_back(std::move(cell));
        }
    }
    return grid;
}

FinetuneCurve finetune_baseline(const Model& model, const std::vector<SteeringTriple>& steerSet,
                                const std::vector<SteeringTriple>& heldOut,
                                double steeredReference, const Config& cfg, std::ostream* log) {
    std::vector<tinymodel::FinetunePair> data;
    for (const auto& t : steerSet) {
        tinymodel::FinetunePair pair;
        pair.prompt = steering::prompt_tokens(t.negative);
        pair.expected = tinymodel::encode(t.expectedType, Dialect::T);  // types lex layout-free
        data.push_back(std::move(pair));
    }

    FinetuneCurve curve;
    curve.steeredReference = steeredReference;
    steering::SteeringVectorSet unused;
    curve.perEpoch.push_back(steering::steer_and_eval(model, unused, {}, heldOut));
    tinymodel::fine_tune(model, data, cfg.finetuneLr, cfg.finetuneWd, cfg.finetuneEpochs,
                         cfg.model.batchSize, log, [&](int, const Model& m) {
                             curve.perEpoch.push_back(
                                 steering::steer_and_eval(m, unused, {}, heldOut));
                         });
    return curve;
}

namespace {

std::vector<double> ranks_with_ties(const std::vector<double>& v) {
    const size_t n = v.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return v[a] < v[b]; });
    std::vector<double> rank(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (size_t k = i; k <= j; ++k) rank[order[k]] = avg;
        i = j + 1;
    }
    return rank;
}

double quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    double pos = q * (static_cast<double>(sorted.size()) - 1);
    size_t lo = static_cast<size_t>(pos);
    size_t hi = std::min(lo + 1, sorted.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1 - frac) + sorted[hi] * frac;
}

}  // namespace

double spearman_rho(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2) return 0.0;
    std::vector<double> ra = ranks_with_ties(a), rb = ranks_with_ties(b);
    double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / static_cast<double>(ra.size());
    double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / static_cast<double>(rb.size());
    double cov = 0, va = 0, vb = 0;
    for (size_t i = 0; i < ra.size(); ++i) {
        cov += (ra[i] - ma) * (rb[i] - mb);
        va += (ra[i] - ma) * (ra[i] - ma);
        vb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (va == 0 || vb == 0) return 0.0;
    return cov / std::sqrt(va * vb);
}

FreqReport type_frequency_report(const std::map<std::string, int>& steerFreq,
                                 const std::map<std::string, steering::TypeStats>& perType) {
    std::map<int, std::vector<double>> byFreq;
    std::vector<double> freqs, accs;
    for (const auto& [type, stats] : perType) {
        auto it = steerFreq.find(type);
        if (it == steerFreq.end() || it->second < 1 || stats.total == 0) continue;
        double acc = static_cast<double>(stats.exact) / stats.total;
        byFreq[it->second].push_back(acc);
        freqs.push_back(it->second);
        accs.push_back(acc);
    }

    FreqReport report;
    report.nTypes = static_cast<int>(freqs.size());
    report.spearman = spearman_rho(freqs, accs);
    for (auto& [freq, values] : byFreq) {
        std::sort(values.begin(), values.end());
        FreqBucket bucket;
        bucket.freq = freq;
        bucket.nTypes = static_cast<int>(values.size());
        bucket.meanAcc = std::accumulate(values.begin(), values.end(), 0.0) /
                         static_cast<double>(values.size());
        bucket.q1 = quantile(values, 0.25);
        bucket.q3 = quantile(values, 0.75);
        report.buckets.push_back(bucket);
    }
    return report;
}

std::vector<tinymodel::AnchoredItem> anchored_fim_items(const corpusgen::Corpus& corpus) {
    std::vector<tinymodel::AnchoredItem> items;
    const int eos = tinymodel::TokenTable::instance().eos();
    for (const auto& entry : corpus.entries) {
        if (entry.split != corpusgen::Split::Train) continue;
        minilang::Program p = corpusgen::entry_program(entry);
        auto sites = minilang::list_annotation_sites(p);
        for (size_t s = 0; s < sites.size(); ++s) {
            if (!sites[s].present) continue;
            steering::FimPrompt prompt = steering::build_fim_type_prompt(p, s, entry.programId);
            tinymodel::AnchoredItem item;
            item.tokens = steering::prompt_tokens(prompt);
            item.lossBegin = static_cast<int>(item.tokens.size()) - 1;
            std::vector<int> ty = tinymodel::encode(prompt.expectedType, prompt.dialect);
            item.tokens.insert(item.tokens.end(), ty.begin(), ty.end());
            item.tokens.push_back(eos);
            items.push_back(std::move(item));
        }
    }
    return items;
}

steering::EvalReport clean_fim_eval(const Model& model, const corpusgen::Corpus& corpus,
                                    std::ostream* log) {
    steering::EvalReport report;
    int skipped = 0;
    for (const auto& entry : corpus.entries) {
        if (entry.split != corpusgen::Split::EvalClean) continue;
        minilang::Program p = corpusgen::entry_program(entry);
        auto sites = minilang::list_annotation_sites(p);
        for (size_t s = 0; s < sites.size(); ++s) {
            if (!sites[s].present) continue;
            steering::FimPrompt prompt =
                steering::build_fim_type_prompt(p, s, entry.programId);
            steering::Prediction pred;
            try {
                pred = steering::predict_type(model, prompt);
            } catch (const tinymodel::ContextOverflow&) {
                ++skipped;
                continue;
            }
            ++report.total;
            steering::TypeStats& stats = report.perType[prompt.expectedType];
            ++stats.total;
            if (pred.exactMatch) {
                ++report.exact;
                ++stats.exact;
            }
            if (pred.passesChecker) {
                ++report.checker;
                ++stats.checker;
            }
        }
    }
    if (log && skipped) *log << "clean eval: skipped " << skipped << " overlong prompts\n";
    return report;
}

uint64_t file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    uint64_t h = 0xcbf29ce484222325ull;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        h = fnv1a64(std::string_view(buf, static_cast<size_t>(in.gcount())), h);
    }
    return h;
}

}  // namespace typesteer::experiments
