#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "typesteer/experiments/config.hpp"
#include "typesteer/steering/eval.hpp"
#include "typesteer/steering/pairs.hpp"
#include "typesteer/steering/vectors.hpp"
#include "typesteer/tinymodel/train.hpp"

namespace typesteer::experiments {

struct ComboSpec {
    std::string name;
    std::vector<mutate::EditKind> kinds;
};

// The seven edit combinations, in reporting order.
const std::vector<ComboSpec>& combo_list();
const ComboSpec& combo_by_name(const std::string& name);

struct DatasetCell {
    minilang::Dialect dialect = minilang::Dialect::P;
    std::string combo;
    std::vector<steering::SteeringTriple> steer;
    std::vector<steering::SteeringTriple> heldOut;
    int builtBeforeBalance = 0;
};

// Builds, balances, and splits one steering dataset per (combo, dialect)
// from the corpus steer-source split. Cells with < 20 triples get a logged
// warning but stay in the matrix.
std::vector<DatasetCell> run_dataset_matrix(const tinymodel::Model& model,
                                            const corpusgen::Corpus& corpus, const Config& cfg,
                                            std::ostream* log);

// One (combo, dialect) dataset built with the same construction as the
// matrix; used by the CLI's build-pairs subcommand.
DatasetCell build_dataset_cell(const tinymodel::Model& model, const corpusgen::Corpus& corpus,
                               const ComboSpec& combo, minilang::Dialect dialect,
                               const Config& cfg, std::ostream* log);

std::vector<int> steering_layers(const Config& cfg);

struct LayerCell {
    int start = 0;
    int window = 1;
    steering::EvalReport report;
};

// steer_and_eval over every placement of each window size.
std::vector<LayerCell> layer_ablation(const tinymodel::Model& model,
                                      const steering::SteeringVectorSet& vectors,
                                      const std::vector<steering::SteeringTriple>& heldOut,
                                      const std::vector<int>& windows);

struct FinetuneCurve {
    std::vector<steering::EvalReport> perEpoch;  // index 0 = before fine-tuning
    double steeredReference = 0.0;               // exact accuracy of steering on the same set
};

FinetuneCurve finetune_baseline(const tinymodel::Model& model,
                                const std::vector<steering::SteeringTriple>& steerSet,
                                const std::vector<steering::SteeringTriple>& heldOut,
                                double steeredReference, const Config& cfg, std::ostream* log);

struct FreqBucket {
    int freq = 0;        // steering-set occurrences of the expected type
    double meanAcc = 0;  // mean per-type exact accuracy at this frequency
    double q1 = 0;
    double q3 = 0;
    int nTypes = 0;
};

struct FreqReport {
    std::vector<FreqBucket> buckets;
    double spearman = 0.0;
    int nTypes = 0;
};

// Buckets held-out per-type accuracy by steering-set frequency and reports
// the frequency/accuracy rank correlation.
FreqReport type_frequency_report(const std::map<std::string, int>& steerFreq,
                                 const std::map<std::string, steering::TypeStats>& perType);

// Rank correlation with average ranks for ties; 0 when either side is
// constant or fewer than two points exist.
double spearman_rho(const std::vector<double>& a, const std::vector<double>& b);

// FIM training items cut at every present annotation site of the train
// split (prompt + type tokens + <eos>, loss restricted to the type + <eos>).
// Mixed into pretraining via TrainOptions::anchored so type infilling gets
// enough gradient mass to emerge at this model scale.
std::vector<tinymodel::AnchoredItem> anchored_fim_items(const corpusgen::Corpus& corpus);

// Exact-match / checker-pass accuracy over every present annotation site of
// the clean evaluation split (no edits, no steering).
steering::EvalReport clean_fim_eval(const tinymodel::Model& model,
                                    const corpusgen::Corpus& corpus, std::ostream* log);

uint64_t file_digest(const std::string& path);

}  // namespace typesteer::experiments
