#pragma once

#include <map>
#include <string>
#include <vector>

#include "typesteer/experiments/pipeline.hpp"

namespace typesteer::experiments {

struct SizesRow {
    std::string dialect;
    std::string combo;
    int built = 0;  // triples before balancing
    int steer = 0;
    int heldOut = 0;
};

struct AccuracyRow {
    std::string dialect;
    std::string combo;
    std::string condition;  // unsteered | steered | random | steerSet
    int exact = 0;
    int checker = 0;
    int total = 0;
};

struct LayerRow {
    std::string dialect;
    std::string combo;
    int window = 1;
    int start = 0;
    int exact = 0;
    int total = 0;
};

struct TransferRow {
    std::string fromDialect;  // dialect the vectors were computed on
    std::string toDialect;    // dialect of the evaluated held-out set
    std::string combo;
    std::string condition;  // steered | random
    int exact = 0;
    int total = 0;
};

struct FinetuneRow {
    int epoch = 0;  // 0 = before fine-tuning
    int exact = 0;
    int total = 0;
};

struct ExperimentReport {
    std::string configDigest;
    std::string checkpointDigest;
    std::map<std::string, std::string> datasetDigests;  // "combo/dialect" -> hex digest
    uint64_t randomBaselineSeed = 0;

    std::vector<SizesRow> sizes;
    std::vector<AccuracyRow> accuracy;
    std::vector<LayerRow> layers;
    std::vector<TransferRow> transfer;
    std::vector<FinetuneRow> finetune;
    double finetuneSteeredReference = -1.0;  // < 0 when the experiment didn't run
    FreqReport freq;
    bool hasFreq = false;

    double wallClockSeconds = 0.0;  // recorded in report.json only, never in CSVs
};

// "0.8333" or, when total is 0, "—".
std::string format_accuracy(int exact, int total);

// Writes sizes/accuracy/layers/transfer/finetune/type_frequency CSVs plus
// report.json and summary.md into `dir`. CSV bytes depend only on the report
// contents, not on when or where it ran.
void emit_report(const ExperimentReport& report, const std::string& dir);

// report.json round-trip, for the replay tool.
void save_report_json(const ExperimentReport& report, const std::string& path);
ExperimentReport load_report_json(const std::string& path);

// The whole grid against one checkpoint: 7 combos x 2 dialects with
// unsteered / steered / random / steer-set conditions, layer ablation and
// fine-tuning on rename_types, cross-dialect transfer on rename_types and
// all_edits, and the type-frequency analysis on all_edits. Also writes each
// cell's triples under <outputDir>/datasets for replay.
ExperimentReport run_full_experiments(const tinymodel::Model& model,
                                      const corpusgen::Corpus& corpus, const Config& cfg,
                                      const std::string& checkpointDigest, std::ostream* log);

}  // namespace typesteer::experiments
