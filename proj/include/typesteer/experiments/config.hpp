#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "typesteer/corpusgen/generator.hpp"
#include "typesteer/tinymodel/model.hpp"

namespace typesteer::experiments {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One plain-text key-value file with [corpus] / [model] / [steering] /
// [experiments] sections drives every pipeline stage.
struct Config {
    corpusgen::GenConfig corpus;

    tinymodel::ModelConfig model;
    double fimRate = 0.5;
    int threads = 1;

    int cap = 25;
    int maxEditsPerPair = 10;
    double steerRatio = 0.7;
    int steerLayerBegin = 2;  // inclusive
    int steerLayerEnd = 6;    // inclusive
    uint64_t steerSeed = 42;

    uint64_t randomBaselineSeed = 1234;
    double finetuneLr = 3e-5;
    double finetuneWd = 0.1;
    int finetuneEpochs = 5;
    std::vector<int> layerWindows = {1, 3, 5};
    std::string outputDir = "out";
};

Config parse_config_text(const std::string& text);
Config parse_config_file(const std::string& path);

// Overrides every seed-like knob at once (the CLI's --seed flag).
void override_seed(Config& cfg, uint64_t seed);

// Canonical rendering (sorted keys); its hash tags reports.
std::string render_config(const Config& cfg);
uint64_t config_digest(const Config& cfg);

}  // namespace typesteer::experiments
