#include "typesteer/experiments/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "typesteer/util/hash.hpp"

namespace typesteer::experiments {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    std::istringstream in(value);
    T out{};
    in >> out;
    char rest;
    if (in.fail() || (in >> rest)) {
        throw ConfigError("bad value for " + key + ": '" + value + "'");
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
    std::vector<int> out;
    std::istringstream in(value);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_number<int>(key, item));
    }
    if (out.empty()) throw ConfigError("empty list for " + key);
    return out;
}

using Setter = std::function<void(Config&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
    auto num = [](auto member) {
        return Setter([member](Config& c, const std::string& k, const std::string& v) {
            c.*member = parse_number<std::decay_t<decltype(std::declval<Config>().*member)>>(k, v);
        });
    };
    auto corpusNum = [](auto member) {
        return Setter([member](Config& c, const std::string& k, const std::string& v) {
            c.corpus.*member =
                parse_number<std::decay_t<decltype(std::declval<Config>().corpus.*member)>>(k, v);
        });
    };
    auto modelNum = [](auto member) {
        return Setter([member](Config& c, const std::string& k, const std::string& v) {
            c.model.*member =
                parse_number<std::decay_t<decltype(std::declval<Config>().model.*member)>>(k, v);
        });
    };
    static const std::map<std::string, Setter> table = {
        {"corpus.programCount", corpusNum(&corpusgen::GenConfig::programCount)},
        {"corpus.seed", corpusNum(&corpusgen::GenConfig::seed)},
        {"corpus.maxFuncsPerProgram", corpusNum(&corpusgen::GenConfig::maxFuncsPerProgram)},
        {"corpus.maxStmtsPerFunc", corpusNum(&corpusgen::GenConfig::maxStmtsPerFunc)},
        {"corpus.userTypeProb", corpusNum(&corpusgen::GenConfig::userTypeProb)},
        {"corpus.annotationDropProb", corpusNum(&corpusgen::GenConfig::annotationDropProb)},
        {"corpus.dialectMix", corpusNum(&corpusgen::GenConfig::dialectMix)},
        {"model.nLayers", modelNum(&tinymodel::ModelConfig::nLayers)},
        {"model.dModel", modelNum(&tinymodel::ModelConfig::dModel)},
        {"model.nHeads", modelNum(&tinymodel::ModelConfig::nHeads)},
        {"model.ctxLen", modelNum(&tinymodel::ModelConfig::ctxLen)},
        {"model.seed", modelNum(&tinymodel::ModelConfig::seed)},
        {"model.learningRate", modelNum(&tinymodel::ModelConfig::learningRate)},
        {"model.batchSize", modelNum(&tinymodel::ModelConfig::batchSize)},
        {"model.epochs", modelNum(&tinymodel::ModelConfig::epochs)},
        {"model.weightDecay", modelNum(&tinymodel::ModelConfig::weightDecay)},
        {"model.fimRate", num(&Config::fimRate)},
        {"model.threads", num(&Config::threads)},
        {"steering.cap", num(&Config::cap)},
        {"steering.maxEditsPerPair", num(&Config::maxEditsPerPair)},
        {"steering.steerRatio", num(&Config::steerRatio)},
        {"steering.layerBegin", num(&Config::steerLayerBegin)},
        {"steering.layerEnd", num(&Config::steerLayerEnd)},
        {"steering.seed", num(&Config::steerSeed)},
        {"experiments.randomSeed", num(&Config::randomBaselineSeed)},
        {"experiments.finetuneLr", num(&Config::finetuneLr)},
        {"experiments.finetuneWd", num(&Config::finetuneWd)},
        {"experiments.finetuneEpochs", num(&Config::finetuneEpochs)},
        {"experiments.layerWindows",
         Setter([](Config& c, const std::string& k, const std::string& v) {
             c.layerWindows = parse_int_list(k, v);
         })},
        {"experiments.outputDir",
         Setter([](Config& c, const std::string&, const std::string& v) { c.outputDir = v; })},
    };
    return table;
}

}  // namespace

Config parse_config_text(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("line " + std::to_string(lineNo) + ": unterminated section");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section != "corpus" && section != "model" && section != "steering" &&
                section != "experiments") {
                throw ConfigError("line " + std::to_string(lineNo) + ": unknown section [" +
                                  section + "]");
            }
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineNo) + ": expected key = value");
        }
        if (section.empty()) {
            throw ConfigError("line " + std::to_string(lineNo) + ": key outside any section");
        }
        std::string key = section + "." + trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        auto it = setters().find(key);
        if (it == setters().end()) {
            throw ConfigError("line " + std::to_string(lineNo) + ": unknown key " + key);
        }
        it->second(cfg, key, value);
    }
    if (cfg.steerLayerBegin < 0 || cfg.steerLayerEnd >= cfg.model.nLayers ||
        cfg.steerLayerBegin > cfg.steerLayerEnd) {
        throw ConfigError("steering layer range outside the model");
    }
    for (int w : cfg.layerWindows) {
        if (w < 1 || w > cfg.model.nLayers) throw ConfigError("layer window outside the model");
    }
    return cfg;
}

Config parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

void override_seed(Config& cfg, uint64_t seed) {
    cfg.corpus.seed = seed;
    cfg.model.seed = seed;
    cfg.steerSeed = seed;
    cfg.randomBaselineSeed = seed ^ 0x72616e64;  // keep the baseline stream distinct
}

std::string render_config(const Config& cfg) {
    std::ostringstream out;
    out << "[corpus]\n"
        << "programCount = " << cfg.corpus.programCount << "\n"
        << "seed = " << cfg.corpus.seed << "\n"
        << "maxFuncsPerProgram = " << cfg.corpus.maxFuncsPerProgram << "\n"
        << "maxStmtsPerFunc = " << cfg.corpus.maxStmtsPerFunc << "\n"
        << "userTypeProb = " << cfg.corpus.userTypeProb << "\n"
        << "annotationDropProb = " << cfg.corpus.annotationDropProb << "\n"
        << "dialectMix = " << cfg.corpus.dialectMix << "\n"
        << "[model]\n"
        << "nLayers = " << cfg.model.nLayers << "\n"
        << "dModel = " << cfg.model.dModel << "\n"
        << "nHeads = " << cfg.model.nHeads << "\n"
        << "ctxLen = " << cfg.model.ctxLen << "\n"
        << "seed = " << cfg.model.seed << "\n"
        << "learningRate = " << cfg.model.learningRate << "\n"
        << "batchSize = " << cfg.model.batchSize << "\n"
        << "epochs = " << cfg.model.epochs << "\n"
        << "weightDecay = " << cfg.model.weightDecay << "\n"
        << "fimRate = " << cfg.fimRate << "\n"
        << "threads = " << cfg.threads << "\n"
        << "[steering]\n"
        << "cap = " << cfg.cap << "\n"
        << "maxEditsPerPair = " << cfg.maxEditsPerPair << "\n"
        << "steerRatio = " << cfg.steerRatio << "\n"
        << "layerBegin = " << cfg.steerLayerBegin << "\n"
        << "layerEnd = " << cfg.steerLayerEnd << "\n"
        << "seed = " << cfg.steerSeed << "\n"
        << "[experiments]\n"
        << "randomSeed = " << cfg.randomBaselineSeed << "\n"
        << "finetuneLr = " << cfg.finetuneLr << "\n"
        << "finetuneWd = " << cfg.finetuneWd << "\n"
        << "finetuneEpochs = " << cfg.finetuneEpochs << "\n"
        << "layerWindows = ";
    for (size_t i = 0; i < cfg.layerWindows.size(); ++i) {
        out << (i ? "," : "") << cfg.layerWindows[i];
    }
    out << "\noutputDir = " << cfg.outputDir << "\n";
    return out.str();
}

uint64_t config_digest(const Config& cfg) {
    return fnv1a64(render_config(cfg));
}

}  // namespace typesteer::experiments
