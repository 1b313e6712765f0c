#include "typesteer/corpusgen/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "typesteer/minilang/parser.hpp"
#include "typesteer/minilang/render.hpp"
#include "typesteer/util/hash.hpp"

namespace typesteer::corpusgen {

using json = nlohmann::json;
using namespace minilang;
namespace fs = std::filesystem;

const char* split_name(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::EvalClean: return "evalClean";
        default: return "steerSource";
    }
}

Split split_of(int programId) {
    int r = programId % 100;
    if (r < 70) return Split::Train;
    if (r < 80) return Split::EvalClean;
    return Split::SteerSource;
}

Corpus gen_corpus(const GenConfig& cfg) {
    Corpus c;
    c.cfg = cfg;
    Rng root(cfg.seed);
    for (int id = 0; id < cfg.programCount; ++id) {
        Rng rng = root.child(static_cast<uint64_t>(id));
        Program p = gen_program(rng, cfg);
        CorpusEntry e;
        e.programId = id;
        e.dialect = p.dialect;
        e.text = render(p, p.dialect);
        e.astDigest = ast_digest(p);
        e.split = split_of(id);
        c.entries.push_back(std::move(e));
    }
    return c;
}

uint64_t corpus_digest(const Corpus& c) {
    uint64_t h = fnv1a64("corpus");
    for (const auto& e : c.entries) {
        h = fnv1a64(std::to_string(e.programId), h);
        h = fnv1a64(dialect_name(e.dialect), h);
        h = fnv1a64(e.text, h);
    }
    return h;
}

namespace {

json cfg_to_json(const GenConfig& cfg) {
    return json{{"seed", cfg.seed},
                {"programCount", cfg.programCount},
                {"maxFuncsPerProgram", cfg.maxFuncsPerProgram},
                {"maxStmtsPerFunc", cfg.maxStmtsPerFunc},
                {"userTypeProb", cfg.userTypeProb},
                {"annotationDropProb", cfg.annotationDropProb},
                {"dialectMix", cfg.dialectMix}};
}

GenConfig cfg_from_json(const json& j) {
    GenConfig cfg;
    cfg.seed = j.at("seed").get<uint64_t>();
    cfg.programCount = j.at("programCount").get<int>();
    cfg.maxFuncsPerProgram = j.at("maxFuncsPerProgram").get<int>();
    cfg.maxStmtsPerFunc = j.at("maxStmtsPerFunc").get<int>();
    cfg.userTypeProb = j.at("userTypeProb").get<double>();
    cfg.annotationDropProb = j.at("annotationDropProb").get<double>();
    cfg.dialectMix = j.at("dialectMix").get<double>();
    return cfg;
}

}  // namespace

void write_corpus(const Corpus& c, const std::string& dir) {
    fs::create_directories(dir);
    std::ofstream files[3] = {
        std::ofstream(fs::path(dir) / "train.jsonl"),
        std::ofstream(fs::path(dir) / "evalClean.jsonl"),
        std::ofstream(fs::path(dir) / "steerSource.jsonl"),
    };
    int counts[3] = {0, 0, 0};
    for (const auto& e : c.entries) {
        json line{{"programId", e.programId},
                  {"dialect", dialect_name(e.dialect)},
                  {"text", e.text},
                  {"astDigest", hex64(e.astDigest)}};
        int s = static_cast<int>(e.split);
        files[s] << line.dump() << '\n';
        ++counts[s];
    }
    json manifest{{"config", cfg_to_json(c.cfg)},
                  {"counts",
                   {{"train", counts[0]}, {"evalClean", counts[1]}, {"steerSource", counts[2]}}},
                  {"corpusDigest", hex64(corpus_digest(c))}};
    std::ofstream(fs::path(dir) / "manifest.json") << manifest.dump(2) << '\n';
}

Corpus load_corpus(const std::string& dir) {
    std::ifstream mf(fs::path(dir) / "manifest.json");
    if (!mf) throw std::runtime_error("missing manifest.json in " + dir);
    json manifest = json::parse(mf);

    Corpus c;
    c.cfg = cfg_from_json(manifest.at("config"));
    for (Split s : {Split::Train, Split::EvalClean, Split::SteerSource}) {
        fs::path path = fs::path(dir) / (std::string(split_name(s)) + ".jsonl");
        std::ifstream in(path);
        if (!in) throw std::runtime_error("missing " + path.string());
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            json j = json::parse(line);
            CorpusEntry e;
            e.programId = j.at("programId").get<int>();
            e.dialect = j.at("dialect").get<std::string>() == "P" ? Dialect::P : Dialect::T;
            e.text = j.at("text").get<std::string>();
            e.astDigest = std::stoull(j.at("astDigest").get<std::string>(), nullptr, 16);
            e.split = s;
            c.entries.push_back(std::move(e));
        }
    }
    std::sort(c.entries.begin(), c.entries.end(),
              [](const CorpusEntry& a, const CorpusEntry& b) { return a.programId < b.programId; });
    std::string expect = manifest.at("corpusDigest").get<std::string>();
    if (hex64(corpus_digest(c)) != expect) {
        throw std::runtime_error("corpus digest mismatch in " + dir);
    }
    return c;
}

Program entry_program(const CorpusEntry& e) { return parse(e.text, e.dialect); }

}  // namespace typesteer::corpusgen
