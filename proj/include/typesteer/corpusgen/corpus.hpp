#pragma once

#include <string>
#include <vector>

#include "typesteer/corpusgen/generator.hpp"

namespace typesteer::corpusgen {

// Splits are a deterministic function of programId (hash-free: id % 100):
// [0,70) train, [70,80) evalClean, [80,100) steerSource.
enum class Split { Train, EvalClean, SteerSource };

const char* split_name(Split s);

struct CorpusEntry {
    int programId = 0;
    minilang::Dialect dialect = minilang::Dialect::P;
    std::string text;        // canonical rendering
    uint64_t astDigest = 0;
    Split split = Split::Train;
};

struct Corpus {
    GenConfig cfg;
    std::vector<CorpusEntry> entries;
};

Split split_of(int programId);

// Each program comes from an independent child stream of cfg.seed keyed by
// programId, so entry i is identical regardless of programCount.
Corpus gen_corpus(const GenConfig& cfg);

// Combined digest over (programId, dialect, text) of every entry; stable
// across runs and platforms.
uint64_t corpus_digest(const Corpus& c);

// Writes <dir>/{train,evalClean,steerSource}.jsonl plus manifest.json.
void write_corpus(const Corpus& c, const std::string& dir);

// Reads a directory produced by write_corpus. Throws std::runtime_error on
// missing files or a manifest/content digest mismatch.
Corpus load_corpus(const std::string& dir);

// Parses an entry's text back to an AST (dialect taken from the entry).
minilang::Program entry_program(const CorpusEntry& e);

}  // namespace typesteer::corpusgen
