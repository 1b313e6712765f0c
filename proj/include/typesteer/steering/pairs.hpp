#pragma once

#include <optional>
#include <string>
#include <vector>

#include "typesteer/corpusgen/corpus.hpp"
#include "typesteer/mutate/edits.hpp"
#include "typesteer/steering/prompts.hpp"

namespace typesteer::steering {

struct SteeringTriple {
    FimPrompt positive;   // clean program; its own (pre-edit) expected type
    FimPrompt negative;   // edited program; the model mispredicts here
    std::string expectedType;  // post-edit passing annotation (the eval target)
    mutate::EditTrace editTrace;
    std::string negativePrediction;
};

struct SteeringDatasetSpec {
    std::vector<mutate::EditKind> editKinds;
    minilang::Dialect dialect = minilang::Dialect::P;
    int cap = 25;
    int maxEditsPerPair = 10;
    uint64_t seed = 42;
};

// Picks one uniform present site. Returns nothing when the model is already
// wrong on the clean prompt, or when maxEditsPerPair edits fail to induce a
// misprediction. The edited program's own annotation text is the triple's
// expected type (a renamed target type renames the expectation with it).
std::optional<SteeringTriple> make_steering_pair(const tinymodel::Model& model,
                                                 const corpusgen::CorpusEntry& entry,
                                                 const SteeringDatasetSpec& spec, Rng& rng);

// Keeps at most `cap` triples per expected type, earliest first.
std::vector<SteeringTriple> balance_dataset(const std::vector<SteeringTriple>& triples, int cap);

// Partition by sourceProgramId: one program's triples never straddle the
// split. Ratio is approximate at program granularity.
std::pair<std::vector<SteeringTriple>, std::vector<SteeringTriple>> split_steer_heldout(
    const std::vector<SteeringTriple>& triples, double ratio, uint64_t seed);

// JSON-lines persistence; prompts are reconstructed (including token-level
// splits) from prefix/expected/suffix on load.
void write_triples(const std::string& path, const std::vector<SteeringTriple>& triples);
std::vector<SteeringTriple> load_triples(const std::string& path);

uint64_t dataset_digest(const std::vector<SteeringTriple>& triples);

}  // namespace typesteer::steering
