#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "typesteer/util/rng.hpp"

namespace typesteer::tinymodel {

struct SequenceTooShort : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// With probability fimRate, splits the sequence at two uniform cut points
// into (prefix, middle, suffix) and emits
//   <fim_prefix> prefix <fim_suffix> suffix <fim_middle> middle <eos>
// otherwise emits tokens + <eos> unchanged.
std::vector<int> fim_transform(const std::vector<int>& tokens, Rng& rng, double fimRate);

// Moves the middle back between prefix and suffix and strips sentinels.
// Returns nullopt if the sequence is not a well-formed FIM item; a plain
// item (no sentinels) round-trips with just the <eos> removed.
std::optional<std::vector<int>> fim_detransform(const std::vector<int>& tokens);

}  // namespace typesteer::tinymodel
