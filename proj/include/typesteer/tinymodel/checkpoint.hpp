#pragma once

#include <string>

#include "typesteer/tinymodel/model.hpp"

namespace typesteer::tinymodel {

struct CheckpointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Versioned binary container: magic "TSL1", a UTF-8 JSON header (config,
// step, token-table digest, tensor directory), then little-endian float32
// tensor data in directory order. Loading refuses a mismatched table digest.
void save_checkpoint(const Model& model, const std::string& path);
Model load_checkpoint(const std::string& path);

}  // namespace typesteer::tinymodel
