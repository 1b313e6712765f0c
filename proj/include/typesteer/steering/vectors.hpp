#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "typesteer/steering/pairs.hpp"

namespace typesteer::steering {

// Per-layer mean difference between positive and negative residual streams
// at the final <fim_middle> position: t_l = (1/|D|) sum(A_l(x+) - A_l(x-)).
struct SteeringVectorSet {
    std::vector<tinymodel::Model::Vec> vectors;  // one per layer
    uint64_t datasetDigest = 0;
    int pairCount = 0;
};

SteeringVectorSet compute_steering_vectors(const tinymodel::Model& model,
                                           const std::vector<SteeringTriple>& steerSet,
                                           std::ostream* log = nullptr);

// Isotropic Gaussian per layer, rescaled to the matching layer's norm.
SteeringVectorSet random_vector_set(const SteeringVectorSet& like, uint64_t seed);

// Binary container tagged "TSV1" in the same family as model checkpoints.
void save_vectors(const std::string& path, const SteeringVectorSet& set);
SteeringVectorSet load_vectors(const std::string& path);

}  // namespace typesteer::steering
