#pragma once

#include <map>
#include <string>
#include <vector>

#include "typesteer/steering/vectors.hpp"

namespace typesteer::steering {

struct TypeStats {
    int total = 0;
    int exact = 0;
    int checker = 0;
};

struct EvalReport {
    int total = 0;
    int exact = 0;
    int checker = 0;
    std::map<std::string, TypeStats> perType;  // keyed by expected type text

    double exactAccuracy() const { return total ? static_cast<double>(exact) / total : 0.0; }
    double checkerAccuracy() const {
        return total ? static_cast<double>(checker) / total : 0.0;
    }
};

// Evaluates each triple's negative prompt with {layer -> vectors[layer]}
// patches applied at the final position. An empty layer set reproduces the
// unsteered (mispredicting) behavior.
EvalReport steer_and_eval(const tinymodel::Model& model, const SteeringVectorSet& vectors,
                          const std::vector<int>& layers,
                          const std::vector<SteeringTriple>& dataset);

}  // namespace typesteer::steering
