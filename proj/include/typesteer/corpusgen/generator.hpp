#pragma once

#include <stdexcept>

#include "typesteer/minilang/ast.hpp"
#include "typesteer/minilang/interp.hpp"
#include "typesteer/util/rng.hpp"

namespace typesteer::corpusgen {

struct GenConfig {
    uint64_t seed = 42;
    int programCount = 1000;
    int maxFuncsPerProgram = 4;
    int maxStmtsPerFunc = 8;
    double userTypeProb = 0.5;
    double annotationDropProb = 0.3;
    double dialectMix = 0.5;  // fraction of dialect P
};

struct RetryExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Type-directed generation: a target type is chosen for every slot and the
// expression is synthesized to inhabit it, so the result type-checks by
// construction; annotations are then dropped with annotationDropProb,
// keeping at least one present site. Throws RetryExhausted after 100
// failed attempts.
minilang::Program gen_program(Rng& rng, const GenConfig& cfg);

// Same, with the user-defined-type annotation target forced on (used to
// guarantee user types appear as targets in >= 25% of corpus programs).
minilang::Program gen_program_forced(Rng& rng, const GenConfig& cfg, bool forceUserType);

// Seeded argument tuple matching the entry function's declared parameter
// types (Dyn parameters receive a random builtin value).
std::vector<minilang::Value> gen_args(Rng& rng, const minilang::Program& p,
                                      const minilang::FuncDecl& f);

// Last function of the program; the conventional evaluation entry.
const minilang::FuncDecl& entry_function(const minilang::Program& p);

}  // namespace typesteer::corpusgen
