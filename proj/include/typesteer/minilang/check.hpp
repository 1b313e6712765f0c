#pragma once

#include <string>
#include <vector>

#include "typesteer/minilang/ast.hpp"

namespace typesteer::minilang {

struct TypeError {
    std::string message;
    Span span;
};

struct CheckResult {
    bool ok = false;
    std::vector<TypeError> errors;
    // Aligned with list_annotation_sites(p): the annotation when present,
    // otherwise the checker's best inference (Dyn when nothing is known).
    std::vector<TypePtr> siteInferred;
};

// Gradual type checking: unannotated slots are Dyn; Dyn is compatible with
// every type; aliases expand transparently (cycles are an error). A program
// is never rejected solely for missing annotations.
CheckResult type_check(const Program& p);

// Would inserting `annot` at site `siteIdx` still type-check? This is the
// per-site "passing types" query: callers probe any candidate type.
bool annotation_passes(const Program& p, size_t siteIdx, const TypePtr& annot);

}  // namespace typesteer::minilang
