#pragma once

#include <string>
#include <vector>

#include "typesteer/minilang/ast.hpp"

namespace typesteer::minilang {

// Character range of one annotation site in rendered text. For present
// sites [begin, end) covers exactly the type text (excluding the ": "
// separator). Absent sites carry no range.
struct SiteRange {
    bool present = false;
    size_t begin = 0;
    size_t end = 0;
};

struct RenderResult {
    std::string text;
    // Aligned with list_annotation_sites(p).
    std::vector<SiteRange> sites;
};

// Deterministic canonical rendering; parse(render(p, d), d) is structurally
// equal to p.
std::string render(const Program& p, Dialect d);

RenderResult render_with_sites(const Program& p, Dialect d);

// Canonical type text, e.g. "list[int]" (P) / "number[]" (T).
std::string render_type(const TypePtr& t, Dialect d);

}  // namespace typesteer::minilang
