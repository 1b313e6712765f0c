#pragma once

#include <string>

#include "typesteer/minilang/ast.hpp"
#include "typesteer/minilang/lexer.hpp"

namespace typesteer::minilang {

// Parses a full source file in the given dialect. Calls that name a record
// declared anywhere in the program are classified as record construction.
// Throws SyntaxError with line/column on malformed input.
Program parse(const std::string& text, Dialect dialect);

// Parses a single type expression, e.g. "list[int]" (P) or "number[]" (T).
// Throws SyntaxError on failure.
TypePtr parse_type_text(const std::string& text, Dialect dialect);

}  // namespace typesteer::minilang
