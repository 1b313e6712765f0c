#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "typesteer/minilang/ast.hpp"

namespace typesteer::minilang {

struct SyntaxError : std::runtime_error {
    int line;
    int col;
    SyntaxError(const std::string& msg, int line_, int col_)
        : std::runtime_error(msg + " at " + std::to_string(line_) + ":" + std::to_string(col_)),
          line(line_),
          col(col_) {}
};

struct Token {
    enum class Kind { Ident, Int, Str, Punct, Newline, Indent, Dedent, Eof };
    Kind kind = Kind::Eof;
    std::string text;  // lexeme; Str keeps surrounding quotes
    Span span;
};

// Tokenizes one source file. Dialect P emits Newline/Indent/Dedent layout
// markers (indentation must be a multiple of 4 spaces); dialect T emits no
// layout tokens. Never accesses memory outside `text`; malformed input
// raises SyntaxError.
std::vector<Token> lex(const std::string& text, Dialect dialect);

}  // namespace typesteer::minilang
