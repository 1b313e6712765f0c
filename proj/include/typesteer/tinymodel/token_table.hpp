#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "typesteer/minilang/ast.hpp"

namespace typesteer::tinymodel {

struct UnknownToken : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fixed token-level vocabulary over the closed mini-language: keywords and
// punctuation of both dialects, layout markers (P), the generator and
// reserved identifier pools, literal pools, and the FIM sentinels. No
// subwords — one lexer token is one model token.
class TokenTable {
public:
    static const TokenTable& instance();

    int size() const { return static_cast<int>(texts_.size()); }
    int id(const std::string& tok) const;
    const std::string& text(int id) const;
    bool contains(const std::string& tok) const { return ids_.count(tok) != 0; }
    uint64_t digest() const { return digest_; }

    int fimPrefix() const { return fimPrefix_; }
    int fimSuffix() const { return fimSuffix_; }
    int fimMiddle() const { return fimMiddle_; }
    int eos() const { return eos_; }
    int pad() const { return pad_; }
    int nl() const { return nl_; }
    int ind() const { return ind_; }
    int ded() const { return ded_; }

private:
    TokenTable();
    std::vector<std::string> texts_;
    std::map<std::string, int> ids_;
    uint64_t digest_ = 0;
    int fimPrefix_ = 0, fimSuffix_ = 0, fimMiddle_ = 0, eos_ = 0, pad_ = 0;
    int nl_ = 0, ind_ = 0, ded_ = 0;
};

struct TokenSpan {
    int id = 0;
    size_t begin = 0;  // char range in the source text; layout markers get
    size_t end = 0;    // the zero-width position where they occur
};

// Lexes `text` in the given dialect and maps each lexer token to its vocab
// id (Eof dropped). Throws UnknownToken for identifiers outside the pools.
std::vector<int> encode(const std::string& text, minilang::Dialect d);
std::vector<TokenSpan> encode_with_spans(const std::string& text, minilang::Dialect d);

// Concatenates token texts; correct for type expressions, which never need
// separating whitespace (e.g. "list" "[" "int" "]").
std::string concat_tokens(const std::vector<int>& ids);

}  // namespace typesteer::tinymodel
