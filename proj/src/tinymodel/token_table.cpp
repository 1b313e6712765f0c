#include "typesteer/tinymodel/token_table.hpp"

#include "typesteer/minilang/lexer.hpp"
#include "typesteer/pools.hpp"
#include "typesteer/util/hash.hpp"

namespace typesteer::tinymodel {

using minilang::Dialect;
using minilang::Token;

TokenTable::TokenTable() {
    auto add = [&](const std::string& t) {
        int id = static_cast<int>(texts_.size());
        texts_.push_back(t);
        ids_[t] = id;
        return id;
    };

    fimPrefix_ = add("<fim_prefix>");
    fimSuffix_ = add("<fim_suffix>");
    fimMiddle_ = add("<fim_middle>");
    eos_ = add("<eos>");
    pad_ = add("<pad>");
    nl_ = add("<nl>");
    ind_ = add("<ind>");
    ded_ = add("<ded>");

    for (const char* kw : {"record", "def", "function", "let", "return", "type",
                           "true", "false", "and", "or"}) {
        add(kw);
    }
    for (const char* ty : {"int", "str", "bool", "list", "number", "string", "boolean"}) {
        add(ty);
    }
    for (const char* pu : {"(", ")", "[", "]", "{", "}", ":", ";", ",", ".", "=",
                           "+", "-", "*", "==", "<", "->", "&&", "||"}) {
        add(pu);
    }
    for (int i = 0; i <= kIntLitMax; ++i) add(std::to_string(i));
    for (int i = 0; i < kStrPool; ++i) add("\"" + std::string(str_pool()[i]) + "\"");
    for (int i = 0; i < kVarPool; ++i) add(var_name(i));
    for (int i = 0; i < kTypePool; ++i) add(type_name(i));
    for (int i = 0; i < kFieldPool; ++i) add(field_name(i));
    for (int i = 0; i < kFreshVarPool; ++i) add(fresh_var_name(i));
    for (int i = 0; i < kFreshTypePool; ++i) add(fresh_type_name(i));
    for (int i = 0; i < kFreshAliasPool; ++i) add(fresh_alias_name(i));

    uint64_t h = fnv1a64("token-table");
    for (const auto& t : texts_) h = fnv1a64(t, h);
    digest_ = h;
}

const TokenTable& TokenTable::instance() {
    static TokenTable table;
    return table;
}

int TokenTable::id(const std::string& tok) const {
    auto it = ids_.find(tok);
    if (it == ids_.end()) throw UnknownToken("token not in vocabulary: " + tok);
    return it->second;
}

const std::string& TokenTable::text(int id) const {
    if (id < 0 || id >= size()) throw UnknownToken("token id out of range");
    return texts_[id];
}

std::vector<TokenSpan> encode_with_spans(const std::string& text, Dialect d) {
    const TokenTable& tt = TokenTable::instance();
    std::vector<TokenSpan> out;
    for (const Token& t : minilang::lex(text, d)) {
        TokenSpan s;
        s.begin = t.span.begin;
        s.end = t.span.end;
        switch (t.kind) {
            case Token::Kind::Eof: continue;
            case Token::Kind::Newline: s.id = tt.nl(); break;
            case Token::Kind::Indent: s.id = tt.ind(); break;
            case Token::Kind::Dedent: s.id = tt.ded(); break;
            default: s.id = tt.id(t.text); break;
        }
        out.push_back(s);
    }
    return out;
}

std::vector<int> encode(const std::string& text, Dialect d) {
    std::vector<int> out;
    for (const TokenSpan& s : encode_with_spans(text, d)) out.push_back(s.id);
    return out;
}

std::string concat_tokens(const std::vector<int>& ids) {
    const TokenTable& tt = TokenTable::instance();
    std::string out;
    for (int id : ids) out += tt.text(id);
    return out;
}

}  // namespace typesteer::tinymodel
