#include "typesteer/tinymodel/fim.hpp"

#include <algorithm>

#include "typesteer/tinymodel/token_table.hpp"

namespace typesteer::tinymodel {

std::vector<int> fim_transform(const std::vector<int>& tokens, Rng& rng, double fimRate) {
    if (tokens.size() < 3) throw SequenceTooShort("FIM needs at least 3 tokens");
    const TokenTable& tt = TokenTable::instance();
    if (!rng.bernoulli(fimRate)) {
        std::vector<int> out = tokens;
        out.push_back(tt.eos());
        return out;
    }
    size_t n = tokens.size();
    size_t a = rng.below(n + 1);
    size_t b = rng.below(n + 1);
    if (a > b) std::swap(a, b);
    std::vector<int> out;
    out.reserve(n + 4);
    out.push_back(tt.fimPrefix());
    out.insert(out.end(), tokens.begin(), tokens.begin() + a);
    out.push_back(tt.fimSuffix());
    out.insert(out.end(), tokens.begin() + b, tokens.end());
    out.push_back(tt.fimMiddle());
    out.insert(out.end(), tokens.begin() + a, tokens.begin() + b);
    out.push_back(tt.eos());
    return out;
}

std::optional<std::vector<int>> fim_detransform(const std::vector<int>& tokens) {
    const TokenTable& tt = TokenTable::instance();
    std::vector<int> t = tokens;
    if (!t.empty() && t.back() == tt.eos()) t.pop_back();
    if (t.empty() || t.front() != tt.fimPrefix()) {
        for (int id : t) {
            if (id == tt.fimPrefix() || id == tt.fimSuffix() || id == tt.fimMiddle()) {
                return std::nullopt;
            }
        }
        return t;
    }
    auto su = std::find(t.begin(), t.end(), tt.fimSuffix());
    auto mi = std::find(t.begin(), t.end(), tt.fimMiddle());
    if (su == t.end() || mi == t.end() || mi < su) return std::nullopt;
    std::vector<int> out;
    out.insert(out.end(), t.begin() + 1, su);       // prefix
    out.insert(out.end(), mi + 1, t.end());         // middle
    out.insert(out.end(), su + 1, mi);              // suffix
    return out;
}

}  // namespace typesteer::tinymodel
