#include "typesteer/steering/prompts.hpp"

#include "typesteer/minilang/check.hpp"
#include "typesteer/minilang/parser.hpp"
#include "typesteer/minilang/render.hpp"
#include "typesteer/mutate/edits.hpp"
#include "typesteer/tinymodel/token_table.hpp"

namespace typesteer::steering {

using namespace minilang;
using tinymodel::TokenTable;

FimPrompt build_fim_type_prompt(const Program& p, size_t siteIdx, int programId) {
    RenderResult rendered = render_with_sites(p, p.dialect);
    if (siteIdx >= rendered.sites.size() || !rendered.sites[siteIdx].present) {
        throw mutate::AbsentSite("prompt target site has no annotation");
    }
    const SiteRange& range = rendered.sites[siteIdx];

    FimPrompt out;
    out.prefixText = rendered.text.substr(0, range.begin);
    out.suffixText = rendered.text.substr(range.end);
    out.expectedType = rendered.text.substr(range.begin, range.end - range.begin);
    out.sourceProgramId = programId;
    out.siteIndex = static_cast<int>(siteIdx);
    out.dialect = p.dialect;

    // Token-level split of the full program stream at the annotation span.
    for (const auto& ts : tinymodel::encode_with_spans(rendered.text, p.dialect)) {
        if (ts.end <= range.begin) {
            out.prefixTokens.push_back(ts.id);
        } else if (ts.begin >= range.end) {
            out.suffixTokens.push_back(ts.id);
        }
        // Tokens inside the span are the annotation itself: dropped.
    }
    return out;
}

std::vector<int> prompt_tokens(const FimPrompt& prompt) {
    const TokenTable& tt = TokenTable::instance();
    std::vector<int> out;
    out.reserve(prompt.prefixTokens.size() + prompt.suffixTokens.size() + 3);
    out.push_back(tt.fimPrefix());
    out.insert(out.end(), prompt.prefixTokens.begin(), prompt.prefixTokens.end());
    out.push_back(tt.fimSuffix());
    out.insert(out.end(), prompt.suffixTokens.begin(), prompt.suffixTokens.end());
    out.push_back(tt.fimMiddle());
    return out;
}

namespace {

bool parses_as_type(const std::string& text, Dialect d) {
    if (text.empty()) return false;
    try {
        parse_type_text(text, d);
        return true;
    } catch (const SyntaxError&) {
        return false;
    }
}

}  // namespace

Prediction predict_type(const tinymodel::Model& model, const FimPrompt& prompt,
                        const std::map<int, tinymodel::Model::Vec>* patches) {
    const TokenTable& tt = TokenTable::instance();
    const Dialect d = prompt.dialect;
    auto stop = [&](const std::vector<int>& emitted) {
        std::string text = tinymodel::concat_tokens(emitted);
        if (!parses_as_type(text, d)) return false;
        return d == Dialect::P || tt.text(emitted.back()) == "]";
    };
    std::vector<int> emitted =
        model.generate_greedy(prompt_tokens(prompt), patches, 8, tt.eos(), stop);

    Prediction out;
    out.typeText = tinymodel::concat_tokens(emitted);
    out.exactMatch = !out.typeText.empty() && out.typeText == prompt.expectedType;
    if (parses_as_type(out.typeText, d)) {
        try {
            Program q = parse(prompt.prefixText + out.typeText + prompt.suffixText, d);
            out.passesChecker = type_check(q).ok;
        } catch (const SyntaxError&) {
            out.passesChecker = false;
        }
    }
    return out;
}

}  // namespace typesteer::steering
