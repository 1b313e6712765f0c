#pragma once

#include <map>
#include <string>
#include <vector>

#include "typesteer/minilang/ast.hpp"
#include "typesteer/tinymodel/model.hpp"

namespace typesteer::steering {

// A fill-in-the-middle type-prediction prompt: the program text split
// exactly around one annotation. prefix+expectedType+suffix re-renders the
// type-checking source. Token sequences are split from the full program's
// token stream, so P-dialect layout markers match the training distribution.
struct FimPrompt {
    std::string prefixText;
    std::string suffixText;
    std::string expectedType;
    int sourceProgramId = -1;
    int siteIndex = -1;
    minilang::Dialect dialect = minilang::Dialect::P;
    std::vector<int> prefixTokens;
    std::vector<int> suffixTokens;
};

FimPrompt build_fim_type_prompt(const minilang::Program& p, size_t siteIdx, int programId);

// <fim_prefix> prefix <fim_suffix> suffix <fim_middle>
std::vector<int> prompt_tokens(const FimPrompt& prompt);

struct Prediction {
    std::string typeText;
    bool exactMatch = false;
    bool passesChecker = false;
};

// Greedy generation until a complete type parse (P), a ']'-completed type
// (T, whose postfix arrays keep bare names extendable), <eos>, or 8 tokens.
// passesChecker re-parses prefix+typeText+suffix and type-checks it.
Prediction predict_type(const tinymodel::Model& model, const FimPrompt& prompt,
                        const std::map<int, tinymodel::Model::Vec>* patches = nullptr);

}  // namespace typesteer::steering
