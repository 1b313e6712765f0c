#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "typesteer/minilang/ast.hpp"
#include "typesteer/minilang/scope.hpp"
#include "typesteer/util/rng.hpp"

namespace typesteer::mutate {

enum class EditKind { RenameVariable, RemoveAnnotation, RenameUserType, AliasBuiltin };

const char* edit_kind_name(EditKind k);
std::optional<EditKind> edit_kind_from_name(const std::string& name);

struct Edit {
    EditKind kind = EditKind::RenameVariable;
    std::string from;  // old variable/type name, or builtin name for AliasBuiltin
    std::string to;    // fresh name; empty for RemoveAnnotation
    int siteIndex = -1;                 // RemoveAnnotation
    minilang::BindingRef binding{};     // RenameVariable
    int declIndex = -1;                 // RenameUserType
};

struct EditTrace {
    std::vector<Edit> applied;
    int editDistance = 0;  // character-level Levenshtein, pre vs post render
    // Record/alias renames accumulated across the trace (old -> final name),
    // used for rename-aware value comparison and expected-type updates.
    std::map<std::string, std::string> typeNameMap;
};

struct NameConflict : std::runtime_error { using std::runtime_error::runtime_error; };
struct UnknownBinding : std::runtime_error { using std::runtime_error::runtime_error; };
struct UnknownDecl : std::runtime_error { using std::runtime_error::runtime_error; };
struct ProtectedSite : std::runtime_error { using std::runtime_error::runtime_error; };
struct AbsentSite : std::runtime_error { using std::runtime_error::runtime_error; };
struct NoLegalEdit : std::runtime_error { using std::runtime_error::runtime_error; };

// Renames a binding site and exactly the uses that resolve to it (shadowed
// uses of the same name are untouched). Throws NameConflict if `fresh`
// already occurs in the program, UnknownBinding on a dangling ref.
minilang::Program rename_variable(const minilang::Program& p, const minilang::BindingRef& binding,
                                  const std::string& fresh);

// Deletes the annotation at `siteIdx`. The protected site (the prediction
// target) can never be deleted.
minilang::Program remove_annotation(const minilang::Program& p, size_t siteIdx,
                                    size_t protectedSiteIdx);

// Renames a record or alias declaration and every Named reference to it,
// including constructor expressions and the protected annotation itself.
minilang::Program rename_user_type(const minilang::Program& p, int declIndex,
                                   const std::string& fresh);

// Prepends `type fresh = builtin` and rewrites raw annotation occurrences of
// that builtin (including nested list elements) to the alias name. Existing
// alias declarations and their uses are untouched.
minilang::Program alias_builtin(const minilang::Program& p, const minilang::TypePtr& builtin,
                                const std::string& fresh);

// Uniformly samples a kind from `kinds` (restricted to those with a legal
// target), then a uniform legal target. Throws NoLegalEdit when nothing in
// the subset applies.
std::pair<minilang::Program, Edit> apply_random_edit(const minilang::Program& p, Rng& rng,
                                                     size_t protectedSiteIdx,
                                                     const std::vector<EditKind>& kinds);

// Lowest-index unused name from the reserved pools (absent from generator
// output by construction; checked against the program anyway).
std::optional<std::string> fresh_variable(const minilang::Program& p);
std::optional<std::string> fresh_type(const minilang::Program& p);
std::optional<std::string> fresh_alias(const minilang::Program& p);

size_t edit_distance(const std::string& a, const std::string& b);

}  // namespace typesteer::mutate
