#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "typesteer/minilang/ast.hpp"

namespace typesteer::minilang {

struct UnresolvedIdentifier : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A variable binding site: a function parameter or a Let statement.
struct BindingRef {
    enum class Kind { Param, Let };
    Kind kind = Kind::Param;
    int declIndex = 0;
    int itemIndex = 0;  // param index / body stmt index

    bool operator==(const BindingRef&) const = default;
    bool operator<(const BindingRef& o) const {
        return std::tie(kind, declIndex, itemIndex) < std::tie(o.kind, o.declIndex, o.itemIndex);
    }
};

struct ScopeResult {
    // Var expressions -> binding. Keys are node addresses inside the
    // resolved Program instance.
    std::map<const Expr*, BindingRef> varUses;
    // Assignment statements -> binding of the lvalue base variable.
    std::map<const Stmt*, BindingRef> assignBases;
    // Named type -> declaration index (type names share one flat namespace).
    std::map<std::string, int> typeDecls;
};

// Resolves every identifier use under lexical scoping, shadowing resolved
// innermost-first (a Let rebinds its name from that statement onward).
// Throws UnresolvedIdentifier listing the offending use.
ScopeResult resolve_scopes(const Program& p);

// All variable binding sites of the program in source order.
std::vector<BindingRef> list_bindings(const Program& p);

// Binding site name.
std::string binding_name(const Program& p, const BindingRef& b);

}  // namespace typesteer::minilang
