#include "typesteer/mutate/edits.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "typesteer/pools.hpp"

namespace typesteer::mutate {

using namespace minilang;

const char* edit_kind_name(EditKind k) {
    switch (k) {
        case EditKind::RenameVariable: return "rename_variable";
        case EditKind::RemoveAnnotation: return "remove_annotation";
        case EditKind::RenameUserType: return "rename_user_type";
        default: return "alias_builtin";
    }
}

std::optional<EditKind> edit_kind_from_name(const std::string& name) {
    for (EditKind k : {EditKind::RenameVariable, EditKind::RemoveAnnotation,
                       EditKind::RenameUserType, EditKind::AliasBuiltin}) {
        if (name == edit_kind_name(k)) return k;
    }
    return std::nullopt;
}

namespace {

void collect_expr_names(const ExprPtr& e, std::set<std::string>& out) {
    if (!e) return;
    if (!e->name.empty()) out.insert(e->name);
    for (const auto& a : e->args) collect_expr_names(a, out);
}

void collect_type_names(const TypePtr& t, std::set<std::string>& out) {
    if (!t) return;
    if (t->kind == Type::Kind::Named) out.insert(t->name);
    if (t->elem) collect_type_names(t->elem, out);
}

std::set<std::string> all_names(const Program& p) {
    std::set<std::string> out;
    for (const auto& d : p.decls) {
        if (const auto* r = std::get_if<RecordDecl>(&d)) {
            out.insert(r->name);
            for (const auto& f : r->fields) {
                out.insert(f.name);
                if (f.annot) collect_type_names(*f.annot, out);
            }
        } else if (const auto* a = std::get_if<AliasDecl>(&d)) {
            out.insert(a->name);
            collect_type_names(a->target, out);
        } else if (const auto* f = std::get_if<FuncDecl>(&d)) {
            out.insert(f->name);
            for (const auto& pr : f->params) {
                out.insert(pr.name);
                if (pr.annot) collect_type_names(*pr.annot, out);
            }
            if (f->returnType) collect_type_names(*f->returnType, out);
            for (const auto& s : f->body) {
                if (!s.name.empty()) out.insert(s.name);
                if (s.annot) collect_type_names(*s.annot, out);
                if (!s.lvalue.base.empty()) out.insert(s.lvalue.base);
                collect_expr_names(s.expr, out);
            }
        }
    }
    return out;
}

std::optional<std::string> lowest_unused(const Program& p, int poolSize,
                                         std::string (*namer)(int)) {
    auto used = all_names(p);
    for (int i = 0; i < poolSize; ++i) {
        std::string n = namer(i);
        if (!used.count(n)) return n;
    }
    return std::nullopt;
}

void require_fresh(const Program& p, const std::string& fresh) {
    if (all_names(p).count(fresh)) throw NameConflict("name already in use: " + fresh);
}

TypePtr rename_in_type(const TypePtr& t, const std::string& from, const std::string& to) {
    if (!t) return t;
    if (t->kind == Type::Kind::Named && t->name == from) return type_named(to);
    if (t->kind == Type::Kind::List) return type_list(rename_in_type(t->elem, from, to));
    return t;
}

void for_each_annot(Program& p, const std::function<void(std::optional<TypePtr>&)>& fn) {
    for (auto& d : p.decls) {
        if (auto* r = std::get_if<RecordDecl>(&d)) {
            for (auto& f : r->fields) fn(f.annot);
        } else if (auto* f = std::get_if<FuncDecl>(&d)) {
            for (auto& pr : f->params) fn(pr.annot);
            fn(f->returnType);
            for (auto& s : f->body) {
                if (s.kind == Stmt::Kind::Let) fn(s.annot);
            }
        }
    }
}

}  // namespace

Program rename_variable(const Program& p, const BindingRef& binding, const std::string& fresh) {
    require_fresh(p, fresh);
    Program out = clone_program(p);

    if (binding.declIndex < 0 || binding.declIndex >= static_cast<int>(out.decls.size())) {
        throw UnknownBinding("binding declIndex out of range");
    }
    auto* f = std::get_if<FuncDecl>(&out.decls[binding.declIndex]);
    if (!f) throw UnknownBinding("binding does not reference a function");
    if (binding.kind == BindingRef::Kind::Param) {
        if (binding.itemIndex < 0 || binding.itemIndex >= static_cast<int>(f->params.size())) {
            throw UnknownBinding("param index out of range");
        }
    } else {
        if (binding.itemIndex < 0 || binding.itemIndex >= static_cast<int>(f->body.size()) ||
            f->body[binding.itemIndex].kind != Stmt::Kind::Let) {
            throw UnknownBinding("let index does not reference a Let statement");
        }
    }

    ScopeResult scopes = resolve_scopes(out);

    auto renameExpr = [&](auto&& self, const ExprPtr& e) -> void {
        if (!e) return;
        auto it = scopes.varUses.find(e.get());
        if (it != scopes.varUses.end() && it->second == binding) e->name = fresh;
        for (const auto& a : e->args) self(self, a);
    };
    for (auto& s : f->body) {
        renameExpr(renameExpr, s.expr);
        auto it = scopes.assignBases.find(&s);
        if (it != scopes.assignBases.end() && it->second == binding) s.lvalue.base = fresh;
    }
    if (binding.kind == BindingRef::Kind::Param) {
        f->params[binding.itemIndex].name = fresh;
    } else {
        f->body[binding.itemIndex].name = fresh;
    }
    return out;
}

Program remove_annotation(const Program& p, size_t siteIdx, size_t protectedSiteIdx) {
    if (siteIdx == protectedSiteIdx) throw ProtectedSite("cannot delete the target annotation");
    auto sites = list_annotation_sites(p);
    if (siteIdx >= sites.size() || !sites[siteIdx].present) {
        throw AbsentSite("site has no annotation to remove");
    }
    return with_site_annotation(p, siteIdx, std::nullopt);
}

Program rename_user_type(const Program& p, int declIndex, const std::string& fresh) {
    require_fresh(p, fresh);
    if (declIndex < 0 || declIndex >= static_cast<int>(p.decls.size())) {
        throw UnknownDecl("decl index out of range");
    }
    Program out = clone_program(p);
    std::string oldName;
    if (auto* r = std::get_if<RecordDecl>(&out.decls[declIndex])) {
        oldName = r->name;
        r->name = fresh;
    } else if (auto* a = std::get_if<AliasDecl>(&out.decls[declIndex])) {
        oldName = a->name;
        a->name = fresh;
    } else {
        throw UnknownDecl("decl is not a record or alias");
    }

    for_each_annot(out, [&](std::optional<TypePtr>& slot) {
        if (slot) slot = rename_in_type(*slot, oldName, fresh);
    });
    for (auto& d : out.decls) {
        if (auto* r = std::get_if<RecordDecl>(&d)) {
            for (auto& fld : r->fields) {
                if (fld.annot) fld.annot = rename_in_type(*fld.annot, oldName, fresh);
            }
        } else if (auto* a = std::get_if<AliasDecl>(&d)) {
            a->target = rename_in_type(a->target, oldName, fresh);
        } else if (auto* f = std::get_if<FuncDecl>(&d)) {
            auto visit = [&](auto&& self, const ExprPtr& e) -> void {
                if (!e) return;
                if (e->kind == Expr::Kind::Record && e->name == oldName) e->name = fresh;
                for (const auto& arg : e->args) self(self, arg);
            };
            for (auto& s : f->body) visit(visit, s.expr);
        }
    }
    return out;
}

Program alias_builtin(const Program& p, const TypePtr& builtin, const std::string& fresh) {
    require_fresh(p, fresh);
    if (builtin->kind != Type::Kind::Int && builtin->kind != Type::Kind::Str &&
        builtin->kind != Type::Kind::Bool) {
        throw std::invalid_argument("alias target must be a builtin type");
    }
    Program out = clone_program(p);

    auto rewrite = [&](auto&& self, const TypePtr& t) -> TypePtr {
        if (t->kind == builtin->kind) return type_named(fresh);
        if (t->kind == Type::Kind::List) return type_list(self(self, t->elem));
        return t;
    };
    for_each_annot(out, [&](std::optional<TypePtr>& slot) {
        if (slot) slot = rewrite(rewrite, *slot);
    });
    for (auto& d : out.decls) {
        if (auto* r = std::get_if<RecordDecl>(&d)) {
            for (auto& fld : r->fields) {
                if (fld.annot) fld.annot = rewrite(rewrite, *fld.annot);
            }
        }
    }

    AliasDecl a;
    a.name = fresh;
    a.target = builtin;
    out.decls.insert(out.decls.begin(), std::move(a));
    return out;
}

std::optional<std::string> fresh_variable(const Program& p) {
    return lowest_unused(p, kFreshVarPool, fresh_var_name);
}
std::optional<std::string> fresh_type(const Program& p) {
    return lowest_unused(p, kFreshTypePool, fresh_type_name);
}
std::optional<std::string> fresh_alias(const Program& p) {
    return lowest_unused(p, kFreshAliasPool, fresh_alias_name);
}

std::pair<Program, Edit> apply_random_edit(const Program& p, Rng& rng, size_t protectedSiteIdx,
                                           const std::vector<EditKind>& kinds) {
    auto sites = list_annotation_sites(p);

    std::vector<EditKind> legal;
    for (EditKind k : kinds) {
        switch (k) {
            case EditKind::RenameVariable:
                if (!list_bindings(p).empty() && fresh_variable(p)) legal.push_back(k);
                break;
            case EditKind::RemoveAnnotation: {
                bool any = false;
                for (size_t i = 0; i < sites.size(); ++i) {
                    if (i != protectedSiteIdx && sites[i].present) any = true;
                }
                if (any) legal.push_back(k);
                break;
            }
            case EditKind::RenameUserType: {
                bool any = false;
                for (const auto& d : p.decls) {
                    if (!std::holds_alternative<FuncDecl>(d)) any = true;
                }
                if (any && fresh_type(p)) legal.push_back(k);
                break;
            }
            case EditKind::AliasBuiltin:
                if (fresh_alias(p)) legal.push_back(k);
                break;
        }
    }
    if (legal.empty()) throw NoLegalEdit("no legal edit in the active subset");

    EditKind k = legal[rng.below(legal.size())];
    Edit e;
    e.kind = k;
    switch (k) {
        case EditKind::RenameVariable: {
            auto bindings = list_bindings(p);
            e.binding = bindings[rng.below(bindings.size())];
            e.from = binding_name(p, e.binding);
            e.to = *fresh_variable(p);
            return {rename_variable(p, e.binding, e.to), e};
        }
        case EditKind::RemoveAnnotation: {
            std::vector<size_t> candidates;
            for (size_t i = 0; i < sites.size(); ++i) {
                if (i != protectedSiteIdx && sites[i].present) candidates.push_back(i);
            }
            e.siteIndex = static_cast<int>(candidates[rng.below(candidates.size())]);
            return {remove_annotation(p, e.siteIndex, protectedSiteIdx), e};
        }
        case EditKind::RenameUserType: {
            std::vector<int> decls;
            for (int i = 0; i < static_cast<int>(p.decls.size()); ++i) {
                if (!std::holds_alternative<FuncDecl>(p.decls[i])) decls.push_back(i);
            }
            e.declIndex = decls[rng.below(decls.size())];
            if (const auto* r = std::get_if<RecordDecl>(&p.decls[e.declIndex])) e.from = r->name;
            if (const auto* a = std::get_if<AliasDecl>(&p.decls[e.declIndex])) e.from = a->name;
            e.to = *fresh_type(p);
            return {rename_user_type(p, e.declIndex, e.to), e};
        }
        default: {
            TypePtr builtin;
            switch (rng.below(3)) {
                case 0: builtin = type_int(); e.from = "int"; break;
                case 1: builtin = type_str(); e.from = "str"; break;
                default: builtin = type_bool(); e.from = "bool"; break;
            }
            e.to = *fresh_alias(p);
            return {alias_builtin(p, builtin, e.to), e};
        }
    }
}

size_t edit_distance(const std::string& a, const std::string& b) {
    const size_t n = a.size(), m = b.size();
    std::vector<size_t> prev(m + 1), cur(m + 1);
    for (size_t j = 0; j <= m; ++j) prev[j] = j;
    for (size_t i = 1; i <= n; ++i) {
        cur[0] = i;
        for (size_t j = 1; j <= m; ++j) {
            size_t sub = prev[j - 1] + (a[i - 1] != b[j - 1]);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

}  // namespace typesteer::mutate
