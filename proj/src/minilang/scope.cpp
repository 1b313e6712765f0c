#include "typesteer/minilang/scope.hpp"

namespace typesteer::minilang {

namespace {

void collect_type_uses(const TypePtr& t, const std::map<std::string, int>& typeDecls,
                       std::vector<std::string>& missing) {
    if (!t) return;
    if (t->kind == Type::Kind::Named && !typeDecls.count(t->name)) missing.push_back(t->name);
    collect_type_uses(t->elem, typeDecls, missing);
}

struct FuncScope {
    // name -> binding, innermost last writer wins.
    std::map<std::string, BindingRef> env;
};

void resolve_expr(const Expr* e, const FuncScope& scope, const Program& p, ScopeResult& out,
                  std::vector<std::string>& missing) {
    if (e->kind == Expr::Kind::Var) {
        auto it = scope.env.find(e->name);
        if (it == scope.env.end()) {
            missing.push_back(e->name);
        } else {
            out.varUses[e] = it->second;
        }
        return;
    }
    if (e->kind == Expr::Kind::Call) {
        bool known = false;
        for (const auto& d : p.decls) {
            if (const auto* f = std::get_if<FuncDecl>(&d); f && f->name == e->name) known = true;
        }
        if (!known) missing.push_back(e->name);
    }
    for (const auto& a : e->args) resolve_expr(a.get(), scope, p, out, missing);
}

}  // namespace

ScopeResult resolve_scopes(const Program& p) {
    ScopeResult out;
    std::vector<std::string> missing;

    for (size_t di = 0; di < p.decls.size(); ++di) {
        const auto& d = p.decls[di];
        std::string name;
        if (const auto* r = std::get_if<RecordDecl>(&d)) name = r->name;
        else if (const auto* a = std::get_if<AliasDecl>(&d)) name = a->name;
        else continue;
        out.typeDecls.emplace(name, static_cast<int>(di));
    }

    for (size_t di = 0; di < p.decls.size(); ++di) {
        const auto& d = p.decls[di];
        if (const auto* r = std::get_if<RecordDecl>(&d)) {
            for (const auto& f : r->fields) {
                if (f.annot) collect_type_uses(*f.annot, out.typeDecls, missing);
            }
            continue;
        }
        if (const auto* a = std::get_if<AliasDecl>(&d)) {
            collect_type_uses(a->target, out.typeDecls, missing);
            continue;
        }
        const auto& f = std::get<FuncDecl>(d);
        FuncScope scope;
        for (size_t pi = 0; pi < f.params.size(); ++pi) {
            scope.env[f.params[pi].name] = {BindingRef::Kind::Param, static_cast<int>(di),
                                            static_cast<int>(pi)};
            if (f.params[pi].annot) collect_type_uses(*f.params[pi].annot, out.typeDecls, missing);
        }
        if (f.returnType) collect_type_uses(*f.returnType, out.typeDecls, missing);
        for (size_t si = 0; si < f.body.size(); ++si) {
            const Stmt& s = f.body[si];
            if (s.expr) resolve_expr(s.expr.get(), scope, p, out, missing);
            if (s.kind == Stmt::Kind::Let) {
                if (s.annot) collect_type_uses(*s.annot, out.typeDecls, missing);
                // The binding is visible from the next statement on; the
                // initializer above resolved against the outer binding.
                scope.env[s.name] = {BindingRef::Kind::Let, static_cast<int>(di),
                                     static_cast<int>(si)};
            } else if (s.kind == Stmt::Kind::Assign) {
                auto it = scope.env.find(s.lvalue.base);
                if (it == scope.env.end()) missing.push_back(s.lvalue.base);
                else out.assignBases[&s] = it->second;
            }
        }
    }

    if (!missing.empty()) {
        std::string msg = "unresolved identifier(s):";
        for (const auto& m : missing) msg += " " + m;
        throw UnresolvedIdentifier(msg);
    }
    return out;
}

std::vector<BindingRef> list_bindings(const Program& p) {
    std::vector<BindingRef> out;
    for (size_t di = 0; di < p.decls.size(); ++di) {
        const auto* f = std::get_if<FuncDecl>(&p.decls[di]);
        if (!f) continue;
        for (size_t pi = 0; pi < f->params.size(); ++pi) {
            out.push_back({BindingRef::Kind::Param, static_cast<int>(di), static_cast<int>(pi)});
        }
        for (size_t si = 0; si < f->body.size(); ++si) {
            if (f->body[si].kind == Stmt::Kind::Let) {
                out.push_back({BindingRef::Kind::Let, static_cast<int>(di), static_cast<int>(si)});
            }
        }
    }
    return out;
}

std::string binding_name(const Program& p, const BindingRef& b) {
    const auto& f = std::get<FuncDecl>(p.decls[static_cast<size_t>(b.declIndex)]);
    if (b.kind == BindingRef::Kind::Param) return f.params[static_cast<size_t>(b.itemIndex)].name;
    return f.body[static_cast<size_t>(b.itemIndex)].name;
}

}  // namespace typesteer::minilang
