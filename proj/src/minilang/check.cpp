#include "typesteer/minilang/check.hpp"

#include <map>
#include <set>

#include "typesteer/minilang/render.hpp"

namespace typesteer::minilang {

namespace {

struct Checker {
    const Program& p;
    CheckResult result;
    std::map<std::string, const RecordDecl*> records;
    std::map<std::string, const AliasDecl*> aliases;
    std::map<std::string, const FuncDecl*> funcs;

    explicit Checker(const Program& prog) : p(prog) {}

    void error(std::string msg, Span span = {}) {
        result.errors.push_back({std::move(msg), span});
    }

    // Expands alias chains; Named resolves to a record or an error. List
    // elements are resolved recursively.
    TypePtr resolve(const TypePtr& t, std::set<std::string>* seen = nullptr) {
        if (!t) return type_dyn();
        switch (t->kind) {
            case Type::Kind::Named: {
                auto ai = aliases.find(t->name);
                if (ai != aliases.end()) {
                    std::set<std::string> local;
                    if (!seen) seen = &local;
                    if (!seen->insert(t->name).second) {
                        error("alias cycle involving '" + t->name + "'");
                        return type_dyn();
                    }
                    return resolve(ai->second->target, seen);
                }
                if (!records.count(t->name)) {
                    error("unknown type name '" + t->name + "'");
                    return type_dyn();
                }
                return t;
            }
            case Type::Kind::List: {
                TypePtr elem = resolve(t->elem, seen);
                return type_list(elem);
            }
            default:
                return t;
        }
    }

    // Gradual compatibility on resolved types.
    bool compat(const TypePtr& a, const TypePtr& b) {
        if (a->kind == Type::Kind::Dyn || b->kind == Type::Kind::Dyn) return true;
        if (a->kind != b->kind) return false;
        if (a->kind == Type::Kind::List) return compat(a->elem, b->elem);
        if (a->kind == Type::Kind::Named) return a->name == b->name;
        return true;
    }

    // Most precise common type; Dyn defers to the other side.
    TypePtr join(const TypePtr& a, const TypePtr& b) {
        if (a->kind == Type::Kind::Dyn) return b;
        if (b->kind == Type::Kind::Dyn) return a;
        if (a->kind == Type::Kind::List && b->kind == Type::Kind::List) {
            return type_list(join(a->elem, b->elem));
        }
        return a;
    }

    TypePtr annot_or_dyn(const std::optional<TypePtr>& t) {
        return t ? resolve(*t) : type_dyn();
    }

    TypePtr check_expr(const ExprPtr& e, std::map<std::string, TypePtr>& env) {
        switch (e->kind) {
            case Expr::Kind::IntLit: return type_int();
            case Expr::Kind::StrLit: return type_str();
            case Expr::Kind::BoolLit: return type_bool();
            case Expr::Kind::Var: {
                auto it = env.find(e->name);
                if (it == env.end()) {
                    error("unknown variable '" + e->name + "'", e->span);
                    return type_dyn();
                }
                return it->second;
            }
            case Expr::Kind::ListLit: {
                TypePtr elem = type_dyn();
                for (const auto& a : e->args) {
                    TypePtr at = check_expr(a, env);
                    if (!compat(elem, at)) {
                        error("list elements have mixed types", e->span);
                        return type_list(type_dyn());
                    }
                    elem = join(elem, at);
                }
                return type_list(elem);
            }
            case Expr::Kind::Binary: {
                TypePtr lhs = check_expr(e->args[0], env);
                TypePtr rhs = check_expr(e->args[1], env);
                switch (e->op) {
                    case BinOp::Add: {
                        bool lhsOk = lhs->kind == Type::Kind::Int || lhs->kind == Type::Kind::Str ||
                                     lhs->kind == Type::Kind::Dyn;
                        bool rhsOk = rhs->kind == Type::Kind::Int || rhs->kind == Type::Kind::Str ||
                                     rhs->kind == Type::Kind::Dyn;
                        if (!lhsOk || !rhsOk || !compat(lhs, rhs)) {
                            error("'+' needs two ints or two strings", e->span);
                            return type_dyn();
                        }
                        return join(lhs, rhs);
                    }
                    case BinOp::Sub:
                    case BinOp::Mul:
                        if (!compat(lhs, type_int()) || !compat(rhs, type_int())) {
                            error("arithmetic needs int operands", e->span);
                        }
                        return type_int();
                    case BinOp::Eq:
                        if (!compat(lhs, rhs)) error("'==' operands are incomparable", e->span);
                        return type_bool();
                    case BinOp::Lt:
                        if (!compat(lhs, type_int()) || !compat(rhs, type_int())) {
                            error("'<' needs int operands", e->span);
                        }
                        return type_bool();
                    case BinOp::And:
                    case BinOp::Or:
                        if (!compat(lhs, type_bool()) || !compat(rhs, type_bool())) {
                            error("logic needs bool operands", e->span);
                        }
                        return type_bool();
                }
                return type_dyn();
            }
            case Expr::Kind::Call: {
                auto it = funcs.find(e->name);
                if (it == funcs.end()) {
                    error("unknown function '" + e->name + "'", e->span);
                    for (const auto& a : e->args) check_expr(a, env);
                    return type_dyn();
                }
                const FuncDecl* f = it->second;
                if (e->args.size() != f->params.size()) {
                    error("call to '" + e->name + "' with wrong arity", e->span);
                }
                for (size_t i = 0; i < e->args.size(); ++i) {
                    TypePtr at = check_expr(e->args[i], env);
                    if (i < f->params.size()) {
                        TypePtr pt = annot_or_dyn(f->params[i].annot);
                        if (!compat(at, pt)) {
                            error("argument " + std::to_string(i) + " of '" + e->name +
                                      "' has incompatible type",
                                  e->span);
                        }
                    }
                }
                return annot_or_dyn(f->returnType);
            }
            case Expr::Kind::Record: {
                auto it = records.find(e->name);
                if (it == records.end()) {
                    error("unknown record '" + e->name + "'", e->span);
                    for (const auto& a : e->args) check_expr(a, env);
                    return type_dyn();
                }
                const RecordDecl* r = it->second;
                if (e->args.size() != r->fields.size()) {
                    error("constructor of '" + e->name + "' with wrong arity", e->span);
                }
                for (size_t i = 0; i < e->args.size(); ++i) {
                    TypePtr at = check_expr(e->args[i], env);
                    if (i < r->fields.size()) {
                        TypePtr ft = annot_or_dyn(r->fields[i].annot);
                        if (!compat(at, ft)) {
                            error("field '" + r->fields[i].name + "' of '" + e->name +
                                      "' has incompatible initializer",
                                  e->span);
                        }
                    }
                }
                return type_named(e->name);
            }
            case Expr::Kind::Field: {
                TypePtr base = check_expr(e->args[0], env);
                if (base->kind == Type::Kind::Dyn) return type_dyn();
                if (base->kind != Type::Kind::Named) {
                    error("field access on non-record value", e->span);
                    return type_dyn();
                }
                const RecordDecl* r = records.at(base->name);
                for (const auto& f : r->fields) {
                    if (f.name == e->name) return annot_or_dyn(f.annot);
                }
                error("record '" + base->name + "' has no field '" + e->name + "'", e->span);
                return type_dyn();
            }
        }
        return type_dyn();
    }

    void check_func(const FuncDecl& f, std::vector<TypePtr>& siteTypes) {
        std::map<std::string, TypePtr> env;
        std::set<std::string> paramNames;
        for (const auto& pr : f.params) {
            if (!paramNames.insert(pr.name).second) {
                error("duplicate parameter '" + pr.name + "' in '" + f.name + "'", pr.span);
            }
            env[pr.name] = annot_or_dyn(pr.annot);
            siteTypes.push_back(env[pr.name]);
        }
        size_t returnSlot = siteTypes.size();
        TypePtr declaredReturn = annot_or_dyn(f.returnType);
        siteTypes.push_back(declaredReturn);

        TypePtr inferredReturn = type_dyn();
        for (const auto& s : f.body) {
            switch (s.kind) {
                case Stmt::Kind::Let: {
                    TypePtr et = check_expr(s.expr, env);
                    TypePtr bt = et;
                    if (s.annot) {
                        bt = resolve(*s.annot);
                        if (!compat(et, bt)) {
                            error("initializer of '" + s.name + "' does not match its annotation",
                                  s.span);
                        }
                    }
                    env[s.name] = bt;
                    siteTypes.push_back(bt);
                    break;
                }
                case Stmt::Kind::Assign: {
                    TypePtr et = check_expr(s.expr, env);
                    TypePtr lt = type_dyn();
                    auto it = env.find(s.lvalue.base);
                    if (it == env.end()) {
                        error("assignment to unknown variable '" + s.lvalue.base + "'", s.span);
                    } else if (s.lvalue.isField) {
                        TypePtr base = it->second;
                        if (base->kind == Type::Kind::Named) {
                            const RecordDecl* r = records.count(base->name)
                                                      ? records.at(base->name)
                                                      : nullptr;
                            bool found = false;
                            if (r) {
                                for (const auto& fd : r->fields) {
                                    if (fd.name == s.lvalue.field) {
                                        lt = annot_or_dyn(fd.annot);
                                        found = true;
                                    }
                                }
                            }
                            if (!found) {
                                error("record '" + base->name + "' has no field '" +
                                          s.lvalue.field + "'",
                                      s.span);
                            }
                        } else if (base->kind != Type::Kind::Dyn) {
                            error("field assignment on non-record value", s.span);
                        }
                    } else {
                        lt = it->second;
                    }
                    if (!compat(et, lt)) {
                        error("assignment type mismatch for '" + s.lvalue.base + "'", s.span);
                    }
                    break;
                }
                case Stmt::Kind::Return: {
                    TypePtr et = check_expr(s.expr, env);
                    if (f.returnType && !compat(et, declaredReturn)) {
                        error("return value incompatible with declared return type of '" + f.name +
                                  "'",
                              s.span);
                    }
                    if (inferredReturn->kind == Type::Kind::Dyn) inferredReturn = et;
                    else if (compat(inferredReturn, et)) inferredReturn = join(inferredReturn, et);
                    break;
                }
                case Stmt::Kind::ExprStmt:
                    check_expr(s.expr, env);
                    break;
            }
        }
        if (!f.returnType) siteTypes[returnSlot] = inferredReturn;
    }

    CheckResult run() {
        std::set<std::string> declNames;
        for (const auto& d : p.decls) {
            std::string name;
            if (const auto* r = std::get_if<RecordDecl>(&d)) {
                name = r->name;
                records[name] = r;
            } else if (const auto* a = std::get_if<AliasDecl>(&d)) {
                name = a->name;
                aliases[name] = a;
            } else {
                const auto& f = std::get<FuncDecl>(d);
                name = f.name;
                funcs[name] = &f;
            }
            if (!declNames.insert(name).second) error("duplicate declaration '" + name + "'");
        }

        for (const auto& d : p.decls) {
            if (const auto* r = std::get_if<RecordDecl>(&d)) {
                std::set<std::string> fieldNames;
                for (const auto& f : r->fields) {
                    if (!fieldNames.insert(f.name).second) {
                        error("duplicate field '" + f.name + "' in record '" + r->name + "'",
                              f.span);
                    }
                    if (f.annot) {
                        result.siteInferred.push_back(resolve(*f.annot));
                    } else {
                        result.siteInferred.push_back(type_dyn());
                    }
                }
            } else if (const auto* a = std::get_if<AliasDecl>(&d)) {
                resolve(type_named(a->name));  // surfaces cycles and bad targets
            } else {
                check_func(std::get<FuncDecl>(d), result.siteInferred);
            }
        }
        result.ok = result.errors.empty();
        return std::move(result);
    }
};

}  // namespace

CheckResult type_check(const Program& p) { return Checker(p).run(); }

bool annotation_passes(const Program& p, size_t siteIdx, const TypePtr& annot) {
    Program patched = with_site_annotation(p, siteIdx, annot);
    return type_check(patched).ok;
}

}  // namespace typesteer::minilang
