#include "typesteer/minilang/interp.hpp"

namespace typesteer::minilang {

namespace {

constexpr long long kStepCap = 100000;
constexpr int kDepthCap = 64;

struct Interp {
    const Program& p;
    std::map<std::string, const FuncDecl*> funcs;
    long long steps = 0;

    explicit Interp(const Program& prog) : p(prog) {
        for (const auto& d : p.decls) {
            if (const auto* f = std::get_if<FuncDecl>(&d)) funcs[f->name] = f;
        }
    }

    void tick() {
        if (++steps > kStepCap) throw StepLimitExceeded("step limit exceeded");
    }

    Value eval_expr(const ExprPtr& e, std::map<std::string, Value>& env, int depth) {
        tick();
        switch (e->kind) {
            case Expr::Kind::IntLit: return Value(e->intValue);
            case Expr::Kind::StrLit: return Value(e->strValue);
            case Expr::Kind::BoolLit: return Value(e->boolValue);
            case Expr::Kind::Var: {
                auto it = env.find(e->name);
                if (it == env.end()) return Value(Trap{"unbound variable " + e->name});
                return it->second;
            }
            case Expr::Kind::ListLit: {
                auto list = std::make_shared<std::vector<Value>>();
                for (const auto& a : e->args) {
                    Value v = eval_expr(a, env, depth);
                    if (v.is_trap()) return v;
                    list->push_back(std::move(v));
                }
                return Value(list);
            }
            case Expr::Kind::Binary: {
                Value lhs = eval_expr(e->args[0], env, depth);
                if (lhs.is_trap()) return lhs;
                // Short-circuit logic mirrors the surface dialects.
                if (e->op == BinOp::And || e->op == BinOp::Or) {
                    const bool* lb = std::get_if<bool>(&lhs.v);
                    if (!lb) return Value(Trap{"logic on non-bool"});
                    if (e->op == BinOp::And && !*lb) return Value(false);
                    if (e->op == BinOp::Or && *lb) return Value(true);
                    Value rhs = eval_expr(e->args[1], env, depth);
                    if (rhs.is_trap()) return rhs;
                    const bool* rb = std::get_if<bool>(&rhs.v);
                    if (!rb) return Value(Trap{"logic on non-bool"});
                    return Value(*rb);
                }
                Value rhs = eval_expr(e->args[1], env, depth);
                if (rhs.is_trap()) return rhs;
                switch (e->op) {
                    case BinOp::Add: {
                        if (const auto* li = std::get_if<long long>(&lhs.v)) {
                            const auto* ri = std::get_if<long long>(&rhs.v);
                            if (!ri) return Value(Trap{"'+' type mismatch"});
                            return Value(*li + *ri);
                        }
                        if (const auto* ls = std::get_if<std::string>(&lhs.v)) {
                            const auto* rs = std::get_if<std::string>(&rhs.v);
                            if (!rs) return Value(Trap{"'+' type mismatch"});
                            return Value(*ls + *rs);
                        }
                        return Value(Trap{"'+' on unsupported type"});
                    }
                    case BinOp::Sub:
                    case BinOp::Mul: {
                        const auto* li = std::get_if<long long>(&lhs.v);
                        const auto* ri = std::get_if<long long>(&rhs.v);
                        if (!li || !ri) return Value(Trap{"arithmetic on non-int"});
                        return Value(e->op == BinOp::Sub ? *li - *ri : *li * *ri);
                    }
                    case BinOp::Eq:
                        return Value(value_equal_mapped(lhs, rhs, {}));
                    case BinOp::Lt: {
                        const auto* li = std::get_if<long long>(&lhs.v);
                        const auto* ri = std::get_if<long long>(&rhs.v);
                        if (!li || !ri) return Value(Trap{"'<' on non-int"});
                        return Value(*li < *ri);
                    }
                    default:
                        return Value(Trap{"unreachable"});
                }
            }
            case Expr::Kind::Call: {
                auto it = funcs.find(e->name);
                if (it == funcs.end()) return Value(Trap{"unknown function " + e->name});
                std::vector<Value> args;
                for (const auto& a : e->args) {
                    Value v = eval_expr(a, env, depth);
                    if (v.is_trap()) return v;
                    args.push_back(std::move(v));
                }
                if (args.size() != it->second->params.size()) {
                    return Value(Trap{"arity mismatch calling " + e->name});
                }
                return call(*it->second, args, depth + 1);
            }
            case Expr::Kind::Record: {
                const RecordDecl* r = nullptr;
                for (const auto& d : p.decls) {
                    if (const auto* rd = std::get_if<RecordDecl>(&d); rd && rd->name == e->name) {
                        r = rd;
                    }
                }
                if (!r || e->args.size() != r->fields.size()) {
                    return Value(Trap{"bad record construction " + e->name});
                }
                auto rec = std::make_shared<RecordVal>();
                rec->typeName = e->name;
                for (size_t i = 0; i < e->args.size(); ++i) {
                    Value v = eval_expr(e->args[i], env, depth);
                    if (v.is_trap()) return v;
                    rec->fields[r->fields[i].name] = std::move(v);
                }
                return Value(rec);
            }
            case Expr::Kind::Field: {
                Value base = eval_expr(e->args[0], env, depth);
                if (base.is_trap()) return base;
                const auto* rec = std::get_if<RecordPtr>(&base.v);
                if (!rec) return Value(Trap{"field access on non-record"});
                auto it = (*rec)->fields.find(e->name);
                if (it == (*rec)->fields.end()) return Value(Trap{"no field " + e->name});
                return it->second;
            }
        }
        return Value(Trap{"unreachable"});
    }

    Value call(const FuncDecl& f, const std::vector<Value>& args, int depth) {
        if (depth > kDepthCap) throw StepLimitExceeded("recursion limit exceeded");
        std::map<std::string, Value> env;
        for (size_t i = 0; i < f.params.size(); ++i) env[f.params[i].name] = args[i];
        for (const auto& s : f.body) {
            tick();
            switch (s.kind) {
                case Stmt::Kind::Let: {
                    Value v = eval_expr(s.expr, env, depth);
                    if (v.is_trap()) return v;
                    env[s.name] = std::move(v);
                    break;
                }
                case Stmt::Kind::Assign: {
                    Value v = eval_expr(s.expr, env, depth);
                    if (v.is_trap()) return v;
                    auto it = env.find(s.lvalue.base);
                    if (it == env.end()) return Value(Trap{"assign to unbound " + s.lvalue.base});
                    if (s.lvalue.isField) {
                        auto* rec = std::get_if<RecordPtr>(&it->second.v);
                        if (!rec) return Value(Trap{"field assign on non-record"});
                        auto fit = (*rec)->fields.find(s.lvalue.field);
                        if (fit == (*rec)->fields.end()) {
                            return Value(Trap{"no field " + s.lvalue.field});
                        }
                        fit->second = std::move(v);
                    } else {
                        it->second = std::move(v);
                    }
                    break;
                }
                case Stmt::Kind::Return: {
                    return eval_expr(s.expr, env, depth);
                }
                case Stmt::Kind::ExprStmt: {
                    Value v = eval_expr(s.expr, env, depth);
                    if (v.is_trap()) return v;
                    break;
                }
            }
        }
        return Value(Unit{});
    }
};

}  // namespace

Value evaluate(const Program& p, const std::string& entry, const std::vector<Value>& args) {
    Interp in(p);
    auto it = in.funcs.find(entry);
    if (it == in.funcs.end()) throw UnknownEntry("unknown entry function " + entry);
    if (it->second->params.size() != args.size()) {
        throw UnknownEntry("arity mismatch for entry " + entry);
    }
    return in.call(*it->second, args, 0);
}

bool value_equal_mapped(const Value& a, const Value& b,
                        const std::map<std::string, std::string>& nameMap) {
    if (a.v.index() != b.v.index()) return false;
    if (std::holds_alternative<Unit>(a.v)) return true;
    if (const auto* ai = std::get_if<long long>(&a.v)) return *ai == std::get<long long>(b.v);
    if (const auto* as = std::get_if<std::string>(&a.v)) return *as == std::get<std::string>(b.v);
    if (const auto* ab = std::get_if<bool>(&a.v)) return *ab == std::get<bool>(b.v);
    if (const auto* al = std::get_if<ListVal>(&a.v)) {
        const auto& bl = std::get<ListVal>(b.v);
        if ((*al)->size() != bl->size()) return false;
        for (size_t i = 0; i < (*al)->size(); ++i) {
            if (!value_equal_mapped((**al)[i], (*bl)[i], nameMap)) return false;
        }
        return true;
    }
    if (const auto* ar = std::get_if<RecordPtr>(&a.v)) {
        const auto& br = std::get<RecordPtr>(b.v);
        std::string mappedName = (*ar)->typeName;
        auto mi = nameMap.find(mappedName);
        if (mi != nameMap.end()) mappedName = mi->second;
        if (mappedName != br->typeName) return false;
        if ((*ar)->fields.size() != br->fields.size()) return false;
        for (const auto& [k, v] : (*ar)->fields) {
            auto bit = br->fields.find(k);
            if (bit == br->fields.end()) return false;
            if (!value_equal_mapped(v, bit->second, nameMap)) return false;
        }
        return true;
    }
    // Traps compare by reason.
    return std::get<Trap>(a.v).reason == std::get<Trap>(b.v).reason;
}

std::string value_to_string(const Value& v) {
    if (std::holds_alternative<Unit>(v.v)) return "unit";
    if (const auto* i = std::get_if<long long>(&v.v)) return std::to_string(*i);
    if (const auto* s = std::get_if<std::string>(&v.v)) return "\"" + *s + "\"";
    if (const auto* b = std::get_if<bool>(&v.v)) return *b ? "true" : "false";
    if (const auto* l = std::get_if<ListVal>(&v.v)) {
        std::string out = "[";
        for (size_t i = 0; i < (*l)->size(); ++i) {
            if (i) out += ", ";
            out += value_to_string((**l)[i]);
        }
        return out + "]";
    }
    if (const auto* r = std::get_if<RecordPtr>(&v.v)) {
        std::string out = (*r)->typeName + "(";
        bool first = true;
        for (const auto& [k, fv] : (*r)->fields) {
            if (!first) out += ", ";
            first = false;
            out += k + "=" + value_to_string(fv);
        }
        return out + ")";
    }
    return "trap(" + std::get<Trap>(v.v).reason + ")";
}

}  // namespace typesteer::minilang
