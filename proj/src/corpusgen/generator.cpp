#include "typesteer/corpusgen/generator.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "typesteer/minilang/check.hpp"
#include "typesteer/pools.hpp"

namespace typesteer::corpusgen {

using namespace minilang;

namespace {

struct RecInfo {
    std::string name;
    std::vector<std::pair<std::string, TypePtr>> fields;
};

struct FnInfo {
    std::string name;
    std::vector<TypePtr> params;  // resolved
    TypePtr ret;                  // resolved
};

struct Gen {
    Rng& rng;
    const GenConfig& cfg;
    bool forceUserType;

    std::set<int> usedVars, usedTypes, usedFields;
    std::vector<RecInfo> records;
    std::map<std::string, TypePtr> aliases;  // name -> builtin target
    std::vector<FnInfo> funcs;

    // name -> resolved type, in binding order (later entries shadow).
    using Env = std::vector<std::pair<std::string, TypePtr>>;

    Gen(Rng& r, const GenConfig& c, bool force) : rng(r), cfg(c), forceUserType(force) {}

    std::string fresh_var() {
        for (;;) {
            int i = static_cast<int>(rng.below(kVarPool));
            if (usedVars.insert(i).second) return var_name(i);
        }
    }
    std::string fresh_type() {
        for (;;) {
            int i = static_cast<int>(rng.below(kTypePool));
            if (usedTypes.insert(i).second) return type_name(i);
        }
    }
    std::string fresh_field() {
        for (;;) {
            int i = static_cast<int>(rng.below(kFieldPool));
            if (usedFields.insert(i).second) return field_name(i);
        }
    }

    TypePtr resolve(const TypePtr& t) const {
        if (t->kind == Type::Kind::Named) {
            auto it = aliases.find(t->name);
            if (it != aliases.end()) return it->second;
        }
        if (t->kind == Type::Kind::List) return type_list(resolve(t->elem));
        return t;
    }

    const RecInfo* record_of(const TypePtr& resolved) const {
        if (resolved->kind != Type::Kind::Named) return nullptr;
        for (const auto& r : records) {
            if (r.name == resolved->name) return &r;
        }
        return nullptr;
    }

    TypePtr random_builtin() {
        switch (rng.below(3)) {
            case 0: return type_int();
            case 1: return type_str();
            default: return type_bool();
        }
    }

    // Annotation spelling of a builtin: always uses a declared alias, so the
    // corpus teaches a deterministic "alias declared => annotations use it"
    // rule and the exact annotation text stays inferable from context.
    TypePtr spell_builtin(const TypePtr& b) {
        for (const auto& [name, target] : aliases) {
            if (type_equal(target, b)) return type_named(name);
        }
        return b;
    }

    // Annotation type for params and record fields (no lists: a list-typed
    // parameter has no revealing use form).
    TypePtr choose_param_type() {
        double x = rng.real();
        if (x < 0.20 && !records.empty()) {
            return type_named(records[rng.below(records.size())].name);
        }
        double y = rng.real();
        if (y < 0.45) return spell_builtin(type_int());
        if (y < 0.75) return spell_builtin(type_str());
        return spell_builtin(type_bool());
    }

    TypePtr choose_let_type() {
        double x = rng.real();
        if (x < 0.15 && !records.empty()) {
            return type_named(records[rng.below(records.size())].name);
        }
        if (x < 0.27) return type_list(random_builtin());
        double y = rng.real();
        if (y < 0.45) return spell_builtin(type_int());
        if (y < 0.75) return spell_builtin(type_str());
        return spell_builtin(type_bool());
    }

    std::vector<const std::pair<std::string, TypePtr>*> vars_of(const Env& env,
                                                                const TypePtr& resolved) {
        // Later bindings shadow earlier ones of the same name.
        std::map<std::string, const std::pair<std::string, TypePtr>*> current;
        for (const auto& b : env) current[b.first] = &b;
        std::vector<const std::pair<std::string, TypePtr>*> out;
        for (const auto& b : env) {
            if (current.at(b.first) == &b && type_equal(b.second, resolved)) out.push_back(&b);
        }
        return out;
    }

    ExprPtr literal_of(const TypePtr& t) {
        switch (t->kind) {
            case Type::Kind::Int: return expr_int(static_cast<long long>(rng.below(kIntLitMax + 1)));
            case Type::Kind::Str: return expr_str(str_pool()[rng.below(kStrPool)]);
            case Type::Kind::Bool: return expr_bool(rng.below(2) == 0);
            default: return nullptr;
        }
    }

    // Synthesizes an expression of exactly the given resolved type.
    ExprPtr gen_expr(const TypePtr& t, const Env& env, int depth) {
        auto vars = vars_of(env, t);
        bool canVar = !vars.empty();
        auto useVar = [&]() { return expr_var(vars[rng.below(vars.size())]->first); };

        std::vector<const FnInfo*> callable;
        if (depth > 0) {
            for (const auto& f : funcs) {
                if (type_equal(f.ret, t)) callable.push_back(&f);
            }
        }
        auto useCall = [&](const FnInfo& f) {
            std::vector<ExprPtr> args;
            for (const auto& pt : f.params) args.push_back(gen_expr(pt, env, 0));
            return expr_call(f.name, std::move(args));
        };

        switch (t->kind) {
            case Type::Kind::Int:
            case Type::Kind::Str: {
                double x = rng.real();
                if (canVar && x < 0.45) return useVar();
                if (depth > 0 && x < 0.65) {
                    return expr_binary(BinOp::Add, gen_expr(t, env, depth - 1),
                                       gen_expr(t, env, 0));
                }
                if (t->kind == Type::Kind::Int && depth > 0 && x < 0.72) {
                    BinOp op = rng.below(2) == 0 ? BinOp::Sub : BinOp::Mul;
                    return expr_binary(op, gen_expr(t, env, depth - 1), gen_expr(t, env, 0));
                }
                if (!callable.empty() && x < 0.80) return useCall(*callable[rng.below(callable.size())]);
                return literal_of(t);
            }
            case Type::Kind::Bool: {
                double x = rng.real();
                if (canVar && x < 0.35) return useVar();
                if (depth > 0 && x < 0.60) {
                    return expr_binary(BinOp::Lt, gen_expr(type_int(), env, depth - 1),
                                       gen_expr(type_int(), env, 0));
                }
                if (depth > 0 && x < 0.75) {
                    TypePtr side = rng.below(2) == 0 ? type_int() : type_str();
                    return expr_binary(BinOp::Eq, gen_expr(side, env, depth - 1),
                                       gen_expr(side, env, 0));
                }
                if (depth > 0 && x < 0.85) {
                    BinOp op = rng.below(2) == 0 ? BinOp::And : BinOp::Or;
                    return expr_binary(op, gen_expr(type_bool(), env, depth - 1),
                                       gen_expr(type_bool(), env, 0));
                }
                if (!callable.empty() && x < 0.90) return useCall(*callable[rng.below(callable.size())]);
                return literal_of(t);
            }
            case Type::Kind::List: {
                if (canVar && rng.real() < 0.5) return useVar();
                // Never empty: an empty literal leaves the element type
                // unrecoverable from the text.
                size_t n = 1 + rng.below(2);
                std::vector<ExprPtr> elems;
                for (size_t i = 0; i < n; ++i) elems.push_back(gen_expr(t->elem, env, 0));
                return expr_list(std::move(elems));
            }
            case Type::Kind::Named: {
                const RecInfo* r = record_of(t);
                if (!r) return literal_of(type_int());  // unreachable for well-formed targets
                double x = rng.real();
                if (canVar && x < 0.5) return useVar();
                if (!callable.empty() && x < 0.6) return useCall(*callable[rng.below(callable.size())]);
                std::vector<ExprPtr> args;
                for (const auto& [fname, ftype] : r->fields) {
                    args.push_back(gen_expr(resolve(ftype), env, depth > 0 ? depth - 1 : 0));
                }
                return expr_record(r->name, std::move(args));
            }
            default:
                return literal_of(type_int());
        }
    }

    // A statement whose typing pins down the variable's type.
    std::optional<Stmt> reveal_stmt(const std::string& name, const TypePtr& resolved) {
        Stmt s;
        s.kind = Stmt::Kind::ExprStmt;
        switch (resolved->kind) {
            case Type::Kind::Int:
                s.expr = expr_binary(BinOp::Add, expr_var(name), expr_int(1));
                return s;
            case Type::Kind::Str:
                s.expr = expr_binary(BinOp::Add, expr_var(name), expr_str(str_pool()[0]));
                return s;
            case Type::Kind::Bool:
                s.expr = expr_binary(BinOp::And, expr_var(name), expr_bool(true));
                return s;
            case Type::Kind::Named: {
                const RecInfo* r = record_of(resolved);
                if (!r || r->fields.empty()) return std::nullopt;
                s.expr = expr_field(expr_var(name), r->fields[0].first);
                return s;
            }
            default:
                return std::nullopt;
        }
    }

    FuncDecl gen_func(bool forceUserParam) {
        FuncDecl f;
        f.name = fresh_var();
        Env env;

        int np = static_cast<int>(rng.below(4));
        if (forceUserParam && np == 0) np = 1;
        for (int i = 0; i < np; ++i) {
            Param pr;
            pr.name = fresh_var();
            TypePtr annot = (forceUserParam && i == 0 && !records.empty())
                                ? type_named(records[rng.below(records.size())].name)
                                : choose_param_type();
            pr.annot = annot;
            env.emplace_back(pr.name, resolve(annot));
            f.params.push_back(std::move(pr));
        }

        TypePtr retAnnot = choose_let_type();
        f.returnType = retAnnot;

        int ns = 1 + static_cast<int>(rng.below(static_cast<size_t>(cfg.maxStmtsPerFunc)));
        for (int i = 0; i < ns - 1; ++i) {
            double x = rng.real();
            if (x < 0.60 || env.empty()) {
                Stmt s;
                s.kind = Stmt::Kind::Let;
                bool shadow = !env.empty() && rng.real() < 0.08;
                s.name = shadow ? env[rng.below(env.size())].first : fresh_var();
                TypePtr annot = choose_let_type();
                s.annot = annot;
                s.expr = gen_expr(resolve(annot), env, 2);
                env.emplace_back(s.name, resolve(annot));
                f.body.push_back(std::move(s));
            } else if (x < 0.85) {
                const auto& target = env[rng.below(env.size())];
                // Skip shadowed-out bindings.
                auto live = vars_of(env, target.second);
                bool alive = false;
                for (const auto* v : live) alive |= (v->first == target.first);
                if (!alive) continue;
                Stmt s;
                s.kind = Stmt::Kind::Assign;
                const RecInfo* r = record_of(target.second);
                if (r && rng.real() < 0.6) {
                    const auto& [fname, ftype] = r->fields[rng.below(r->fields.size())];
                    s.lvalue = {target.first, true, fname, {}};
                    s.expr = gen_expr(resolve(ftype), env, 1);
                } else {
                    s.lvalue = {target.first, false, "", {}};
                    s.expr = gen_expr(target.second, env, 1);
                }
                f.body.push_back(std::move(s));
            } else {
                Stmt s;
                s.kind = Stmt::Kind::ExprStmt;
                s.expr = gen_expr(random_builtin(), env, 2);
                f.body.push_back(std::move(s));
            }
        }

        // Pin down parameters the body never mentions, unless shadowed.
        for (const auto& pr : f.params) {
            bool shadowed = false;
            for (const auto& s : f.body) {
                if (s.kind == Stmt::Kind::Let && s.name == pr.name) shadowed = true;
            }
            if (shadowed) continue;
            bool used = false;
            auto scan = [&](auto&& self, const ExprPtr& e) -> void {
                if (e->kind == Expr::Kind::Var && e->name == pr.name) used = true;
                for (const auto& a : e->args) self(self, a);
            };
            for (const auto& s : f.body) {
                if (s.expr) scan(scan, s.expr);
                if (s.kind == Stmt::Kind::Assign && s.lvalue.base == pr.name) used = true;
            }
            if (!used) {
                if (auto s = reveal_stmt(pr.name, resolve(*pr.annot))) f.body.push_back(*s);
            }
        }

        Stmt ret;
        ret.kind = Stmt::Kind::Return;
        ret.expr = gen_expr(resolve(retAnnot), env, 2);
        f.body.push_back(std::move(ret));

        FnInfo info;
        info.name = f.name;
        for (const auto& pr : f.params) info.params.push_back(resolve(*pr.annot));
        info.ret = resolve(retAnnot);
        funcs.push_back(std::move(info));
        return f;
    }

    Program build() {
        Program p;
        p.dialect = rng.real() < cfg.dialectMix ? Dialect::P : Dialect::T;

        size_t nrec = forceUserType ? 1 + rng.below(2) : rng.below(3);
        for (size_t i = 0; i < nrec; ++i) {
            RecordDecl r;
            r.name = fresh_type();
            RecInfo info;
            info.name = r.name;
            size_t nf = 1 + rng.below(3);
            for (size_t j = 0; j < nf; ++j) {
                RecordField fld;
                fld.name = fresh_field();
                double x = rng.real();
                TypePtr t;
                if (x < 0.12 && !records.empty()) {
                    t = type_named(records[rng.below(records.size())].name);
                } else if (x < 0.24) {
                    t = type_list(random_builtin());
                } else {
                    t = random_builtin();
                }
                fld.annot = t;
                info.fields.emplace_back(fld.name, resolve(t));
                r.fields.push_back(std::move(fld));
            }
            records.push_back(std::move(info));
            p.decls.emplace_back(std::move(r));
        }

        if (rng.real() < 0.15) {
            AliasDecl a;
            a.name = fresh_type();
            a.target = random_builtin();
            aliases[a.name] = a.target;
            p.decls.emplace_back(std::move(a));
        }

        size_t nfuncs = 1 + rng.below(static_cast<size_t>(cfg.maxFuncsPerProgram));
        for (size_t i = 0; i < nfuncs; ++i) {
            p.decls.emplace_back(gen_func(forceUserType && i == 0));
        }
        return p;
    }
};

// Drops annotations in place with the configured probability, keeping at
// least one present site (and the forced user-type site, when present).
void drop_annotations(Program& p, Rng& rng, double prob, bool keepUserTypeSite) {
    struct SlotRef {
        std::optional<TypePtr>* slot;
    };
    std::vector<SlotRef> slots;
    for (auto& d : p.decls) {
        if (auto* r = std::get_if<RecordDecl>(&d)) {
            for (auto& f : r->fields) slots.push_back({&f.annot});
        } else if (auto* f = std::get_if<FuncDecl>(&d)) {
            for (auto& pr : f->params) slots.push_back({&pr.annot});
            slots.push_back({&f->returnType});
            for (auto& s : f->body) {
                if (s.kind == Stmt::Kind::Let) slots.push_back({&s.annot});
            }
        }
    }
    std::vector<bool> drop(slots.size());
    size_t kept = 0;
    for (size_t i = 0; i < slots.size(); ++i) {
        drop[i] = rng.bernoulli(prob);
        if (!drop[i]) ++kept;
    }
    if (kept == 0 && !slots.empty()) drop[rng.below(slots.size())] = false;
    if (keepUserTypeSite) {
        for (size_t i = 0; i < slots.size(); ++i) {
            const auto& a = *slots[i].slot;
            if (a && (*a)->kind == Type::Kind::Named) {
                drop[i] = false;
                break;
            }
        }
    }
    for (size_t i = 0; i < slots.size(); ++i) {
        if (drop[i]) slots[i].slot->reset();
    }
}

// ---------------------------------------------------------------------------
// Recoverability: every present annotation must be the unique type, among the
// spellings the generator can emit for that slot, under which the program
// type-checks. Ambiguous sites (a parameter only used through Dyn, a record
// never constructed, ...) get a constraining statement inserted instead, so
// the annotation becomes an inference target rather than a guess.

struct ProgInfo {
    std::map<std::string, const RecordDecl*> recs;
    std::map<std::string, TypePtr> aliases;
};

ProgInfo prog_info(const Program& p) {
    ProgInfo pi;
    for (const auto& d : p.decls) {
        if (const auto* r = std::get_if<RecordDecl>(&d)) pi.recs[r->name] = r;
        if (const auto* a = std::get_if<AliasDecl>(&d)) pi.aliases[a->name] = a->target;
    }
    return pi;
}

TypePtr resolve_in(const ProgInfo& pi, const TypePtr& t) {
    if (t->kind == Type::Kind::Named) {
        auto it = pi.aliases.find(t->name);
        if (it != pi.aliases.end()) return it->second;
    }
    if (t->kind == Type::Kind::List) return type_list(resolve_in(pi, t->elem));
    return t;
}

TypePtr spelled_in(const ProgInfo& pi, const TypePtr& b) {
    for (const auto& [name, target] : pi.aliases) {
        if (type_equal(target, b)) return type_named(name);
    }
    return b;
}

// The spellings the generator can emit for a slot of this kind.
std::vector<TypePtr> site_candidates(const Program& p, const ProgInfo& pi,
                                     const AnnotationSite& site) {
    const std::vector<TypePtr> raw = {type_int(), type_str(), type_bool()};
    std::vector<TypePtr> out;
    if (site.slot == AnnotationSite::Slot::RecordField) {
        // Fields are annotated before any alias is in scope and may only
        // reference earlier records.
        for (const auto& b : raw) out.push_back(b);
        for (const auto& b : raw) out.push_back(type_list(b));
        for (int di = 0; di < site.declIndex; ++di) {
            if (const auto* r = std::get_if<RecordDecl>(&p.decls[di])) {
                out.push_back(type_named(r->name));
            }
        }
        return out;
    }
    for (const auto& b : raw) out.push_back(spelled_in(pi, b));
    for (const auto& [name, r] : pi.recs) out.push_back(type_named(name));
    if (site.slot != AnnotationSite::Slot::Param) {
        for (const auto& b : raw) out.push_back(type_list(b));
    }
    return out;
}

bool site_ambiguous(const Program& p, size_t idx, const AnnotationSite& site,
                    const ProgInfo& pi) {
    for (const auto& c : site_candidates(p, pi, site)) {
        if (type_equal(c, *site.annotation)) continue;
        Program q = with_site_annotation(p, idx, c);
        if (type_check(q).ok) return true;
    }
    return false;
}

// Expression built from literals only, so its type is evident from the text.
ExprPtr literal_expr(Rng& rng, const ProgInfo& pi, const TypePtr& resolved) {
    switch (resolved->kind) {
        case Type::Kind::Int:
            return expr_int(static_cast<long long>(rng.below(kIntLitMax + 1)));
        case Type::Kind::Str:
            return expr_str(str_pool()[rng.below(kStrPool)]);
        case Type::Kind::Bool:
            return expr_bool(rng.below(2) == 0);
        case Type::Kind::List:
            return expr_list({literal_expr(rng, pi, resolved->elem)});
        case Type::Kind::Named: {
            const RecordDecl* r = pi.recs.at(resolved->name);
            std::vector<ExprPtr> args;
            for (const auto& f : r->fields) {
                // A dropped field annotation is Dyn: any literal argument fits.
                TypePtr ft = f.annot ? resolve_in(pi, *f.annot) : type_int();
                args.push_back(literal_expr(rng, pi, ft));
            }
            return expr_record(r->name, std::move(args));
        }
        default:
            return expr_int(0);
    }
}

// A statement whose typing pins the named variable to `resolved`.
Stmt pin_stmt(Rng& rng, const ProgInfo& pi, const std::string& name, const TypePtr& resolved) {
    Stmt s;
    s.kind = Stmt::Kind::ExprStmt;
    switch (resolved->kind) {
        case Type::Kind::Int:
            s.expr = expr_binary(BinOp::Add, expr_var(name), expr_int(1));
            return s;
        case Type::Kind::Str:
            s.expr = expr_binary(BinOp::Add, expr_var(name), expr_str(str_pool()[0]));
            return s;
        case Type::Kind::Bool:
            s.expr = expr_binary(BinOp::And, expr_var(name), expr_bool(true));
            return s;
        case Type::Kind::Named: {
            const RecordDecl* r = pi.recs.at(resolved->name);
            s.expr = expr_field(expr_var(name), r->fields[0].name);
            return s;
        }
        case Type::Kind::List: {
            s.kind = Stmt::Kind::Assign;
            s.lvalue = {name, false, "", {}};
            s.expr = expr_list({literal_expr(rng, pi, resolved->elem)});
            return s;
        }
        default:
            s.expr = expr_int(0);
            return s;
    }
}

bool repair_site(Program& p, Rng& rng, const ProgInfo& pi, const AnnotationSite& site) {
    TypePtr resolved = resolve_in(pi, *site.annotation);
    switch (site.slot) {
        case AnnotationSite::Slot::Param: {
            auto* f = std::get_if<FuncDecl>(&p.decls[site.declIndex]);
            if (!f) return false;
            const std::string& nm = f->params[site.itemIndex].name;
            f->body.insert(f->body.begin(), pin_stmt(rng, pi, nm, resolved));
            return true;
        }
        case AnnotationSite::Slot::Let: {
            auto* f = std::get_if<FuncDecl>(&p.decls[site.declIndex]);
            if (!f) return false;
            const Stmt& let = f->body[site.itemIndex];
            Stmt s = pin_stmt(rng, pi, let.name, resolved);
            f->body.insert(f->body.begin() + site.itemIndex + 1, std::move(s));
            return true;
        }
        case AnnotationSite::Slot::Return: {
            auto* f = std::get_if<FuncDecl>(&p.decls[site.declIndex]);
            if (!f || f->body.empty()) return false;
            for (auto it = f->body.rbegin(); it != f->body.rend(); ++it) {
                if (it->kind == Stmt::Kind::Return) {
                    it->expr = literal_expr(rng, pi, resolved);
                    return true;
                }
            }
            return false;
        }
        case AnnotationSite::Slot::RecordField: {
            const auto* r = std::get_if<RecordDecl>(&p.decls[site.declIndex]);
            if (!r) return false;
            for (auto& d : p.decls) {
                if (auto* f = std::get_if<FuncDecl>(&d)) {
                    Stmt s;
                    s.kind = Stmt::Kind::ExprStmt;
                    s.expr = literal_expr(rng, pi, type_named(r->name));
                    f->body.insert(f->body.begin(), std::move(s));
                    return true;
                }
            }
            return false;
        }
    }
    return false;
}

bool make_recoverable(Program& p, Rng& rng) {
    for (int round = 0; round < 40; ++round) {
        ProgInfo pi = prog_info(p);
        auto sites = list_annotation_sites(p);
        bool repaired = false;
        for (size_t i = 0; i < sites.size(); ++i) {
            if (!sites[i].present) continue;
            if (site_ambiguous(p, i, sites[i], pi)) {
                if (!repair_site(p, rng, pi, sites[i])) return false;
                repaired = true;
                break;  // statement indices shifted; re-enumerate
            }
        }
        if (!repaired) return type_check(p).ok;
    }
    return false;
}

}  // namespace

Program gen_program_forced(Rng& rng, const GenConfig& cfg, bool forceUserType) {
    for (int attempt = 0; attempt < 100; ++attempt) {
        Gen g(rng, cfg, forceUserType);
        Program p = g.build();
        drop_annotations(p, rng, cfg.annotationDropProb, forceUserType);
        bool anyPresent = false;
        for (const auto& s : list_annotation_sites(p)) anyPresent |= s.present;
        if (anyPresent && type_check(p).ok && make_recoverable(p, rng)) return p;
    }
    throw RetryExhausted("could not generate a well-typed program in 100 attempts");
}

Program gen_program(Rng& rng, const GenConfig& cfg) {
    return gen_program_forced(rng, cfg, rng.real() < cfg.userTypeProb);
}

std::vector<Value> gen_args(Rng& rng, const Program& p, const FuncDecl& f) {
    std::map<std::string, const RecordDecl*> recs;
    std::map<std::string, TypePtr> aliasMap;
    for (const auto& d : p.decls) {
        if (const auto* r = std::get_if<RecordDecl>(&d)) recs[r->name] = r;
        if (const auto* a = std::get_if<AliasDecl>(&d)) aliasMap[a->name] = a->target;
    }

    auto resolve = [&](auto&& self, TypePtr t) -> TypePtr {
        if (t->kind == Type::Kind::Named && aliasMap.count(t->name)) {
            return self(self, aliasMap.at(t->name));
        }
        return t;
    };

    auto gen_value = [&](auto&& self, const TypePtr& raw) -> Value {
        TypePtr t = resolve(resolve, raw);
        switch (t->kind) {
            case Type::Kind::Int:
                return Value(static_cast<long long>(rng.below(kIntLitMax + 1)));
            case Type::Kind::Str:
                return Value(std::string(str_pool()[rng.below(kStrPool)]));
            case Type::Kind::Bool:
                return Value(rng.below(2) == 0);
            case Type::Kind::List: {
                auto list = std::make_shared<std::vector<Value>>();
                size_t n = rng.below(3);
                for (size_t i = 0; i < n; ++i) list->push_back(self(self, t->elem));
                return Value(list);
            }
            case Type::Kind::Named: {
                auto rec = std::make_shared<RecordVal>();
                rec->typeName = t->name;
                const RecordDecl* r = recs.at(t->name);
                for (const auto& fld : r->fields) {
                    rec->fields[fld.name] =
                        fld.annot ? self(self, *fld.annot) : self(self, type_int());
                }
                return Value(rec);
            }
            default: {
                switch (rng.below(3)) {
                    case 0: return Value(static_cast<long long>(rng.below(kIntLitMax + 1)));
                    case 1: return Value(std::string(str_pool()[rng.below(kStrPool)]));
                    default: return Value(rng.below(2) == 0);
                }
            }
        }
    };

    std::vector<Value> out;
    for (const auto& pr : f.params) {
        out.push_back(pr.annot ? gen_value(gen_value, *pr.annot) : gen_value(gen_value, type_dyn()));
    }
    return out;
}

const FuncDecl& entry_function(const Program& p) {
    for (auto it = p.decls.rbegin(); it != p.decls.rend(); ++it) {
        if (const auto* f = std::get_if<FuncDecl>(&*it)) return *f;
    }
    throw std::runtime_error("program has no functions");
}

}  // namespace typesteer::corpusgen
