#include "typesteer/minilang/ast.hpp"

#include <stdexcept>

#include "typesteer/util/hash.hpp"

namespace typesteer::minilang {

namespace {

TypePtr make_type(Type::Kind k, TypePtr elem = nullptr, std::string name = {}) {
    auto t = std::make_shared<Type>();
    t->kind = k;
    t->elem = std::move(elem);
    t->name = std::move(name);
    return t;
}

}  // namespace

TypePtr type_int() {
    static TypePtr t = make_type(Type::Kind::Int);
    return t;
}
TypePtr type_str() {
    static TypePtr t = make_type(Type::Kind::Str);
    return t;
}
TypePtr type_bool() {
    static TypePtr t = make_type(Type::Kind::Bool);
    return t;
}
TypePtr type_dyn() {
    static TypePtr t = make_type(Type::Kind::Dyn);
    return t;
}
TypePtr type_list(TypePtr elem) { return make_type(Type::Kind::List, std::move(elem)); }
TypePtr type_named(std::string name) { return make_type(Type::Kind::Named, nullptr, std::move(name)); }

bool type_equal(const TypePtr& a, const TypePtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case Type::Kind::List: return type_equal(a->elem, b->elem);
        case Type::Kind::Named: return a->name == b->name;
        default: return true;
    }
}

ExprPtr expr_int(long long v) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::IntLit;
    e->intValue = v;
    return e;
}
ExprPtr expr_str(std::string v) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::StrLit;
    e->strValue = std::move(v);
    return e;
}
ExprPtr expr_bool(bool v) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::BoolLit;
    e->boolValue = v;
    return e;
}
ExprPtr expr_var(std::string name) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Var;
    e->name = std::move(name);
    return e;
}
ExprPtr expr_binary(BinOp op, ExprPtr lhs, ExprPtr rhs) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Binary;
    e->op = op;
    e->args = {std::move(lhs), std::move(rhs)};
    return e;
}
ExprPtr expr_call(std::string callee, std::vector<ExprPtr> args) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Call;
    e->name = std::move(callee);
    e->args = std::move(args);
    return e;
}
ExprPtr expr_field(ExprPtr base, std::string field) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Field;
    e->name = std::move(field);
    e->args = {std::move(base)};
    return e;
}
ExprPtr expr_record(std::string typeName, std::vector<ExprPtr> args) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Record;
    e->name = std::move(typeName);
    e->args = std::move(args);
    return e;
}
ExprPtr expr_list(std::vector<ExprPtr> elems) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::ListLit;
    e->args = std::move(elems);
    return e;
}

// ---------------------------------------------------------------------------
// Structural equality

namespace {

bool opt_type_equal(const std::optional<TypePtr>& a, const std::optional<TypePtr>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a.has_value() || type_equal(*a, *b);
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case Expr::Kind::IntLit: return a->intValue == b->intValue;
        case Expr::Kind::StrLit: return a->strValue == b->strValue;
        case Expr::Kind::BoolLit: return a->boolValue == b->boolValue;
        case Expr::Kind::Var: return a->name == b->name;
        default: break;
    }
    if (a->kind == Expr::Kind::Binary && a->op != b->op) return false;
    if (a->name != b->name) return false;
    if (a->args.size() != b->args.size()) return false;
    for (size_t i = 0; i < a->args.size(); ++i) {
        if (!expr_equal(a->args[i], b->args[i])) return false;
    }
    return true;
}

bool stmt_equal(const Stmt& a, const Stmt& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Stmt::Kind::Let:
            return a.name == b.name && opt_type_equal(a.annot, b.annot) && expr_equal(a.expr, b.expr);
        case Stmt::Kind::Assign:
            return a.lvalue.base == b.lvalue.base && a.lvalue.isField == b.lvalue.isField &&
                   a.lvalue.field == b.lvalue.field && expr_equal(a.expr, b.expr);
        default:
            return expr_equal(a.expr, b.expr);
    }
}

bool decl_equal(const Decl& a, const Decl& b) {
    if (a.index() != b.index()) return false;
    if (const auto* ra = std::get_if<RecordDecl>(&a)) {
        const auto& rb = std::get<RecordDecl>(b);
        if (ra->name != rb.name || ra->fields.size() != rb.fields.size()) return false;
        for (size_t i = 0; i < ra->fields.size(); ++i) {
            if (ra->fields[i].name != rb.fields[i].name) return false;
            if (!opt_type_equal(ra->fields[i].annot, rb.fields[i].annot)) return false;
        }
        return true;
    }
    if (const auto* aa = std::get_if<AliasDecl>(&a)) {
        const auto& ab = std::get<AliasDecl>(b);
        return aa->name == ab.name && type_equal(aa->target, ab.target);
    }
    const auto& fa = std::get<FuncDecl>(a);
    const auto& fb = std::get<FuncDecl>(b);
    if (fa.name != fb.name || fa.params.size() != fb.params.size() ||
        fa.body.size() != fb.body.size())
        return false;
    if (!opt_type_equal(fa.returnType, fb.returnType)) return false;
    for (size_t i = 0; i < fa.params.size(); ++i) {
        if (fa.params[i].name != fb.params[i].name) return false;
        if (!opt_type_equal(fa.params[i].annot, fb.params[i].annot)) return false;
    }
    for (size_t i = 0; i < fa.body.size(); ++i) {
        if (!stmt_equal(fa.body[i], fb.body[i])) return false;
    }
    return true;
}

}  // namespace

bool program_equal(const Program& a, const Program& b) {
    if (a.dialect != b.dialect || a.decls.size() != b.decls.size()) return false;
    for (size_t i = 0; i < a.decls.size(); ++i) {
        if (!decl_equal(a.decls[i], b.decls[i])) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Clone

namespace {

TypePtr clone_type(const TypePtr& t) {
    if (!t) return nullptr;
    auto n = std::make_shared<Type>(*t);
    n->elem = clone_type(t->elem);
    return n;
}

std::optional<TypePtr> clone_opt_type(const std::optional<TypePtr>& t) {
    if (!t) return std::nullopt;
    return clone_type(*t);
}

ExprPtr clone_expr(const ExprPtr& e) {
    auto n = std::make_shared<Expr>(*e);
    for (auto& a : n->args) a = clone_expr(a);
    return n;
}

Stmt clone_stmt(const Stmt& s) {
    Stmt n = s;
    n.annot = clone_opt_type(s.annot);
    if (n.expr) n.expr = clone_expr(s.expr);
    return n;
}

}  // namespace

Program clone_program(const Program& p) {
    Program out;
    out.dialect = p.dialect;
    out.decls.reserve(p.decls.size());
    for (const auto& d : p.decls) {
        if (const auto* r = std::get_if<RecordDecl>(&d)) {
            RecordDecl n = *r;
            for (auto& f : n.fields) f.annot = clone_opt_type(f.annot);
            out.decls.emplace_back(std::move(n));
        } else if (const auto* a = std::get_if<AliasDecl>(&d)) {
            AliasDecl n = *a;
            n.target = clone_type(a->target);
            out.decls.emplace_back(std::move(n));
        } else {
            const auto& f = std::get<FuncDecl>(d);
            FuncDecl n = f;
            for (auto& pr : n.params) pr.annot = clone_opt_type(pr.annot);
            n.returnType = clone_opt_type(f.returnType);
            for (auto& s : n.body) s = clone_stmt(s);
            out.decls.emplace_back(std::move(n));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Digest

namespace {

void digest_type(const std::optional<TypePtr>& t, std::string& buf);

void digest_type_ptr(const TypePtr& t, std::string& buf) {
    switch (t->kind) {
        case Type::Kind::Int: buf += "i"; break;
        case Type::Kind::Str: buf += "s"; break;
        case Type::Kind::Bool: buf += "b"; break;
        case Type::Kind::Dyn: buf += "d"; break;
        case Type::Kind::List:
            buf += "L(";
            digest_type_ptr(t->elem, buf);
            buf += ")";
            break;
        case Type::Kind::Named:
            buf += "N(" + t->name + ")";
            break;
    }
}

void digest_type(const std::optional<TypePtr>& t, std::string& buf) {
    if (!t) {
        buf += "_";
        return;
    }
    digest_type_ptr(*t, buf);
}

void digest_expr(const ExprPtr& e, std::string& buf) {
    buf += static_cast<char>('A' + static_cast<int>(e->kind));
    switch (e->kind) {
        case Expr::Kind::IntLit: buf += std::to_string(e->intValue); break;
        case Expr::Kind::StrLit: buf += e->strValue; break;
        case Expr::Kind::BoolLit: buf += e->boolValue ? "1" : "0"; break;
        case Expr::Kind::Binary: buf += static_cast<char>('a' + static_cast<int>(e->op)); break;
        default: buf += e->name; break;
    }
    buf += "(";
    for (const auto& a : e->args) digest_expr(a, buf);
    buf += ")";
}

}  // namespace

uint64_t ast_digest(const Program& p) {
    std::string buf;
    buf.reserve(512);
    for (const auto& d : p.decls) {
        if (const auto* r = std::get_if<RecordDecl>(&d)) {
            buf += "R:" + r->name + "{";
            for (const auto& f : r->fields) {
                buf += f.name + ":";
                digest_type(f.annot, buf);
                buf += ";";
            }
            buf += "}";
        } else if (const auto* a = std::get_if<AliasDecl>(&d)) {
            buf += "A:" + a->name + "=";
            digest_type_ptr(a->target, buf);
        } else {
            const auto& f = std::get<FuncDecl>(d);
            buf += "F:" + f.name + "(";
            for (const auto& pr : f.params) {
                buf += pr.name + ":";
                digest_type(pr.annot, buf);
                buf += ",";
            }
            buf += ")->";
            digest_type(f.returnType, buf);
            buf += "{";
            for (const auto& s : f.body) {
                buf += static_cast<char>('W' + static_cast<int>(s.kind));
                if (s.kind == Stmt::Kind::Let) {
                    buf += s.name + ":";
                    digest_type(s.annot, buf);
                } else if (s.kind == Stmt::Kind::Assign) {
                    buf += s.lvalue.base;
                    if (s.lvalue.isField) buf += "." + s.lvalue.field;
                }
                buf += "=";
                if (s.expr) digest_expr(s.expr, buf);
                buf += ";";
            }
            buf += "}";
        }
    }
    return fnv1a64(buf);
}

// ---------------------------------------------------------------------------
// Annotation sites

std::vector<AnnotationSite> list_annotation_sites(const Program& p) {
    std::vector<AnnotationSite> sites;
    for (size_t di = 0; di < p.decls.size(); ++di) {
        const auto& d = p.decls[di];
        if (const auto* r = std::get_if<RecordDecl>(&d)) {
            for (size_t fi = 0; fi < r->fields.size(); ++fi) {
                AnnotationSite s;
                s.slot = AnnotationSite::Slot::RecordField;
                s.declIndex = static_cast<int>(di);
                s.itemIndex = static_cast<int>(fi);
                s.present = r->fields[fi].annot.has_value();
                s.annotation = r->fields[fi].annot;
                sites.push_back(std::move(s));
            }
        } else if (const auto* f = std::get_if<FuncDecl>(&d)) {
            for (size_t pi = 0; pi < f->params.size(); ++pi) {
                AnnotationSite s;
                s.slot = AnnotationSite::Slot::Param;
                s.declIndex = static_cast<int>(di);
                s.itemIndex = static_cast<int>(pi);
                s.present = f->params[pi].annot.has_value();
                s.annotation = f->params[pi].annot;
                sites.push_back(std::move(s));
            }
            {
                AnnotationSite s;
                s.slot = AnnotationSite::Slot::Return;
                s.declIndex = static_cast<int>(di);
                s.present = f->returnType.has_value();
                s.annotation = f->returnType;
                sites.push_back(std::move(s));
            }
            for (size_t si = 0; si < f->body.size(); ++si) {
                if (f->body[si].kind != Stmt::Kind::Let) continue;
                AnnotationSite s;
                s.slot = AnnotationSite::Slot::Let;
                s.declIndex = static_cast<int>(di);
                s.itemIndex = static_cast<int>(si);
                s.present = f->body[si].annot.has_value();
                s.annotation = f->body[si].annot;
                sites.push_back(std::move(s));
            }
        }
    }
    return sites;
}

Program with_site_annotation(const Program& p, size_t siteIdx, std::optional<TypePtr> annot) {
    auto sites = list_annotation_sites(p);
    if (siteIdx >= sites.size()) throw std::out_of_range("annotation site index out of range");
    const AnnotationSite& site = sites[siteIdx];
    Program out = clone_program(p);
    Decl& d = out.decls[static_cast<size_t>(site.declIndex)];
    switch (site.slot) {
        case AnnotationSite::Slot::RecordField:
            std::get<RecordDecl>(d).fields[static_cast<size_t>(site.itemIndex)].annot = std::move(annot);
            break;
        case AnnotationSite::Slot::Param:
            std::get<FuncDecl>(d).params[static_cast<size_t>(site.itemIndex)].annot = std::move(annot);
            break;
        case AnnotationSite::Slot::Return:
            std::get<FuncDecl>(d).returnType = std::move(annot);
            break;
        case AnnotationSite::Slot::Let:
            std::get<FuncDecl>(d).body[static_cast<size_t>(site.itemIndex)].annot = std::move(annot);
            break;
    }
    return out;
}

}  // namespace typesteer::minilang
