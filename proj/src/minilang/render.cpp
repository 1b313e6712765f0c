#include "typesteer/minilang/render.hpp"

#include <stdexcept>

namespace typesteer::minilang {

namespace {

// Precedence levels for minimal-parenthesis rendering. Must agree with the
// parser's climbing order.
int prec_of(BinOp op) {
    switch (op) {
        case BinOp::Or: return 1;
        case BinOp::And: return 2;
        case BinOp::Eq:
        case BinOp::Lt: return 3;
        case BinOp::Add:
        case BinOp::Sub: return 4;
        case BinOp::Mul: return 5;
    }
    return 0;
}

struct Renderer {
    Dialect d;
    std::string out;
    std::vector<SiteRange> sites;

    const char* op_text(BinOp op) const {
        switch (op) {
            case BinOp::Add: return "+";
            case BinOp::Sub: return "-";
            case BinOp::Mul: return "*";
            case BinOp::Eq: return "==";
            case BinOp::Lt: return "<";
            case BinOp::And: return d == Dialect::P ? "and" : "&&";
            case BinOp::Or: return d == Dialect::P ? "or" : "||";
        }
        return "?";
    }

    void type(const TypePtr& t) {
        switch (t->kind) {
            case Type::Kind::Int: out += d == Dialect::P ? "int" : "number"; break;
            case Type::Kind::Str: out += d == Dialect::P ? "str" : "string"; break;
            case Type::Kind::Bool: out += d == Dialect::P ? "bool" : "boolean"; break;
            case Type::Kind::Named: out += t->name; break;
            case Type::Kind::List:
                if (d == Dialect::P) {
                    out += "list[";
                    type(t->elem);
                    out += "]";
                } else {
                    type(t->elem);
                    out += "[]";
                }
                break;
            case Type::Kind::Dyn:
                throw std::logic_error("Dyn must not appear in rendered source");
        }
    }

    // Emits ": T" and records the site range. Absent sites emit nothing.
    void annotation_slot(const std::optional<TypePtr>& annot) {
        SiteRange r;
        if (annot.has_value()) {
            out += ": ";
            r.present = true;
            r.begin = out.size();
            type(*annot);
            r.end = out.size();
        }
        sites.push_back(r);
    }

    void expr(const ExprPtr& e, int contextPrec = 0) {
        switch (e->kind) {
            case Expr::Kind::IntLit: out += std::to_string(e->intValue); return;
            case Expr::Kind::StrLit: out += "\"" + e->strValue + "\""; return;
            case Expr::Kind::BoolLit: out += e->boolValue ? "true" : "false"; return;
            case Expr::Kind::Var: out += e->name; return;
            case Expr::Kind::Field:
                expr(e->args[0], 6);
                out += "." + e->name;
                return;
            case Expr::Kind::Call:
            case Expr::Kind::Record: {
                out += e->name + "(";
                for (size_t i = 0; i < e->args.size(); ++i) {
                    if (i) out += ", ";
                    expr(e->args[i]);
                }
                out += ")";
                return;
            }
            case Expr::Kind::ListLit: {
                out += "[";
                for (size_t i = 0; i < e->args.size(); ++i) {
                    if (i) out += ", ";
                    expr(e->args[i]);
                }
                out += "]";
                return;
            }
            case Expr::Kind::Binary: {
                int p = prec_of(e->op);
                bool parens = p < contextPrec;
                if (parens) out += "(";
                expr(e->args[0], p);
                out += " ";
                out += op_text(e->op);
                out += " ";
                // Right operand of a left-associative chain needs parens at
                // equal precedence; comparisons are non-associative.
                expr(e->args[1], p + 1);
                if (parens) out += ")";
                return;
            }
        }
    }

    void stmt(const Stmt& s) {
        out += "    ";
        switch (s.kind) {
            case Stmt::Kind::Let:
                out += "let " + s.name;
                annotation_slot(s.annot);
                out += " = ";
                expr(s.expr);
                break;
            case Stmt::Kind::Assign:
                out += s.lvalue.base;
                if (s.lvalue.isField) out += "." + s.lvalue.field;
                out += " = ";
                expr(s.expr);
                break;
            case Stmt::Kind::Return:
                out += "return ";
                expr(s.expr);
                break;
            case Stmt::Kind::ExprStmt:
                expr(s.expr);
                break;
        }
        out += d == Dialect::P ? "\n" : ";\n";
    }

    void decl(const Decl& dd) {
        if (const auto* r = std::get_if<RecordDecl>(&dd)) {
            out += "record " + r->name;
            out += d == Dialect::P ? ":\n" : " {\n";
            for (const auto& f : r->fields) {
                out += "    " + f.name;
                annotation_slot(f.annot);
                out += d == Dialect::P ? "\n" : ";\n";
            }
            if (d == Dialect::T) out += "}\n";
        } else if (const auto* a = std::get_if<AliasDecl>(&dd)) {
            out += "type " + a->name + " = ";
            type(a->target);
            out += d == Dialect::P ? "\n" : ";\n";
        } else {
            const auto& f = std::get<FuncDecl>(dd);
            out += (d == Dialect::P ? "def " : "function ") + f.name + "(";
            // Let statement sites come after param and return sites, so the
            // emission order below matches list_annotation_sites.
            for (size_t i = 0; i < f.params.size(); ++i) {
                if (i) out += ", ";
                out += f.params[i].name;
                annotation_slot(f.params[i].annot);
            }
            out += ")";
            if (d == Dialect::P) {
                SiteRange r;
                if (f.returnType.has_value()) {
                    out += " -> ";
                    r.present = true;
                    r.begin = out.size();
                    type(*f.returnType);
                    r.end = out.size();
                }
                sites.push_back(r);
                out += ":\n";
            } else {
                annotation_slot(f.returnType);
                out += " {\n";
            }
            for (const auto& s : f.body) stmt(s);
            if (d == Dialect::T) out += "}\n";
        }
    }

    void run(const Program& p) {
        for (const auto& dd : p.decls) decl(dd);
    }
};

}  // namespace

std::string render(const Program& p, Dialect d) {
    Renderer r{d};
    r.run(p);
    return std::move(r.out);
}

RenderResult render_with_sites(const Program& p, Dialect d) {
    Renderer r{d};
    r.run(p);
    return {std::move(r.out), std::move(r.sites)};
}

std::string render_type(const TypePtr& t, Dialect d) {
    Renderer r{d};
    r.type(t);
    return std::move(r.out);
}

}  // namespace typesteer::minilang
