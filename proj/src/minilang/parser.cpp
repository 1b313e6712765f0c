#include "typesteer/minilang/parser.hpp"

#include <set>

#include "typesteer/minilang/lexer.hpp"

namespace typesteer::minilang {

namespace {

struct Parser {
    std::vector<Token> toks;
    Dialect dialect;
    size_t pos = 0;

    Parser(std::vector<Token> t, Dialect d) : toks(std::move(t)), dialect(d) {}

    const Token& cur() const { return toks[pos]; }

    [[noreturn]] void fail(const std::string& msg) {
        throw SyntaxError(msg, cur().span.line, cur().span.col);
    }

    bool at_punct(const std::string& p) const {
        return cur().kind == Token::Kind::Punct && cur().text == p;
    }
    bool at_ident(const std::string& w) const {
        return cur().kind == Token::Kind::Ident && cur().text == w;
    }

    Token take() { return toks[pos++]; }

    void expect_punct(const std::string& p) {
        if (!at_punct(p)) fail("expected '" + p + "'");
        ++pos;
    }
    void expect_word(const std::string& w) {
        if (!at_ident(w)) fail("expected '" + w + "'");
        ++pos;
    }
    std::string expect_name() {
        if (cur().kind != Token::Kind::Ident) fail("expected identifier");
        return take().text;
    }
    void expect_newline() {
        if (dialect == Dialect::P) {
            if (cur().kind != Token::Kind::Newline) fail("expected end of line");
            ++pos;
        } else {
            expect_punct(";");
        }
    }

    // ---- types ----

    TypePtr parse_type() {
        if (cur().kind != Token::Kind::Ident) fail("expected type");
        if (dialect == Dialect::P) {
            std::string w = take().text;
            if (w == "int") return type_int();
            if (w == "str") return type_str();
            if (w == "bool") return type_bool();
            if (w == "list") {
                expect_punct("[");
                TypePtr elem = parse_type();
                expect_punct("]");
                return type_list(elem);
            }
            return type_named(w);
        }
        std::string w = take().text;
        TypePtr t;
        if (w == "number") t = type_int();
        else if (w == "string") t = type_str();
        else if (w == "boolean") t = type_bool();
        else t = type_named(w);
        while (at_punct("[")) {
            ++pos;
            expect_punct("]");
            t = type_list(t);
        }
        return t;
    }

    // ---- expressions (precedence climbing) ----

    ExprPtr parse_expr() { return parse_or(); }

    ExprPtr parse_or() {
        ExprPtr e = parse_and();
        while ((dialect == Dialect::P && at_ident("or")) ||
               (dialect == Dialect::T && at_punct("||"))) {
            ++pos;
            e = expr_binary(BinOp::Or, e, parse_and());
        }
        return e;
    }

    ExprPtr parse_and() {
        ExprPtr e = parse_cmp();
        while ((dialect == Dialect::P && at_ident("and")) ||
               (dialect == Dialect::T && at_punct("&&"))) {
            ++pos;
            e = expr_binary(BinOp::And, e, parse_cmp());
        }
        return e;
    }

    ExprPtr parse_cmp() {
        ExprPtr e = parse_add();
        if (at_punct("==")) {
            ++pos;
            return expr_binary(BinOp::Eq, e, parse_add());
        }
        if (at_punct("<")) {
            ++pos;
            return expr_binary(BinOp::Lt, e, parse_add());
        }
        return e;
    }

    ExprPtr parse_add() {
        ExprPtr e = parse_mul();
        while (at_punct("+") || at_punct("-")) {
            BinOp op = at_punct("+") ? BinOp::Add : BinOp::Sub;
            ++pos;
            e = expr_binary(op, e, parse_mul());
        }
        return e;
    }

    ExprPtr parse_mul() {
        ExprPtr e = parse_postfix();
        while (at_punct("*")) {
            ++pos;
            e = expr_binary(BinOp::Mul, e, parse_postfix());
        }
        return e;
    }

    ExprPtr parse_postfix() {
        ExprPtr e = parse_atom();
        while (at_punct(".")) {
            ++pos;
            e = expr_field(e, expect_name());
        }
        return e;
    }

    ExprPtr parse_atom() {
        Span sp = cur().span;
        if (cur().kind == Token::Kind::Int) {
            auto e = expr_int(std::stoll(take().text));
            e->span = sp;
            return e;
        }
        if (cur().kind == Token::Kind::Str) {
            std::string lit = take().text;
            auto e = expr_str(lit.substr(1, lit.size() - 2));
            e->span = sp;
            return e;
        }
        if (at_ident("true") || at_ident("false")) {
            auto e = expr_bool(take().text == "true");
            e->span = sp;
            return e;
        }
        if (at_punct("(")) {
            ++pos;
            ExprPtr e = parse_expr();
            expect_punct(")");
            return e;
        }
        if (at_punct("[")) {
            ++pos;
            std::vector<ExprPtr> elems;
            if (!at_punct("]")) {
                elems.push_back(parse_expr());
                while (at_punct(",")) {
                    ++pos;
                    elems.push_back(parse_expr());
                }
            }
            expect_punct("]");
            auto e = expr_list(std::move(elems));
            e->span = sp;
            return e;
        }
        if (cur().kind == Token::Kind::Ident) {
            std::string name = take().text;
            if (at_punct("(")) {
                ++pos;
                std::vector<ExprPtr> args;
                if (!at_punct(")")) {
                    args.push_back(parse_expr());
                    while (at_punct(",")) {
                        ++pos;
                        args.push_back(parse_expr());
                    }
                }
                expect_punct(")");
                auto e = expr_call(name, std::move(args));
                e->span = sp;
                return e;
            }
            auto e = expr_var(name);
            e->span = sp;
            return e;
        }
        fail("expected expression");
    }

    // ---- statements ----

    Stmt parse_stmt() {
        Stmt s;
        s.span = cur().span;
        if (at_ident("let")) {
            ++pos;
            s.kind = Stmt::Kind::Let;
            s.name = expect_name();
            if (at_punct(":")) {
                ++pos;
                s.annot = parse_type();
            }
            expect_punct("=");
            s.expr = parse_expr();
            expect_newline();
            return s;
        }
        if (at_ident("return")) {
            ++pos;
            s.kind = Stmt::Kind::Return;
            s.expr = parse_expr();
            expect_newline();
            return s;
        }
        // Assignment needs lookahead: Ident ["." Ident] "=" vs expression stmt.
        if (cur().kind == Token::Kind::Ident) {
            size_t save = pos;
            std::string base = take().text;
            bool isField = false;
            std::string field;
            if (at_punct(".") && pos + 2 < toks.size() &&
                toks[pos + 1].kind == Token::Kind::Ident &&
                toks[pos + 2].kind == Token::Kind::Punct && toks[pos + 2].text == "=") {
                ++pos;
                isField = true;
                field = expect_name();
            }
            if (at_punct("=")) {
                ++pos;
                s.kind = Stmt::Kind::Assign;
                s.lvalue = {base, isField, field, s.span};
                s.expr = parse_expr();
                expect_newline();
                return s;
            }
            pos = save;
        }
        s.kind = Stmt::Kind::ExprStmt;
        s.expr = parse_expr();
        expect_newline();
        return s;
    }

    std::vector<Stmt> parse_block() {
        std::vector<Stmt> body;
        if (dialect == Dialect::P) {
            expect_punct(":");
            if (cur().kind != Token::Kind::Newline) fail("expected end of line");
            ++pos;
            if (cur().kind != Token::Kind::Indent) fail("expected indented block");
            ++pos;
            while (cur().kind != Token::Kind::Dedent) body.push_back(parse_stmt());
            ++pos;
        } else {
            expect_punct("{");
            while (!at_punct("}")) body.push_back(parse_stmt());
            ++pos;
        }
        return body;
    }

    // ---- declarations ----

    Decl parse_record() {
        RecordDecl r;
        r.span = cur().span;
        ++pos;  // "record"
        r.name = expect_name();
        auto parse_field = [&]() {
            RecordField f;
            f.span = cur().span;
            f.name = expect_name();
            if (at_punct(":")) {
                ++pos;
                f.annot = parse_type();
            }
            expect_newline();
            r.fields.push_back(std::move(f));
        };
        if (dialect == Dialect::P) {
            expect_punct(":");
            if (cur().kind != Token::Kind::Newline) fail("expected end of line");
            ++pos;
            if (cur().kind != Token::Kind::Indent) fail("expected indented record body");
            ++pos;
            while (cur().kind != Token::Kind::Dedent) parse_field();
            ++pos;
        } else {
            expect_punct("{");
            while (!at_punct("}")) parse_field();
            ++pos;
        }
        return r;
    }

    Decl parse_alias() {
        AliasDecl a;
        a.span = cur().span;
        ++pos;  // "type"
        a.name = expect_name();
        expect_punct("=");
        a.target = parse_type();
        expect_newline();
        return a;
    }

    Decl parse_func() {
        FuncDecl f;
        f.span = cur().span;
        ++pos;  // "def" / "function"
        f.name = expect_name();
        expect_punct("(");
        if (!at_punct(")")) {
            auto parse_param = [&]() {
                Param pr;
                pr.span = cur().span;
                pr.name = expect_name();
                if (at_punct(":")) {
                    ++pos;
                    pr.annot = parse_type();
                }
                f.params.push_back(std::move(pr));
            };
            parse_param();
            while (at_punct(",")) {
                ++pos;
                parse_param();
            }
        }
        expect_punct(")");
        if (dialect == Dialect::P) {
            if (at_punct("->")) {
                ++pos;
                f.returnType = parse_type();
            }
        } else {
            if (at_punct(":")) {
                ++pos;
                f.returnType = parse_type();
            }
        }
        f.body = parse_block();
        return f;
    }

    Program run() {
        Program p;
        p.dialect = dialect;
        while (cur().kind != Token::Kind::Eof) {
            if (cur().kind == Token::Kind::Newline) {
                ++pos;
                continue;
            }
            if (at_ident("record")) p.decls.push_back(parse_record());
            else if (at_ident("type")) p.decls.push_back(parse_alias());
            else if (at_ident(dialect == Dialect::P ? "def" : "function"))
                p.decls.push_back(parse_func());
            else fail("expected declaration");
        }
        return p;
    }
};

// A call whose callee names a record declaration is record construction.
void classify_record_ctors(Program& p) {
    std::set<std::string> records;
    for (const auto& d : p.decls) {
        if (const auto* r = std::get_if<RecordDecl>(&d)) records.insert(r->name);
    }
    if (records.empty()) return;

    auto walk = [&](auto&& self, const ExprPtr& e) -> void {
        if (e->kind == Expr::Kind::Call && records.count(e->name)) {
            e->kind = Expr::Kind::Record;
        }
        for (const auto& a : e->args) self(self, a);
    };
    for (auto& d : p.decls) {
        if (auto* f = std::get_if<FuncDecl>(&d)) {
            for (auto& s : f->body) {
                if (s.expr) walk(walk, s.expr);
            }
        }
    }
}

}  // namespace

Program parse(const std::string& text, Dialect dialect) {
    Parser parser(lex(text, dialect), dialect);
    Program p = parser.run();
    classify_record_ctors(p);
    return p;
}

TypePtr parse_type_text(const std::string& text, Dialect dialect) {
    // Lex in T mode regardless of dialect: a bare type has no layout.
    Parser parser(lex(text, Dialect::T), dialect);
    TypePtr t = parser.parse_type();
    if (parser.cur().kind != Token::Kind::Eof) parser.fail("trailing input after type");
    return t;
}

}  // namespace typesteer::minilang
