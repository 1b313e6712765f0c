#include "typesteer/minilang/lexer.hpp"

#include <cctype>

namespace typesteer::minilang {

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_cont(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

struct Lexer {
    const std::string& text;
    Dialect dialect;
    size_t pos = 0;
    int line = 1;
    int col = 1;
    std::vector<Token> out;
    std::vector<int> indents{0};

    explicit Lexer(const std::string& t, Dialect d) : text(t), dialect(d) {}

    [[noreturn]] void fail(const std::string& msg) { throw SyntaxError(msg, line, col); }

    char peek(size_t off = 0) const {
        return pos + off < text.size() ? text[pos + off] : '\0';
    }

    void advance() {
        if (text[pos] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++pos;
    }

    void push(Token::Kind kind, size_t begin, std::string lexeme) {
        Token t;
        t.kind = kind;
        t.text = std::move(lexeme);
        t.span = {begin, pos, line, col};
        out.push_back(std::move(t));
    }

    void layout_marker(Token::Kind kind, size_t at) {
        Token t;
        t.kind = kind;
        t.span = {at, at, line, col};
        out.push_back(std::move(t));
    }

    // Consumes leading spaces of a P line and emits Indent/Dedent markers.
    // Blank lines carry no layout.
    void handle_indent() {
        size_t begin = pos;
        int spaces = 0;
        while (peek() == ' ') {
            ++spaces;
            advance();
        }
        if (peek() == '\n' || peek() == '\0') return;
        if (spaces % 4 != 0) fail("indentation must be a multiple of 4 spaces");
        int level = spaces / 4;
        while (level > indents.back()) {
            indents.push_back(indents.back() + 1);
            layout_marker(Token::Kind::Indent, begin);
        }
        while (level < indents.back()) {
            indents.pop_back();
            layout_marker(Token::Kind::Dedent, begin);
        }
    }

    void run() {
        bool atLineStart = true;
        while (pos < text.size()) {
            if (dialect == Dialect::P && atLineStart) {
                handle_indent();
                atLineStart = false;
                continue;
            }
            char c = peek();
            if (c == '\n') {
                size_t at = pos;
                advance();
                if (dialect == Dialect::P) {
                    // Suppress the marker on blank lines.
                    if (!out.empty() && out.back().kind != Token::Kind::Newline &&
                        out.back().kind != Token::Kind::Indent &&
                        out.back().kind != Token::Kind::Dedent) {
                        layout_marker(Token::Kind::Newline, at);
                    }
                    atLineStart = true;
                }
                continue;
            }
            if (c == ' ' || c == '\t' || c == '\r') {
                advance();
                continue;
            }
            size_t begin = pos;
            if (is_ident_start(c)) {
                while (is_ident_cont(peek())) advance();
                push(Token::Kind::Ident, begin, text.substr(begin, pos - begin));
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c))) {
                while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
                push(Token::Kind::Int, begin, text.substr(begin, pos - begin));
                continue;
            }
            if (c == '"') {
                advance();
                while (peek() != '"') {
                    if (peek() == '\0' || peek() == '\n') fail("unterminated string literal");
                    advance();
                }
                advance();
                push(Token::Kind::Str, begin, text.substr(begin, pos - begin));
                continue;
            }
            // Two-character punctuation first.
            if ((c == '-' && peek(1) == '>') || (c == '=' && peek(1) == '=') ||
                (c == '&' && peek(1) == '&') || (c == '|' && peek(1) == '|')) {
                advance();
                advance();
                push(Token::Kind::Punct, begin, text.substr(begin, 2));
                continue;
            }
            if (std::string("(){}[]:;,.=<+-*").find(c) != std::string::npos) {
                advance();
                push(Token::Kind::Punct, begin, std::string(1, c));
                continue;
            }
            fail(std::string("unexpected character '") + c + "'");
        }
        if (dialect == Dialect::P) {
            if (!out.empty() && out.back().kind != Token::Kind::Newline &&
                out.back().kind != Token::Kind::Dedent) {
                layout_marker(Token::Kind::Newline, pos);
            }
            while (indents.back() > 0) {
                indents.pop_back();
                layout_marker(Token::Kind::Dedent, pos);
            }
        }
        layout_marker(Token::Kind::Eof, pos);
    }
};

}  // namespace

std::vector<Token> lex(const std::string& text, Dialect dialect) {
    Lexer lx(text, dialect);
    lx.run();
    return std::move(lx.out);
}

}  // namespace typesteer::minilang
