#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace typesteer::minilang {

// Two surface dialects over one shared core AST. P uses indentation and
// colons, T uses braces and semicolons. Rendering is total for both.
enum class Dialect { P, T };

inline const char* dialect_name(Dialect d) { return d == Dialect::P ? "P" : "T"; }
inline const char* dialect_extension(Dialect d) { return d == Dialect::P ? ".mlp" : ".mlt"; }

struct Span {
    size_t begin = 0;
    size_t end = 0;
    int line = 0;
    int col = 0;
};

// ---------------------------------------------------------------------------
// Types

struct Type;
using TypePtr = std::shared_ptr<const Type>;

struct Type {
    enum class Kind { Int, Str, Bool, List, Named, Dyn };
    Kind kind = Kind::Dyn;
    TypePtr elem;       // List
    std::string name;   // Named
};

TypePtr type_int();
TypePtr type_str();
TypePtr type_bool();
TypePtr type_dyn();
TypePtr type_list(TypePtr elem);
TypePtr type_named(std::string name);

bool type_equal(const TypePtr& a, const TypePtr& b);

// ---------------------------------------------------------------------------
// Expressions

enum class BinOp { Add, Sub, Mul, Eq, Lt, And, Or };

struct Expr;
using ExprPtr = std::shared_ptr<Expr>;

struct Expr {
    enum class Kind { IntLit, StrLit, BoolLit, Var, Binary, Call, Field, Record, ListLit };
    Kind kind = Kind::IntLit;
    long long intValue = 0;
    std::string strValue;
    bool boolValue = false;
    std::string name;   // Var name, Call callee, Record type name, Field field name
    BinOp op = BinOp::Add;
    std::vector<ExprPtr> args;  // Binary: [lhs, rhs]; Field: [base]; Call/Record/ListLit: operands
    Span span;
};

ExprPtr expr_int(long long v);
ExprPtr expr_str(std::string v);
ExprPtr expr_bool(bool v);
ExprPtr expr_var(std::string name);
ExprPtr expr_binary(BinOp op, ExprPtr lhs, ExprPtr rhs);
ExprPtr expr_call(std::string callee, std::vector<ExprPtr> args);
ExprPtr expr_field(ExprPtr base, std::string field);
ExprPtr expr_record(std::string typeName, std::vector<ExprPtr> args);
ExprPtr expr_list(std::vector<ExprPtr> elems);

// ---------------------------------------------------------------------------
// Statements

struct LValue {
    std::string base;
    bool isField = false;
    std::string field;
    Span span;
};

struct Stmt {
    enum class Kind { Let, Assign, Return, ExprStmt };
    Kind kind = Kind::ExprStmt;
    std::string name;                  // Let binding
    std::optional<TypePtr> annot;      // Let annotation; nullopt when absent
    LValue lvalue;                     // Assign
    ExprPtr expr;
    Span span;
};

// ---------------------------------------------------------------------------
// Declarations

struct Param {
    std::string name;
    std::optional<TypePtr> annot;
    Span span;
};

struct RecordField {
    std::string name;
    std::optional<TypePtr> annot;
    Span span;
};

struct RecordDecl {
    std::string name;
    std::vector<RecordField> fields;
    Span span;
};

struct AliasDecl {
    std::string name;
    TypePtr target;
    Span span;
};

struct FuncDecl {
    std::string name;
    std::vector<Param> params;
    std::optional<TypePtr> returnType;
    std::vector<Stmt> body;
    Span span;
};

using Decl = std::variant<RecordDecl, AliasDecl, FuncDecl>;

struct Program {
    Dialect dialect = Dialect::P;
    std::vector<Decl> decls;
};

// Structural equality, ignoring spans.
bool program_equal(const Program& a, const Program& b);

// Deep copy (fresh nodes throughout, so pointer-keyed maps built against the
// source do not alias the copy).
Program clone_program(const Program& p);

// Stable structural digest, independent of dialect and spans.
uint64_t ast_digest(const Program& p);

// ---------------------------------------------------------------------------
// Annotation sites

// One optional-Type slot. Sites enumerate deterministically in source order:
// declarations in order; record fields in order; for functions, params, then
// the return slot, then Let statements in body order.
struct AnnotationSite {
    enum class Slot { Param, Let, Return, RecordField };
    Slot slot = Slot::Param;
    int declIndex = 0;
    int itemIndex = 0;   // param index / field index / body stmt index; unused for Return
    bool present = false;
    std::optional<TypePtr> annotation;
};

std::vector<AnnotationSite> list_annotation_sites(const Program& p);

// Returns a copy of p with the annotation slot at site index `siteIdx`
// replaced by `annot` (nullopt removes it).
Program with_site_annotation(const Program& p, size_t siteIdx, std::optional<TypePtr> annot);

}  // namespace typesteer::minilang
