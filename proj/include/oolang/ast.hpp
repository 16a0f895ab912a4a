#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "oolang/source.hpp"
#include "oolang/types.hpp"

namespace oolang::ast {

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct IntLit {
    long long value = 0;
};
struct FloatLit {
    double value = 0;
};
struct BoolLit {
    bool value = false;
};
struct StringLit {
    std::string value;
};
// Unresolved identifier: local, parameter or implicit-this field.
struct NameRef {
    std::string name;
};
struct FieldAccess {
    ExprPtr base;
    std::string field;
};
// Free call: plain function, multimethod (callee starts with '@') or the
// print builtin.
struct Call {
    std::string callee;
    std::vector<ExprPtr> args;
};
// o.m(...) and o.@m(...). Desugaring rewrites multimethod method-call syntax
// into Call and marks virtual-function invocations.
struct MethodCall {
    ExprPtr receiver;
    std::string method;
    std::vector<ExprPtr> args;
};
struct Binary {
    std::string op;
    ExprPtr lhs;
    ExprPtr rhs;
};
struct Unary {
    std::string op;
    ExprPtr operand;
};

struct Expr {
    Span span;
    std::variant<IntLit, FloatLit, BoolLit, StringLit, NameRef, FieldAccess,
                 Call, MethodCall, Binary, Unary>
        node;
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct Block {
    std::vector<StmtPtr> stmts;
    // False for a multi-declarator group ("int x, y;"): the declarations
    // belong to the enclosing scope, not to a nested one.
    bool scoped = true;
};
struct VarDecl {
    TypeRef type;
    std::string name;
    ExprPtr init; // may be null
};
struct Assign {
    ExprPtr target; // NameRef or FieldAccess
    ExprPtr value;
};
struct ExprStmt {
    ExprPtr expr;
};
struct Return {
    ExprPtr value; // may be null
};
struct If {
    ExprPtr cond;
    StmtPtr then_body;
    StmtPtr else_body; // may be null
};
struct While {
    ExprPtr cond;
    StmtPtr body;
};
struct Empty {};

struct Stmt {
    Span span;
    std::variant<Block, VarDecl, Assign, ExprStmt, Return, If, While, Empty>
        node;
};

struct Param {
    TypeRef type;
    bool is_const = false;
    bool by_ref = false;
    std::string name; // may be empty in declarations
    Span span;
};

// Shared representation for free functions, multimethod specializations and
// (pre-desugar) class members.
struct FuncDecl {
    std::string name; // '@'-prefixed for multimethod specializations
    TypeRef return_type;
    std::vector<Param> params;
    std::optional<Block> body; // absent for declaration-only entries
    Span span;

    // Desugaring metadata.
    std::string member_of;           // declaring class, empty for free decls
    bool receiver_only = false;      // virtual function: dispatch on param 0 only
    bool declared_virtual = false;   // surface 'virtual' keyword

    bool is_multimethod() const { return !name.empty() && name[0] == '@'; }
};

struct FieldDecl {
    ScalarType type = ScalarType::Int;
    std::string name;
    Span span;
};

struct ParentRef {
    std::string name;
    bool is_virtual = false;
    bool is_public = true;
    Span span;
};

struct ClassDecl {
    std::string name;
    std::vector<ParentRef> parents;
    std::vector<FieldDecl> fields;
    std::vector<FuncDecl> members; // emptied by desugaring
    Span span;
};

// One parsed translation unit (a .ool source or a .oolh header) together
// with everything pulled in through includes.
struct Unit {
    std::string file;
    std::vector<ClassDecl> classes;
    std::vector<FuncDecl> functions;     // free non-'@' declarations
    std::vector<FuncDecl> multimethods;  // free '@' specializations
    std::vector<FuncDecl> virtual_specs; // desugared virtual members
    std::vector<std::string> includes;   // as written
};

ast::ExprPtr clone(const Expr &e);
ast::StmtPtr clone(const Stmt &s);
Block clone(const Block &b);

} // namespace oolang::ast
