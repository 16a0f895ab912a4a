#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "oolang/types.hpp"

// Executable form of function bodies. Name resolution, field lookup and
// static conversions are already burnt in: expressions refer to frame slots
// and (anchor, offset) pairs instead of names. Bodies serialize to a
// canonical byte string, which doubles as the equality relation between
// bodies compiled in different translation units.

namespace oolang::ir {

enum class BinOp : uint8_t {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
};

enum class UnOp : uint8_t { Neg, Not, BoolToInt };

const char *binop_name(BinOp op);

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
// Reads a frame slot: either a scalar or a reference to an object.
struct LocalGet {
    int slot = 0;
};
// Scalar load through an object reference. With an empty anchor the slot is
// ref.offset + offset; otherwise the field lives in virtual base `anchor` of
// the referenced object and the slot is found through the dynamic type.
struct FieldGet {
    ExprPtr base;
    std::string anchor;
    int offset = 0;
    ScalarType type = ScalarType::Int;
};
// Static view adjustment of an object reference (upcast and/or adding
// constness). Same anchor/offset semantics as FieldGet.
struct Convert {
    ExprPtr value;
    std::string to_class;
    std::string anchor;
    int delta = 0;
    bool make_const = false;
};
struct Binary {
    BinOp op = BinOp::Add;
    ScalarType operand = ScalarType::Int;
    ExprPtr lhs;
    ExprPtr rhs;
};
struct Unary {
    UnOp op = UnOp::Neg;
    ExprPtr operand;
};
// Call of a statically resolved function.
struct CallFn {
    std::string name;
    std::vector<ExprPtr> args;
};
// Call routed through a dispatch family's compressed table at run time.
// ret_class names the static return class at this call site (empty when the
// family returns a scalar or void): the caller realigns the returned
// reference to it.
struct CallMm {
    std::string family;
    std::string ret_class;
    std::vector<ExprPtr> args;
};

struct Expr {
    std::variant<IntLit, FloatLit, BoolLit, LocalGet, FieldGet, Convert,
                 Binary, Unary, CallFn, CallMm>
        node;
};

struct Stmt;

struct Block {
    std::vector<Stmt> stmts;
};

// Declares a scalar local; null init means zero-initialize.
struct LocalScalar {
    int slot = 0;
    ScalarType type = ScalarType::Int;
    ExprPtr init;
};
// Declares an object local: storage lives in the current frame.
struct LocalObject {
    int slot = 0;
    std::string cls;
};
struct AssignLocal {
    int slot = 0;
    ExprPtr value;
};
struct AssignField {
    ExprPtr base;
    std::string anchor;
    int offset = 0;
    ExprPtr value;
};
struct ExprStmt {
    ExprPtr expr;
};
enum class PrintMode : uint8_t {
    Value,   // print(expr): formatted value plus newline
    Literal, // print("text"): the literal plus newline
    Format,  // printf("fmt", ...): %d/%b/%f conversions, no implicit newline
};
struct PrintStmt {
    PrintMode mode = PrintMode::Value;
    std::string format;
    std::vector<ExprPtr> args;
    std::vector<ScalarType> arg_types;
};
struct ReturnStmt {
    ExprPtr value; // null for void returns
};
struct IfStmt {
    ExprPtr cond;
    Block then_body;
    std::optional<Block> else_body;
};
struct WhileStmt {
    ExprPtr cond;
    Block body;
};

struct Stmt {
    std::variant<Block, LocalScalar, LocalObject, AssignLocal, AssignField,
                 ExprStmt, PrintStmt, ReturnStmt, IfStmt, WhileStmt>
        node;
};

struct Body {
    int frame_size = 0; // parameters first, then all locals
    Block block;
};

// Canonical serialization. Two bodies are considered equal exactly when
// their serialized bytes are equal.
std::vector<uint8_t> serialize_body(const Body &body);
void serialize_body(const Body &body, std::vector<uint8_t> &out);

// Returns nullopt on malformed input.
std::optional<Body> deserialize_body(const uint8_t *data, size_t len);

// Human-readable listing, one statement per line, `indent` leading spaces.
std::string dump_body(const Body &body, int indent = 0);

} // namespace oolang::ir
