#include "oolang/ir.hpp"

#include <cstring>
#include <charconv>
#include <sstream>

namespace oolang::ir {

const char *binop_name(BinOp op) {
    switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Mod: return "%";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::And: return "&&";
    case BinOp::Or: return "||";
    }
    return "?";
}

namespace {

// Expression tags; statements start at 20 so a corrupted stream cannot be
// misread as the other category.
enum : uint8_t {
    TAG_INT = 1,
    TAG_FLOAT,
    TAG_BOOL,
    TAG_LOCAL,
    TAG_FIELD,
    TAG_CONVERT,
    TAG_BINARY,
    TAG_UNARY,
    TAG_CALLFN,
    TAG_CALLMM,
    TAG_BLOCK = 20,
    TAG_LOCAL_SCALAR,
    TAG_LOCAL_OBJECT,
    TAG_ASSIGN_LOCAL,
    TAG_ASSIGN_FIELD,
    TAG_EXPR_STMT,
    TAG_PRINT,
    TAG_RETURN,
    TAG_IF,
    TAG_WHILE,
};

struct Writer {
    std::vector<uint8_t> &out;

    void u8(uint8_t v) { out.push_back(v); }
    void u32(uint32_t v) {
        for (int i = 0; i < 4; i++)
            out.push_back((uint8_t)(v >> (8 * i)));
    }
    void i32(int32_t v) { u32((uint32_t)v); }
    void u64(uint64_t v) {
        for (int i = 0; i < 8; i++)
            out.push_back((uint8_t)(v >> (8 * i)));
    }
    void i64(int64_t v) { u64((uint64_t)v); }
    void f64(double v) {
        uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        u64(bits);
    }
    void str(const std::string &s) {
        u32((uint32_t)s.size());
        out.insert(out.end(), s.begin(), s.end());
    }
};

void write_expr(Writer &w, const Expr &e);

void write_expr_list(Writer &w, const std::vector<ExprPtr> &args) {
    w.u32((uint32_t)args.size());
    for (const auto &a : args)
        write_expr(w, *a);
}

void write_expr(Writer &w, const Expr &e) {
    std::visit(
        [&](const auto &n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, IntLit>) {
                w.u8(TAG_INT);
                w.i64(n.value);
            } else if constexpr (std::is_same_v<T, FloatLit>) {
                w.u8(TAG_FLOAT);
                w.f64(n.value);
            } else if constexpr (std::is_same_v<T, BoolLit>) {
                w.u8(TAG_BOOL);
                w.u8(n.value ? 1 : 0);
            } else if constexpr (std::is_same_v<T, LocalGet>) {
                w.u8(TAG_LOCAL);
                w.i32(n.slot);
            } else if constexpr (std::is_same_v<T, FieldGet>) {
                w.u8(TAG_FIELD);
                write_expr(w, *n.base);
                w.str(n.anchor);
                w.i32(n.offset);
                w.u8((uint8_t)n.type);
            } else if constexpr (std::is_same_v<T, Convert>) {
                w.u8(TAG_CONVERT);
                write_expr(w, *n.value);
                w.str(n.to_class);
                w.str(n.anchor);
                w.i32(n.delta);
                w.u8(n.make_const ? 1 : 0);
            } else if constexpr (std::is_same_v<T, Binary>) {
                w.u8(TAG_BINARY);
                w.u8((uint8_t)n.op);
                w.u8((uint8_t)n.operand);
                write_expr(w, *n.lhs);
                write_expr(w, *n.rhs);
            } else if constexpr (std::is_same_v<T, Unary>) {
                w.u8(TAG_UNARY);
                w.u8((uint8_t)n.op);
                write_expr(w, *n.operand);
            } else if constexpr (std::is_same_v<T, CallFn>) {
                w.u8(TAG_CALLFN);
                w.str(n.name);
                write_expr_list(w, n.args);
            } else if constexpr (std::is_same_v<T, CallMm>) {
                w.u8(TAG_CALLMM);
                w.str(n.family);
                w.str(n.ret_class);
                write_expr_list(w, n.args);
            }
        },
        e.node);
}

void write_block(Writer &w, const Block &b);

void write_stmt(Writer &w, const Stmt &s) {
    std::visit(
        [&](const auto &n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Block>) {
                write_block(w, n);
            } else if constexpr (std::is_same_v<T, LocalScalar>) {
                w.u8(TAG_LOCAL_SCALAR);
                w.i32(n.slot);
                w.u8((uint8_t)n.type);
                w.u8(n.init ? 1 : 0);
                if (n.init)
                    write_expr(w, *n.init);
            } else if constexpr (std::is_same_v<T, LocalObject>) {
                w.u8(TAG_LOCAL_OBJECT);
                w.i32(n.slot);
                w.str(n.cls);
            } else if constexpr (std::is_same_v<T, AssignLocal>) {
                w.u8(TAG_ASSIGN_LOCAL);
                w.i32(n.slot);
                write_expr(w, *n.value);
            } else if constexpr (std::is_same_v<T, AssignField>) {
                w.u8(TAG_ASSIGN_FIELD);
                write_expr(w, *n.base);
                w.str(n.anchor);
                w.i32(n.offset);
                write_expr(w, *n.value);
            } else if constexpr (std::is_same_v<T, ExprStmt>) {
                w.u8(TAG_EXPR_STMT);
                write_expr(w, *n.expr);
            } else if constexpr (std::is_same_v<T, PrintStmt>) {
                w.u8(TAG_PRINT);
                w.u8((uint8_t)n.mode);
                w.str(n.format);
                w.u32((uint32_t)n.args.size());
                for (size_t i = 0; i < n.args.size(); i++) {
                    w.u8((uint8_t)n.arg_types[i]);
                    write_expr(w, *n.args[i]);
                }
            } else if constexpr (std::is_same_v<T, ReturnStmt>) {
                w.u8(TAG_RETURN);
                w.u8(n.value ? 1 : 0);
                if (n.value)
                    write_expr(w, *n.value);
            } else if constexpr (std::is_same_v<T, IfStmt>) {
                w.u8(TAG_IF);
                write_expr(w, *n.cond);
                write_block(w, n.then_body);
                w.u8(n.else_body ? 1 : 0);
                if (n.else_body)
                    write_block(w, *n.else_body);
            } else if constexpr (std::is_same_v<T, WhileStmt>) {
                w.u8(TAG_WHILE);
                write_expr(w, *n.cond);
                write_block(w, n.body);
            }
        },
        s.node);
}

void write_block(Writer &w, const Block &b) {
    w.u8(TAG_BLOCK);
    w.u32((uint32_t)b.stmts.size());
    for (const auto &s : b.stmts)
        write_stmt(w, s);
}

constexpr int MAX_DEPTH = 4000;

struct Reader {
    const uint8_t *p;
    const uint8_t *end;
    bool fail = false;
    int depth = 0;

    bool need(size_t n) {
        if (fail || (size_t)(end - p) < n) {
            fail = true;
            return false;
        }
        return true;
    }
    uint8_t u8() {
        if (!need(1))
            return 0;
        return *p++;
    }
    uint32_t u32() {
        if (!need(4))
            return 0;
        uint32_t v = 0;
        for (int i = 0; i < 4; i++)
            v |= (uint32_t)*p++ << (8 * i);
        return v;
    }
    int32_t i32() { return (int32_t)u32(); }
    uint64_t u64() {
        if (!need(8))
            return 0;
        uint64_t v = 0;
        for (int i = 0; i < 8; i++)
            v |= (uint64_t)*p++ << (8 * i);
        return v;
    }
    int64_t i64() { return (int64_t)u64(); }
    double f64() {
        uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, sizeof v);
        return v;
    }
    std::string str() {
        uint32_t n = u32();
        if (!need(n))
            return {};
        std::string s((const char *)p, n);
        p += n;
        return s;
    }
};

ExprPtr read_expr(Reader &r);

std::vector<ExprPtr> read_expr_list(Reader &r) {
    uint32_t n = r.u32();
    std::vector<ExprPtr> out;
    for (uint32_t i = 0; i < n && !r.fail; i++)
        out.push_back(read_expr(r));
    return out;
}

bool valid_scalar(uint8_t v) { return v <= (uint8_t)ScalarType::Float; }

ExprPtr read_expr(Reader &r) {
    auto out = std::make_unique<Expr>();
    if (++r.depth > MAX_DEPTH)
        r.fail = true;
    if (r.fail)
        return out;
    uint8_t tag = r.u8();
    switch (tag) {
    case TAG_INT:
        out->node = IntLit{r.i64()};
        break;
    case TAG_FLOAT:
        out->node = FloatLit{r.f64()};
        break;
    case TAG_BOOL:
        out->node = BoolLit{r.u8() != 0};
        break;
    case TAG_LOCAL:
        out->node = LocalGet{r.i32()};
        break;
    case TAG_FIELD: {
        FieldGet n;
        n.base = read_expr(r);
        n.anchor = r.str();
        n.offset = r.i32();
        uint8_t ty = r.u8();
        if (!valid_scalar(ty))
            r.fail = true;
        n.type = (ScalarType)ty;
        out->node = std::move(n);
        break;
    }
    case TAG_CONVERT: {
        Convert n;
        n.value = read_expr(r);
        n.to_class = r.str();
        n.anchor = r.str();
        n.delta = r.i32();
        n.make_const = r.u8() != 0;
        out->node = std::move(n);
        break;
    }
    case TAG_BINARY: {
        Binary n;
        uint8_t op = r.u8();
        uint8_t ty = r.u8();
        if (op > (uint8_t)BinOp::Or || !valid_scalar(ty))
            r.fail = true;
        n.op = (BinOp)op;
        n.operand = (ScalarType)ty;
        n.lhs = read_expr(r);
        n.rhs = read_expr(r);
        out->node = std::move(n);
        break;
    }
    case TAG_UNARY: {
        Unary n;
        uint8_t op = r.u8();
        if (op > (uint8_t)UnOp::BoolToInt)
            r.fail = true;
        n.op = (UnOp)op;
        n.operand = read_expr(r);
        out->node = std::move(n);
        break;
    }
    case TAG_CALLFN: {
        CallFn n;
        n.name = r.str();
        n.args = read_expr_list(r);
        out->node = std::move(n);
        break;
    }
    case TAG_CALLMM: {
        CallMm n;
        n.family = r.str();
        n.ret_class = r.str();
        n.args = read_expr_list(r);
        out->node = std::move(n);
        break;
    }
    default:
        r.fail = true;
    }
    r.depth--;
    return out;
}

Block read_block(Reader &r);

Stmt read_stmt(Reader &r) {
    Stmt out;
    if (++r.depth > MAX_DEPTH)
        r.fail = true;
    if (r.fail) {
        r.depth--;
        return out;
    }
    uint8_t tag = r.u8();
    switch (tag) {
    case TAG_BLOCK: {
        uint32_t n = r.u32();
        Block b;
        for (uint32_t i = 0; i < n && !r.fail; i++)
            b.stmts.push_back(read_stmt(r));
        out.node = std::move(b);
        break;
    }
    case TAG_LOCAL_SCALAR: {
        LocalScalar n;
        n.slot = r.i32();
        uint8_t ty = r.u8();
        if (!valid_scalar(ty))
            r.fail = true;
        n.type = (ScalarType)ty;
        if (r.u8())
            n.init = read_expr(r);
        out.node = std::move(n);
        break;
    }
    case TAG_LOCAL_OBJECT: {
        LocalObject n;
        n.slot = r.i32();
        n.cls = r.str();
        out.node = std::move(n);
        break;
    }
    case TAG_ASSIGN_LOCAL: {
        AssignLocal n;
        n.slot = r.i32();
        n.value = read_expr(r);
        out.node = std::move(n);
        break;
    }
    case TAG_ASSIGN_FIELD: {
        AssignField n;
        n.base = read_expr(r);
        n.anchor = r.str();
        n.offset = r.i32();
        n.value = read_expr(r);
        out.node = std::move(n);
        break;
    }
    case TAG_EXPR_STMT:
        out.node = ExprStmt{read_expr(r)};
        break;
    case TAG_PRINT: {
        PrintStmt n;
        uint8_t mode = r.u8();
        if (mode > (uint8_t)PrintMode::Format)
            r.fail = true;
        n.mode = (PrintMode)mode;
        n.format = r.str();
        uint32_t count = r.u32();
        for (uint32_t i = 0; i < count && !r.fail; i++) {
            uint8_t ty = r.u8();
            if (!valid_scalar(ty))
                r.fail = true;
            n.arg_types.push_back((ScalarType)ty);
            n.args.push_back(read_expr(r));
        }
        out.node = std::move(n);
        break;
    }
    case TAG_RETURN: {
        ReturnStmt n;
        if (r.u8())
            n.value = read_expr(r);
        out.node = std::move(n);
        break;
    }
    case TAG_IF: {
        IfStmt n;
        n.cond = read_expr(r);
        n.then_body = read_block(r);
        if (r.u8())
            n.else_body = read_block(r);
        out.node = std::move(n);
        break;
    }
    case TAG_WHILE: {
        WhileStmt n;
        n.cond = read_expr(r);
        n.body = read_block(r);
        out.node = std::move(n);
        break;
    }
    default:
        r.fail = true;
    }
    r.depth--;
    return out;
}

Block read_block(Reader &r) {
    Block out;
    if (r.fail)
        return out;
    if (r.u8() != TAG_BLOCK) {
        r.fail = true;
        return out;
    }
    uint32_t n = r.u32();
    for (uint32_t i = 0; i < n && !r.fail; i++)
        out.stmts.push_back(read_stmt(r));
    return out;
}

std::string fmt_float(double v) {
    char buf[64];
    auto [endp, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    std::string s = ec == std::errc() ? std::string(buf, endp) : "0";
    if (s.find('.') == std::string::npos &&
        s.find('e') == std::string::npos &&
        s.find("inf") == std::string::npos &&
        s.find("nan") == std::string::npos)
        s += ".0";
    return s;
}

std::string escape(const std::string &s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\\': out += "\\\\"; break;
        case '"': out += "\\\""; break;
        default: out += c;
        }
    }
    return out;
}

std::string anchor_offset(const std::string &anchor, int offset) {
    std::string out;
    if (!anchor.empty())
        out += "virtual " + anchor + "+";
    else
        out += "+";
    out += std::to_string(offset);
    return out;
}

void dump_expr(std::ostringstream &os, const Expr &e) {
    std::visit(
        [&](const auto &n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, IntLit>) {
                os << n.value;
            } else if constexpr (std::is_same_v<T, FloatLit>) {
                os << fmt_float(n.value);
            } else if constexpr (std::is_same_v<T, BoolLit>) {
                os << (n.value ? "true" : "false");
            } else if constexpr (std::is_same_v<T, LocalGet>) {
                os << "local[" << n.slot << "]";
            } else if constexpr (std::is_same_v<T, FieldGet>) {
                dump_expr(os, *n.base);
                os << ".[" << anchor_offset(n.anchor, n.offset) << ":"
                   << scalar_name(n.type) << "]";
            } else if constexpr (std::is_same_v<T, Convert>) {
                os << "convert(";
                dump_expr(os, *n.value);
                os << " -> " << (n.make_const ? "const " : "") << n.to_class
                   << ", " << anchor_offset(n.anchor, n.delta) << ")";
            } else if constexpr (std::is_same_v<T, Binary>) {
                os << "(";
                dump_expr(os, *n.lhs);
                os << " " << binop_name(n.op) << " ";
                dump_expr(os, *n.rhs);
                os << ")";
            } else if constexpr (std::is_same_v<T, Unary>) {
                if (n.op == UnOp::BoolToInt) {
                    os << "int(";
                    dump_expr(os, *n.operand);
                    os << ")";
                    return;
                }
                os << "(" << (n.op == UnOp::Neg ? "-" : "!");
                dump_expr(os, *n.operand);
                os << ")";
            } else if constexpr (std::is_same_v<T, CallFn>) {
                os << n.name << "(";
                for (size_t i = 0; i < n.args.size(); i++) {
                    if (i)
                        os << ", ";
                    dump_expr(os, *n.args[i]);
                }
                os << ")";
            } else if constexpr (std::is_same_v<T, CallMm>) {
                os << "dispatch " << n.family << "(";
                for (size_t i = 0; i < n.args.size(); i++) {
                    if (i)
                        os << ", ";
                    dump_expr(os, *n.args[i]);
                }
                os << ")";
            }
        },
        e.node);
}

void dump_block(std::ostringstream &os, const Block &b, int indent);

void dump_stmt(std::ostringstream &os, const Stmt &s, int indent) {
    std::string pad(indent, ' ');
    std::visit(
        [&](const auto &n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Block>) {
                os << pad << "{\n";
                dump_block(os, n, indent + 4);
                os << pad << "}\n";
            } else if constexpr (std::is_same_v<T, LocalScalar>) {
                os << pad << "local[" << n.slot << "]: " << scalar_name(n.type);
                if (n.init) {
                    os << " = ";
                    dump_expr(os, *n.init);
                }
                os << "\n";
            } else if constexpr (std::is_same_v<T, LocalObject>) {
                os << pad << "local[" << n.slot << "]: object " << n.cls
                   << "\n";
            } else if constexpr (std::is_same_v<T, AssignLocal>) {
                os << pad << "local[" << n.slot << "] = ";
                dump_expr(os, *n.value);
                os << "\n";
            } else if constexpr (std::is_same_v<T, AssignField>) {
                os << pad;
                dump_expr(os, *n.base);
                os << ".[" << anchor_offset(n.anchor, n.offset) << "] = ";
                dump_expr(os, *n.value);
                os << "\n";
            } else if constexpr (std::is_same_v<T, ExprStmt>) {
                os << pad;
                dump_expr(os, *n.expr);
                os << "\n";
            } else if constexpr (std::is_same_v<T, PrintStmt>) {
                os << pad;
                if (n.mode == PrintMode::Literal) {
                    os << "print \"" << escape(n.format) << "\"";
                } else if (n.mode == PrintMode::Value) {
                    os << "print (" << scalar_name(n.arg_types[0]) << ") ";
                    dump_expr(os, *n.args[0]);
                } else {
                    os << "printf \"" << escape(n.format) << "\"";
                    for (const auto &a : n.args) {
                        os << ", ";
                        dump_expr(os, *a);
                    }
                }
                os << "\n";
            } else if constexpr (std::is_same_v<T, ReturnStmt>) {
                os << pad << "return";
                if (n.value) {
                    os << " ";
                    dump_expr(os, *n.value);
                }
                os << "\n";
            } else if constexpr (std::is_same_v<T, IfStmt>) {
                os << pad << "if ";
                dump_expr(os, *n.cond);
                os << "\n";
                dump_block(os, n.then_body, indent + 4);
                if (n.else_body) {
                    os << pad << "else\n";
                    dump_block(os, *n.else_body, indent + 4);
                }
            } else if constexpr (std::is_same_v<T, WhileStmt>) {
                os << pad << "while ";
                dump_expr(os, *n.cond);
                os << "\n";
                dump_block(os, n.body, indent + 4);
            }
        },
        s.node);
}

void dump_block(std::ostringstream &os, const Block &b, int indent) {
    for (const auto &s : b.stmts)
        dump_stmt(os, s, indent);
}

} // namespace

void serialize_body(const Body &body, std::vector<uint8_t> &out) {
    Writer w{out};
    w.i32(body.frame_size);
    write_block(w, body.block);
}

std::vector<uint8_t> serialize_body(const Body &body) {
    std::vector<uint8_t> out;
    serialize_body(body, out);
    return out;
}

std::optional<Body> deserialize_body(const uint8_t *data, size_t len) {
    Reader r{data, data + len};
    Body body;
    body.frame_size = r.i32();
    body.block = read_block(r);
    if (r.fail || r.p != r.end || body.frame_size < 0)
        return std::nullopt;
    return body;
}

std::string dump_body(const Body &body, int indent) {
    std::ostringstream os;
    os << std::string(indent, ' ') << "frame " << body.frame_size << "\n";
    dump_block(os, body.block, indent);
    return os.str();
}

} // namespace oolang::ir
