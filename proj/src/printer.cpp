#include "oolang/printer.hpp"

#include <charconv>
#include <sstream>

namespace oolang {

namespace {

using namespace ast;

// Binding strength, used to parenthesize only where needed.
int binary_prec(const std::string &op) {
    if (op == "||") return 1;
    if (op == "&&") return 2;
    if (op == "==" || op == "!=") return 3;
    if (op == "<" || op == ">" || op == "<=" || op == ">=") return 4;
    if (op == "+" || op == "-") return 5;
    return 6; // * / %
}
constexpr int unary_prec = 7;

std::string escape_string(const std::string &s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\\': out += "\\\\"; break;
        case '"': out += "\\\""; break;
        case '\0': out += "\\0"; break;
        default: out += c;
        }
    }
    return out;
}

struct Printer {
    std::ostringstream os;
    int depth = 0;

    void indent() {
        for (int i = 0; i < depth; i++)
            os << "    ";
    }

    void expr(const Expr &e, int parent_prec) {
        std::visit(
            [&](const auto &n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, IntLit>) {
                    os << n.value;
                } else if constexpr (std::is_same_v<T, FloatLit>) {
                    char buf[64];
                    auto [endp, ec] = std::to_chars(buf, buf + sizeof(buf), n.value);
                    std::string s = ec == std::errc() ? std::string(buf, endp) : "0";
                    os << s;
                    if (s.find('.') == std::string::npos &&
                        s.find('e') == std::string::npos &&
                        s.find("inf") == std::string::npos &&
                        s.find("nan") == std::string::npos)
                        os << ".0";
                } else if constexpr (std::is_same_v<T, BoolLit>) {
                    os << (n.value ? "true" : "false");
                } else if constexpr (std::is_same_v<T, StringLit>) {
                    os << '"' << escape_string(n.value) << '"';
                } else if constexpr (std::is_same_v<T, NameRef>) {
                    os << n.name;
                } else if constexpr (std::is_same_v<T, FieldAccess>) {
                    expr(*n.base, unary_prec + 1);
                    os << '.' << n.field;
                } else if constexpr (std::is_same_v<T, Call>) {
                    os << n.callee << '(';
                    for (size_t i = 0; i < n.args.size(); i++) {
                        if (i)
                            os << ", ";
                        expr(*n.args[i], 0);
                    }
                    os << ')';
                } else if constexpr (std::is_same_v<T, MethodCall>) {
                    expr(*n.receiver, unary_prec + 1);
                    os << '.' << n.method << '(';
                    for (size_t i = 0; i < n.args.size(); i++) {
                        if (i)
                            os << ", ";
                        expr(*n.args[i], 0);
                    }
                    os << ')';
                } else if constexpr (std::is_same_v<T, Binary>) {
                    int prec = binary_prec(n.op);
                    bool parens = prec < parent_prec;
                    if (parens)
                        os << '(';
                    expr(*n.lhs, prec);
                    os << ' ' << n.op << ' ';
                    expr(*n.rhs, prec + 1); // left associative
                    if (parens)
                        os << ')';
                } else if constexpr (std::is_same_v<T, Unary>) {
                    bool parens = unary_prec < parent_prec;
                    if (parens)
                        os << '(';
                    os << n.op;
                    expr(*n.operand, unary_prec);
                    if (parens)
                        os << ')';
                }
            },
            e.node);
    }

    void stmt(const Stmt &s) {
        std::visit(
            [&](const auto &n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, Block>) {
                    if (!n.scoped) {
                        // Declaration group: print members at this level.
                        for (const auto &inner : n.stmts)
                            stmt(*inner);
                        return;
                    }
                    indent();
                    os << "{\n";
                    depth++;
                    for (const auto &inner : n.stmts)
                        stmt(*inner);
                    depth--;
                    indent();
                    os << "}\n";
                } else if constexpr (std::is_same_v<T, VarDecl>) {
                    indent();
                    os << print_type(n.type) << ' ' << n.name;
                    if (n.init) {
                        os << " = ";
                        expr(*n.init, 0);
                    }
                    os << ";\n";
                } else if constexpr (std::is_same_v<T, Assign>) {
                    indent();
                    expr(*n.target, 0);
                    os << " = ";
                    expr(*n.value, 0);
                    os << ";\n";
                } else if constexpr (std::is_same_v<T, ExprStmt>) {
                    indent();
                    expr(*n.expr, 0);
                    os << ";\n";
                } else if constexpr (std::is_same_v<T, Return>) {
                    indent();
                    os << "return";
                    if (n.value) {
                        os << ' ';
                        expr(*n.value, 0);
                    }
                    os << ";\n";
                } else if constexpr (std::is_same_v<T, If>) {
                    indent();
                    os << "if (";
                    expr(*n.cond, 0);
                    os << ")\n";
                    nested(*n.then_body);
                    if (n.else_body) {
                        indent();
                        os << "else\n";
                        nested(*n.else_body);
                    }
                } else if constexpr (std::is_same_v<T, While>) {
                    indent();
                    os << "while (";
                    expr(*n.cond, 0);
                    os << ")\n";
                    nested(*n.body);
                } else if constexpr (std::is_same_v<T, Empty>) {
                    indent();
                    os << ";\n";
                }
            },
            s.node);
    }

    void nested(const Stmt &s) {
        if (std::holds_alternative<Block>(s.node)) {
            stmt(s);
        } else {
            depth++;
            stmt(s);
            depth--;
        }
    }

    void func(const FuncDecl &fn) {
        indent();
        if (fn.declared_virtual)
            os << "virtual ";
        os << print_type(fn.return_type) << ' ' << fn.name << '(';
        for (size_t i = 0; i < fn.params.size(); i++) {
            if (i)
                os << ", ";
            os << print_param(fn.params[i]);
        }
        os << ')';
        if (fn.body) {
            os << '\n';
            stmt_block(*fn.body);
        } else {
            os << ";\n";
        }
    }

    void stmt_block(const Block &b) {
        indent();
        os << "{\n";
        depth++;
        for (const auto &s : b.stmts)
            stmt(*s);
        depth--;
        indent();
        os << "}\n";
    }

    void cls(const ClassDecl &c) {
        os << "class " << c.name;
        for (size_t i = 0; i < c.parents.size(); i++) {
            os << (i == 0 ? ": " : ", ");
            const auto &p = c.parents[i];
            if (!p.is_public)
                os << "private ";
            if (p.is_virtual)
                os << "virtual ";
            if (p.is_public)
                os << "public ";
            os << p.name;
        }
        os << " {\n";
        depth++;
        for (const auto &f : c.fields) {
            indent();
            os << scalar_name(f.type) << ' ' << f.name << ";\n";
        }
        for (const auto &m : c.members)
            func(m);
        depth--;
        os << "};\n";
    }
};

ExprPtr clone_expr(const Expr &e) {
    auto out = std::make_unique<Expr>();
    out->span = e.span;
    std::visit(
        [&](const auto &n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, FieldAccess>) {
                out->node = FieldAccess{clone_expr(*n.base), n.field};
            } else if constexpr (std::is_same_v<T, Call>) {
                Call c{n.callee, {}};
                for (const auto &a : n.args)
                    c.args.push_back(clone_expr(*a));
                out->node = std::move(c);
            } else if constexpr (std::is_same_v<T, MethodCall>) {
                MethodCall c{clone_expr(*n.receiver), n.method, {}};
                for (const auto &a : n.args)
                    c.args.push_back(clone_expr(*a));
                out->node = std::move(c);
            } else if constexpr (std::is_same_v<T, Binary>) {
                out->node = Binary{n.op, clone_expr(*n.lhs), clone_expr(*n.rhs)};
            } else if constexpr (std::is_same_v<T, Unary>) {
                out->node = Unary{n.op, clone_expr(*n.operand)};
            } else {
                out->node = n;
            }
        },
        e.node);
    return out;
}

StmtPtr clone_stmt(const Stmt &s) {
    auto out = std::make_unique<Stmt>();
    out->span = s.span;
    std::visit(
        [&](const auto &n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Block>) {
                Block b;
                b.scoped = n.scoped;
                for (const auto &inner : n.stmts)
                    b.stmts.push_back(clone_stmt(*inner));
                out->node = std::move(b);
            } else if constexpr (std::is_same_v<T, VarDecl>) {
                VarDecl d{n.type, n.name, n.init ? clone_expr(*n.init) : nullptr};
                out->node = std::move(d);
            } else if constexpr (std::is_same_v<T, Assign>) {
                out->node =
                    Assign{clone_expr(*n.target), clone_expr(*n.value)};
            } else if constexpr (std::is_same_v<T, ExprStmt>) {
                out->node = ExprStmt{clone_expr(*n.expr)};
            } else if constexpr (std::is_same_v<T, Return>) {
                out->node = Return{n.value ? clone_expr(*n.value) : nullptr};
            } else if constexpr (std::is_same_v<T, If>) {
                out->node = If{clone_expr(*n.cond), clone_stmt(*n.then_body),
                               n.else_body ? clone_stmt(*n.else_body) : nullptr};
            } else if constexpr (std::is_same_v<T, While>) {
                out->node = While{clone_expr(*n.cond), clone_stmt(*n.body)};
            } else {
                out->node = n;
            }
        },
        s.node);
    return out;
}

} // namespace

std::string print_type(const TypeRef &t) {
    switch (t.kind) {
    case TypeRef::Kind::Void: return "void";
    case TypeRef::Kind::Scalar: return scalar_name(t.scalar);
    case TypeRef::Kind::Class: return t.class_name;
    }
    return "?";
}

std::string print_param(const ast::Param &p) {
    std::string out;
    if (p.is_const)
        out += "const ";
    out += print_type(p.type);
    if (p.by_ref)
        out += " &";
    if (!p.name.empty()) {
        if (!p.by_ref)
            out += ' ';
        out += p.name;
    }
    return out;
}

std::string print_expr(const ast::Expr &e) {
    Printer p;
    p.expr(e, 0);
    return p.os.str();
}

std::string print_unit(const ast::Unit &unit) {
    Printer p;
    for (const auto &inc : unit.includes)
        p.os << "#include \"" << escape_string(inc) << "\"\n";
    if (!unit.includes.empty())
        p.os << '\n';
    for (const auto &c : unit.classes) {
        p.cls(c);
        p.os << '\n';
    }
    for (const auto &fn : unit.multimethods) {
        p.func(fn);
        p.os << '\n';
    }
    for (const auto &fn : unit.virtual_specs) {
        p.func(fn);
        p.os << '\n';
    }
    for (const auto &fn : unit.functions) {
        p.func(fn);
        p.os << '\n';
    }
    return p.os.str();
}

const char *scalar_name(ScalarType t) {
    switch (t) {
    case ScalarType::Int: return "int";
    case ScalarType::Bool: return "bool";
    case ScalarType::Float: return "float";
    }
    return "?";
}

std::string type_name(const TypeRef &t) { return print_type(t); }

std::string dispatch_type_name(const DispatchType &t) {
    return t.is_const ? "const " + t.class_name : t.class_name;
}

ast::ExprPtr ast::clone(const Expr &e) { return clone_expr(e); }
ast::StmtPtr ast::clone(const Stmt &s) { return clone_stmt(s); }
ast::Block ast::clone(const Block &b) {
    Block out;
    out.scoped = b.scoped;
    for (const auto &s : b.stmts)
        out.stmts.push_back(clone_stmt(*s));
    return out;
}

} // namespace oolang
