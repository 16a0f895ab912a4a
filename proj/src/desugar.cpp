#include "oolang/desugar.hpp"

namespace oolang {

namespace {

using namespace ast;

void rewrite_expr(Expr &e);

void rewrite_args(std::vector<ExprPtr> &args) {
    for (auto &a : args)
        rewrite_expr(*a);
}

void rewrite_expr(Expr &e) {
    std::visit(
        [&](auto &n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, FieldAccess>) {
                rewrite_expr(*n.base);
            } else if constexpr (std::is_same_v<T, Call>) {
                rewrite_args(n.args);
            } else if constexpr (std::is_same_v<T, MethodCall>) {
                rewrite_expr(*n.receiver);
                rewrite_args(n.args);
                if (!n.method.empty() && n.method[0] == '@') {
                    // o.@m(a) == @m(o, a)
                    Call call;
                    call.callee = n.method;
                    call.args.push_back(std::move(n.receiver));
                    for (auto &a : n.args)
                        call.args.push_back(std::move(a));
                    e.node = std::move(call);
                }
            } else if constexpr (std::is_same_v<T, Binary>) {
                rewrite_expr(*n.lhs);
                rewrite_expr(*n.rhs);
            } else if constexpr (std::is_same_v<T, Unary>) {
                rewrite_expr(*n.operand);
            }
        },
        e.node);
}

void rewrite_stmt(Stmt &s) {
    std::visit(
        [&](auto &n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Block>) {
                for (auto &inner : n.stmts)
                    rewrite_stmt(*inner);
            } else if constexpr (std::is_same_v<T, VarDecl>) {
                if (n.init)
                    rewrite_expr(*n.init);
            } else if constexpr (std::is_same_v<T, Assign>) {
                rewrite_expr(*n.target);
                rewrite_expr(*n.value);
            } else if constexpr (std::is_same_v<T, ExprStmt>) {
                rewrite_expr(*n.expr);
            } else if constexpr (std::is_same_v<T, Return>) {
                if (n.value)
                    rewrite_expr(*n.value);
            } else if constexpr (std::is_same_v<T, If>) {
                rewrite_expr(*n.cond);
                rewrite_stmt(*n.then_body);
                if (n.else_body)
                    rewrite_stmt(*n.else_body);
            } else if constexpr (std::is_same_v<T, While>) {
                rewrite_expr(*n.cond);
                rewrite_stmt(*n.body);
            }
        },
        s.node);
}

void rewrite_body(FuncDecl &fn) {
    if (!fn.body)
        return;
    for (auto &s : fn.body->stmts)
        rewrite_stmt(*s);
}

} // namespace

void desugar_members(ast::Unit &unit) {
    for (auto &cls : unit.classes) {
        for (auto &member : cls.members) {
            FuncDecl fn = std::move(member);
            fn.member_of = cls.name;
            Param receiver;
            receiver.type = TypeRef::class_type(cls.name);
            receiver.by_ref = true;
            receiver.name = "this";
            receiver.span = fn.span;
            fn.params.insert(fn.params.begin(), std::move(receiver));
            if (fn.is_multimethod()) {
                unit.multimethods.push_back(std::move(fn));
            } else {
                fn.receiver_only = true;
                unit.virtual_specs.push_back(std::move(fn));
            }
        }
        cls.members.clear();
    }
    for (auto &fn : unit.multimethods)
        rewrite_body(fn);
    for (auto &fn : unit.virtual_specs)
        rewrite_body(fn);
    for (auto &fn : unit.functions)
        rewrite_body(fn);
}

} // namespace oolang
