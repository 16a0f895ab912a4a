#include "oolang/parser.hpp"

#include <cassert>

namespace oolang {

namespace {

using namespace ast;

struct ParseError {};

struct Parser {
    const std::vector<Token> &toks;
    DiagnosticList &diags;
    ParseOptions opts;
    std::string file;
    size_t pos = 0;

    const Token &peek(size_t ahead = 0) const {
        size_t i = pos + ahead;
        if (i >= toks.size())
            i = toks.size() - 1; // End token
        return toks[i];
    }
    const Token &advance() {
        const Token &t = peek();
        if (pos + 1 < toks.size())
            pos++;
        return t;
    }
    bool at(TokenKind k) const { return peek().kind == k; }
    bool match(TokenKind k) {
        if (!at(k))
            return false;
        advance();
        return true;
    }
    const Token &expect(TokenKind k, const char *what) {
        if (!at(k)) {
            diags.error(diag_code::parse, peek().span,
                        std::string("expected ") + what + " before " +
                            token_kind_name(peek().kind));
            throw ParseError{};
        }
        return advance();
    }

    bool at_scalar_type() const {
        return at(TokenKind::KwInt) || at(TokenKind::KwBool) ||
               at(TokenKind::KwFloat);
    }
    bool at_type_start() const {
        return at_scalar_type() || at(TokenKind::KwVoid) ||
               at(TokenKind::Identifier);
    }

    TypeRef parse_type() {
        if (match(TokenKind::KwVoid))
            return TypeRef::void_type();
        if (match(TokenKind::KwInt))
            return TypeRef::scalar_type(ScalarType::Int);
        if (match(TokenKind::KwBool))
            return TypeRef::scalar_type(ScalarType::Bool);
        if (match(TokenKind::KwFloat))
            return TypeRef::scalar_type(ScalarType::Float);
        const Token &t = expect(TokenKind::Identifier, "a type name");
        return TypeRef::class_type(t.text);
    }

    // ---- expressions ----

    ExprPtr mk(Span sp, auto &&node) {
        auto e = std::make_unique<Expr>();
        e->span = std::move(sp);
        e->node = std::forward<decltype(node)>(node);
        return e;
    }

    ExprPtr parse_expr() { return parse_or(); }

    ExprPtr parse_or() {
        ExprPtr lhs = parse_and();
        while (at(TokenKind::OrOr)) {
            Span sp = advance().span;
            ExprPtr rhs = parse_and();
            lhs = mk(sp, Binary{"||", std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }
    ExprPtr parse_and() {
        ExprPtr lhs = parse_equality();
        while (at(TokenKind::AndAnd)) {
            Span sp = advance().span;
            ExprPtr rhs = parse_equality();
            lhs = mk(sp, Binary{"&&", std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }
    ExprPtr parse_equality() {
        ExprPtr lhs = parse_relational();
        while (at(TokenKind::Eq) || at(TokenKind::Ne)) {
            bool eq = at(TokenKind::Eq);
            Span sp = advance().span;
            ExprPtr rhs = parse_relational();
            lhs = mk(sp, Binary{eq ? "==" : "!=", std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }
    ExprPtr parse_relational() {
        ExprPtr lhs = parse_additive();
        while (at(TokenKind::Lt) || at(TokenKind::Gt) || at(TokenKind::Le) ||
               at(TokenKind::Ge)) {
            const char *op = at(TokenKind::Lt)   ? "<"
                             : at(TokenKind::Gt) ? ">"
                             : at(TokenKind::Le) ? "<="
                                                 : ">=";
            Span sp = advance().span;
            ExprPtr rhs = parse_additive();
            lhs = mk(sp, Binary{op, std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }
    ExprPtr parse_additive() {
        ExprPtr lhs = parse_multiplicative();
        while (at(TokenKind::Plus) || at(TokenKind::Minus)) {
            const char *op = at(TokenKind::Plus) ? "+" : "-";
            Span sp = advance().span;
            ExprPtr rhs = parse_multiplicative();
            lhs = mk(sp, Binary{op, std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }
    ExprPtr parse_multiplicative() {
        ExprPtr lhs = parse_unary();
        while (at(TokenKind::Star) || at(TokenKind::Slash) ||
               at(TokenKind::Percent)) {
            const char *op = at(TokenKind::Star)    ? "*"
                             : at(TokenKind::Slash) ? "/"
                                                    : "%";
            Span sp = advance().span;
            ExprPtr rhs = parse_unary();
            lhs = mk(sp, Binary{op, std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }
    ExprPtr parse_unary() {
        if (at(TokenKind::Minus)) {
            Span sp = advance().span;
            return mk(sp, Unary{"-", parse_unary()});
        }
        if (at(TokenKind::Not)) {
            Span sp = advance().span;
            return mk(sp, Unary{"!", parse_unary()});
        }
        return parse_postfix();
    }
    ExprPtr parse_postfix() {
        ExprPtr e = parse_primary();
        for (;;) {
            if (at(TokenKind::Dot)) {
                advance();
                if (at(TokenKind::MmName) ||
                    (at(TokenKind::Identifier) &&
                     peek(1).kind == TokenKind::LParen)) {
                    const Token &name = advance();
                    Span sp = name.span;
                    std::vector<ExprPtr> args = parse_args();
                    e = mk(sp,
                           MethodCall{std::move(e), name.text, std::move(args)});
                } else {
                    const Token &field =
                        expect(TokenKind::Identifier, "a field name");
                    e = mk(field.span, FieldAccess{std::move(e), field.text});
                }
                continue;
            }
            break;
        }
        return e;
    }
    std::vector<ExprPtr> parse_args() {
        expect(TokenKind::LParen, "'('");
        std::vector<ExprPtr> args;
        if (!at(TokenKind::RParen)) {
            args.push_back(parse_expr());
            while (match(TokenKind::Comma))
                args.push_back(parse_expr());
        }
        expect(TokenKind::RParen, "')'");
        return args;
    }
    ExprPtr parse_primary() {
        Span sp = peek().span;
        if (at(TokenKind::IntLit)) {
            long long v = advance().int_value;
            return mk(sp, IntLit{v});
        }
        if (at(TokenKind::FloatLit)) {
            double v = advance().float_value;
            return mk(sp, FloatLit{v});
        }
        if (match(TokenKind::KwTrue))
            return mk(sp, BoolLit{true});
        if (match(TokenKind::KwFalse))
            return mk(sp, BoolLit{false});
        if (at(TokenKind::StringLit)) {
            std::string v = advance().text;
            return mk(sp, StringLit{std::move(v)});
        }
        if (at(TokenKind::LParen)) {
            advance();
            ExprPtr e = parse_expr();
            expect(TokenKind::RParen, "')'");
            return e;
        }
        if (at(TokenKind::MmName)) {
            const Token &name = advance();
            std::vector<ExprPtr> args = parse_args();
            return mk(sp, Call{name.text, std::move(args)});
        }
        if (at(TokenKind::Identifier)) {
            const Token &name = advance();
            if (at(TokenKind::LParen)) {
                std::vector<ExprPtr> args = parse_args();
                return mk(sp, Call{name.text, std::move(args)});
            }
            return mk(sp, NameRef{name.text});
        }
        diags.error(diag_code::parse, sp,
                    std::string("expected an expression before ") +
                        token_kind_name(peek().kind));
        throw ParseError{};
    }

    // ---- statements ----

    StmtPtr mks(Span sp, auto &&node) {
        auto s = std::make_unique<Stmt>();
        s->span = std::move(sp);
        s->node = std::forward<decltype(node)>(node);
        return s;
    }

    void sync_stmt() {
        // Skip to the end of the current statement.
        while (!at(TokenKind::End)) {
            if (match(TokenKind::Semicolon))
                return;
            if (at(TokenKind::RBrace))
                return;
            advance();
        }
    }

    Block parse_block_body() {
        expect(TokenKind::LBrace, "'{'");
        Block b;
        while (!at(TokenKind::RBrace) && !at(TokenKind::End)) {
            try {
                b.stmts.push_back(parse_stmt());
            } catch (ParseError &) {
                sync_stmt();
            }
        }
        expect(TokenKind::RBrace, "'}'");
        return b;
    }

    StmtPtr parse_stmt() {
        Span sp = peek().span;
        if (at(TokenKind::LBrace))
            return mks(sp, parse_block_body());
        if (match(TokenKind::Semicolon))
            return mks(sp, Empty{});
        if (at(TokenKind::KwReturn)) {
            advance();
            Return r;
            if (!at(TokenKind::Semicolon))
                r.value = parse_expr();
            expect(TokenKind::Semicolon, "';'");
            return mks(sp, std::move(r));
        }
        if (at(TokenKind::KwIf)) {
            advance();
            expect(TokenKind::LParen, "'('");
            If node;
            node.cond = parse_expr();
            expect(TokenKind::RParen, "')'");
            node.then_body = parse_stmt();
            if (match(TokenKind::KwElse))
                node.else_body = parse_stmt();
            return mks(sp, std::move(node));
        }
        if (at(TokenKind::KwWhile)) {
            advance();
            expect(TokenKind::LParen, "'('");
            While node;
            node.cond = parse_expr();
            expect(TokenKind::RParen, "')'");
            node.body = parse_stmt();
            return mks(sp, std::move(node));
        }
        // Local declaration: scalar type keyword, or IDENT IDENT.
        if (at_scalar_type() ||
            (at(TokenKind::Identifier) && peek(1).kind == TokenKind::Identifier))
            return parse_var_decls(sp);
        // Expression statement or assignment.
        ExprPtr e = parse_expr();
        if (at(TokenKind::Assign)) {
            advance();
            if (!std::holds_alternative<NameRef>(e->node) &&
                !std::holds_alternative<FieldAccess>(e->node)) {
                diags.error(diag_code::parse, sp,
                            "assignment target must be a variable or a field");
                throw ParseError{};
            }
            Assign a;
            a.target = std::move(e);
            a.value = parse_expr();
            expect(TokenKind::Semicolon, "';'");
            return mks(sp, std::move(a));
        }
        expect(TokenKind::Semicolon, "';'");
        return mks(sp, ExprStmt{std::move(e)});
    }

    // One or more declarators sharing a type: "int x, y = 0;", "Point a;".
    // Multiple declarators expand to a block of single declarations.
    StmtPtr parse_var_decls(Span sp) {
        TypeRef type = parse_type();
        if (type.is_void()) {
            diags.error(diag_code::parse, sp, "variables cannot have type void");
            throw ParseError{};
        }
        std::vector<StmtPtr> decls;
        for (;;) {
            const Token &name = expect(TokenKind::Identifier, "a variable name");
            VarDecl d;
            d.type = type;
            d.name = name.text;
            if (match(TokenKind::Assign))
                d.init = parse_expr();
            decls.push_back(mks(name.span, std::move(d)));
            if (!match(TokenKind::Comma))
                break;
        }
        expect(TokenKind::Semicolon, "';'");
        if (decls.size() == 1)
            return std::move(decls[0]);
        Block b;
        b.stmts = std::move(decls);
        b.scoped = false;
        return mks(sp, std::move(b));
    }

    // ---- declarations ----

    std::vector<Param> parse_params() {
        expect(TokenKind::LParen, "'('");
        std::vector<Param> params;
        if (!at(TokenKind::RParen)) {
            do {
                Param p;
                p.span = peek().span;
                p.is_const = match(TokenKind::KwConst);
                p.type = parse_type();
                if (p.type.is_void()) {
                    diags.error(diag_code::parse, p.span,
                                "parameters cannot have type void");
                    throw ParseError{};
                }
                p.by_ref = match(TokenKind::Amp);
                if (at(TokenKind::Identifier))
                    p.name = advance().text;
                params.push_back(std::move(p));
            } while (match(TokenKind::Comma));
        }
        expect(TokenKind::RParen, "')'");
        return params;
    }

    // Shared tail of member and free function declarations: the part after
    // the name. Reports bodies in headers.
    void parse_func_tail(FuncDecl &fn) {
        fn.params = parse_params();
        if (at(TokenKind::LBrace)) {
            Span body_span = peek().span;
            fn.body = parse_block_body();
            if (opts.header) {
                diags.error(diag_code::header_body, body_span,
                            "definitions are not allowed in declaration "
                            "headers; declare '" +
                                fn.name + "' without a body");
                fn.body.reset();
            }
            match(TokenKind::Semicolon);
        } else {
            expect(TokenKind::Semicolon, "';' or a function body");
        }
    }

    ClassDecl parse_class() {
        Span sp = peek().span;
        expect(TokenKind::KwClass, "'class'");
        ClassDecl cls;
        cls.span = sp;
        cls.name = expect(TokenKind::Identifier, "a class name").text;
        if (match(TokenKind::Colon)) {
            do {
                ParentRef parent;
                parent.span = peek().span;
                // 'public'/'private' and 'virtual' may appear in either order.
                for (;;) {
                    if (match(TokenKind::KwPublic)) {
                        parent.is_public = true;
                    } else if (match(TokenKind::KwPrivate)) {
                        parent.is_public = false;
                    } else if (match(TokenKind::KwVirtual)) {
                        parent.is_virtual = true;
                    } else {
                        break;
                    }
                }
                parent.name =
                    expect(TokenKind::Identifier, "a parent class name").text;
                cls.parents.push_back(std::move(parent));
            } while (match(TokenKind::Comma));
        }
        expect(TokenKind::LBrace, "'{'");
        while (!at(TokenKind::RBrace) && !at(TokenKind::End)) {
            try {
                parse_member(cls);
            } catch (ParseError &) {
                sync_stmt();
            }
        }
        expect(TokenKind::RBrace, "'}'");
        match(TokenKind::Semicolon);

        for (size_t i = 0; i < cls.parents.size(); i++)
            for (size_t j = i + 1; j < cls.parents.size(); j++)
                if (cls.parents[i].name == cls.parents[j].name)
                    diags.error(diag_code::parse, cls.parents[j].span,
                                "duplicate parent '" + cls.parents[j].name +
                                    "' in class '" + cls.name + "'");
        return cls;
    }

    void parse_member(ClassDecl &cls) {
        Span sp = peek().span;
        bool is_virtual = match(TokenKind::KwVirtual);
        bool is_scalar = at_scalar_type();
        TypeRef type = parse_type();

        if (at(TokenKind::MmName) ||
            (at(TokenKind::Identifier) && peek(1).kind == TokenKind::LParen)) {
            const Token &name = advance();
            FuncDecl fn;
            fn.span = name.span;
            fn.name = name.text;
            fn.return_type = type;
            fn.member_of = cls.name;
            fn.declared_virtual = is_virtual;
            if (is_virtual && fn.is_multimethod())
                diags.error(diag_code::parse, sp,
                            "'virtual' cannot be applied to a multimethod "
                            "specialization");
            parse_func_tail(fn);
            cls.members.push_back(std::move(fn));
            return;
        }

        // Field list.
        if (is_virtual)
            diags.error(diag_code::parse, sp, "'virtual' is not valid on fields");
        if (!is_scalar) {
            diags.error(diag_code::parse, sp,
                        "fields must have scalar type (int, bool or float)");
            throw ParseError{};
        }
        do {
            const Token &name = expect(TokenKind::Identifier, "a field name");
            FieldDecl f;
            f.type = type.scalar;
            f.name = name.text;
            f.span = name.span;
            cls.fields.push_back(std::move(f));
        } while (match(TokenKind::Comma));
        expect(TokenKind::Semicolon, "';'");
    }

    void parse_top(Unit &unit) {
        if (at(TokenKind::Hash)) {
            Span sp = advance().span;
            const Token &kw = expect(TokenKind::Identifier, "'include'");
            if (kw.text != "include") {
                diags.error(diag_code::parse, kw.span,
                            "unknown directive '#" + kw.text + "'");
                throw ParseError{};
            }
            const Token &path = expect(TokenKind::StringLit, "a header path");
            unit.includes.push_back(path.text);
            (void)sp;
            return;
        }
        if (at(TokenKind::KwClass)) {
            unit.classes.push_back(parse_class());
            return;
        }
        if (at_type_start() || at(TokenKind::KwConst)) {
            if (match(TokenKind::KwConst))
                diags.error(diag_code::parse, peek().span,
                            "'const' is not valid on a return type");
            TypeRef type = parse_type();
            const Token *name = nullptr;
            if (at(TokenKind::MmName) || at(TokenKind::Identifier))
                name = &advance();
            else
                expect(TokenKind::Identifier, "a function name");
            FuncDecl fn;
            fn.span = name->span;
            fn.name = name->text;
            fn.return_type = type;
            parse_func_tail(fn);
            if (fn.is_multimethod())
                unit.multimethods.push_back(std::move(fn));
            else
                unit.functions.push_back(std::move(fn));
            return;
        }
        diags.error(diag_code::parse, peek().span,
                    std::string("expected a declaration before ") +
                        token_kind_name(peek().kind));
        throw ParseError{};
    }

    void sync_top() {
        while (!at(TokenKind::End)) {
            if (at(TokenKind::KwClass) || at(TokenKind::Hash))
                return;
            if (match(TokenKind::Semicolon))
                return;
            if (match(TokenKind::RBrace))
                return;
            advance();
        }
    }
};

} // namespace

ast::Unit parse_unit(const std::string &text, const std::string &file,
                     DiagnosticList &diags, const ParseOptions &opts) {
    std::vector<Token> toks = lex(text, file, diags);
    Parser p{toks, diags, opts, file};
    ast::Unit unit;
    unit.file = file;
    while (!p.at(TokenKind::End)) {
        try {
            p.parse_top(unit);
        } catch (ParseError &) {
            p.sync_top();
        }
    }
    return unit;
}

} // namespace oolang
