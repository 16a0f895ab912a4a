#include "oolang/lexer.hpp"

#include <stdexcept>

#include <cctype>
#include <unordered_map>

namespace oolang {

namespace {

const std::unordered_map<std::string, TokenKind> &keywords() {
    static const std::unordered_map<std::string, TokenKind> map = {
        {"class", TokenKind::KwClass},     {"public", TokenKind::KwPublic},
        {"private", TokenKind::KwPrivate}, {"virtual", TokenKind::KwVirtual},
        {"const", TokenKind::KwConst},     {"int", TokenKind::KwInt},
        {"bool", TokenKind::KwBool},       {"float", TokenKind::KwFloat},
        {"void", TokenKind::KwVoid},       {"return", TokenKind::KwReturn},
        {"if", TokenKind::KwIf},           {"else", TokenKind::KwElse},
        {"while", TokenKind::KwWhile},     {"true", TokenKind::KwTrue},
        {"false", TokenKind::KwFalse},
    };
    return map;
}

struct Cursor {
    const std::string &text;
    const std::string &file;
    size_t pos = 0;
    int line = 1;
    int col = 1;

    bool done() const { return pos >= text.size(); }
    char peek(size_t ahead = 0) const {
        return pos + ahead < text.size() ? text[pos + ahead] : '\0';
    }
    char advance() {
        char c = text[pos++];
        if (c == '\n') {
            line++;
            col = 1;
        } else {
            col++;
        }
        return c;
    }
    Span here() const { return {file, line, col}; }
};

bool ident_start(char c) { return std::isalpha((unsigned char)c) || c == '_'; }
bool ident_char(char c) { return std::isalnum((unsigned char)c) || c == '_'; }

} // namespace

std::vector<Token> lex(const std::string &text, const std::string &file,
                       DiagnosticList &diags) {
    Cursor cur{text, file};
    std::vector<Token> out;

    auto push = [&](TokenKind k, Span sp, std::string tx = {}) {
        Token t;
        t.kind = k;
        t.span = sp;
        t.text = std::move(tx);
        out.push_back(std::move(t));
    };

    while (!cur.done()) {
        char c = cur.peek();
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            cur.advance();
            continue;
        }
        if (c == '/' && cur.peek(1) == '/') {
            while (!cur.done() && cur.peek() != '\n')
                cur.advance();
            continue;
        }
        if (c == '/' && cur.peek(1) == '*') {
            Span sp = cur.here();
            cur.advance();
            cur.advance();
            bool closed = false;
            while (!cur.done()) {
                if (cur.peek() == '*' && cur.peek(1) == '/') {
                    cur.advance();
                    cur.advance();
                    closed = true;
                    break;
                }
                cur.advance();
            }
            if (!closed)
                diags.error(diag_code::parse, sp, "unterminated block comment");
            continue;
        }

        Span sp = cur.here();
        if (ident_start(c)) {
            std::string name;
            while (!cur.done() && ident_char(cur.peek()))
                name += cur.advance();
            auto it = keywords().find(name);
            if (it != keywords().end())
                push(it->second, sp, name);
            else
                push(TokenKind::Identifier, sp, name);
            continue;
        }
        if (c == '@') {
            cur.advance();
            if (!ident_start(cur.peek())) {
                diags.error(diag_code::parse, sp,
                            "'@' must be followed by a multimethod name");
                continue;
            }
            std::string name = "@";
            while (!cur.done() && ident_char(cur.peek()))
                name += cur.advance();
            push(TokenKind::MmName, sp, name);
            continue;
        }
        if (std::isdigit((unsigned char)c)) {
            std::string num;
            while (!cur.done() && std::isdigit((unsigned char)cur.peek()))
                num += cur.advance();
            bool is_float = false;
            if (cur.peek() == '.' && std::isdigit((unsigned char)cur.peek(1))) {
                is_float = true;
                num += cur.advance();
                while (!cur.done() && std::isdigit((unsigned char)cur.peek()))
                    num += cur.advance();
            }
            Token t;
            t.span = sp;
            t.text = num;
            if (is_float) {
                t.kind = TokenKind::FloatLit;
                t.float_value = std::stod(num);
            } else {
                t.kind = TokenKind::IntLit;
                try {
                    t.int_value = std::stoll(num);
                } catch (const std::out_of_range &) {
                    diags.error(diag_code::parse, sp,
                                "integer literal out of range");
                    t.int_value = 0;
                }
            }
            out.push_back(std::move(t));
            continue;
        }
        if (c == '"') {
            cur.advance();
            std::string value;
            bool closed = false;
            while (!cur.done()) {
                char ch = cur.advance();
                if (ch == '"') {
                    closed = true;
                    break;
                }
                if (ch == '\n')
                    break;
                if (ch == '\\') {
                    char esc = cur.done() ? '\0' : cur.advance();
                    switch (esc) {
                    case 'n': value += '\n'; break;
                    case 't': value += '\t'; break;
                    case '\\': value += '\\'; break;
                    case '"': value += '"'; break;
                    case '0': value += '\0'; break;
                    default:
                        diags.error(diag_code::parse, sp,
                                    std::string("unknown escape '\\") + esc +
                                        "' in string literal");
                    }
                    continue;
                }
                value += ch;
            }
            if (!closed)
                diags.error(diag_code::parse, sp, "unterminated string literal");
            push(TokenKind::StringLit, sp, value);
            continue;
        }

        cur.advance();
        switch (c) {
        case '(': push(TokenKind::LParen, sp); break;
        case ')': push(TokenKind::RParen, sp); break;
        case '{': push(TokenKind::LBrace, sp); break;
        case '}': push(TokenKind::RBrace, sp); break;
        case ',': push(TokenKind::Comma, sp); break;
        case ';': push(TokenKind::Semicolon, sp); break;
        case ':': push(TokenKind::Colon, sp); break;
        case '.': push(TokenKind::Dot, sp); break;
        case '#': push(TokenKind::Hash, sp); break;
        case '+': push(TokenKind::Plus, sp); break;
        case '-': push(TokenKind::Minus, sp); break;
        case '*': push(TokenKind::Star, sp); break;
        case '/': push(TokenKind::Slash, sp); break;
        case '%': push(TokenKind::Percent, sp); break;
        case '&':
            if (cur.peek() == '&') {
                cur.advance();
                push(TokenKind::AndAnd, sp);
            } else {
                push(TokenKind::Amp, sp);
            }
            break;
        case '|':
            if (cur.peek() == '|') {
                cur.advance();
                push(TokenKind::OrOr, sp);
            } else {
                diags.error(diag_code::parse, sp, "unexpected character '|'");
            }
            break;
        case '=':
            if (cur.peek() == '=') {
                cur.advance();
                push(TokenKind::Eq, sp);
            } else {
                push(TokenKind::Assign, sp);
            }
            break;
        case '!':
            if (cur.peek() == '=') {
                cur.advance();
                push(TokenKind::Ne, sp);
            } else {
                push(TokenKind::Not, sp);
            }
            break;
        case '<':
            if (cur.peek() == '=') {
                cur.advance();
                push(TokenKind::Le, sp);
            } else {
                push(TokenKind::Lt, sp);
            }
            break;
        case '>':
            if (cur.peek() == '=') {
                cur.advance();
                push(TokenKind::Ge, sp);
            } else {
                push(TokenKind::Gt, sp);
            }
            break;
        default:
            diags.error(diag_code::parse, sp,
                        std::string("unexpected character '") + c + "'");
        }
    }

    Token end;
    end.kind = TokenKind::End;
    end.span = cur.here();
    out.push_back(std::move(end));
    return out;
}

const char *token_kind_name(TokenKind k) {
    switch (k) {
    case TokenKind::End: return "end of input";
    case TokenKind::Identifier: return "identifier";
    case TokenKind::MmName: return "multimethod name";
    case TokenKind::IntLit: return "integer literal";
    case TokenKind::FloatLit: return "float literal";
    case TokenKind::StringLit: return "string literal";
    case TokenKind::KwClass: return "'class'";
    case TokenKind::KwPublic: return "'public'";
    case TokenKind::KwPrivate: return "'private'";
    case TokenKind::KwVirtual: return "'virtual'";
    case TokenKind::KwConst: return "'const'";
    case TokenKind::KwInt: return "'int'";
    case TokenKind::KwBool: return "'bool'";
    case TokenKind::KwFloat: return "'float'";
    case TokenKind::KwVoid: return "'void'";
    case TokenKind::KwReturn: return "'return'";
    case TokenKind::KwIf: return "'if'";
    case TokenKind::KwElse: return "'else'";
    case TokenKind::KwWhile: return "'while'";
    case TokenKind::KwTrue: return "'true'";
    case TokenKind::KwFalse: return "'false'";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::LBrace: return "'{'";
    case TokenKind::RBrace: return "'}'";
    case TokenKind::Comma: return "','";
    case TokenKind::Semicolon: return "';'";
    case TokenKind::Colon: return "':'";
    case TokenKind::Dot: return "'.'";
    case TokenKind::Amp: return "'&'";
    case TokenKind::Hash: return "'#'";
    case TokenKind::Assign: return "'='";
    case TokenKind::Plus: return "'+'";
    case TokenKind::Minus: return "'-'";
    case TokenKind::Star: return "'*'";
    case TokenKind::Slash: return "'/'";
    case TokenKind::Percent: return "'%'";
    case TokenKind::Eq: return "'=='";
    case TokenKind::Ne: return "'!='";
    case TokenKind::Lt: return "'<'";
    case TokenKind::Gt: return "'>'";
    case TokenKind::Le: return "'<='";
    case TokenKind::Ge: return "'>='";
    case TokenKind::AndAnd: return "'&&'";
    case TokenKind::OrOr: return "'||'";
    case TokenKind::Not: return "'!'";
    }
    return "?";
}

} // namespace oolang
