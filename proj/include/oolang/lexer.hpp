#pragma once

#include <string>
#include <vector>

#include "oolang/diag.hpp"
#include "oolang/source.hpp"

namespace oolang {

enum class TokenKind {
    End,
    Identifier,
    MmName, // @identifier
    IntLit,
    FloatLit,
    StringLit,
    // keywords
    KwClass,
    KwPublic,
    KwPrivate,
    KwVirtual,
    KwConst,
    KwInt,
    KwBool,
    KwFloat,
    KwVoid,
    KwReturn,
    KwIf,
    KwElse,
    KwWhile,
    KwTrue,
    KwFalse,
    // punctuation
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semicolon,
    Colon,
    Dot,
    Amp,
    Hash,
    Assign,
    // operators
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
    AndAnd,
    OrOr,
    Not,
};

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;    // identifier name, string value (unescaped), ...
    long long int_value = 0;
    double float_value = 0;
    Span span;
};

// Tokenizes the whole input. Lexical errors are reported and the offending
// character skipped, so the parser always sees a terminated stream.
std::vector<Token> lex(const std::string &text, const std::string &file,
                       DiagnosticList &diags);

const char *token_kind_name(TokenKind k);

} // namespace oolang
