#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ark/diag.hpp"

namespace ark {

enum class Tok {
    Ident,
    Int,
    Real,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Dot,
    Assign,   // =
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Lt,
    Gt,
    Le,       // <= (also the production-rule arrow)
    Ge,
    EqEq,
    NotEq,
    Arrow,    // ->
    End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    double real_value = 0;
    long long int_value = 0;
    Span span;
};

/// Tokenizes Ark source. Identifiers may contain interior hyphens when the
/// hyphen is immediately followed by a letter or underscore (names such as
/// `gmc-tln` and keywords such as `set-attr`); a binary minus in an
/// expression therefore needs surrounding whitespace or a digit operand.
/// `#` starts a comment running to end of line.
std::vector<Token> lex(std::string_view source, DiagnosticList& diags);

}  // namespace ark
