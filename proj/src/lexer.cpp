#include "ark/lexer.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>

namespace ark {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_cont(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

std::vector<Token> lex(std::string_view src, DiagnosticList& diags) {
    std::vector<Token> out;
    uint32_t line = 1, col = 1;
    size_t i = 0;
    const size_t n = src.size();

    auto span_at = [&](size_t begin, size_t end) {
        Span s;
        s.begin = static_cast<uint32_t>(begin);
        s.end = static_cast<uint32_t>(end);
        s.line = line;
        s.col = col;
        return s;
    };
    auto advance = [&](size_t count) {
        for (size_t k = 0; k < count && i < n; ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    auto push = [&](Tok kind, size_t begin, size_t len) {
        Token t;
        t.kind = kind;
        t.text = std::string(src.substr(begin, len));
        t.span = span_at(begin, begin + len);
        out.push_back(std::move(t));
        advance(len);
    };

    while (i < n) {
        char c = src[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
            continue;
        }
        if (c == '#') {
            while (i < n && src[i] != '\n') advance(1);
            continue;
        }
        if (ident_start(c)) {
            size_t j = i;
            while (j < n) {
                if (ident_cont(src[j])) {
                    ++j;
                } else if (src[j] == '-' && j + 1 < n && ident_start(src[j + 1])) {
                    j += 2;
                } else {
                    break;
                }
            }
            push(Tok::Ident, i, j - i);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            size_t j = i;
            bool is_real = false;
            while (j < n && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            if (j < n && src[j] == '.' &&
                !(j + 1 < n && ident_start(src[j + 1]))) {  // keep `1.foo` separate
                is_real = true;
                ++j;
                while (j < n && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            }
            if (j < n && (src[j] == 'e' || src[j] == 'E')) {
                size_t k = j + 1;
                if (k < n && (src[k] == '+' || src[k] == '-')) ++k;
                if (k < n && std::isdigit(static_cast<unsigned char>(src[k]))) {
                    is_real = true;
                    j = k;
                    while (j < n && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
                }
            }
            Token t;
            t.text = std::string(src.substr(i, j - i));
            t.span = span_at(i, j);
            if (is_real) {
                t.kind = Tok::Real;
                t.real_value = std::strtod(t.text.c_str(), nullptr);
            } else {
                t.kind = Tok::Int;
                t.int_value = std::strtoll(t.text.c_str(), nullptr, 10);
                t.real_value = static_cast<double>(t.int_value);
            }
            out.push_back(std::move(t));
            advance(j - i);
            continue;
        }
        auto two = (i + 1 < n) ? src.substr(i, 2) : std::string_view();
        if (two == "<=") {
            push(Tok::Le, i, 2);
        } else if (two == ">=") {
            push(Tok::Ge, i, 2);
        } else if (two == "==") {
            push(Tok::EqEq, i, 2);
        } else if (two == "!=") {
            push(Tok::NotEq, i, 2);
        } else if (two == "->") {
            push(Tok::Arrow, i, 2);
        } else {
            switch (c) {
                case '(': push(Tok::LParen, i, 1); break;
                case ')': push(Tok::RParen, i, 1); break;
                case '{': push(Tok::LBrace, i, 1); break;
                case '}': push(Tok::RBrace, i, 1); break;
                case '[': push(Tok::LBracket, i, 1); break;
                case ']': push(Tok::RBracket, i, 1); break;
                case ',': push(Tok::Comma, i, 1); break;
                case ':': push(Tok::Colon, i, 1); break;
                case '.': push(Tok::Dot, i, 1); break;
                case '=': push(Tok::Assign, i, 1); break;
                case '+': push(Tok::Plus, i, 1); break;
                case '-': push(Tok::Minus, i, 1); break;
                case '*': push(Tok::Star, i, 1); break;
                case '/': push(Tok::Slash, i, 1); break;
                case '^': push(Tok::Caret, i, 1); break;
                case '<': push(Tok::Lt, i, 1); break;
                case '>': push(Tok::Gt, i, 1); break;
                default:
                    diags.error(span_at(i, i + 1),
                                std::string("unexpected character '") + c + "'");
                    advance(1);
            }
        }
    }
    Token end;
    end.kind = Tok::End;
    end.span = span_at(n, n);
    out.push_back(std::move(end));
    return out;
}

}  // namespace ark
