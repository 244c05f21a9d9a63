#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "codeprov/errors.hpp"

namespace codeprov::lexer {

enum class TokenKind {
    identifier,
    keyword,
    literal_string,
    literal_char,
    literal_number,
    punctuation,
    comment_line,
    comment_block,
    whitespace,
    other,
};

struct CodeToken {
    TokenKind kind;
    std::string lexeme;
    std::size_t offset = 0;  // byte offset into the source text
};

inline const std::unordered_set<std::string_view>& java_keywords() {
    static const std::unordered_set<std::string_view> kw = {
        "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char",
        "class", "const", "continue", "default", "do", "double", "else", "enum",
        "extends", "final", "finally", "float", "for", "goto", "if", "implements",
        "import", "instanceof", "int", "interface", "long", "native", "new",
        "package", "private", "protected", "public", "return", "short", "static",
        "strictfp", "super", "switch", "synchronized", "this", "throw", "throws",
        "transient", "try", "void", "volatile", "while", "true", "false", "null",
    };
    return kw;
}

inline bool is_identifier_start(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$' ||
           c >= 0x80;  // bytes of multi-byte UTF-8 sequences stay inside identifiers
}

inline bool is_identifier_part(unsigned char c) {
    return is_identifier_start(c) || (c >= '0' && c <= '9');
}

inline bool is_horizontal_ws(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v';
}

inline bool is_ws(char c) {
    return is_horizontal_ws(c) || c == '\n';
}

inline bool is_digit(unsigned char c) {
    return c >= '0' && c <= '9';
}

inline bool is_punctuation_char(char c) {
    switch (c) {
        case '(': case ')': case '{': case '}': case '[': case ']':
        case ';': case ',': case '.': case '@': case '=': case '+':
        case '-': case '*': case '/': case '%': case '&': case '|':
        case '^': case '!': case '<': case '>': case '?': case ':':
        case '~':
            return true;
        default:
            return false;
    }
}

namespace detail {

// Maximal-munch number scan, permissive in the pp-number style: accepts digits,
// letters (hex, suffixes, underscores in literals), '.', and a sign directly
// after an exponent marker. Round-trip fidelity is what matters here, not
// validating Java's numeric grammar.
inline std::size_t scan_number(std::string_view text, std::size_t pos) {
    std::size_t i = pos;
    if (text[i] == '.') ++i;  // ".5" style
    while (i < text.size()) {
        unsigned char c = text[i];
        if (is_digit(c) || c == '_' || c == '.' ||
            (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) {
            ++i;
            continue;
        }
        if ((c == '+' || c == '-') && i > pos) {
            char prev = text[i - 1];
            if (prev == 'e' || prev == 'E' || prev == 'p' || prev == 'P') {
                ++i;
                continue;
            }
        }
        break;
    }
    return i;
}

}  // namespace detail

// Lexes Java source into a token stream whose concatenated lexemes reproduce
// the input byte-for-byte. Comments and string/char literals are single
// tokens, so rewriting passes can treat them as opaque.
//
// Throws LexError for an unterminated block comment or an unterminated
// string/char literal (end of line or end of input before the closing quote).
inline std::vector<CodeToken> lex_java(std::string_view text) {
    std::vector<CodeToken> out;
    std::size_t i = 0;
    const std::size_t n = text.size();
    auto push = [&](TokenKind k, std::size_t start, std::size_t end) {
        out.push_back({k, std::string(text.substr(start, end - start)), start});
    };

    while (i < n) {
        const char c = text[i];
        const std::size_t start = i;

        if (is_ws(c)) {
            while (i < n && is_ws(text[i])) ++i;
            push(TokenKind::whitespace, start, i);
            continue;
        }
        if (c == '/' && i + 1 < n && text[i + 1] == '/') {
            i += 2;
            while (i < n && text[i] != '\n') ++i;
            push(TokenKind::comment_line, start, i);
            continue;
        }
        if (c == '/' && i + 1 < n && text[i + 1] == '*') {
            i += 2;
            while (true) {
                if (i + 1 >= n) throw LexError("unterminated block comment", start);
                if (text[i] == '*' && text[i + 1] == '/') {
                    i += 2;
                    break;
                }
                ++i;
            }
            push(TokenKind::comment_block, start, i);
            continue;
        }
        if (c == '"' || c == '\'') {
            const char quote = c;
            ++i;
            while (true) {
                if (i >= n || text[i] == '\n')
                    throw LexError(quote == '"' ? "unterminated string literal"
                                                : "unterminated character literal",
                                   start);
                if (text[i] == '\\') {
                    i += 2;  // escape sequence, second char may be anything
                    continue;
                }
                if (text[i] == quote) {
                    ++i;
                    break;
                }
                ++i;
            }
            push(quote == '"' ? TokenKind::literal_string : TokenKind::literal_char,
                 start, i);
            continue;
        }
        if (is_digit(c) || (c == '.' && i + 1 < n && is_digit(text[i + 1]))) {
            i = detail::scan_number(text, i);
            push(TokenKind::literal_number, start, i);
            continue;
        }
        if (is_identifier_start(c)) {
            while (i < n && is_identifier_part(text[i])) ++i;
            std::string_view word = text.substr(start, i - start);
            push(java_keywords().contains(word) ? TokenKind::keyword
                                                : TokenKind::identifier,
                 start, i);
            continue;
        }
        ++i;
        push(is_punctuation_char(c) ? TokenKind::punctuation : TokenKind::other,
             start, i);
    }
    return out;
}

inline std::string concat(const std::vector<CodeToken>& tokens) {
    std::string s;
    for (const auto& t : tokens) s += t.lexeme;
    return s;
}

}  // namespace codeprov::lexer
