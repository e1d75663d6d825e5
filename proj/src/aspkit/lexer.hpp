#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace streamforge::asp::detail {

enum class Tok {
    Identifier,
    Variable,
    Anonymous,
    Integer,
    String,
    Infimum,
    Supremum,
    Aggregate,   // #count #sum #min #max
    Directive,   // #const #show
    Not,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semicolon,
    Colon,
    If,
    Dot,
    Plus,
    Minus,
    Star,
    Slash,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    End,
    Error
};

struct Token {
    Tok kind = Tok::End;
    std::string text;        // identifier/variable name, string contents, or error message
    std::int64_t value = 0;  // integer literal
    std::size_t begin = 0;
    std::size_t end = 0;
};

std::vector<Token> tokenize(std::string_view text);

// Byte offset of the first malformed UTF-8 sequence, or npos.
std::size_t find_invalid_utf8(std::string_view text);

struct LineColumn {
    std::size_t line;
    std::size_t column;
};

LineColumn line_column(std::string_view text, std::size_t offset);

}  // namespace streamforge::asp::detail
