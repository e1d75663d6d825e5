#include "lexer.hpp"

#include <charconv>
#include <limits>

namespace streamforge::asp::detail {

namespace {

bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_word(char c) { return is_lower(c) || is_upper(c) || is_digit(c) || c == '_' || c == '\''; }

class Lexer {
public:
    explicit Lexer(std::string_view text) : src_(text) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_blank();
            if (pos_ >= src_.size()) {
                out.push_back(Token{Tok::End, {}, 0, pos_, pos_});
                return out;
            }
            out.push_back(next());
        }
    }

private:
    void skip_blank() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
                ++pos_;
            } else if (c == '%') {
                if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
                    auto close = src_.find("*%", pos_ + 2);
                    pos_ = close == std::string_view::npos ? src_.size() : close + 2;
                } else {
                    auto nl = src_.find('\n', pos_);
                    pos_ = nl == std::string_view::npos ? src_.size() : nl + 1;
                }
            } else {
                return;
            }
        }
    }

    Token make(Tok kind, std::size_t begin, std::string text = {}) {
        return Token{kind, std::move(text), 0, begin, pos_};
    }

    Token error(std::size_t begin, std::string message) {
        return Token{Tok::Error, std::move(message), 0, begin, pos_};
    }

    Token word(std::size_t begin) {
        while (pos_ < src_.size() && is_word(src_[pos_])) ++pos_;
        std::string w(src_.substr(begin, pos_ - begin));
        if (w == "_") return make(Tok::Anonymous, begin, w);
        std::size_t k = 0;
        while (k < w.size() && w[k] == '_') ++k;
        if (k < w.size() && is_upper(w[k])) return make(Tok::Variable, begin, w);
        if (k < w.size() && is_lower(w[k])) {
            if (w == "not") return make(Tok::Not, begin, w);
            return make(Tok::Identifier, begin, w);
        }
        return error(begin, "malformed identifier '" + w + "'");
    }

    Token number(std::size_t begin) {
        while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
        std::int64_t v = 0;
        auto digits = src_.substr(begin, pos_ - begin);
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
        if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
            return error(begin, "integer literal out of range");
        }
        Token t = make(Tok::Integer, begin, std::string(digits));
        t.value = v;
        return t;
    }

    Token string(std::size_t begin) {
        ++pos_;
        std::string contents;
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '"') {
                ++pos_;
                return make(Tok::String, begin, std::move(contents));
            }
            if (c == '\n') break;
            if (c == '\\' && pos_ + 1 < src_.size()) {
                char e = src_[pos_ + 1];
                contents += e == 'n' ? '\n' : e;
                pos_ += 2;
                continue;
            }
            contents += c;
            ++pos_;
        }
        return error(begin, "unterminated string literal");
    }

    Token hash(std::size_t begin) {
        ++pos_;
        std::size_t start = pos_;
        while (pos_ < src_.size() && is_word(src_[pos_])) ++pos_;
        std::string_view kw = src_.substr(start, pos_ - start);
        if (kw == "inf") return make(Tok::Infimum, begin, "#inf");
        if (kw == "sup") return make(Tok::Supremum, begin, "#sup");
        if (kw == "count" || kw == "sum" || kw == "min" || kw == "max") {
            return make(Tok::Aggregate, begin, std::string(kw));
        }
        if (kw == "const" || kw == "show") return make(Tok::Directive, begin, std::string(kw));
        return error(begin, "unsupported directive or keyword '#" + std::string(kw) + "'");
    }

    Token next() {
        std::size_t begin = pos_;
        char c = src_[pos_];
        if (is_lower(c) || is_upper(c) || c == '_') return word(begin);
        if (is_digit(c)) return number(begin);
        if (c == '"') return string(begin);
        if (c == '#') return hash(begin);

        auto peek = [&](char d) { return pos_ + 1 < src_.size() && src_[pos_ + 1] == d; };
        auto single = [&](Tok kind) {
            ++pos_;
            return make(kind, begin);
        };
        auto twin = [&](Tok kind) {
            pos_ += 2;
            return make(kind, begin);
        };

        switch (c) {
        case '(': return single(Tok::LParen);
        case ')': return single(Tok::RParen);
        case '{': return single(Tok::LBrace);
        case '}': return single(Tok::RBrace);
        case ',': return single(Tok::Comma);
        case ';': return single(Tok::Semicolon);
        case '+': return single(Tok::Plus);
        case '-': return single(Tok::Minus);
        case '/': return single(Tok::Slash);
        case ':':
            if (peek('-')) return twin(Tok::If);
            return single(Tok::Colon);
        case '.':
            if (peek('.')) {
                pos_ += 2;
                return error(begin, "intervals ('..') are not supported");
            }
            return single(Tok::Dot);
        case '*':
            if (peek('*')) {
                pos_ += 2;
                return error(begin, "exponentiation is not supported");
            }
            return single(Tok::Star);
        case '<':
            if (peek('=')) return twin(Tok::Le);
            return single(Tok::Lt);
        case '>':
            if (peek('=')) return twin(Tok::Ge);
            return single(Tok::Gt);
        case '=':
            if (peek('=')) return twin(Tok::Eq);
            return single(Tok::Eq);
        case '!':
            if (peek('=')) return twin(Tok::Ne);
            ++pos_;
            return error(begin, "unexpected character '!'");
        default:
            break;
        }
        ++pos_;
        // Swallow the rest of a multi-byte sequence so one character yields one error.
        while (pos_ < src_.size() && (static_cast<unsigned char>(src_[pos_]) & 0xC0) == 0x80) ++pos_;
        if (static_cast<unsigned char>(c) < 0x20 || static_cast<unsigned char>(c) >= 0x7F) {
            return error(begin, "unexpected character");
        }
        return error(begin, std::string("unexpected character '") + c + "'");
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<Token> tokenize(std::string_view text) { return Lexer(text).run(); }

std::size_t find_invalid_utf8(std::string_view text) {
    std::size_t i = 0;
    while (i < text.size()) {
        auto b = static_cast<unsigned char>(text[i]);
        std::size_t len = 0;
        std::uint32_t cp = 0;
        if (b < 0x80) {
            ++i;
            continue;
        } else if ((b & 0xE0) == 0xC0) {
            len = 2;
            cp = b & 0x1F;
        } else if ((b & 0xF0) == 0xE0) {
            len = 3;
            cp = b & 0x0F;
        } else if ((b & 0xF8) == 0xF0) {
            len = 4;
            cp = b & 0x07;
        } else {
            return i;
        }
        if (i + len > text.size()) return i;
        for (std::size_t k = 1; k < len; ++k) {
            auto cb = static_cast<unsigned char>(text[i + k]);
            if ((cb & 0xC0) != 0x80) return i;
            cp = (cp << 6) | (cb & 0x3F);
        }
        // Overlong encodings, surrogates, and values past U+10FFFF.
        if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
            (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF) {
            return i;
        }
        i += len;
    }
    return std::string_view::npos;
}

LineColumn line_column(std::string_view text, std::size_t offset) {
    LineColumn lc{1, 1};
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++lc.line;
            lc.column = 1;
        } else {
            ++lc.column;
        }
    }
    return lc;
}

}  // namespace streamforge::asp::detail
