#include "lexer.hpp"
#include "streamforge/aspkit.hpp"

#include <utility>

namespace streamforge::asp {

namespace {

using detail::Tok;
using detail::Token;

struct SyntaxError {
    std::size_t offset;
    std::string message;
    std::size_t token_index;
};

std::string describe(const Token& t) {
    switch (t.kind) {
    case Tok::End: return "end of input";
    case Tok::Identifier:
    case Tok::Variable: return "'" + t.text + "'";
    case Tok::Integer: return "integer " + t.text;
    case Tok::String: return "string literal";
    case Tok::Dot: return "'.'";
    case Tok::If: return "':-'";
    default: return "unexpected token";
    }
}

std::optional<CompareOp> compare_op(Tok kind) {
    switch (kind) {
    case Tok::Lt: return CompareOp::Lt;
    case Tok::Le: return CompareOp::Le;
    case Tok::Gt: return CompareOp::Gt;
    case Tok::Ge: return CompareOp::Ge;
    case Tok::Eq: return CompareOp::Eq;
    case Tok::Ne: return CompareOp::Ne;
    default: return std::nullopt;
    }
}

AggregateFunction aggregate_function(const std::string& name) {
    if (name == "sum") return AggregateFunction::Sum;
    if (name == "min") return AggregateFunction::Min;
    if (name == "max") return AggregateFunction::Max;
    return AggregateFunction::Count;
}

bool arithmetic_operand_ok(const Term& t) {
    switch (t.kind) {
    case Term::Kind::Integer:
    case Term::Kind::Variable:
    case Term::Kind::Binary:
    case Term::Kind::Negate: return true;
    default: return false;
    }
}

SymbolicAtom to_atom(Term t) {
    SymbolicAtom a;
    a.predicate = std::move(t.name);
    a.args = std::move(t.args);
    return a;
}

class Parser {
public:
    Parser(std::string_view text, std::vector<Token> tokens) : text_(text), toks_(std::move(tokens)) {}

    ParseResult run() {
        ParseResult result;
        while (peek().kind != Tok::End) {
            std::size_t start = pos_;
            try {
                Rule r = statement();
                r.span = SourceSpan{toks_[start].begin, toks_[pos_ - 1].end};
                result.rules.push_back(std::move(r));
            } catch (const SyntaxError& e) {
                auto lc = detail::line_column(text_, e.offset);
                result.errors.push_back(ParseError{lc.line, lc.column, e.message});
                recover(e.token_index);
            }
        }
        return result;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = pos_ + ahead;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }

    bool at(Tok kind) const { return peek().kind == kind; }

    const Token& advance() {
        const Token& t = peek();
        if (pos_ < toks_.size() - 1) ++pos_;
        return t;
    }

    [[noreturn]] void fail(const std::string& message) const {
        const Token& t = peek();
        std::string msg = t.kind == Tok::Error ? t.text : message + ", found " + describe(t);
        throw SyntaxError{t.begin, msg, pos_};
    }

    [[noreturn]] void fail_at(std::size_t offset, const std::string& message) const {
        throw SyntaxError{offset, message, pos_};
    }

    void expect(Tok kind, const char* what) {
        if (!at(kind)) fail(std::string("expected ") + what);
        advance();
    }

    // Skip to the next '.' at nesting depth zero, counted from the error.
    void recover(std::size_t from) {
        pos_ = from;
        int depth = 0;
        while (!at(Tok::End)) {
            Tok k = advance().kind;
            if (k == Tok::LParen || k == Tok::LBrace) {
                ++depth;
            } else if (k == Tok::RParen || k == Tok::RBrace) {
                if (depth > 0) --depth;
            } else if (k == Tok::Dot && depth == 0) {
                return;
            }
        }
    }

    Rule statement() {
        if (at(Tok::Directive)) return directive();
        Rule r;
        if (!at(Tok::If)) r.head = head();
        if (at(Tok::If)) {
            advance();
            if (!at(Tok::Dot)) r.body = body();
        } else if (!r.head) {
            fail("expected rule head or ':-'");
        }
        expect(Tok::Dot, "'.' at end of rule");
        return r;
    }

    Rule directive() {
        const Token& kw = advance();
        std::size_t begin = kw.begin;
        int depth = 0;
        while (!(at(Tok::Dot) && depth == 0)) {
            if (at(Tok::End)) fail("expected '.' at end of directive");
            if (at(Tok::Error)) fail("");
            Tok k = advance().kind;
            if (k == Tok::LParen || k == Tok::LBrace) ++depth;
            if (k == Tok::RParen || k == Tok::RBrace) --depth;
        }
        const Token& dot = advance();
        Rule r;
        r.directive = std::string(text_.substr(begin, dot.end - begin));
        return r;
    }

    Head head() {
        if (at(Tok::LBrace)) return choice(std::nullopt);
        std::size_t offset = peek().begin;
        Term t = term();
        if (at(Tok::LBrace)) return choice(Guard{std::move(t), CompareOp::Le});
        if (auto op = compare_op(peek().kind); op && peek(1).kind == Tok::LBrace) {
            advance();
            return choice(Guard{std::move(t), *op});
        }
        if (!t.is_atom_shaped()) fail_at(offset, "rule head must be a symbolic atom or a choice");
        return to_atom(std::move(t));
    }

    Choice choice(std::optional<Guard> left) {
        Choice c;
        c.left = std::move(left);
        expect(Tok::LBrace, "'{'");
        if (!at(Tok::RBrace)) {
            for (;;) {
                ChoiceElement e;
                std::size_t offset = peek().begin;
                Term t = term();
                if (!t.is_atom_shaped()) fail_at(offset, "choice element must be a symbolic atom");
                e.atom = to_atom(std::move(t));
                if (at(Tok::Colon)) {
                    advance();
                    e.condition = basic_literals();
                }
                c.elements.push_back(std::move(e));
                if (!at(Tok::Semicolon)) break;
                advance();
            }
        }
        expect(Tok::RBrace, "'}'");
        c.right = right_guard();
        return c;
    }

    std::optional<Guard> right_guard() {
        if (auto op = compare_op(peek().kind)) {
            advance();
            return Guard{term(), *op};
        }
        // `{ ... } 2` is shorthand for `<= 2`.
        switch (peek().kind) {
        case Tok::Integer: case Tok::Variable: case Tok::Identifier: case Tok::Minus:
        case Tok::LParen: case Tok::Infimum: case Tok::Supremum:
            return Guard{term(), CompareOp::Le};
        default:
            return std::nullopt;
        }
    }

    std::vector<Literal> body() {
        std::vector<Literal> lits;
        lits.push_back(literal());
        while (at(Tok::Comma) || at(Tok::Semicolon)) {
            advance();
            lits.push_back(literal());
        }
        return lits;
    }

    int negations() {
        int n = 0;
        while (at(Tok::Not)) {
            advance();
            ++n;
        }
        if (n > 2) fail("at most two 'not' are allowed");
        return n;
    }

    Literal literal() {
        Literal lit;
        lit.negations = negations();
        if (at(Tok::Aggregate)) {
            lit.atom = aggregate(std::nullopt);
            return lit;
        }
        std::size_t offset = peek().begin;
        Term t = term();
        if (auto op = compare_op(peek().kind)) {
            advance();
            if (at(Tok::Aggregate)) {
                lit.atom = aggregate(Guard{std::move(t), *op});
            } else {
                lit.atom = BuiltinAtom{std::move(t), *op, term()};
            }
            return lit;
        }
        if (at(Tok::Aggregate)) {
            lit.atom = aggregate(Guard{std::move(t), CompareOp::Le});
            return lit;
        }
        if (!t.is_atom_shaped()) fail_at(offset, "expected a literal");
        lit.atom = to_atom(std::move(t));
        return lit;
    }

    AggregateAtom aggregate(std::optional<Guard> left) {
        AggregateAtom agg;
        agg.left = std::move(left);
        agg.function = aggregate_function(advance().text);
        expect(Tok::LBrace, "'{' after aggregate function");
        if (!at(Tok::RBrace)) {
            for (;;) {
                AggregateElement e;
                if (!at(Tok::Colon)) {
                    e.tuple.push_back(term());
                    while (at(Tok::Comma)) {
                        advance();
                        e.tuple.push_back(term());
                    }
                }
                if (at(Tok::Colon)) {
                    advance();
                    e.condition = basic_literals();
                }
                agg.elements.push_back(std::move(e));
                if (!at(Tok::Semicolon)) break;
                advance();
            }
        }
        expect(Tok::RBrace, "'}'");
        agg.right = right_guard();
        return agg;
    }

    std::vector<BasicLiteral> basic_literals() {
        std::vector<BasicLiteral> out;
        out.push_back(basic_literal());
        while (at(Tok::Comma)) {
            advance();
            out.push_back(basic_literal());
        }
        return out;
    }

    BasicLiteral basic_literal() {
        BasicLiteral lit;
        lit.negations = negations();
        if (at(Tok::Aggregate)) fail("aggregates cannot be nested in conditions");
        std::size_t offset = peek().begin;
        Term t = term();
        if (auto op = compare_op(peek().kind)) {
            advance();
            lit.atom = BuiltinAtom{std::move(t), *op, term()};
            return lit;
        }
        if (!t.is_atom_shaped()) fail_at(offset, "expected a literal");
        lit.atom = to_atom(std::move(t));
        return lit;
    }

    Term term() { return additive(); }

    Term arith(ArithOp op, Term lhs, Term rhs, std::size_t offset) {
        if (!arithmetic_operand_ok(lhs) || !arithmetic_operand_ok(rhs)) {
            fail_at(offset, "arithmetic terms may only contain integers and variables");
        }
        return Term::binary(op, std::move(lhs), std::move(rhs));
    }

    Term additive() {
        Term lhs = multiplicative();
        while (at(Tok::Plus) || at(Tok::Minus)) {
            std::size_t offset = peek().begin;
            ArithOp op = advance().kind == Tok::Plus ? ArithOp::Add : ArithOp::Sub;
            Term rhs = multiplicative();
            lhs = arith(op, std::move(lhs), std::move(rhs), offset);
        }
        return lhs;
    }

    Term multiplicative() {
        Term lhs = unary();
        while (at(Tok::Star) || at(Tok::Slash)) {
            std::size_t offset = peek().begin;
            ArithOp op = advance().kind == Tok::Star ? ArithOp::Mul : ArithOp::Div;
            Term rhs = unary();
            lhs = arith(op, std::move(lhs), std::move(rhs), offset);
        }
        return lhs;
    }

    Term unary() {
        if (at(Tok::Minus)) {
            std::size_t offset = advance().begin;
            Term operand = unary();
            if (operand.kind == Term::Kind::Integer) {
                operand.integer = -operand.integer;
                return operand;
            }
            if (!arithmetic_operand_ok(operand)) {
                fail_at(offset, "arithmetic terms may only contain integers and variables");
            }
            return Term::negate(std::move(operand));
        }
        return primary();
    }

    Term primary() {
        const Token& t = peek();
        switch (t.kind) {
        case Tok::Integer: advance(); return Term::number(t.value);
        case Tok::String: advance(); return Term::string(t.text);
        case Tok::Infimum: advance(); return Term::infimum();
        case Tok::Supremum: advance(); return Term::supremum();
        case Tok::Variable: advance(); return Term::variable(t.text);
        case Tok::Anonymous: advance(); return Term::anonymous();
        case Tok::Identifier: {
            std::string name = t.text;
            advance();
            if (!at(Tok::LParen)) return Term::symbol(std::move(name));
            advance();
            std::vector<Term> args;
            if (!at(Tok::RParen)) {
                args.push_back(term());
                while (at(Tok::Comma)) {
                    advance();
                    args.push_back(term());
                }
            }
            expect(Tok::RParen, "')'");
            if (args.empty()) return Term::symbol(std::move(name));
            return Term::function(std::move(name), std::move(args));
        }
        case Tok::LParen: {
            advance();
            Term inner = term();
            if (at(Tok::Comma)) fail("tuples are not supported");
            expect(Tok::RParen, "')'");
            return inner;
        }
        default: fail("expected a term");
        }
    }

    std::string_view text_;
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

}  // namespace

ParseResult parse_program(std::string_view text) {
    ParseResult result = Parser(text, detail::tokenize(text)).run();
    if (auto bad = detail::find_invalid_utf8(text); bad != std::string_view::npos) {
        auto lc = detail::line_column(text, bad);
        result.errors.insert(result.errors.begin(), ParseError{lc.line, lc.column, "invalid UTF-8 sequence"});
    }
    return result;
}

}  // namespace streamforge::asp
