#pragma once

// ASP program text in the Clingo fragment used by the pipeline: terms,
// symbolic/builtin/aggregate atoms, choices, normal rules and integrity
// constraints. Directives (#const, #show) are kept as opaque statements.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace streamforge::asp {

struct SourceSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
};

enum class ArithOp : char { Add = '+', Sub = '-', Mul = '*', Div = '/' };
enum class CompareOp { Lt, Le, Ge, Gt, Eq, Ne };
enum class AggregateFunction { Count, Sum, Min, Max };

std::string_view to_string(CompareOp op);
std::string_view to_string(AggregateFunction fn);

struct Term {
    enum class Kind {
        Integer,
        Symbol,     // lowercase constant, also a zero-arity function
        String,
        Infimum,
        Supremum,
        Variable,
        Anonymous,
        Function,
        Binary,     // args = {lhs, rhs}
        Negate      // args = {operand}
    };

    Kind kind = Kind::Integer;
    std::int64_t integer = 0;
    std::string name;        // symbol, variable, function name, or string contents
    ArithOp op = ArithOp::Add;
    std::vector<Term> args;

    static Term number(std::int64_t v);
    static Term symbol(std::string n);
    static Term string(std::string s);
    static Term variable(std::string n);
    static Term anonymous();
    static Term infimum();
    static Term supremum();
    static Term function(std::string n, std::vector<Term> args);
    static Term binary(ArithOp op, Term lhs, Term rhs);
    static Term negate(Term operand);

    bool is_arithmetic() const { return kind == Kind::Binary || kind == Kind::Negate; }
    // Constant or function term, i.e. something that can stand for a symbolic atom.
    bool is_atom_shaped() const { return kind == Kind::Symbol || kind == Kind::Function; }
    bool is_ground() const;

    friend bool operator==(const Term&, const Term&) = default;
};

struct SymbolicAtom {
    std::string predicate;
    std::vector<Term> args;

    friend bool operator==(const SymbolicAtom&, const SymbolicAtom&) = default;
};

struct BuiltinAtom {
    Term lhs;
    CompareOp op = CompareOp::Eq;
    Term rhs;

    friend bool operator==(const BuiltinAtom&, const BuiltinAtom&) = default;
};

// `term op` on the left of an aggregate/choice, `op term` on the right.
struct Guard {
    Term term;
    CompareOp op = CompareOp::Le;

    friend bool operator==(const Guard&, const Guard&) = default;
};

struct BasicLiteral {
    int negations = 0;
    std::variant<SymbolicAtom, BuiltinAtom> atom;

    friend bool operator==(const BasicLiteral&, const BasicLiteral&) = default;
};

struct AggregateElement {
    std::vector<Term> tuple;
    std::vector<BasicLiteral> condition;

    friend bool operator==(const AggregateElement&, const AggregateElement&) = default;
};

struct AggregateAtom {
    std::optional<Guard> left;
    AggregateFunction function = AggregateFunction::Count;
    std::vector<AggregateElement> elements;
    std::optional<Guard> right;

    // Omitted guards read as `#inf <=` and `<= #sup`.
    Guard effective_left() const;
    Guard effective_right() const;

    friend bool operator==(const AggregateAtom&, const AggregateAtom&) = default;
};

using Atom = std::variant<SymbolicAtom, BuiltinAtom, AggregateAtom>;

struct Literal {
    int negations = 0;   // 0, 1 or 2
    Atom atom;

    friend bool operator==(const Literal&, const Literal&) = default;
};

struct ChoiceElement {
    SymbolicAtom atom;
    std::vector<BasicLiteral> condition;

    friend bool operator==(const ChoiceElement&, const ChoiceElement&) = default;
};

struct Choice {
    std::optional<Guard> left;
    std::vector<ChoiceElement> elements;
    std::optional<Guard> right;

    bool bounded() const { return left.has_value() || right.has_value(); }

    friend bool operator==(const Choice&, const Choice&) = default;
};

using Head = std::variant<SymbolicAtom, Choice>;

struct Rule {
    std::optional<Head> head;
    std::vector<Literal> body;
    std::string directive;   // non-empty for #const/#show pass-through statements
    SourceSpan span;

    bool is_directive() const { return !directive.empty(); }
    bool is_constraint() const { return !is_directive() && !head.has_value(); }
    bool is_fact() const;

    // Structural equality; the source span is not part of a rule's identity.
    friend bool operator==(const Rule& a, const Rule& b) {
        return a.head == b.head && a.body == b.body && a.directive == b.directive;
    }
};

struct ParseError {
    std::size_t line = 0;     // 1-based
    std::size_t column = 0;   // 1-based, in bytes
    std::string message;
};

struct ParseResult {
    std::vector<Rule> rules;
    std::vector<ParseError> errors;

    bool ok() const { return errors.empty(); }
};

// Never throws on malformed input; each bad statement yields one error and
// parsing resumes after the next top-level '.'.
ParseResult parse_program(std::string_view text);

struct SafetyViolation {
    std::string variable;
    std::string message;
};

// One violation per variable lacking a binding occurrence. `_` never binds
// and is never reported.
std::vector<SafetyViolation> check_safety(const Rule& rule);

// Canonical printer: single space after commas and `:-`, no line wrapping.
std::string format_term(const Term& term);
std::string format_atom(const SymbolicAtom& atom);
std::string format_literal(const Literal& literal);
std::string format_rule(const Rule& rule);
std::string format_program(std::span<const Rule> rules);

enum class SnippetKind { ConstraintOnly, RulesAndConstraints, CommentOnly, Unparseable };

std::string_view to_string(SnippetKind kind);

struct Snippet {
    std::string id;
    std::string raw_text;
    std::vector<Rule> rules;
    std::vector<ParseError> errors;
    SnippetKind kind = SnippetKind::CommentOnly;
};

Snippet classify_snippet(std::string_view text, std::string id = {});

class CompositionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Encoding text followed by one `% --- streamliner <id> ---` marker line and
// the raw text of each snippet. Snippets without an id are numbered from 1.
std::string compose(std::string_view encoding, std::span<const Snippet> snippets);

}  // namespace streamforge::asp
