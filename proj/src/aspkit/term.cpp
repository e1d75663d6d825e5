#include "streamforge/aspkit.hpp"

#include <algorithm>

namespace streamforge::asp {

std::string_view to_string(CompareOp op) {
    switch (op) {
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Ge: return ">=";
    case CompareOp::Gt: return ">";
    case CompareOp::Eq: return "=";
    case CompareOp::Ne: return "!=";
    }
    return "?";
}

std::string_view to_string(AggregateFunction fn) {
    switch (fn) {
    case AggregateFunction::Count: return "#count";
    case AggregateFunction::Sum: return "#sum";
    case AggregateFunction::Min: return "#min";
    case AggregateFunction::Max: return "#max";
    }
    return "#count";
}

Term Term::number(std::int64_t v) {
    Term t;
    t.kind = Kind::Integer;
    t.integer = v;
    return t;
}

Term Term::symbol(std::string n) {
    Term t;
    t.kind = Kind::Symbol;
    t.name = std::move(n);
    return t;
}

Term Term::string(std::string s) {
    Term t;
    t.kind = Kind::String;
    t.name = std::move(s);
    return t;
}

Term Term::variable(std::string n) {
    Term t;
    t.kind = Kind::Variable;
    t.name = std::move(n);
    return t;
}

Term Term::anonymous() {
    Term t;
    t.kind = Kind::Anonymous;
    t.name = "_";
    return t;
}

Term Term::infimum() {
    Term t;
    t.kind = Kind::Infimum;
    return t;
}

Term Term::supremum() {
    Term t;
    t.kind = Kind::Supremum;
    return t;
}

Term Term::function(std::string n, std::vector<Term> args) {
    Term t;
    t.kind = Kind::Function;
    t.name = std::move(n);
    t.args = std::move(args);
    return t;
}

Term Term::binary(ArithOp op, Term lhs, Term rhs) {
    Term t;
    t.kind = Kind::Binary;
    t.op = op;
    t.args.push_back(std::move(lhs));
    t.args.push_back(std::move(rhs));
    return t;
}

Term Term::negate(Term operand) {
    Term t;
    t.kind = Kind::Negate;
    t.args.push_back(std::move(operand));
    return t;
}

bool Term::is_ground() const {
    if (kind == Kind::Variable || kind == Kind::Anonymous) return false;
    return std::all_of(args.begin(), args.end(), [](const Term& a) { return a.is_ground(); });
}

Guard AggregateAtom::effective_left() const { return left ? *left : Guard{Term::infimum(), CompareOp::Le}; }

Guard AggregateAtom::effective_right() const { return right ? *right : Guard{Term::supremum(), CompareOp::Le}; }

bool Rule::is_fact() const {
    return !is_directive() && head && std::holds_alternative<SymbolicAtom>(*head) && body.empty();
}

}  // namespace streamforge::asp
