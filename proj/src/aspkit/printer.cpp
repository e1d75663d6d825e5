#include "streamforge/aspkit.hpp"

namespace streamforge::asp {

namespace {

int precedence(const Term& t) {
    if (t.kind == Term::Kind::Binary) return (t.op == ArithOp::Add || t.op == ArithOp::Sub) ? 1 : 2;
    if (t.kind == Term::Kind::Negate) return 3;
    if (t.kind == Term::Kind::Integer && t.integer < 0) return 3;
    return 4;
}

void write_term(std::string& out, const Term& t);

void write_operand(std::string& out, const Term& t, bool parens) {
    if (parens) out += '(';
    write_term(out, t);
    if (parens) out += ')';
}

void write_args(std::string& out, const std::vector<Term>& args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out += ", ";
        write_term(out, args[i]);
    }
}

void write_term(std::string& out, const Term& t) {
    switch (t.kind) {
    case Term::Kind::Integer: out += std::to_string(t.integer); break;
    case Term::Kind::Symbol:
    case Term::Kind::Variable: out += t.name; break;
    case Term::Kind::Anonymous: out += '_'; break;
    case Term::Kind::Infimum: out += "#inf"; break;
    case Term::Kind::Supremum: out += "#sup"; break;
    case Term::Kind::String:
        out += '"';
        for (char c : t.name) {
            if (c == '"' || c == '\\') out += '\\';
            if (c == '\n') {
                out += "\\n";
                continue;
            }
            out += c;
        }
        out += '"';
        break;
    case Term::Kind::Function:
        out += t.name;
        out += '(';
        write_args(out, t.args);
        out += ')';
        break;
    case Term::Kind::Binary: {
        int p = precedence(t);
        // Negative literals are wrapped so `X-(-1)` does not print as `X--1`.
        write_operand(out, t.args[0], precedence(t.args[0]) < p);
        out += static_cast<char>(t.op);
        write_operand(out, t.args[1], precedence(t.args[1]) <= p || precedence(t.args[1]) == 3);
        break;
    }
    case Term::Kind::Negate: {
        const Term& inner = t.args[0];
        bool plain = inner.kind == Term::Kind::Variable || (inner.kind == Term::Kind::Integer && inner.integer >= 0);
        out += '-';
        write_operand(out, inner, !plain);
        break;
    }
    }
}

void write_symbolic(std::string& out, const SymbolicAtom& a) {
    out += a.predicate;
    if (!a.args.empty()) {
        out += '(';
        write_args(out, a.args);
        out += ')';
    }
}

void write_builtin(std::string& out, const BuiltinAtom& b) {
    write_term(out, b.lhs);
    out += ' ';
    out += to_string(b.op);
    out += ' ';
    write_term(out, b.rhs);
}

void write_basic(std::string& out, const BasicLiteral& lit) {
    for (int i = 0; i < lit.negations; ++i) out += "not ";
    if (const auto* s = std::get_if<SymbolicAtom>(&lit.atom)) {
        write_symbolic(out, *s);
    } else {
        write_builtin(out, std::get<BuiltinAtom>(lit.atom));
    }
}

void write_condition(std::string& out, const std::vector<BasicLiteral>& cond) {
    for (std::size_t i = 0; i < cond.size(); ++i) {
        if (i) out += ", ";
        write_basic(out, cond[i]);
    }
}

void write_left(std::string& out, const std::optional<Guard>& g) {
    if (!g) return;
    write_term(out, g->term);
    out += ' ';
    out += to_string(g->op);
    out += ' ';
}

void write_right(std::string& out, const std::optional<Guard>& g) {
    if (!g) return;
    out += ' ';
    out += to_string(g->op);
    out += ' ';
    write_term(out, g->term);
}

void write_aggregate(std::string& out, const AggregateAtom& agg) {
    write_left(out, agg.left);
    out += to_string(agg.function);
    out += '{';
    for (std::size_t i = 0; i < agg.elements.size(); ++i) {
        if (i) out += "; ";
        const auto& e = agg.elements[i];
        write_args(out, e.tuple);
        if (!e.condition.empty()) {
            out += ": ";
            write_condition(out, e.condition);
        }
    }
    out += '}';
    write_right(out, agg.right);
}

void write_choice(std::string& out, const Choice& c) {
    write_left(out, c.left);
    out += '{';
    for (std::size_t i = 0; i < c.elements.size(); ++i) {
        if (i) out += "; ";
        write_symbolic(out, c.elements[i].atom);
        if (!c.elements[i].condition.empty()) {
            out += ": ";
            write_condition(out, c.elements[i].condition);
        }
    }
    out += '}';
    write_right(out, c.right);
}

}  // namespace

std::string format_term(const Term& term) {
    std::string out;
    write_term(out, term);
    return out;
}

std::string format_atom(const SymbolicAtom& atom) {
    std::string out;
    write_symbolic(out, atom);
    return out;
}

std::string format_literal(const Literal& lit) {
    std::string out;
    for (int i = 0; i < lit.negations; ++i) out += "not ";
    std::visit(
        [&](const auto& a) {
            using A = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<A, SymbolicAtom>) {
                write_symbolic(out, a);
            } else if constexpr (std::is_same_v<A, BuiltinAtom>) {
                write_builtin(out, a);
            } else {
                write_aggregate(out, a);
            }
        },
        lit.atom);
    return out;
}

std::string format_rule(const Rule& rule) {
    if (rule.is_directive()) return rule.directive;
    std::string out;
    if (rule.head) {
        if (const auto* a = std::get_if<SymbolicAtom>(&*rule.head)) {
            write_symbolic(out, *a);
        } else {
            write_choice(out, std::get<Choice>(*rule.head));
        }
        if (!rule.body.empty()) out += " :- ";
    } else {
        out += rule.body.empty() ? ":-" : ":- ";
    }
    for (std::size_t i = 0; i < rule.body.size(); ++i) {
        if (i) out += ", ";
        out += format_literal(rule.body[i]);
    }
    out += '.';
    return out;
}

std::string format_program(std::span<const Rule> rules) {
    std::string out;
    for (const auto& r : rules) {
        out += format_rule(r);
        out += '\n';
    }
    return out;
}

}  // namespace streamforge::asp
