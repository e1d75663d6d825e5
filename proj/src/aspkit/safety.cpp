#include "streamforge/asp_vars.hpp"

#include <algorithm>

namespace streamforge::asp {

namespace {

void push_unique(std::vector<std::string>& out, const std::string& v) {
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
}

bool bind_builtin(const BuiltinAtom& b, VariableSet& bound) {
    if (b.op != CompareOp::Eq) return false;
    VariableSet fresh;
    if (all_bound(b.rhs, bound)) binding_variables(b.lhs, bound, fresh);
    if (all_bound(b.lhs, bound)) binding_variables(b.rhs, bound, fresh);
    std::size_t before = bound.size();
    bound.insert(fresh.begin(), fresh.end());
    return bound.size() != before;
}

bool bind_symbolic(const SymbolicAtom& a, VariableSet& bound) {
    VariableSet fresh;
    for (const auto& arg : a.args) binding_variables(arg, bound, fresh);
    std::size_t before = bound.size();
    bound.insert(fresh.begin(), fresh.end());
    return bound.size() != before;
}

void collect_guard(const std::optional<Guard>& g, std::vector<std::string>& out) {
    if (g) collect_variables(g->term, out);
}

// Variables of the rule that live outside aggregate and choice elements.
std::vector<std::string> global_variables(const Rule& rule) {
    std::vector<std::string> out;
    if (rule.head) {
        if (const auto* a = std::get_if<SymbolicAtom>(&*rule.head)) {
            collect_variables(*a, out);
        } else {
            const auto& c = std::get<Choice>(*rule.head);
            collect_guard(c.left, out);
            collect_guard(c.right, out);
        }
    }
    for (const auto& lit : rule.body) {
        std::visit(
            [&](const auto& atom) {
                using A = std::decay_t<decltype(atom)>;
                if constexpr (std::is_same_v<A, SymbolicAtom>) {
                    collect_variables(atom, out);
                } else if constexpr (std::is_same_v<A, BuiltinAtom>) {
                    collect_variables(atom.lhs, out);
                    collect_variables(atom.rhs, out);
                } else {
                    collect_guard(atom.left, out);
                    collect_guard(atom.right, out);
                }
            },
            lit.atom);
    }
    return out;
}

VariableSet bound_globals(const Rule& rule) {
    VariableSet bound;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& lit : rule.body) {
            if (lit.negations != 0) continue;
            if (const auto* s = std::get_if<SymbolicAtom>(&lit.atom)) {
                changed |= bind_symbolic(*s, bound);
            } else if (const auto* b = std::get_if<BuiltinAtom>(&lit.atom)) {
                changed |= bind_builtin(*b, bound);
            }
        }
    }
    return bound;
}

void check_element(const std::vector<std::string>& element_vars, const std::vector<BasicLiteral>& condition,
                   const std::vector<std::string>& globals, const VariableSet& bound_outside,
                   std::vector<std::string>& unsafe) {
    VariableSet bound = bound_outside;
    bind_from_literals(condition, bound);
    for (const auto& v : element_vars) {
        bool global = std::find(globals.begin(), globals.end(), v) != globals.end();
        if (!global && !bound.count(v)) push_unique(unsafe, v);
    }
}

}  // namespace

void collect_variables(const Term& term, std::vector<std::string>& out) {
    if (term.kind == Term::Kind::Variable) {
        push_unique(out, term.name);
        return;
    }
    for (const auto& a : term.args) collect_variables(a, out);
}

void collect_variables(const SymbolicAtom& atom, std::vector<std::string>& out) {
    for (const auto& a : atom.args) collect_variables(a, out);
}

void collect_variables(const BasicLiteral& lit, std::vector<std::string>& out) {
    if (const auto* s = std::get_if<SymbolicAtom>(&lit.atom)) {
        collect_variables(*s, out);
    } else {
        const auto& b = std::get<BuiltinAtom>(lit.atom);
        collect_variables(b.lhs, out);
        collect_variables(b.rhs, out);
    }
}

bool all_bound(const Term& term, const VariableSet& bound) {
    if (term.kind == Term::Kind::Variable) return bound.count(term.name) > 0;
    if (term.kind == Term::Kind::Anonymous) return false;
    return std::all_of(term.args.begin(), term.args.end(), [&](const Term& a) { return all_bound(a, bound); });
}

void binding_variables(const Term& term, const VariableSet& bound, VariableSet& out) {
    switch (term.kind) {
    case Term::Kind::Variable:
        if (!bound.count(term.name)) out.insert(term.name);
        return;
    case Term::Kind::Function:
        for (const auto& a : term.args) binding_variables(a, bound, out);
        return;
    case Term::Kind::Negate: binding_variables(term.args[0], bound, out); return;
    case Term::Kind::Binary: {
        if (term.op != ArithOp::Add && term.op != ArithOp::Sub) return;
        bool lhs = all_bound(term.args[0], bound);
        bool rhs = all_bound(term.args[1], bound);
        if (lhs && !rhs) binding_variables(term.args[1], bound, out);
        if (rhs && !lhs) binding_variables(term.args[0], bound, out);
        return;
    }
    default: return;
    }
}

void bind_from_literals(const std::vector<BasicLiteral>& lits, VariableSet& bound) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& lit : lits) {
            if (lit.negations != 0) continue;
            if (const auto* s = std::get_if<SymbolicAtom>(&lit.atom)) {
                changed |= bind_symbolic(*s, bound);
            } else {
                changed |= bind_builtin(std::get<BuiltinAtom>(lit.atom), bound);
            }
        }
    }
}

std::vector<SafetyViolation> check_safety(const Rule& rule) {
    if (rule.is_directive()) return {};
    const auto globals = global_variables(rule);
    const auto bound = bound_globals(rule);

    std::vector<std::string> unsafe;
    for (const auto& v : globals) {
        if (!bound.count(v)) push_unique(unsafe, v);
    }

    if (rule.head) {
        if (const auto* c = std::get_if<Choice>(&*rule.head)) {
            for (const auto& e : c->elements) {
                std::vector<std::string> vars;
                collect_variables(e.atom, vars);
                for (const auto& lit : e.condition) collect_variables(lit, vars);
                check_element(vars, e.condition, globals, bound, unsafe);
            }
        }
    }
    for (const auto& lit : rule.body) {
        const auto* agg = std::get_if<AggregateAtom>(&lit.atom);
        if (!agg) continue;
        for (const auto& e : agg->elements) {
            std::vector<std::string> vars;
            for (const auto& t : e.tuple) collect_variables(t, vars);
            for (const auto& c : e.condition) collect_variables(c, vars);
            check_element(vars, e.condition, globals, bound, unsafe);
        }
    }

    std::vector<SafetyViolation> out;
    for (const auto& v : unsafe) {
        out.push_back(SafetyViolation{v, "variable '" + v + "' is unsafe: no positive occurrence in a body atom"});
    }
    return out;
}

}  // namespace streamforge::asp
