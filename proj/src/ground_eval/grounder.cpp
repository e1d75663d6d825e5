#include "streamforge/asp_vars.hpp"
#include "streamforge/ground_eval.hpp"

#include <algorithm>
#include <map>
#include <regex>
#include <unordered_set>

namespace streamforge::ground {

using asp::ArithOp;
using asp::BuiltinAtom;
using asp::CompareOp;
using asp::SymbolicAtom;
using asp::Term;

std::strong_ordering operator<=>(const Value& a, const Value& b) {
    if (a.kind != b.kind) return a.kind <=> b.kind;
    if (a.kind == Value::Kind::Integer) return a.integer <=> b.integer;
    return a.text.compare(b.text) <=> 0;
}

std::strong_ordering operator<=>(const GroundAtom& a, const GroundAtom& b) {
    if (a.auxiliary != b.auxiliary) return a.auxiliary <=> b.auxiliary;
    if (auto c = a.predicate.compare(b.predicate) <=> 0; c != 0) return c;
    if (a.args.size() != b.args.size()) return a.args.size() <=> b.args.size();
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (auto c = a.args[i] <=> b.args[i]; c != 0) return c;
    }
    return std::strong_ordering::equal;
}

std::string format_value(const Value& v) {
    switch (v.kind) {
    case Value::Kind::Infimum: return "#inf";
    case Value::Kind::Supremum: return "#sup";
    case Value::Kind::Integer: return std::to_string(v.integer);
    case Value::Kind::Symbol: return v.text;
    case Value::Kind::String: return "\"" + v.text + "\"";
    }
    return "?";
}

std::string format_ground_atom(const GroundAtom& atom) {
    std::string out = atom.predicate;
    if (!atom.args.empty()) {
        out += '(';
        for (std::size_t i = 0; i < atom.args.size(); ++i) {
            if (i) out += ',';
            out += format_value(atom.args[i]);
        }
        out += ')';
    }
    if (atom.auxiliary) out += '\'';
    return out;
}

std::optional<std::size_t> GroundProgram::find(const GroundAtom& atom) const {
    auto it = std::find(atoms.begin(), atoms.end(), atom);
    if (it == atoms.end()) return std::nullopt;
    return static_cast<std::size_t>(it - atoms.begin());
}

std::size_t GroundProgram::visible_atom_count() const {
    return static_cast<std::size_t>(
        std::count_if(atoms.begin(), atoms.end(), [](const GroundAtom& a) { return !a.auxiliary; }));
}

std::string GroundProgram::format_rule(const GroundRule& rule) const {
    std::string out;
    if (rule.head) out += format_ground_atom(atoms[*rule.head]);
    std::vector<std::string> body;
    for (auto i : rule.positive) body.push_back(format_ground_atom(atoms[i]));
    for (auto i : rule.negative) body.push_back("not " + format_ground_atom(atoms[i]));
    for (auto i : rule.double_negative) body.push_back("not not " + format_ground_atom(atoms[i]));
    if (!body.empty() || !rule.head) out += rule.head ? " :- " : ":- ";
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (i) out += ", ";
        out += body[i];
    }
    out += '.';
    return out;
}

std::string format_interpretation(const Interpretation& model) {
    std::string out = "{";
    bool first = true;
    for (const auto& a : model) {
        if (!first) out += ", ";
        first = false;
        out += format_ground_atom(a);
    }
    return out + "}";
}

namespace {

using Substitution = std::map<std::string, Value>;
using Constants = std::map<std::string, Value>;

struct Context {
    Constants constants;
};

std::optional<Value> evaluate(const Term& t, const Substitution& s, const Context& ctx) {
    switch (t.kind) {
    case Term::Kind::Integer: return Value::number(t.integer);
    case Term::Kind::Symbol: {
        if (auto it = ctx.constants.find(t.name); it != ctx.constants.end()) return it->second;
        return Value::symbol(t.name);
    }
    case Term::Kind::String: return Value{Value::Kind::String, 0, t.name};
    case Term::Kind::Infimum: return Value{Value::Kind::Infimum, 0, {}};
    case Term::Kind::Supremum: return Value{Value::Kind::Supremum, 0, {}};
    case Term::Kind::Variable: {
        auto it = s.find(t.name);
        if (it == s.end()) return std::nullopt;
        return it->second;
    }
    case Term::Kind::Negate: {
        auto v = evaluate(t.args[0], s, ctx);
        if (!v || v->kind != Value::Kind::Integer) return std::nullopt;
        return Value::number(-v->integer);
    }
    case Term::Kind::Binary: {
        auto l = evaluate(t.args[0], s, ctx);
        auto r = evaluate(t.args[1], s, ctx);
        if (!l || !r || l->kind != Value::Kind::Integer || r->kind != Value::Kind::Integer) return std::nullopt;
        switch (t.op) {
        case ArithOp::Add: return Value::number(l->integer + r->integer);
        case ArithOp::Sub: return Value::number(l->integer - r->integer);
        case ArithOp::Mul: return Value::number(l->integer * r->integer);
        case ArithOp::Div:
            if (r->integer == 0) return std::nullopt;
            return Value::number(l->integer / r->integer);
        }
        return std::nullopt;
    }
    default: return std::nullopt;
    }
}

bool bound_under(const Term& t, const Substitution& s) {
    if (t.kind == Term::Kind::Variable) return s.count(t.name) > 0;
    if (t.kind == Term::Kind::Anonymous) return false;
    return std::all_of(t.args.begin(), t.args.end(), [&](const Term& a) { return bound_under(a, s); });
}

// Unifies a (possibly non-ground) term with a ground value, solving simple
// `X+c` / `X-c` / `-X` patterns for the unknown variable.
bool match(const Term& t, const Value& v, Substitution& s, const Context& ctx) {
    switch (t.kind) {
    case Term::Kind::Anonymous: return true;
    case Term::Kind::Variable: {
        auto [it, inserted] = s.emplace(t.name, v);
        return inserted || it->second == v;
    }
    case Term::Kind::Negate:
        if (bound_under(t, s)) break;
        if (v.kind != Value::Kind::Integer) return false;
        return match(t.args[0], Value::number(-v.integer), s, ctx);
    case Term::Kind::Binary: {
        if (bound_under(t, s)) break;
        if (v.kind != Value::Kind::Integer) return false;
        if (t.op != ArithOp::Add && t.op != ArithOp::Sub) return false;
        const Term& lhs = t.args[0];
        const Term& rhs = t.args[1];
        if (bound_under(lhs, s)) {
            auto l = evaluate(lhs, s, ctx);
            if (!l || l->kind != Value::Kind::Integer) return false;
            // l + R = v  or  l - R = v
            std::int64_t r = t.op == ArithOp::Add ? v.integer - l->integer : l->integer - v.integer;
            return match(rhs, Value::number(r), s, ctx);
        }
        if (bound_under(rhs, s)) {
            auto r = evaluate(rhs, s, ctx);
            if (!r || r->kind != Value::Kind::Integer) return false;
            std::int64_t l = t.op == ArithOp::Add ? v.integer - r->integer : v.integer + r->integer;
            return match(lhs, Value::number(l), s, ctx);
        }
        return false;
    }
    default: break;
    }
    auto e = evaluate(t, s, ctx);
    return e && *e == v;
}

bool compare(const Value& l, CompareOp op, const Value& r) {
    auto c = l <=> r;
    switch (op) {
    case CompareOp::Lt: return c < 0;
    case CompareOp::Le: return c <= 0;
    case CompareOp::Gt: return c > 0;
    case CompareOp::Ge: return c >= 0;
    case CompareOp::Eq: return c == 0;
    case CompareOp::Ne: return c != 0;
    }
    return false;
}

void reject_functions(const Term& t) {
    if (t.kind == Term::Kind::Function) {
        throw UnsupportedFeature("function term '" + asp::format_term(t) + "' is not supported by the reference grounder");
    }
    for (const auto& a : t.args) reject_functions(a);
}

void reject_functions(const SymbolicAtom& a) {
    for (const auto& t : a.args) reject_functions(t);
}

struct Step {
    enum class Kind { Symbolic, Assign } kind;
    std::size_t literal;
};

struct PreparedRule {
    const asp::Rule* rule;
    std::vector<Step> plan;
};

PreparedRule prepare(const asp::Rule& rule) {
    if (auto violations = asp::check_safety(rule); !violations.empty()) {
        throw GroundingError("unsafe rule '" + asp::format_rule(rule) + "': " + violations.front().message);
    }
    if (rule.head) {
        if (const auto* c = std::get_if<asp::Choice>(&*rule.head)) {
            if (c->bounded()) throw UnsupportedFeature("bounded choice rules are not supported by the reference grounder");
            for (const auto& e : c->elements) {
                if (!e.condition.empty()) throw UnsupportedFeature("conditional choice elements are not supported by the reference grounder");
                reject_functions(e.atom);
            }
        } else {
            reject_functions(std::get<SymbolicAtom>(*rule.head));
        }
    }
    for (const auto& lit : rule.body) {
        if (std::holds_alternative<asp::AggregateAtom>(lit.atom)) {
            throw UnsupportedFeature("aggregates are not supported by the reference grounder");
        }
        if (const auto* s = std::get_if<SymbolicAtom>(&lit.atom)) {
            reject_functions(*s);
        } else {
            const auto& b = std::get<BuiltinAtom>(lit.atom);
            reject_functions(b.lhs);
            reject_functions(b.rhs);
        }
    }

    PreparedRule prepared{&rule, {}};
    asp::VariableSet bound;
    std::vector<bool> used(rule.body.size(), false);
    for (bool progress = true; progress;) {
        progress = false;
        for (std::size_t i = 0; i < rule.body.size(); ++i) {
            const auto& lit = rule.body[i];
            if (used[i] || lit.negations != 0) continue;
            std::vector<std::string> vars;
            asp::VariableSet fresh;
            Step::Kind kind;
            if (const auto* s = std::get_if<SymbolicAtom>(&lit.atom)) {
                asp::collect_variables(*s, vars);
                for (const auto& a : s->args) asp::binding_variables(a, bound, fresh);
                kind = Step::Kind::Symbolic;
            } else {
                const auto& b = std::get<BuiltinAtom>(lit.atom);
                if (b.op != CompareOp::Eq) continue;
                bool lhs = asp::all_bound(b.lhs, bound);
                bool rhs = asp::all_bound(b.rhs, bound);
                if (lhs == rhs) continue;
                const Term& open = lhs ? b.rhs : b.lhs;
                asp::collect_variables(open, vars);
                asp::binding_variables(open, bound, fresh);
                kind = Step::Kind::Assign;
            }
            bool complete = std::all_of(vars.begin(), vars.end(),
                                        [&](const std::string& v) { return bound.count(v) || fresh.count(v); });
            if (!complete) continue;
            used[i] = true;
            prepared.plan.push_back(Step{kind, i});
            bound.insert(fresh.begin(), fresh.end());
            progress = true;
        }
    }
    return prepared;
}

struct PendingRule {
    std::vector<GroundAtom> heads;   // empty: constraint; >1 or choice flag: choice
    bool choice = false;
    std::vector<GroundAtom> positive, negative, double_negative;
};

std::string key_of(const PendingRule& r) {
    std::string k = r.choice ? "{" : "";
    for (const auto& h : r.heads) k += format_ground_atom(h) + ";";
    k += "|";
    for (const auto& a : r.positive) k += format_ground_atom(a) + ",";
    k += "|";
    for (const auto& a : r.negative) k += format_ground_atom(a) + ",";
    k += "|";
    for (const auto& a : r.double_negative) k += format_ground_atom(a) + ",";
    return k;
}

class Instantiator {
public:
    Instantiator(std::vector<PreparedRule> rules, Context ctx, const GroundOptions& options)
        : rules_(std::move(rules)), ctx_(std::move(ctx)), options_(options) {}

    std::vector<PendingRule> run() {
        for (bool changed = true; changed;) {
            changed = false;
            for (const auto& pr : rules_) {
                Substitution s;
                std::vector<GroundAtom> derived;
                enumerate(pr, 0, s, derived);
                for (auto& a : derived) {
                    if (known_.insert(a).second) {
                        by_signature_[{a.predicate, a.args.size()}].push_back(a);
                        changed = true;
                    }
                }
            }
            changed = changed || fresh_rules_;
            fresh_rules_ = false;
        }
        return std::move(out_);
    }

private:
    std::optional<GroundAtom> instantiate(const SymbolicAtom& a, const Substitution& s) const {
        GroundAtom g{a.predicate, {}, false};
        for (const auto& t : a.args) {
            auto v = evaluate(t, s, ctx_);
            if (!v) return std::nullopt;
            g.args.push_back(*v);
        }
        return g;
    }

    void enumerate(const PreparedRule& pr, std::size_t step, Substitution& s, std::vector<GroundAtom>& derived) {
        if (step == pr.plan.size()) {
            emit(pr, s, derived);
            return;
        }
        const auto& lit = pr.rule->body[pr.plan[step].literal];
        if (pr.plan[step].kind == Step::Kind::Assign) {
            const auto& b = std::get<BuiltinAtom>(lit.atom);
            bool lhs_bound = bound_under(b.lhs, s);
            auto v = evaluate(lhs_bound ? b.lhs : b.rhs, s, ctx_);
            if (!v) return;
            Substitution next = s;
            if (match(lhs_bound ? b.rhs : b.lhs, *v, next, ctx_)) enumerate(pr, step + 1, next, derived);
            return;
        }
        const auto& atom = std::get<SymbolicAtom>(lit.atom);
        auto it = by_signature_.find({atom.predicate, atom.args.size()});
        if (it == by_signature_.end()) return;
        const auto candidates = it->second;   // copy: the index may grow while we recurse
        for (const auto& g : candidates) {
            Substitution next = s;
            bool ok = true;
            for (std::size_t i = 0; i < atom.args.size() && ok; ++i) ok = match(atom.args[i], g.args[i], next, ctx_);
            if (ok) enumerate(pr, step + 1, next, derived);
        }
    }

    void emit(const PreparedRule& pr, const Substitution& s, std::vector<GroundAtom>& derived) {
        const auto& rule = *pr.rule;
        PendingRule out;
        for (const auto& lit : rule.body) {
            if (const auto* b = std::get_if<BuiltinAtom>(&lit.atom)) {
                auto l = evaluate(b->lhs, s, ctx_);
                auto r = evaluate(b->rhs, s, ctx_);
                if (!l || !r) return;
                bool holds = compare(*l, b->op, *r);
                if (lit.negations % 2 == 1) holds = !holds;
                if (!holds) return;
                continue;
            }
            auto g = instantiate(std::get<SymbolicAtom>(lit.atom), s);
            if (!g) return;
            if (lit.negations == 0) out.positive.push_back(std::move(*g));
            else if (lit.negations == 1) out.negative.push_back(std::move(*g));
            else out.double_negative.push_back(std::move(*g));
        }
        if (rule.head) {
            if (const auto* a = std::get_if<SymbolicAtom>(&*rule.head)) {
                auto g = instantiate(*a, s);
                if (!g) return;
                out.heads.push_back(std::move(*g));
            } else {
                out.choice = true;
                for (const auto& e : std::get<asp::Choice>(*rule.head).elements) {
                    auto g = instantiate(e.atom, s);
                    if (!g) return;
                    out.heads.push_back(std::move(*g));
                }
            }
        }
        if (!seen_.insert(key_of(out)).second) return;
        if (out_.size() >= options_.max_ground_rules) {
            throw DomainTooLarge("grounding exceeds " + std::to_string(options_.max_ground_rules) + " ground rules");
        }
        for (const auto& h : out.heads) derived.push_back(h);
        out_.push_back(std::move(out));
        fresh_rules_ = true;
    }

    std::vector<PreparedRule> rules_;
    Context ctx_;
    GroundOptions options_;
    std::set<GroundAtom> known_;
    std::map<std::pair<std::string, std::size_t>, std::vector<GroundAtom>> by_signature_;
    std::unordered_set<std::string> seen_;
    std::vector<PendingRule> out_;
    bool fresh_rules_ = false;
};

Constants read_constants(std::span<const asp::Rule> program) {
    static const std::regex const_re(R"(^#const\s+([a-z_][A-Za-z0-9_']*)\s*=\s*(-?[0-9]+|[a-z][A-Za-z0-9_']*)\s*\.$)");
    Constants out;
    for (const auto& r : program) {
        if (!r.is_directive() || r.directive.rfind("#const", 0) != 0) continue;
        std::smatch m;
        if (!std::regex_match(r.directive, m, const_re)) {
            throw UnsupportedFeature("unsupported constant definition '" + r.directive + "'");
        }
        const std::string value = m[2];
        out[m[1]] = (value[0] == '-' || std::isdigit(static_cast<unsigned char>(value[0])))
                        ? Value::number(std::stoll(value))
                        : Value::symbol(value);
    }
    return out;
}

}  // namespace

GroundProgram ground(std::span<const asp::Rule> program, const GroundOptions& options) {
    Context ctx{read_constants(program)};
    std::vector<PreparedRule> prepared;
    for (const auto& r : program) {
        if (r.is_directive()) continue;
        prepared.push_back(prepare(r));
    }
    auto pending = Instantiator(std::move(prepared), std::move(ctx), options).run();

    std::set<GroundAtom> universe;
    for (const auto& r : pending) {
        for (const auto& h : r.heads) {
            universe.insert(h);
            if (r.choice) {
                GroundAtom aux = h;
                aux.auxiliary = true;
                universe.insert(aux);
            }
        }
        universe.insert(r.positive.begin(), r.positive.end());
        universe.insert(r.negative.begin(), r.negative.end());
        universe.insert(r.double_negative.begin(), r.double_negative.end());
    }

    GroundProgram gp;
    gp.atoms.assign(universe.begin(), universe.end());   // visible atoms sort before auxiliaries
    std::map<GroundAtom, std::size_t> index;
    for (std::size_t i = 0; i < gp.atoms.size(); ++i) index.emplace(gp.atoms[i], i);
    auto indices = [&](const std::vector<GroundAtom>& atoms) {
        std::vector<std::size_t> out;
        for (const auto& a : atoms) out.push_back(index.at(a));
        return out;
    };

    for (const auto& r : pending) {
        GroundRule base{std::nullopt, indices(r.positive), indices(r.negative), indices(r.double_negative)};
        if (!r.choice) {
            if (!r.heads.empty()) base.head = index.at(r.heads.front());
            gp.rules.push_back(std::move(base));
            continue;
        }
        for (const auto& h : r.heads) {
            GroundAtom aux = h;
            aux.auxiliary = true;
            std::size_t hi = index.at(h);
            std::size_t ai = index.at(aux);
            GroundRule in = base;
            in.head = hi;
            in.negative.push_back(ai);
            GroundRule out = base;
            out.head = ai;
            out.negative.push_back(hi);
            gp.rules.push_back(std::move(in));
            gp.rules.push_back(std::move(out));
        }
    }
    return gp;
}

Satisfiability check_sat(std::span<const asp::Rule> program, const GroundOptions& options, const SearchLimits& limits,
                         SearchStats* stats) {
    auto gp = ground(program, options);
    return stable_models(gp, 1, limits, stats).empty() ? Satisfiability::Unsat : Satisfiability::Sat;
}

}  // namespace streamforge::ground
