#include "streamforge/aspkit.hpp"
#include "support/paths.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

using namespace streamforge::asp;

namespace {

std::vector<std::string> unsafe_vars(std::string_view text) {
    auto parsed = parse_program(text);
    REQUIRE(parsed.ok());
    REQUIRE(parsed.rules.size() == 1);
    std::vector<std::string> out;
    for (const auto& v : check_safety(parsed.rules[0])) out.push_back(v.variable);
    return out;
}

}  // namespace

TEST_CASE("constraint over pairs of units parses into one rule") {
    auto r = parse_program(":- unit2sensor(U1,S), unit2sensor(U2,S), U1 > U2.");
    CHECK(r.ok());
    REQUIRE(r.rules.size() == 1);
    CHECK(r.rules[0].is_constraint());
    CHECK(r.rules[0].body.size() == 3);
    const auto& b = std::get<BuiltinAtom>(r.rules[0].body[2].atom);
    CHECK(b.op == CompareOp::Gt);
}

TEST_CASE("empty text gives no rules and no errors") {
    auto r = parse_program("");
    CHECK(r.rules.empty());
    CHECK(r.errors.empty());
}

TEST_CASE("arithmetic argument T+1") {
    auto r = parse_program(":- move(D,P,T), move(D,P,T+1).");
    REQUIRE(r.ok());
    const auto& atom = std::get<SymbolicAtom>(r.rules[0].body[1].atom);
    CHECK(atom.args[2] == Term::binary(ArithOp::Add, Term::variable("T"), Term::number(1)));
}

TEST_CASE("unbalanced parenthesis reports position at end of input") {
    auto r = parse_program(":- p(X");
    CHECK(r.rules.empty());
    REQUIRE(r.errors.size() == 1);
    CHECK(r.errors[0].line == 1);
    CHECK(r.errors[0].column == 7);
}

TEST_CASE("error recovery resumes after the next top-level period") {
    auto r = parse_program("a.\nb :- c(.\nd :- e.\n:- f(X, .\ng.");
    CHECK(r.errors.size() == 2);
    REQUIRE(r.rules.size() == 3);
    CHECK(format_rule(r.rules[2]) == "g.");
    CHECK(r.errors[0].line == 2);
    CHECK(r.errors[1].line == 4);
}

TEST_CASE("comments are skipped") {
    auto r = parse_program("% line comment\na. %* block\ncomment *% b.\n");
    REQUIRE(r.ok());
    CHECK(r.rules.size() == 2);
}

TEST_CASE("invalid UTF-8 is a parse error") {
    std::string text = "a.\n% caf\xC3\n";
    auto r = parse_program(text);
    CHECK_FALSE(r.ok());
}

TEST_CASE("lexical corner cases") {
    CHECK(parse_program("p(\"a string\").").ok());
    CHECK_FALSE(parse_program("p(\"unterminated).").ok());
    CHECK(parse_program("p(#inf). p(#sup).").ok());
    CHECK_FALSE(parse_program("p(1..3).").ok());
    CHECK_FALSE(parse_program("#minimize{X: p(X)}.").ok());
    CHECK(parse_program("p(X') :- q(X').").ok());
    CHECK(parse_program("#const n = 3.\n#show p/1.").ok());
    auto d = parse_program("#const n = 3.");
    REQUIRE(d.rules.size() == 1);
    CHECK(d.rules[0].is_directive());
}

TEST_CASE("double negation and choice heads") {
    auto r = parse_program("a :- not not b.\n{ c(X) : d(X) } :- e.\n1 { f; g } 2.");
    REQUIRE(r.ok());
    CHECK(r.rules[0].body[0].negations == 2);
    const auto& choice = std::get<Choice>(*r.rules[1].head);
    CHECK_FALSE(choice.bounded());
    CHECK(choice.elements[0].condition.size() == 1);
    CHECK(std::get<Choice>(*r.rules[2].head).bounded());
}

TEST_CASE("aggregate guards default to infimum and supremum") {
    auto r = parse_program(":- #count{X: p(X)} > 1.");
    REQUIRE(r.ok());
    const auto& agg = std::get<AggregateAtom>(r.rules[0].body[0].atom);
    CHECK_FALSE(agg.left.has_value());
    CHECK(agg.effective_left().term == Term::infimum());
    CHECK(agg.effective_left().op == CompareOp::Le);
    CHECK(agg.right->op == CompareOp::Gt);
    CHECK(agg.right->term == Term::number(1));
}

TEST_CASE("safety") {
    CHECK(unsafe_vars(":- unit2sensor(U1,S), unit2sensor(U2,S), U1 > U2.").empty());
    CHECK(unsafe_vars("p(X) :- q(Y).") == std::vector<std::string>{"X"});
    CHECK(unsafe_vars(":- X > 3.") == std::vector<std::string>{"X"});
    CHECK(unsafe_vars(":- p(_), not q(_).").empty());
    CHECK(unsafe_vars(":- p(X), not q(X, Y).") == std::vector<std::string>{"Y"});
    CHECK(unsafe_vars("p(X) :- q(X*2).") == std::vector<std::string>{"X"});
    CHECK(unsafe_vars("p(X) :- q(Y), X = Y + 1.").empty());
    CHECK(unsafe_vars("p(X) :- q(X+1).").empty());
    // Aggregate elements bind only their own variables; guards need outside bindings.
    CHECK(unsafe_vars(":- p(U), #count{S: r(U,S)} > 1.").empty());
    CHECK(unsafe_vars(":- #count{S: r(U,S)} > N.") == std::vector<std::string>{"N"});
    CHECK(unsafe_vars(":- p(S), S = #min{X: q(X)}.").empty());
    CHECK(unsafe_vars(":- #count{S: r(S)} > 0, q(S2), S2 > S.") == std::vector<std::string>{"S"});
    // Choice element conditions bind local variables.
    CHECK(unsafe_vars("{ a(X) : b(X) }.").empty());
    CHECK(unsafe_vars("{ a(X) }.") == std::vector<std::string>{"X"});
}

TEST_CASE("snippet classification") {
    CHECK(classify_snippet("% prefer symmetric placements").kind == SnippetKind::CommentOnly);
    CHECK(classify_snippet("   \n").kind == SnippetKind::CommentOnly);
    CHECK(classify_snippet(":- a, b.").kind == SnippetKind::ConstraintOnly);
    CHECK(classify_snippet("stable(1,P,T) :- on(1,P,T), goal_on(1,P), time(T). "
                           ":- move(D,P,T), stable(D,Pp,T-1), on(D,Pp,T-1).")
              .kind == SnippetKind::RulesAndConstraints);
    auto bad = classify_snippet(":- p(X");
    CHECK(bad.kind == SnippetKind::Unparseable);
    CHECK(bad.rules.empty());
    CHECK(to_string(SnippetKind::CommentOnly) == "comment-only");
}

TEST_CASE("composition") {
    const std::string enc = "a :- not b.\nb :- not a.";
    CHECK(compose(enc, {}) == enc + "\n");

    auto p2 = classify_snippet(":- unit2sensor(U1,S), unit2sensor(U2,S), U1 > U2.", "P2");
    CHECK(compose(enc, std::vector<Snippet>{p2}) ==
          enc + "\n% --- streamliner P2 ---\n:- unit2sensor(U1,S), unit2sensor(U2,S), U1 > U2.\n");

    std::vector<Snippet> three = {classify_snippet(":- a."), classify_snippet(":- b."), classify_snippet("% c")};
    auto out = compose(enc, three);
    CHECK(out == enc + "\n% --- streamliner 1 ---\n:- a.\n% --- streamliner 2 ---\n:- b.\n% --- streamliner 3 ---\n% c\n");
    CHECK(out == compose(enc, three));
    CHECK(parse_program(out).ok());

    CHECK_THROWS_AS(compose(":- p(X", {}), CompositionError);
}

TEST_CASE("canonical printer") {
    auto r = parse_program("p(X,Y):-q(X),not r(Y),X<Y,Y=X+1,#count{Z:s(Z)}>=2.");
    REQUIRE(r.ok());
    CHECK(format_rule(r.rules[0]) == "p(X, Y) :- q(X), not r(Y), X < Y, Y = X+1, #count{Z: s(Z)} >= 2.");
    auto c = parse_program(":- .");
    if (c.ok()) CHECK(format_rule(c.rules[0]) == ":-.");
    auto a = parse_program("p(X-(Y-Z)) :- q(X,Y,Z).");
    REQUIRE(a.ok());
    CHECK(parse_program(format_rule(a.rules[0])).rules[0] == a.rules[0]);
}

TEST_CASE("corpus files parse, are safe and round-trip") {
    int files = 0;
    for (const char* dir : {"pup", "sokoban", "hanoi"}) {
        for (const auto& entry : std::filesystem::directory_iterator(sf_test::fixture(std::string("streamliners/") + dir))) {
            ++files;
            auto text = sf_test::read_file(entry.path());
            auto parsed = parse_program(text);
            INFO(entry.path().filename().string());
            CHECK(parsed.ok());
            for (const auto& rule : parsed.rules) {
                CHECK(check_safety(rule).empty());
                auto again = parse_program(format_rule(rule));
                REQUIRE(again.ok());
                REQUIRE(again.rules.size() == 1);
                CHECK(again.rules[0] == rule);
            }
        }
    }
    CHECK(files == 32);
}

namespace {

using Signature = std::pair<std::string, std::size_t>;

void collect(const BasicLiteral& lit, std::set<Signature>& out) {
    if (const auto* a = std::get_if<SymbolicAtom>(&lit.atom)) out.emplace(a->predicate, a->args.size());
}

// Predicates a rule's body (and choice conditions) refer to.
std::set<Signature> used_predicates(const Rule& rule) {
    std::set<Signature> out;
    for (const auto& lit : rule.body) {
        if (const auto* a = std::get_if<SymbolicAtom>(&lit.atom)) out.emplace(a->predicate, a->args.size());
        if (const auto* agg = std::get_if<AggregateAtom>(&lit.atom))
            for (const auto& el : agg->elements)
                for (const auto& c : el.condition) collect(c, out);
    }
    if (rule.head)
        if (const auto* ch = std::get_if<Choice>(&*rule.head))
            for (const auto& el : ch->elements)
                for (const auto& c : el.condition) collect(c, out);
    return out;
}

std::set<Signature> defined_predicates(const std::vector<Rule>& rules) {
    std::set<Signature> out;
    for (const auto& rule : rules) {
        if (!rule.head) continue;
        if (const auto* a = std::get_if<SymbolicAtom>(&*rule.head)) out.emplace(a->predicate, a->args.size());
        if (const auto* ch = std::get_if<Choice>(&*rule.head))
            for (const auto& el : ch->elements) out.emplace(el.atom.predicate, el.atom.args.size());
    }
    return out;
}

std::vector<std::filesystem::path> sorted_lp(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> out;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.path().extension() == ".lp") out.push_back(entry.path());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("benchmark encodings are safe and define every predicate their streamliners use") {
    for (const char* family : {"pup", "sokoban", "hanoi"}) {
        INFO(family);
        auto base = sf_test::fixture(std::string("benchmarks/") + family);
        auto encoding = sf_test::read_file(base / "encoding.lp");
        auto parsed = parse_program(encoding);
        REQUIRE(parsed.ok());
        for (const auto& rule : parsed.rules) CHECK(check_safety(rule).empty());

        auto instances = sorted_lp(base / "instances");
        REQUIRE(instances.size() >= 3);
        auto defined = defined_predicates(parsed.rules);
        for (const auto& path : instances) {
            auto facts = parse_program(sf_test::read_file(path));
            INFO(path.filename().string());
            REQUIRE(facts.ok());
            for (const auto& rule : facts.rules) CHECK(rule.is_fact());
            auto own = defined_predicates(facts.rules);
            defined.insert(own.begin(), own.end());
        }
        for (const auto& rule : parsed.rules)
            for (const auto& sig : used_predicates(rule)) {
                INFO(sig.first << "/" << sig.second);
                CHECK(defined.count(sig) == 1);
            }

        for (const auto& path : sorted_lp(sf_test::fixture(std::string("streamliners/") + family))) {
            INFO(path.filename().string());
            auto snippet = classify_snippet(sf_test::read_file(path), path.stem().string());
            std::vector<Snippet> one{snippet};
            auto composed = parse_program(compose(encoding, one));
            CHECK(composed.ok());
            auto local = defined_predicates(snippet.rules);
            for (const auto& rule : snippet.rules)
                for (const auto& sig : used_predicates(rule)) {
                    INFO(sig.first << "/" << sig.second);
                    CHECK((defined.count(sig) == 1 || local.count(sig) == 1));
                }
        }
    }
}

namespace {

struct AstGen {
    std::mt19937_64 rng;

    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

    Term var() { return Term::variable(std::string(1, static_cast<char>('A' + pick(4)))); }

    Term arith(int depth) {
        if (depth == 0 || pick(3) == 0) {
            switch (pick(3)) {
            case 0: return Term::number(pick(7) - 3);
            case 1: return var();
            default: return Term::negate(var());
            }
        }
        static constexpr ArithOp ops[] = {ArithOp::Add, ArithOp::Sub, ArithOp::Mul, ArithOp::Div};
        return Term::binary(ops[pick(4)], arith(depth - 1), arith(depth - 1));
    }

    Term term(int depth) {
        switch (pick(8)) {
        case 0: return Term::symbol("c" + std::to_string(pick(3)));
        case 1: return Term::string("s" + std::to_string(pick(3)));
        case 2: return pick(2) ? Term::infimum() : Term::supremum();
        case 3: return Term::anonymous();
        case 4:
            if (depth > 0) return Term::function("f", {term(depth - 1), term(depth - 1)});
            return var();
        default: return arith(2);
        }
    }

    SymbolicAtom atom() {
        SymbolicAtom a{"p" + std::to_string(pick(3)), {}};
        for (int k = pick(4); k > 0; --k) a.args.push_back(term(1));
        return a;
    }

    CompareOp cmp() { return static_cast<CompareOp>(pick(6)); }

    BasicLiteral basic() {
        if (pick(4) == 0) return BasicLiteral{0, BuiltinAtom{arith(1), cmp(), arith(1)}};
        return BasicLiteral{pick(3), atom()};
    }

    Literal literal() {
        int k = pick(6);
        if (k == 0) {
            AggregateAtom agg;
            agg.function = static_cast<AggregateFunction>(pick(4));
            for (int e = 1 + pick(2); e > 0; --e) {
                AggregateElement el;
                el.tuple = {var()};
                if (pick(2)) el.tuple.push_back(Term::number(pick(5)));
                for (int c = pick(3); c > 0; --c) el.condition.push_back(basic());
                agg.elements.push_back(el);
            }
            if (pick(2)) agg.left = Guard{Term::number(pick(4)), cmp()};
            if (pick(2) || !agg.left) agg.right = Guard{var(), cmp()};
            return Literal{pick(2), agg};
        }
        if (k == 1) return Literal{0, BuiltinAtom{term(0), cmp(), arith(2)}};
        return Literal{pick(3), atom()};
    }

    Rule rule() {
        Rule r;
        switch (pick(3)) {
        case 0: break;
        case 1: r.head = atom(); break;
        default: {
            Choice c;
            for (int e = pick(3); e > 0; --e) {
                ChoiceElement el{atom(), {}};
                for (int k = pick(2); k > 0; --k) el.condition.push_back(basic());
                c.elements.push_back(el);
            }
            if (pick(3) == 0) c.left = Guard{Term::number(pick(3)), CompareOp::Le};
            if (pick(3) == 0) c.right = Guard{Term::number(2 + pick(3)), CompareOp::Le};
            r.head = c;
        }
        }
        for (int k = pick(4) + (r.head ? 0 : 1); k > 0; --k) r.body.push_back(literal());
        return r;
    }
};

}  // namespace

TEST_CASE("printer round-trip on random rules") {
    AstGen gen{std::mt19937_64(20240611)};
    for (int i = 0; i < 2000; ++i) {
        Rule r = gen.rule();
        auto text = format_rule(r);
        auto parsed = parse_program(text);
        INFO(text);
        REQUIRE(parsed.ok());
        REQUIRE(parsed.rules.size() == 1);
        CHECK(parsed.rules[0] == r);
        CHECK(format_rule(parsed.rules[0]) == text);
    }
}
