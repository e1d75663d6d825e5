#include "streamforge/ground_eval.hpp"
#include "support/brute_oracle.hpp"
#include "support/oracle_suite.hpp"

#include <doctest.h>

#include <algorithm>

using namespace streamforge;
using ground::GroundProgram;

namespace {

std::vector<asp::Rule> parse(std::string_view text) {
    auto parsed = asp::parse_program(text);
    REQUIRE(parsed.ok());
    return parsed.rules;
}

GroundProgram ground_text(std::string_view text) { return ground::ground(parse(text)); }

std::set<std::string> rule_set(const GroundProgram& gp) {
    std::set<std::string> out;
    for (const auto& r : gp.rules) out.insert(gp.format_rule(r));
    return out;
}

std::set<std::set<std::string>> models_of(std::string_view text, std::size_t cap = 1u << 20) {
    std::set<std::set<std::string>> out;
    for (const auto& m : ground::stable_models(ground_text(text), cap)) {
        std::set<std::string> atoms;
        for (const auto& a : m) atoms.insert(ground::format_ground_atom(a));
        out.insert(atoms);
    }
    return out;
}

bool holds(const GroundProgram& gp, const ground::GroundRule& r, const std::set<std::size_t>& in) {
    auto t = [&](std::size_t a) { return in.count(a) > 0; };
    bool body = std::all_of(r.positive.begin(), r.positive.end(), t) &&
                std::none_of(r.negative.begin(), r.negative.end(), t) &&
                std::all_of(r.double_negative.begin(), r.double_negative.end(), t);
    (void)gp;
    return !body || (r.head && t(*r.head));
}

}  // namespace

TEST_CASE("direct instantiation") {
    CHECK(rule_set(ground_text("p(1). p(2). q(X) :- p(X).")) ==
          std::set<std::string>{"p(1).", "p(2).", "q(1) :- p(1).", "q(2) :- p(2)."});
}

TEST_CASE("false builtins drop the instance") {
    auto gp = ground_text("p(1). p(2). :- p(X), X > 1.");
    CHECK(rule_set(gp) == std::set<std::string>{"p(1).", "p(2).", ":- p(2)."});
}

TEST_CASE("choice rewriting") {
    auto gp = ground_text("{a}.");
    CHECK(rule_set(gp) == std::set<std::string>{"a :- not a'.", "a' :- not a."});
    CHECK(gp.visible_atom_count() == 1);
    CHECK(gp.atoms.size() == 2);
    CHECK(gp.atoms[1].auxiliary);
}

TEST_CASE("every atom of every rule is in the universe") {
    auto gp = ground_text(sf_test::oracle_suite().back().program);
    for (const auto& r : gp.rules) {
        if (r.head) CHECK(*r.head < gp.atoms.size());
        for (auto a : r.positive) CHECK(a < gp.atoms.size());
        for (auto a : r.negative) CHECK(a < gp.atoms.size());
    }
}

TEST_CASE("unsupported constructs are rejected") {
    CHECK_THROWS_AS(ground_text(":- #count{X: p(X)} > 1."), ground::UnsupportedFeature);
    CHECK_THROWS_AS(ground_text("1 {a; b} 1."), ground::UnsupportedFeature);
    CHECK_THROWS_AS(ground_text("p(f(1))."), ground::UnsupportedFeature);
    CHECK_THROWS_AS(ground_text("p(X) :- q(Y)."), ground::GroundingError);
}

TEST_CASE("ground rule cap") {
    std::string text;
    for (int i = 0; i < 50; ++i) text += "p(" + std::to_string(i) + "). ";
    text += "q(X,Y,Z) :- p(X), p(Y), p(Z).";
    ground::GroundOptions opts;
    opts.max_ground_rules = 1000;
    CHECK_THROWS_AS(ground::ground(parse(text), opts), ground::DomainTooLarge);
}

TEST_CASE("stable model examples") {
    using M = std::set<std::set<std::string>>;
    CHECK(models_of("") == M{{}});
    CHECK(models_of("a. b :- a.") == M{{"a", "b"}});
    CHECK(models_of("a :- not b. b :- not a.") == M{{"a"}, {"b"}});
    CHECK(models_of("a :- a.") == M{{}});
}

TEST_CASE("canonical model order follows the universe bitmask") {
    auto models = ground::stable_models(ground_text("a :- not b. b :- not a."), 10);
    REQUIRE(models.size() == 2);
    CHECK(ground::format_interpretation(models[0]) == "{a}");
    CHECK(ground::format_interpretation(models[1]) == "{b}");
    CHECK(ground::stable_models(ground_text("a :- not b. b :- not a."), 1).size() == 1);
}

TEST_CASE("satisfiability examples") {
    CHECK(ground::check_sat(parse("a :- not b. b :- not a.")) == ground::Satisfiability::Sat);
    CHECK(ground::check_sat(parse("a :- not b. b :- not a. :- a. :- b.")) == ground::Satisfiability::Unsat);
    CHECK(ground::check_sat(parse(":- not a.")) == ground::Satisfiability::Unsat);
}

TEST_CASE("hand-checked suite") {
    const auto& suite = sf_test::oracle_suite();
    CHECK(suite.size() >= 20);
    for (const auto& c : suite) {
        INFO(c.name);
        auto gp = ground_text(c.program);
        CHECK(gp.visible_atom_count() <= 12);
        CHECK(models_of(c.program) == sf_test::model_set(c.models));
        CHECK((ground::check_sat(parse(c.program)) == ground::Satisfiability::Sat) == !c.models.empty());
    }
}

TEST_CASE("universe limit") {
    std::string text;
    for (int i = 0; i < 25; ++i) text += "{a" + std::to_string(i) + "}. ";
    CHECK_THROWS_AS(ground::stable_models(ground_text(text), 1), ground::UniverseTooLarge);
    // Facts do not count as free atoms.
    std::string facts;
    for (int i = 0; i < 40; ++i) facts += "f" + std::to_string(i) + ". ";
    CHECK(ground::stable_models(ground_text(facts + "{a}."), 10).size() == 2);
}

TEST_CASE("work budget interrupts the search") {
    std::string text;
    for (int i = 0; i < 16; ++i) text += "{a" + std::to_string(i) + "}. ";
    text += ":- not a0. :- a0.";
    ground::SearchLimits limits;
    limits.work_budget = 100;
    CHECK_THROWS_AS(ground::stable_models(ground_text(text), 1, limits), ground::SearchInterrupted);
}

TEST_CASE("random propositional programs agree with subset enumeration") {
    std::mt19937_64 rng(424242);
    for (int i = 0; i < 400; ++i) {
        int atoms = 1 + static_cast<int>(rng() % 8);
        int rules = 1 + static_cast<int>(rng() % 12);
        auto prog = sf_test::random_program(rng, atoms, rules);
        auto text = sf_test::to_asp(prog);
        INFO(text);
        auto expected = sf_test::brute_stable_models(prog);
        CHECK(models_of(text) == expected);

        auto gp = ground_text(text);
        ground::SearchStats stats;
        auto models = ground::stable_models(gp, 1000, {}, &stats);
        for (const auto& m : models) {
            std::set<std::size_t> in;
            for (const auto& a : m) in.insert(*gp.find(a));
            for (const auto& r : gp.rules) CHECK(holds(gp, r, in));
        }
        bool positive = std::all_of(prog.rules.begin(), prog.rules.end(), [](const auto& r) { return r.neg.empty(); });
        if (positive) CHECK(models.size() <= 1);
    }
}

TEST_CASE("auxiliary atoms never appear in models") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 100; ++i) {
        std::string text = "{";
        int k = 1 + static_cast<int>(rng() % 4);
        for (int j = 0; j < k; ++j) text += (j ? "; c" : "c") + std::to_string(j);
        text += "}.";
        if (rng() % 2) text += " :- c0, not c1.";
        for (const auto& m : ground::stable_models(ground_text(text), 100)) {
            for (const auto& a : m) {
                CHECK_FALSE(a.auxiliary);
                CHECK(ground::format_ground_atom(a).find('\'') == std::string::npos);
            }
        }
    }
}
