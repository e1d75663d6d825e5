#pragma once

// Reference semantics for small programs: instantiation of the function-free,
// aggregate-free fragment and exhaustive stable-model enumeration.

#include "streamforge/aspkit.hpp"

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace streamforge::ground {

class GroundingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnsupportedFeature : public GroundingError {
public:
    using GroundingError::GroundingError;
};

class DomainTooLarge : public GroundingError {
public:
    using GroundingError::GroundingError;
};

class UniverseTooLarge : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SearchInterrupted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Ground constant. Ordered as #inf < integers < symbols < strings < #sup.
struct Value {
    enum class Kind { Infimum, Integer, Symbol, String, Supremum };
    Kind kind = Kind::Integer;
    std::int64_t integer = 0;
    std::string text;

    static Value number(std::int64_t v) { return Value{Kind::Integer, v, {}}; }
    static Value symbol(std::string s) { return Value{Kind::Symbol, 0, std::move(s)}; }

    friend bool operator==(const Value&, const Value&) = default;
    friend std::strong_ordering operator<=>(const Value& a, const Value& b);
};

std::string format_value(const Value& v);

struct GroundAtom {
    std::string predicate;
    std::vector<Value> args;
    bool auxiliary = false;   // complement atom introduced by choice rewriting

    friend bool operator==(const GroundAtom&, const GroundAtom&) = default;
    friend std::strong_ordering operator<=>(const GroundAtom& a, const GroundAtom& b);
};

std::string format_ground_atom(const GroundAtom& atom);

// Atoms are indices into GroundProgram::atoms.
struct GroundRule {
    std::optional<std::size_t> head;
    std::vector<std::size_t> positive;
    std::vector<std::size_t> negative;
    std::vector<std::size_t> double_negative;

    friend bool operator==(const GroundRule&, const GroundRule&) = default;
};

struct GroundProgram {
    std::vector<GroundAtom> atoms;   // atom universe; visible atoms first in canonical order, then auxiliaries
    std::vector<GroundRule> rules;

    std::optional<std::size_t> find(const GroundAtom& atom) const;
    std::string format_rule(const GroundRule& rule) const;
    std::size_t visible_atom_count() const;
};

struct GroundOptions {
    std::size_t max_ground_rules = 100000;
};

// Bottom-up instantiation. Choices `{a1; ...; ak} :- B.` become
// `ai :- B, not ai'.` and `ai' :- B, not ai.`
GroundProgram ground(std::span<const asp::Rule> program, const GroundOptions& options = {});

using Interpretation = std::set<GroundAtom>;

std::string format_interpretation(const Interpretation& model);

struct SearchLimits {
    std::size_t max_free_atoms = 24;
    std::optional<std::chrono::steady_clock::time_point> deadline;
    // Abort once this much work has been spent (see SearchStats::work).
    std::optional<std::uint64_t> work_budget;
};

struct SearchStats {
    std::uint64_t nodes = 0;          // partial assignments visited
    std::uint64_t rule_checks = 0;
    std::uint64_t stability_checks = 0;
    std::size_t free_atoms = 0;

    std::uint64_t work() const { return nodes + rule_checks + 8 * stability_checks; }
};

// All stable models (at most `model_cap`), auxiliary atoms stripped, in
// ascending order of their bitmask over the visible universe (atom i = bit i).
std::vector<Interpretation> stable_models(const GroundProgram& program, std::size_t model_cap,
                                          const SearchLimits& limits = {}, SearchStats* stats = nullptr);

enum class Satisfiability { Sat, Unsat };

Satisfiability check_sat(std::span<const asp::Rule> program, const GroundOptions& options = {},
                         const SearchLimits& limits = {}, SearchStats* stats = nullptr);

}  // namespace streamforge::ground
