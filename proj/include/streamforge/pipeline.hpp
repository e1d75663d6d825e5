#pragma once

// Training procedure: baseline timing, candidate generation and filtering
// under a time budget, and selection of the best streamliner combination.
// Every step is journaled to an append-only JSONL ledger.

#include "streamforge/aspkit.hpp"
#include "streamforge/llm_gateway.hpp"
#include "streamforge/solver_backend.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace streamforge::pipeline {

using nlohmann::json;

class BaselineError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EmptyPoolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class LedgerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Instance {
    std::string id;     // file stem
    std::string text;
};

std::vector<Instance> load_instances(const std::vector<std::filesystem::path>& paths);

// The program solved for one instance: encoding (plus streamliners) then facts.
std::string instance_program(std::string_view composed, const Instance& instance);

struct TrainingConfig {
    double budget_seconds = 1800.0;
    double baseline_timeout_seconds = 60.0;
    std::optional<double> training_timeout_seconds;   // derived from baselines when unset
    double improvement_epsilon_seconds = 0.0;
    int max_selected = 3;
    std::uint64_t rng_seed = 0;
    bool normalize_timestamps = false;

    void validate() const;   // throws std::invalid_argument
};

struct Problem {
    std::string encoding;
    std::vector<Instance> instances;
};

using Baselines = std::map<std::string, solver::SolveOutcome>;

enum class CandidateStatus { Pending, Kept, Discarded };
enum class Reason { Improved, SyntaxError, UnsatAll, UnsatSome, NoImprovement, Pending };

std::string_view to_string(CandidateStatus status);
std::string_view to_string(Reason reason);
std::optional<CandidateStatus> parse_candidate_status(std::string_view text);
std::optional<Reason> parse_reason(std::string_view text);

struct Candidate {
    std::string id;
    asp::Snippet snippet;
    std::string source_model;
    std::uint64_t iteration = 0;
    CandidateStatus status = CandidateStatus::Pending;
    Reason reason = Reason::Pending;
    std::map<std::string, solver::SolveOutcome> per_instance;
    std::optional<std::string> duplicate_of;
    std::string diagnostic;
};

// Collapses whitespace runs so trivially reformatted duplicates compare equal.
std::string normalize_snippet_text(std::string_view text);

// Solves the original encoding on every instance; all must be SAT.
Baselines run_baseline(const Problem& problem, solver::Backend& backend, double timeout_seconds);

// max(10 s, 5 x slowest baseline).
double default_training_timeout(const Baselines& baselines);

struct ValidationSettings {
    double timeout_seconds = 10.0;
    double epsilon_seconds = 0.0;
    solver::Scheduler* scheduler = nullptr;   // optional fan-out over instances
};

// Checks are applied in order and stop at the first failure class: syntax,
// satisfiability flips, then strict improvement on at least one instance.
Candidate validate_candidate(Candidate candidate, const Problem& problem, const Baselines& baselines,
                             solver::Backend& backend, const ValidationSettings& settings);

// Reasons derived from already measured outcomes; shared by validation and
// ledger audits.
Reason classify_outcomes(const std::map<std::string, solver::SolveOutcome>& outcomes, const Baselines& baselines,
                         double timeout_seconds, double epsilon_seconds);

inline constexpr int kLedgerVersion = 1;

// Append-only JSONL event log. Each record carries `v` and a dense `seq`.
class Ledger {
public:
    Ledger() = default;   // in memory only
    // Loads existing events (dropping an incomplete trailing line) and
    // appends new ones to the same file.
    explicit Ledger(std::filesystem::path path);

    const json& append(json event);
    const std::vector<json>& events() const { return events_; }
    std::size_t size() const { return events_.size(); }
    const std::optional<std::filesystem::path>& path() const { return path_; }

    static std::vector<json> read(const std::filesystem::path& path);

private:
    std::optional<std::filesystem::path> path_;
    std::vector<json> events_;
};

// Monotonic seconds since the loop started; injectable for tests.
using ElapsedClock = std::function<double()>;

struct TrainingResult {
    Baselines baselines;
    double training_timeout_seconds = 0.0;
    std::vector<Candidate> candidates;   // every candidate, in creation order
    std::vector<Candidate> kept;         // first occurrences with reason improved
    std::size_t llm_calls = 0;
    std::size_t failed_llm_calls = 0;
};

struct TrainingHooks {
    ElapsedClock elapsed;                      // defaults to a steady clock
    std::function<std::int64_t()> unix_time;   // defaults to system clock
};

// Runs baseline and the generation loop, journaling into `ledger`. Events
// already present in the ledger are treated as a recorded prefix: their
// results are reused instead of recomputed, so a truncated run resumes into
// the same event sequence.
TrainingResult training_loop(const Problem& problem, const TrainingConfig& config, const llm::ModelRoster& roster,
                             llm::Provider& provider, solver::Backend& backend, Ledger& ledger,
                             const TrainingHooks& hooks = {});

struct SelectionResult {
    std::vector<std::string> selected_ids;
    double training_vbe_sum = 0.0;
    double baseline_sum = 0.0;
    std::uint64_t considered_combinations = 0;
};

// Exhaustive search over all size-min(k, n) subsets of the kept pool for the
// least sum of per-instance minima (baseline included). Ties go to the
// lexicographically smallest sorted id tuple.
SelectionResult select_best(const std::vector<Candidate>& kept, const Baselines& baselines, int max_selected);

// Appends the selection event unless the ledger already ends a finished run.
void record_selection(Ledger& ledger, const SelectionResult& selection);

struct TaxonomyStats {
    static constexpr std::array<Reason, 5> kOrder = {Reason::Improved, Reason::SyntaxError, Reason::UnsatAll,
                                                    Reason::UnsatSome, Reason::NoImprovement};
    std::array<std::size_t, 5> counts{};
    std::array<int, 5> percents{};
    std::size_t total = 0;

    std::string format() const;   // one `reason: count (p%)` line per bucket
};

// Percentages over the final verdict of every candidate, rounded by largest
// remainder so they sum to 100.
TaxonomyStats stats_report(const std::vector<json>& events);

std::array<int, 5> largest_remainder_percents(const std::array<std::size_t, 5>& counts);

}  // namespace streamforge::pipeline
