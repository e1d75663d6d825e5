#include "detail.hpp"

#include <algorithm>
#include <cctype>

namespace streamforge::pipeline {

std::string_view to_string(CandidateStatus status) {
    switch (status) {
    case CandidateStatus::Pending: return "pending";
    case CandidateStatus::Kept: return "kept";
    case CandidateStatus::Discarded: return "discarded";
    }
    return "pending";
}

std::string_view to_string(Reason reason) {
    switch (reason) {
    case Reason::Improved: return "improved";
    case Reason::SyntaxError: return "syntax-error";
    case Reason::UnsatAll: return "unsat-all";
    case Reason::UnsatSome: return "unsat-some";
    case Reason::NoImprovement: return "no-improvement";
    case Reason::Pending: return "pending";
    }
    return "pending";
}

std::optional<CandidateStatus> parse_candidate_status(std::string_view text) {
    for (auto s : {CandidateStatus::Pending, CandidateStatus::Kept, CandidateStatus::Discarded}) {
        if (to_string(s) == text) return s;
    }
    return std::nullopt;
}

std::optional<Reason> parse_reason(std::string_view text) {
    for (auto r : {Reason::Improved, Reason::SyntaxError, Reason::UnsatAll, Reason::UnsatSome, Reason::NoImprovement,
                   Reason::Pending}) {
        if (to_string(r) == text) return r;
    }
    return std::nullopt;
}

void TrainingConfig::validate() const {
    if (!(budget_seconds > 0)) throw std::invalid_argument("budget_seconds must be positive");
    if (!(baseline_timeout_seconds > 0)) throw std::invalid_argument("baseline_timeout_seconds must be positive");
    if (training_timeout_seconds && !(*training_timeout_seconds > 0)) {
        throw std::invalid_argument("training_timeout_seconds must be positive");
    }
    if (improvement_epsilon_seconds < 0) throw std::invalid_argument("improvement_epsilon_seconds must be >= 0");
    if (max_selected < 1) throw std::invalid_argument("max_selected must be at least 1");
}

std::string normalize_snippet_text(std::string_view text) {
    std::string out;
    bool pending_space = false;
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out += ' ';
        pending_space = false;
        out += static_cast<char>(c);
    }
    return out;
}

namespace detail {

std::optional<std::string> static_check(const asp::Snippet& snippet, std::string_view encoding) {
    if (!snippet.errors.empty()) {
        const auto& e = snippet.errors.front();
        return "syntax error at " + std::to_string(e.line) + ":" + std::to_string(e.column) + ": " + e.message;
    }
    for (const auto& rule : snippet.rules) {
        auto violations = asp::check_safety(rule);
        if (!violations.empty()) return violations.front().message;
    }
    try {
        asp::compose(encoding, std::span<const asp::Snippet>(&snippet, 1));
    } catch (const asp::CompositionError& e) {
        return e.what();
    }
    return std::nullopt;
}

json outcome_to_json(const solver::SolveOutcome& outcome) {
    json j = {{"status", solver::to_string(outcome.status)}, {"seconds", outcome.wall_seconds}};
    if (!outcome.diagnostic.empty()) j["diagnostic"] = outcome.diagnostic;
    return j;
}

solver::SolveOutcome outcome_from_json(const json& j) {
    solver::SolveOutcome o;
    o.status = solver::parse_status(j.at("status").get<std::string>()).value_or(solver::SolveStatus::Error);
    o.wall_seconds = j.at("seconds").get<double>();
    o.diagnostic = j.value("diagnostic", std::string{});
    return o;
}

}  // namespace detail

Baselines run_baseline(const Problem& problem, solver::Backend& backend, double timeout_seconds) {
    if (problem.instances.empty()) throw BaselineError("no training instances");
    Baselines out;
    for (const auto& inst : problem.instances) {
        auto outcome = backend.solve(instance_program(problem.encoding, inst), timeout_seconds);
        if (outcome.status != solver::SolveStatus::Sat) {
            std::string msg = "baseline on training instance '" + inst.id + "' is " +
                              std::string(solver::to_string(outcome.status)) + ", expected SAT";
            if (!outcome.diagnostic.empty()) msg += ": " + outcome.diagnostic;
            throw BaselineError(msg);
        }
        out.emplace(inst.id, outcome);
    }
    return out;
}

double default_training_timeout(const Baselines& baselines) {
    double slowest = 0.0;
    for (const auto& [id, o] : baselines) slowest = std::max(slowest, o.wall_seconds);
    return std::max(10.0, 5.0 * slowest);
}

Reason classify_outcomes(const std::map<std::string, solver::SolveOutcome>& outcomes, const Baselines& baselines,
                         double timeout_seconds, double epsilon_seconds) {
    std::size_t unsat = 0;
    for (const auto& [id, o] : outcomes) {
        if (o.status == solver::SolveStatus::Error) return Reason::SyntaxError;
        if (o.status == solver::SolveStatus::Unsat) ++unsat;
    }
    if (unsat > 0) return unsat == outcomes.size() ? Reason::UnsatAll : Reason::UnsatSome;
    for (const auto& [id, o] : outcomes) {
        auto base = baselines.find(id);
        if (base == baselines.end()) continue;
        double seconds = o.status == solver::SolveStatus::Timeout ? timeout_seconds : o.wall_seconds;
        if (seconds < base->second.wall_seconds - epsilon_seconds) return Reason::Improved;
    }
    return Reason::NoImprovement;
}

Candidate validate_candidate(Candidate candidate, const Problem& problem, const Baselines& baselines,
                             solver::Backend& backend, const ValidationSettings& settings) {
    candidate.per_instance.clear();
    if (auto diag = detail::static_check(candidate.snippet, problem.encoding)) {
        candidate.status = CandidateStatus::Discarded;
        candidate.reason = Reason::SyntaxError;
        candidate.diagnostic = *diag;
        return candidate;
    }
    const auto composed = asp::compose(problem.encoding, std::span<const asp::Snippet>(&candidate.snippet, 1));

    std::vector<solver::SolveOutcome> results(problem.instances.size());
    std::vector<std::function<void()>> jobs;
    for (std::size_t i = 0; i < problem.instances.size(); ++i) {
        jobs.push_back([&, i] {
            results[i] = backend.solve(instance_program(composed, problem.instances[i]), settings.timeout_seconds);
        });
    }
    if (settings.scheduler) settings.scheduler->run_all(std::move(jobs));
    else for (auto& job : jobs) job();

    for (std::size_t i = 0; i < problem.instances.size(); ++i) {
        if (results[i].status == solver::SolveStatus::Error && candidate.diagnostic.empty()) {
            candidate.diagnostic = results[i].diagnostic;
        }
        candidate.per_instance.emplace(problem.instances[i].id, results[i]);
    }
    candidate.reason = classify_outcomes(candidate.per_instance, baselines, settings.timeout_seconds,
                                         settings.epsilon_seconds);
    candidate.status = candidate.reason == Reason::Improved ? CandidateStatus::Kept : CandidateStatus::Discarded;
    return candidate;
}

}  // namespace streamforge::pipeline
