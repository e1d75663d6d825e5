#include "detail.hpp"

#include <chrono>
#include <cstdio>
#include <unordered_map>

namespace streamforge::pipeline {

namespace {

// Walks the recorded prefix of a ledger; once it is consumed, new events are
// appended instead.
class Journal {
public:
    explicit Journal(Ledger& ledger) : ledger_(ledger) {}

    bool replaying() const { return cursor_ < ledger_.size(); }

    bool next_is(std::string_view type) const {
        return replaying() && ledger_.events()[cursor_].value("type", std::string{}) == type;
    }

    // Next recorded event, checked against the expected type.
    const json* recorded(std::string_view type) {
        if (!replaying()) return nullptr;
        const json& ev = ledger_.events()[cursor_];
        if (ev.value("type", std::string{}) != type) {
            throw LedgerError("ledger diverges at seq " + std::to_string(cursor_) + ": expected " + std::string(type) +
                              ", found " + ev.value("type", std::string{"?"}));
        }
        ++cursor_;
        return &ev;
    }

    const json& emit(json event) {
        ++cursor_;
        return ledger_.append(std::move(event));
    }

private:
    Ledger& ledger_;
    std::size_t cursor_ = 0;
};

void expect_field(const json& ev, const char* key, const json& value) {
    if (!ev.contains(key) || ev.at(key) != value) {
        throw LedgerError("ledger diverges at seq " + std::to_string(ev.value("seq", 0)) + ": field '" + key +
                          "' is " + (ev.contains(key) ? ev.at(key).dump() : "missing") + ", expected " + value.dump());
    }
}

std::string candidate_id(std::uint64_t iteration, std::size_t index) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "c%03llu_%zu", static_cast<unsigned long long>(iteration), index);
    return buf;
}

json per_instance_json(const std::map<std::string, solver::SolveOutcome>& outcomes) {
    json j = json::object();
    for (const auto& [id, o] : outcomes) j[id] = detail::outcome_to_json(o);
    return j;
}

}  // namespace

TrainingResult training_loop(const Problem& problem, const TrainingConfig& config, const llm::ModelRoster& roster,
                             llm::Provider& provider, solver::Backend& backend, Ledger& ledger,
                             const TrainingHooks& hooks) {
    config.validate();
    const auto started = std::chrono::steady_clock::now();
    ElapsedClock elapsed = hooks.elapsed ? hooks.elapsed : [started] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    };
    auto unix_now = [&]() -> std::int64_t {
        if (config.normalize_timestamps) return 0;
        if (hooks.unix_time) return hooks.unix_time();
        return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
            .count();
    };

    Journal journal(ledger);
    TrainingResult result;

    // A journaled solve: recorded outcome if present, otherwise run and log it.
    auto timed_run = [&](const std::string& candidate, const Instance& inst, std::string_view composed,
                         double timeout) {
        if (const json* ev = journal.recorded("validation_run")) {
            expect_field(*ev, "candidate", candidate);
            expect_field(*ev, "instance", inst.id);
            return detail::outcome_from_json(ev->at("outcome"));
        }
        auto outcome = backend.solve(instance_program(composed, inst), timeout);
        journal.emit({{"type", "validation_run"},
                      {"candidate", candidate},
                      {"instance", inst.id},
                      {"solver", backend.name()},
                      {"timeout", timeout},
                      {"ts", unix_now()},
                      {"outcome", detail::outcome_to_json(outcome)}});
        return outcome;
    };

    if (problem.instances.empty()) throw BaselineError("no training instances");
    for (const auto& inst : problem.instances) {
        auto outcome = timed_run("original", inst, problem.encoding, config.baseline_timeout_seconds);
        if (outcome.status != solver::SolveStatus::Sat) {
            std::string msg = "baseline on training instance '" + inst.id + "' is " +
                              std::string(solver::to_string(outcome.status)) + ", expected SAT";
            if (!outcome.diagnostic.empty()) msg += ": " + outcome.diagnostic;
            throw BaselineError(msg);
        }
        result.baselines.emplace(inst.id, outcome);
    }
    result.training_timeout_seconds =
        config.training_timeout_seconds.value_or(default_training_timeout(result.baselines));
    const double timeout = result.training_timeout_seconds;

    std::unordered_map<std::string, std::size_t> first_by_text;   // normalized text -> index in candidates

    for (std::uint64_t iteration = 0;; ++iteration) {
        // Recorded iterations happened inside the original budget.
        if (!journal.replaying() && elapsed() >= config.budget_seconds) break;
        if (journal.next_is("selection")) break;

        const std::string& model = pick_model(roster, iteration);
        std::string raw_text;
        std::string error;
        if (const json* ev = journal.recorded("llm_call")) {
            expect_field(*ev, "iteration", iteration);
            expect_field(*ev, "model", model);
            raw_text = ev->value("raw_text", std::string{});
            error = ev->value("error", std::string{});
        } else {
            json event = {{"type", "llm_call"}, {"iteration", iteration}, {"model", model},
                          {"t", config.normalize_timestamps ? 0.0 : elapsed()}, {"ts", unix_now()}};
            try {
                auto response = llm::request_candidates(provider, problem.encoding, model, iteration, unix_now);
                raw_text = response.raw_text;
                event["raw_text"] = raw_text;
                event["latency_seconds"] = config.normalize_timestamps ? 0.0 : response.latency_seconds;
            } catch (const llm::ProviderExhausted&) {
                break;
            } catch (const llm::AuthError& e) {
                event["error"] = e.what();
                journal.emit(std::move(event));
                ++result.llm_calls;
                ++result.failed_llm_calls;
                throw;
            } catch (const llm::ProviderError& e) {
                error = e.what();
                event["error"] = error;
            }
            journal.emit(std::move(event));
        }
        ++result.llm_calls;
        if (!error.empty()) {
            ++result.failed_llm_calls;
            continue;
        }

        std::vector<std::string> texts;
        try {
            texts = llm::extract_snippets(raw_text);
        } catch (const llm::ExtractionError&) {
            continue;   // visible in the ledger as an llm_call without candidates
        }

        for (std::size_t k = 0; k < texts.size(); ++k) {
            Candidate cand;
            cand.id = candidate_id(iteration, k + 1);
            cand.snippet = asp::classify_snippet(texts[k], cand.id);
            cand.source_model = model;
            cand.iteration = iteration;

            auto norm = normalize_snippet_text(texts[k]);
            auto dup = first_by_text.find(norm);
            if (dup != first_by_text.end()) cand.duplicate_of = result.candidates[dup->second].id;

            json created = {{"type", "candidate_created"}, {"candidate", cand.id},  {"iteration", iteration},
                            {"model", model},              {"text", texts[k]},
                            {"kind", asp::to_string(cand.snippet.kind)}};
            if (cand.duplicate_of) created["duplicate_of"] = *cand.duplicate_of;
            if (const json* ev = journal.recorded("candidate_created")) {
                expect_field(*ev, "candidate", cand.id);
                expect_field(*ev, "text", texts[k]);
            } else {
                journal.emit(std::move(created));
            }

            if (cand.duplicate_of) {
                const Candidate& first = result.candidates[dup->second];
                cand.status = first.status;
                cand.reason = first.reason;
                cand.per_instance = first.per_instance;
                cand.diagnostic = first.diagnostic;
            } else if (auto diag = detail::static_check(cand.snippet, problem.encoding)) {
                cand.status = CandidateStatus::Discarded;
                cand.reason = Reason::SyntaxError;
                cand.diagnostic = *diag;
            } else {
                auto composed = asp::compose(problem.encoding, std::span<const asp::Snippet>(&cand.snippet, 1));
                for (const auto& inst : problem.instances) {
                    auto outcome = timed_run(cand.id, inst, composed, timeout);
                    if (outcome.status == solver::SolveStatus::Error && cand.diagnostic.empty()) {
                        cand.diagnostic = outcome.diagnostic;
                    }
                    cand.per_instance.emplace(inst.id, outcome);
                }
                cand.reason = classify_outcomes(cand.per_instance, result.baselines, timeout,
                                                config.improvement_epsilon_seconds);
                cand.status = cand.reason == Reason::Improved ? CandidateStatus::Kept : CandidateStatus::Discarded;
            }

            json verdict = {{"type", "candidate_verdict"},
                            {"candidate", cand.id},
                            {"status", to_string(cand.status)},
                            {"reason", to_string(cand.reason)},
                            {"per_instance", per_instance_json(cand.per_instance)}};
            if (!cand.diagnostic.empty()) verdict["diagnostic"] = cand.diagnostic;
            if (cand.duplicate_of) verdict["duplicate_of"] = *cand.duplicate_of;
            if (const json* ev = journal.recorded("candidate_verdict")) {
                expect_field(*ev, "candidate", cand.id);
                expect_field(*ev, "reason", std::string(to_string(cand.reason)));
            } else {
                journal.emit(std::move(verdict));
            }

            if (!cand.duplicate_of) {
                first_by_text.emplace(norm, result.candidates.size());
                if (cand.status == CandidateStatus::Kept) result.kept.push_back(cand);
            }
            result.candidates.push_back(std::move(cand));
        }
    }
    return result;
}

void record_selection(Ledger& ledger, const SelectionResult& selection) {
    for (const auto& ev : ledger.events()) {
        if (ev.value("type", std::string{}) == "selection") return;   // resumed run already finished
    }
    ledger.append({{"type", "selection"},
                   {"selected", selection.selected_ids},
                   {"training_vbe_sum", selection.training_vbe_sum},
                   {"baseline_sum", selection.baseline_sum},
                   {"considered_combinations", selection.considered_combinations}});
}

}  // namespace streamforge::pipeline
