#include "streamforge/solver_backend.hpp"

#include <algorithm>
#include <thread>

namespace streamforge::solver {

std::string_view to_string(SolveStatus status) {
    switch (status) {
    case SolveStatus::Sat: return "SAT";
    case SolveStatus::Unsat: return "UNSAT";
    case SolveStatus::Timeout: return "TIMEOUT";
    case SolveStatus::Error: return "ERROR";
    }
    return "ERROR";
}

std::optional<SolveStatus> parse_status(std::string_view text) {
    if (text == "SAT") return SolveStatus::Sat;
    if (text == "UNSAT") return SolveStatus::Unsat;
    if (text == "TIMEOUT") return SolveStatus::Timeout;
    if (text == "ERROR") return SolveStatus::Error;
    return std::nullopt;
}

std::optional<ClockMode> parse_clock_mode(std::string_view text) {
    if (text == "wall") return ClockMode::Wall;
    if (text == "cpu") return ClockMode::Cpu;
    if (text == "work") return ClockMode::Work;
    return std::nullopt;
}

SolveStatus parse_external_output(std::string_view stdout_text, int exit_code) {
    bool sat_line = false;
    bool unsat_line = false;
    std::size_t pos = 0;
    while (pos <= stdout_text.size()) {
        auto nl = stdout_text.find('\n', pos);
        auto line = stdout_text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
        if (line == "UNSATISFIABLE") unsat_line = true;
        if (line == "SATISFIABLE") sat_line = true;
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    if (unsat_line) return SolveStatus::Unsat;
    if (sat_line) return SolveStatus::Sat;
    if (exit_code == 20) return SolveStatus::Unsat;
    if (exit_code > 0 && (exit_code & 10) == 10) return SolveStatus::Sat;
    return SolveStatus::Error;
}

RepeatedBackend::RepeatedBackend(std::shared_ptr<Backend> inner, int repetitions)
    : inner_(std::move(inner)), repetitions_(std::max(1, repetitions)) {}

SolveOutcome RepeatedBackend::solve(std::string_view program, double timeout_seconds) {
    std::vector<SolveOutcome> runs;
    for (int i = 0; i < repetitions_; ++i) {
        runs.push_back(inner_->solve(program, timeout_seconds));
        if (runs.back().status == SolveStatus::Error) return runs.back();
    }
    std::sort(runs.begin(), runs.end(),
              [](const SolveOutcome& a, const SolveOutcome& b) { return a.wall_seconds < b.wall_seconds; });
    SolveOutcome median = runs[runs.size() / 2];
    if (runs.size() % 2 == 0) {
        const auto& lo = runs[runs.size() / 2 - 1];
        if (lo.status == median.status) median.wall_seconds = 0.5 * (lo.wall_seconds + median.wall_seconds);
    }
    return median;
}

Scheduler::Scheduler(int workers) : workers_(std::max(1, workers)), slots_(std::max(1, workers)) {}

void Scheduler::run_all(std::vector<std::function<void()>> jobs) {
    if (workers_ == 1) {
        for (auto& job : jobs) job();
        return;
    }
    std::vector<std::jthread> threads;
    threads.reserve(jobs.size());
    for (auto& job : jobs) {
        slots_.acquire();
        threads.emplace_back([this, job = std::move(job)] {
            job();
            slots_.release();
        });
    }
}

}  // namespace streamforge::solver
