#include "streamforge/aspkit.hpp"
#include "streamforge/ground_eval.hpp"
#include "streamforge/solver_backend.hpp"

#include <cmath>
#include <ctime>

namespace streamforge::solver {

namespace {

double thread_cpu_seconds() {
    timespec ts{};
    ::clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
    return static_cast<double>(ts.tv_sec) + static_cast<double>(ts.tv_nsec) * 1e-9;
}

}  // namespace

SolveOutcome InternalBackend::solve(std::string_view program, double timeout_seconds) {
    using Clock = std::chrono::steady_clock;
    if (timeout_seconds <= 0) return SolveOutcome{SolveStatus::Error, 0.0, "timeout must be positive"};

    const auto start = Clock::now();
    const double cpu_start = thread_cpu_seconds();
    std::uint64_t ground_work = 0;
    ground::SearchStats stats;

    auto elapsed = [&]() -> double {
        switch (options_.clock) {
        case ClockMode::Work: {
            // Divide when the unit is a reciprocal integer so 1621 units
            // print as 0.001621 rather than a rounding artefact.
            const double units = static_cast<double>(ground_work + stats.work());
            const double per_second = std::round(1.0 / options_.work_unit_seconds);
            if (std::abs(per_second * options_.work_unit_seconds - 1.0) < 1e-12) return units / per_second;
            return units * options_.work_unit_seconds;
        }
        case ClockMode::Cpu: return thread_cpu_seconds() - cpu_start;
        case ClockMode::Wall: break;
        }
        return std::chrono::duration<double>(Clock::now() - start).count();
    };

    auto parsed = asp::parse_program(program);
    if (!parsed.ok()) {
        const auto& e = parsed.errors.front();
        return SolveOutcome{SolveStatus::Error, elapsed(),
                            "syntax error at " + std::to_string(e.line) + ":" + std::to_string(e.column) + ": " + e.message};
    }

    try {
        ground::GroundOptions gopts;
        gopts.max_ground_rules = options_.max_ground_rules;
        auto gp = ground::ground(parsed.rules, gopts);
        ground_work = gp.rules.size() + gp.atoms.size();

        ground::SearchLimits limits;
        limits.max_free_atoms = options_.max_free_atoms;
        limits.deadline = start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(timeout_seconds));
        if (options_.clock == ClockMode::Work) {
            double units = std::floor(timeout_seconds / options_.work_unit_seconds);
            limits.work_budget = units > static_cast<double>(ground_work)
                                     ? static_cast<std::uint64_t>(units) - ground_work
                                     : 0;
        }
        auto models = ground::stable_models(gp, 1, limits, &stats);
        double seconds = elapsed();
        if (seconds >= timeout_seconds) return SolveOutcome{SolveStatus::Timeout, timeout_seconds, {}};
        return SolveOutcome{models.empty() ? SolveStatus::Unsat : SolveStatus::Sat, seconds, {}};
    } catch (const ground::SearchInterrupted&) {
        return SolveOutcome{SolveStatus::Timeout, timeout_seconds, {}};
    } catch (const ground::GroundingError& e) {
        return SolveOutcome{SolveStatus::Error, elapsed(), std::string("grounding failed: ") + e.what()};
    } catch (const ground::UniverseTooLarge& e) {
        return SolveOutcome{SolveStatus::Error, elapsed(), std::string("reference backend limit: ") + e.what()};
    }
}

}  // namespace streamforge::solver
