#pragma once

// Timed solver runs behind one interface: an external Clingo-compatible
// executable fed on stdin, or the in-process reference backend.

#include <chrono>
#include <cstdint>
#include <functional>
#include <atomic>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <sys/types.h>
#include <vector>

namespace streamforge::solver {

enum class SolveStatus { Sat, Unsat, Timeout, Error };

std::string_view to_string(SolveStatus status);
std::optional<SolveStatus> parse_status(std::string_view text);

struct SolveOutcome {
    SolveStatus status = SolveStatus::Error;
    double wall_seconds = 0.0;
    std::string diagnostic;   // non-empty for Error

    bool solved() const { return status == SolveStatus::Sat || status == SolveStatus::Unsat; }
};

struct RunRecord {
    std::string variant_id;
    std::string instance_id;
    SolveOutcome outcome;
    double timeout_seconds = 0.0;
    std::int64_t timestamp = 0;   // unix seconds; 0 when normalized
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual SolveOutcome solve(std::string_view program, double timeout_seconds) = 0;
    virtual std::string name() const = 0;
};

// Maps a finished external run to a status: an `UNSATISFIABLE` line or exit
// code 20 is Unsat, a `SATISFIABLE` line or an exit code with the bits of 10
// set is Sat, anything else is Error.
SolveStatus parse_external_output(std::string_view stdout_text, int exit_code);

enum class ClockMode {
    Wall,   // monotonic wall clock around the whole run
    Cpu,    // user + system time of the solver
    Work    // deterministic work units of the reference backend
};

std::optional<ClockMode> parse_clock_mode(std::string_view text);

struct ExternalOptions {
    std::string path;
    std::vector<std::string> args = {"--models=1", "--quiet=2"};
    bool cpu_time = false;
    std::chrono::milliseconds kill_grace{100};
};

class ExternalBackend final : public Backend {
public:
    explicit ExternalBackend(ExternalOptions options);

    SolveOutcome solve(std::string_view program, double timeout_seconds) override;
    // Path and flags, as recorded in ledgers.
    std::string name() const override;

    const ExternalOptions& options() const { return options_; }
    // Process id of the most recent child, for reaping checks.
    pid_t last_child_pid() const { return last_pid_; }

private:
    ExternalOptions options_;
    std::atomic<pid_t> last_pid_{-1};
};

struct InternalOptions {
    ClockMode clock = ClockMode::Wall;
    double work_unit_seconds = 1e-6;
    std::size_t max_free_atoms = 24;
    std::size_t max_ground_rules = 100000;
};

class InternalBackend final : public Backend {
public:
    explicit InternalBackend(InternalOptions options = {}) : options_(options) {}

    SolveOutcome solve(std::string_view program, double timeout_seconds) override;
    std::string name() const override { return "internal"; }

    const InternalOptions& options() const { return options_; }

private:
    InternalOptions options_;
};

// Solver path from STREAMFORGE_SOLVER, if set and non-empty.
std::optional<std::string> solver_from_environment();

// Runs a backend `repetitions` times and reports the median wall time.
class RepeatedBackend final : public Backend {
public:
    RepeatedBackend(std::shared_ptr<Backend> inner, int repetitions);

    SolveOutcome solve(std::string_view program, double timeout_seconds) override;
    std::string name() const override { return inner_->name(); }

private:
    std::shared_ptr<Backend> inner_;
    int repetitions_;
};

// Caps the number of concurrently executing timed runs.
class Scheduler {
public:
    explicit Scheduler(int workers = 1);

    int workers() const { return workers_; }

    // Runs every job, at most `workers` at a time; returns when all finished.
    void run_all(std::vector<std::function<void()>> jobs);

private:
    int workers_;
    std::counting_semaphore<> slots_;
};

}  // namespace streamforge::solver
