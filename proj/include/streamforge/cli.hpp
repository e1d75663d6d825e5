#pragma once

// Configuration loading and the `streamforge` command-line entry point.

#include "streamforge/llm_gateway.hpp"
#include "streamforge/pipeline.hpp"
#include "streamforge/solver_backend.hpp"

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace streamforge::cli {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kConfigError = 2,
    kBaselineError = 3,
    kProviderError = 4,
};

enum class Mode { Live, Replay, Test };

struct SolverSettings {
    std::string backend = "auto";   // auto | internal | external
    std::string path;               // external executable; STREAMFORGE_SOLVER when empty
    std::vector<std::string> args = {"--models=1", "--quiet=2"};
    solver::ClockMode clock = solver::ClockMode::Wall;
    double work_unit_seconds = 1e-6;
    int workers = 1;
    int repetitions = 1;
};

struct LlmSettings {
    std::string endpoint = "https://openrouter.ai/api/v1/chat/completions";
    std::string api_key_env = "OPENROUTER_API_KEY";
    std::vector<std::string> models;
    double temperature = 1.0;
    int max_retries = 3;
    std::filesystem::path replay_dir;
};

struct EvaluationSettings {
    double timeout_seconds = 1200.0;
    std::vector<std::filesystem::path> test_instances;
};

// Paths are resolved against the directory of the config file.
struct Config {
    Mode mode = Mode::Live;
    std::filesystem::path encoding;
    std::vector<std::filesystem::path> training_instances;
    std::filesystem::path output_dir = "out";
    std::filesystem::path ledger;   // defaults to <output_dir>/ledger.jsonl
    pipeline::TrainingConfig training;
    SolverSettings solver;
    LlmSettings llm;
    EvaluationSettings evaluation;
};

Config load_config(const std::filesystem::path& path);

// `.lp` files of a directory, sorted by name.
std::vector<std::filesystem::path> list_instances(const std::filesystem::path& dir);

std::shared_ptr<solver::Backend> make_backend(const SolverSettings& settings);
std::unique_ptr<llm::Provider> make_provider(const Config& config);

int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace streamforge::cli
