#pragma once

// The bundled toy benchmark (assignment of items to units with conflicts)
// wired up the way `train` does in test mode.

#include "streamforge/llm_gateway.hpp"
#include "streamforge/pipeline.hpp"
#include "streamforge/solver_backend.hpp"
#include "support/paths.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace sf_test {

inline streamforge::pipeline::Problem toy_problem(const std::string& dir = "train") {
    std::vector<std::filesystem::path> paths;
    for (const auto& e : std::filesystem::directory_iterator(fixture("toy/" + dir))) paths.push_back(e.path());
    std::sort(paths.begin(), paths.end());
    return {read_file(fixture("toy/encoding.lp")), streamforge::pipeline::load_instances(paths)};
}

inline streamforge::llm::ModelRoster toy_roster() {
    return streamforge::llm::ModelRoster({"model-a", "model-b", "model-c", "model-d", "model-e"}, 7);
}

inline streamforge::solver::InternalBackend toy_backend() {
    streamforge::solver::InternalOptions opts;
    opts.clock = streamforge::solver::ClockMode::Work;
    return streamforge::solver::InternalBackend(opts);
}

inline streamforge::pipeline::TrainingConfig toy_config() {
    streamforge::pipeline::TrainingConfig c;
    c.budget_seconds = 60;
    c.baseline_timeout_seconds = 10;
    c.max_selected = 3;
    c.rng_seed = 7;
    c.normalize_timestamps = true;
    return c;
}

struct FilterCase {
    std::string text;
    streamforge::pipeline::Reason reason;
};

// One crafted candidate per verdict bucket on the toy training set.
inline std::vector<FilterCase> filter_cases() {
    using streamforge::pipeline::Reason;
    return {
        {":- assign(1,U), U > 1.", Reason::Improved},
        {":- assign(I,U", Reason::SyntaxError},
        {":- item(1).", Reason::UnsatAll},
        {":- item(4).", Reason::UnsatSome},
        {":- assign(I,U), not item(I).", Reason::NoImprovement},
    };
}

}  // namespace sf_test
