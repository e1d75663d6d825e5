#include "streamforge/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>

#include <json.hpp>

namespace streamforge::cli {

namespace {

using nlohmann::json;

void reject_unknown(const json& section, const std::string& name, std::initializer_list<const char*> known) {
    if (!section.is_object()) throw ConfigError("section '" + name + "' must be an object");
    std::set<std::string> allowed(known.begin(), known.end());
    for (auto it = section.begin(); it != section.end(); ++it) {
        if (!allowed.count(it.key())) throw ConfigError("unknown key '" + name + "." + it.key() + "'");
    }
}

template <class T>
void read(const json& section, const char* key, T& target, const std::string& where) {
    if (!section.contains(key)) return;
    try {
        target = section.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("key '" + where + "." + key + "' has the wrong type");
    }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

std::vector<std::filesystem::path> read_instance_list(const json& section, const char* list_key,
                                                      const char* dir_key, const std::filesystem::path& base,
                                                      const std::string& where) {
    std::vector<std::filesystem::path> out;
    if (section.contains(list_key)) {
        std::vector<std::string> items;
        read(section, list_key, items, where);
        for (const auto& s : items) out.push_back(resolve(base, s));
    }
    if (section.contains(dir_key)) {
        std::string dir;
        read(section, dir_key, dir, where);
        auto found = list_instances(resolve(base, dir));
        out.insert(out.end(), found.begin(), found.end());
    }
    return out;
}

}  // namespace

std::vector<std::filesystem::path> list_instances(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw ConfigError("not a directory: " + dir.string());
    std::vector<std::filesystem::path> out;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".lp") out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    json root = json::parse(in, nullptr, false, true);
    if (root.is_discarded() || !root.is_object()) throw ConfigError("config is not a JSON object: " + path.string());
    reject_unknown(root, "config", {"mode", "pipeline", "solver", "llm", "evaluation"});

    const auto base = path.parent_path();
    Config cfg;

    std::string mode = "live";
    read(root, "mode", mode, "config");
    if (mode == "live") cfg.mode = Mode::Live;
    else if (mode == "replay") cfg.mode = Mode::Replay;
    else if (mode == "test") cfg.mode = Mode::Test;
    else throw ConfigError("mode must be live, replay or test");

    const json pl = root.value("pipeline", json::object());
    reject_unknown(pl, "pipeline",
                   {"encoding", "training_instances", "training_dir", "output_dir", "ledger", "budget_seconds",
                    "baseline_timeout_seconds", "training_timeout_seconds", "improvement_epsilon_seconds",
                    "max_selected", "seed"});
    std::string encoding, output_dir = "out", ledger;
    read(pl, "encoding", encoding, "pipeline");
    if (encoding.empty()) throw ConfigError("pipeline.encoding is required");
    cfg.encoding = resolve(base, encoding);
    cfg.training_instances = read_instance_list(pl, "training_instances", "training_dir", base, "pipeline");
    read(pl, "output_dir", output_dir, "pipeline");
    cfg.output_dir = resolve(base, output_dir);
    read(pl, "ledger", ledger, "pipeline");
    cfg.ledger = ledger.empty() ? cfg.output_dir / "ledger.jsonl" : resolve(base, ledger);
    read(pl, "budget_seconds", cfg.training.budget_seconds, "pipeline");
    read(pl, "baseline_timeout_seconds", cfg.training.baseline_timeout_seconds, "pipeline");
    if (pl.contains("training_timeout_seconds")) {
        double t = 0;
        read(pl, "training_timeout_seconds", t, "pipeline");
        cfg.training.training_timeout_seconds = t;
    }
    read(pl, "improvement_epsilon_seconds", cfg.training.improvement_epsilon_seconds, "pipeline");
    read(pl, "max_selected", cfg.training.max_selected, "pipeline");
    read(pl, "seed", cfg.training.rng_seed, "pipeline");

    const json sv = root.value("solver", json::object());
    reject_unknown(sv, "solver", {"backend", "path", "args", "clock", "work_unit_seconds", "workers", "repetitions"});
    read(sv, "backend", cfg.solver.backend, "solver");
    if (cfg.solver.backend != "auto" && cfg.solver.backend != "internal" && cfg.solver.backend != "external") {
        throw ConfigError("solver.backend must be auto, internal or external");
    }
    read(sv, "path", cfg.solver.path, "solver");
    if (!cfg.solver.path.empty() && cfg.solver.path.find('/') != std::string::npos) {
        cfg.solver.path = resolve(base, cfg.solver.path).string();
    }
    read(sv, "args", cfg.solver.args, "solver");
    std::string clock = "wall";
    read(sv, "clock", clock, "solver");
    auto parsed_clock = solver::parse_clock_mode(clock);
    if (!parsed_clock) throw ConfigError("solver.clock must be wall, cpu or work");
    cfg.solver.clock = *parsed_clock;
    read(sv, "work_unit_seconds", cfg.solver.work_unit_seconds, "solver");
    read(sv, "workers", cfg.solver.workers, "solver");
    read(sv, "repetitions", cfg.solver.repetitions, "solver");

    const json lm = root.value("llm", json::object());
    reject_unknown(lm, "llm", {"endpoint", "api_key_env", "models", "temperature", "max_retries", "replay_dir"});
    read(lm, "endpoint", cfg.llm.endpoint, "llm");
    read(lm, "api_key_env", cfg.llm.api_key_env, "llm");
    read(lm, "models", cfg.llm.models, "llm");
    read(lm, "temperature", cfg.llm.temperature, "llm");
    read(lm, "max_retries", cfg.llm.max_retries, "llm");
    std::string replay;
    read(lm, "replay_dir", replay, "llm");
    if (!replay.empty()) cfg.llm.replay_dir = resolve(base, replay);

    const json ev = root.value("evaluation", json::object());
    reject_unknown(ev, "evaluation", {"timeout_seconds", "test_instances", "test_dir"});
    read(ev, "timeout_seconds", cfg.evaluation.timeout_seconds, "evaluation");
    cfg.evaluation.test_instances = read_instance_list(ev, "test_instances", "test_dir", base, "evaluation");

    if (cfg.mode == Mode::Test) {
        cfg.training.normalize_timestamps = true;
        if (cfg.solver.backend != "external") {
            cfg.solver.backend = "internal";
            cfg.solver.clock = solver::ClockMode::Work;
        }
    }
    if (cfg.mode != Mode::Live && cfg.llm.replay_dir.empty()) throw ConfigError("replay mode needs llm.replay_dir");
    if (cfg.llm.models.empty()) throw ConfigError("llm.models must list at least one model");
    if (cfg.training_instances.empty()) throw ConfigError("no training instances configured");
    if (cfg.solver.workers < 1 || cfg.solver.repetitions < 1) {
        throw ConfigError("solver.workers and solver.repetitions must be at least 1");
    }
    if (!(cfg.evaluation.timeout_seconds > 0)) throw ConfigError("evaluation.timeout_seconds must be positive");
    try {
        cfg.training.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("pipeline: ") + e.what());
    }
    return cfg;
}

std::shared_ptr<solver::Backend> make_backend(const SolverSettings& settings) {
    std::string backend = settings.backend;
    std::string path = settings.path;
    if (path.empty()) path = solver::solver_from_environment().value_or("");
    if (backend == "auto") backend = path.empty() ? "internal" : "external";

    std::shared_ptr<solver::Backend> out;
    if (backend == "external") {
        if (path.empty()) throw ConfigError("external solver requested but no path given and STREAMFORGE_SOLVER unset");
        if (settings.clock == solver::ClockMode::Work) throw ConfigError("the work clock needs the internal backend");
        solver::ExternalOptions opts;
        opts.path = path;
        opts.args = settings.args;
        opts.cpu_time = settings.clock == solver::ClockMode::Cpu;
        out = std::make_shared<solver::ExternalBackend>(opts);
    } else {
        solver::InternalOptions opts;
        opts.clock = settings.clock;
        opts.work_unit_seconds = settings.work_unit_seconds;
        out = std::make_shared<solver::InternalBackend>(opts);
    }
    if (settings.repetitions > 1) out = std::make_shared<solver::RepeatedBackend>(out, settings.repetitions);
    return out;
}

std::unique_ptr<llm::Provider> make_provider(const Config& config) {
    if (config.mode != Mode::Live) return std::make_unique<llm::ReplayProvider>(config.llm.replay_dir);
    const char* key = std::getenv(config.llm.api_key_env.c_str());
    if (!key || !*key) throw ConfigError("credential variable " + config.llm.api_key_env + " is not set");
    llm::HttpProviderOptions opts;
    opts.endpoint = config.llm.endpoint;
    opts.api_key = key;
    opts.params.temperature = config.llm.temperature;
    opts.max_retries = config.llm.max_retries;
    return std::make_unique<llm::HttpProvider>(opts);
}

}  // namespace streamforge::cli
