#include "streamforge/cli.hpp"
#include "streamforge/evalkit.hpp"
#include "streamforge/ground_eval.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

namespace streamforge::cli {

namespace {

using nlohmann::json;

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

void require_parseable_encoding(const std::string& text, const std::filesystem::path& path) {
    auto parsed = asp::parse_program(text);
    if (!parsed.ok()) {
        const auto& e = parsed.errors.front();
        throw ConfigError(path.string() + ":" + std::to_string(e.line) + ":" + std::to_string(e.column) + ": " +
                          e.message);
    }
}

struct TrainArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<double> budget;
    std::optional<double> timeout;
    bool fresh = false;
};

int cmd_train(const TrainArgs& args, std::ostream& out, std::ostream& err) {
    Config cfg = load_config(args.config);
    if (args.seed) cfg.training.rng_seed = *args.seed;
    if (args.budget) cfg.training.budget_seconds = *args.budget;
    if (args.timeout) cfg.training.training_timeout_seconds = *args.timeout;
    try {
        cfg.training.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    pipeline::Problem problem;
    problem.encoding = slurp(cfg.encoding);
    require_parseable_encoding(problem.encoding, cfg.encoding);
    problem.instances = pipeline::load_instances(cfg.training_instances);

    auto backend = make_backend(cfg.solver);
    auto provider = make_provider(cfg);
    llm::ModelRoster roster(cfg.llm.models, cfg.training.rng_seed);

    std::filesystem::create_directories(cfg.output_dir);
    if (args.fresh) std::filesystem::remove(cfg.ledger);
    pipeline::Ledger ledger(cfg.ledger);

    auto result = pipeline::training_loop(problem, cfg.training, roster, *provider, *backend, ledger);
    if (result.llm_calls > 0 && result.failed_llm_calls == result.llm_calls) {
        err << "error: every LLM call failed (" << result.llm_calls << "); see " << cfg.ledger.string() << "\n";
        return kProviderError;
    }

    pipeline::SelectionResult selection;
    try {
        selection = pipeline::select_best(result.kept, result.baselines, cfg.training.max_selected);
    } catch (const pipeline::EmptyPoolError&) {
        for (const auto& [id, o] : result.baselines) selection.baseline_sum += o.wall_seconds;
        selection.training_vbe_sum = selection.baseline_sum;
        err << "warning: no candidate was kept; selection is the original encoding only\n";
    }
    pipeline::record_selection(ledger, selection);

    json selected = json::array();
    for (const auto& id : selection.selected_ids) {
        auto it = std::find_if(result.kept.begin(), result.kept.end(),
                               [&](const pipeline::Candidate& c) { return c.id == id; });
        selected.push_back({{"id", it->id},
                            {"model", it->source_model},
                            {"iteration", it->iteration},
                            {"kind", asp::to_string(it->snippet.kind)},
                            {"text", it->snippet.raw_text}});
    }
    json baselines = json::object();
    for (const auto& [id, o] : result.baselines) baselines[id] = o.wall_seconds;
    json kept = json::array();
    for (const auto& c : result.kept) kept.push_back(c.id);
    json doc = {{"v", 1},
                {"seed", cfg.training.rng_seed},
                {"encoding", problem.encoding},
                {"selected", selected},
                {"kept", kept},
                {"candidates", result.candidates.size()},
                {"llm_calls", result.llm_calls},
                {"baseline_seconds", baselines},
                {"training_timeout_seconds", result.training_timeout_seconds},
                {"training_vbe_sum_seconds", selection.training_vbe_sum},
                {"baseline_sum_seconds", selection.baseline_sum},
                {"considered_combinations", selection.considered_combinations}};
    write_text(cfg.output_dir / "selection.json", doc.dump(2) + "\n");

    out << "llm calls: " << result.llm_calls << ", candidates: " << result.candidates.size()
        << ", kept: " << result.kept.size() << "\n";
    out << "selected:";
    for (const auto& id : selection.selected_ids) out << " " << id;
    if (selection.selected_ids.empty()) out << " (none)";
    out << "\ntraining VBE sum: " << selection.training_vbe_sum << " s (baseline " << selection.baseline_sum
        << " s)\n";
    return kOk;
}

struct EvaluateArgs {
    std::string selection;
    std::string test_dir;
    std::string out_dir = "evaluation";
    std::string config;
    std::string records;
    std::optional<double> timeout;
    std::string clock;
    int workers = 0;
};

int cmd_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream&) {
    SolverSettings solver_settings;
    double timeout = 1200.0;
    if (!args.config.empty()) {
        Config cfg = load_config(args.config);
        solver_settings = cfg.solver;
        timeout = cfg.evaluation.timeout_seconds;
    }
    if (args.timeout) timeout = *args.timeout;
    if (!(timeout > 0)) throw ConfigError("timeout must be positive");
    if (!args.clock.empty()) {
        auto c = solver::parse_clock_mode(args.clock);
        if (!c) throw ConfigError("clock must be wall, cpu or work");
        solver_settings.clock = *c;
    }
    if (args.workers > 0) solver_settings.workers = args.workers;

    std::vector<solver::RunRecord> records;
    if (!args.records.empty()) {
        records = eval::read_records_csv(args.records, timeout);
    } else {
        if (args.selection.empty() || args.test_dir.empty()) {
            throw ConfigError("evaluate needs --selection and --test, or --records");
        }
        json doc = json::parse(slurp(args.selection), nullptr, false);
        if (doc.is_discarded() || !doc.contains("encoding") || !doc.contains("selected")) {
            throw ConfigError("not a selection file: " + args.selection);
        }
        std::vector<asp::Snippet> snippets;
        for (const auto& s : doc.at("selected")) {
            snippets.push_back(asp::classify_snippet(s.at("text").get<std::string>(), s.at("id").get<std::string>()));
        }
        auto variants = eval::build_variants(doc.at("encoding").get<std::string>(), snippets);
        auto instances = pipeline::load_instances(list_instances(args.test_dir));
        auto backend = make_backend(solver_settings);
        solver::Scheduler scheduler(solver_settings.workers);
        records = eval::run_grid(variants, instances, *backend, timeout, &scheduler, false);
        std::filesystem::create_directories(args.out_dir);
        eval::write_records_csv(records, std::filesystem::path(args.out_dir) / "records.csv");
    }
    auto report = eval::aggregate(records, timeout);
    eval::emit_outputs(report, args.out_dir);
    out << eval::render_markdown(report);
    return kOk;
}

int cmd_report(const std::string& ledger_path, std::ostream& out) {
    if (!std::filesystem::exists(ledger_path)) throw ConfigError("no ledger at " + ledger_path);
    auto stats = pipeline::stats_report(pipeline::Ledger::read(ledger_path));
    out << stats.format();
    return kOk;
}

struct ValidateArgs {
    std::string encoding;
    std::string snippet;
    std::string instances;
    double baseline_timeout = 60.0;
    std::optional<double> timeout;
    double epsilon = 0.0;
    std::string clock = "wall";
};

int cmd_validate(const ValidateArgs& args, std::ostream& out) {
    pipeline::Problem problem;
    problem.encoding = slurp(args.encoding);
    require_parseable_encoding(problem.encoding, args.encoding);
    problem.instances = pipeline::load_instances(list_instances(args.instances));

    SolverSettings settings;
    auto clock = solver::parse_clock_mode(args.clock);
    if (!clock) throw ConfigError("clock must be wall, cpu or work");
    settings.clock = *clock;
    auto backend = make_backend(settings);

    auto baselines = pipeline::run_baseline(problem, *backend, args.baseline_timeout);
    pipeline::ValidationSettings vs;
    vs.timeout_seconds = args.timeout.value_or(pipeline::default_training_timeout(baselines));
    vs.epsilon_seconds = args.epsilon;

    pipeline::Candidate cand;
    cand.id = std::filesystem::path(args.snippet).stem().string();
    cand.snippet = asp::classify_snippet(slurp(args.snippet), cand.id);
    cand = pipeline::validate_candidate(std::move(cand), problem, baselines, *backend, vs);

    out << cand.id << ": " << pipeline::to_string(cand.status) << " (" << pipeline::to_string(cand.reason) << ")\n";
    if (!cand.diagnostic.empty()) out << "  " << cand.diagnostic << "\n";
    for (const auto& [id, o] : cand.per_instance) {
        out << "  " << id << ": " << solver::to_string(o.status) << " " << o.wall_seconds << " s (baseline "
            << baselines.at(id).wall_seconds << " s)\n";
    }
    return kOk;
}

int cmd_oracle(const std::string& program_path, std::size_t models, std::ostream& out, std::ostream& err) {
    auto parsed = asp::parse_program(slurp(program_path));
    if (!parsed.ok()) {
        for (const auto& e : parsed.errors) {
            err << program_path << ":" << e.line << ":" << e.column << ": " << e.message << "\n";
        }
        return kFailure;
    }
    for (const auto& rule : parsed.rules) {
        for (const auto& v : asp::check_safety(rule)) err << program_path << ": " << v.message << "\n";
    }
    auto gp = ground::ground(parsed.rules);
    auto found = ground::stable_models(gp, models == 0 ? std::numeric_limits<std::size_t>::max() : models);
    for (std::size_t i = 0; i < found.size(); ++i) {
        out << "Answer: " << i + 1 << "\n" << ground::format_interpretation(found[i]) << "\n";
    }
    out << (found.empty() ? "UNSATISFIABLE" : "SATISFIABLE") << "\nModels: " << found.size() << "\n";
    return kOk;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Generate, filter and evaluate streamliners for ASP encodings"};
    app.require_subcommand(1);

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "baseline, generation loop and selection");
    train->add_option("--config", train_args.config, "configuration file")->required()->check(CLI::ExistingFile);
    train->add_option("--seed", train_args.seed, "override pipeline.seed");
    train->add_option("--budget-seconds", train_args.budget, "override pipeline.budget_seconds");
    train->add_option("--timeout-seconds", train_args.timeout, "override pipeline.training_timeout_seconds");
    train->add_flag("--fresh", train_args.fresh, "discard an existing ledger instead of resuming it");

    EvaluateArgs eval_args;
    auto* evaluate = app.add_subcommand("evaluate", "run the variant grid on test instances and report");
    evaluate->add_option("--selection", eval_args.selection, "selection.json written by train");
    evaluate->add_option("--test", eval_args.test_dir, "directory of test instances");
    evaluate->add_option("--out", eval_args.out_dir, "output directory");
    evaluate->add_option("--config", eval_args.config, "configuration file for solver settings");
    evaluate->add_option("--records", eval_args.records, "aggregate an existing variant,instance,status,seconds grid");
    evaluate->add_option("--timeout-seconds", eval_args.timeout, "per-run timeout");
    evaluate->add_option("--clock", eval_args.clock, "wall, cpu or work");
    evaluate->add_option("--workers", eval_args.workers, "concurrent solver runs");

    std::string ledger_path;
    auto* report = app.add_subcommand("report", "candidate taxonomy from a ledger");
    report->add_option("--ledger", ledger_path, "ledger file")->required();

    ValidateArgs val_args;
    auto* validate = app.add_subcommand("validate", "check one snippet against training instances");
    validate->add_option("--encoding", val_args.encoding)->required()->check(CLI::ExistingFile);
    validate->add_option("--snippet", val_args.snippet)->required()->check(CLI::ExistingFile);
    validate->add_option("--instances", val_args.instances)->required()->check(CLI::ExistingDirectory);
    validate->add_option("--baseline-timeout-seconds", val_args.baseline_timeout);
    validate->add_option("--timeout-seconds", val_args.timeout);
    validate->add_option("--epsilon-seconds", val_args.epsilon);
    validate->add_option("--clock", val_args.clock, "wall, cpu or work");

    std::string program_path;
    std::size_t model_cap = 0;
    auto* oracle = app.add_subcommand("oracle", "print the stable models of a small program");
    oracle->add_option("--program", program_path)->required()->check(CLI::ExistingFile);
    oracle->add_option("--models", model_cap, "stop after this many models (0 = all)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*train) return cmd_train(train_args, out, err);
        if (*evaluate) return cmd_evaluate(eval_args, out, err);
        if (*report) return cmd_report(ledger_path, out);
        if (*validate) return cmd_validate(val_args, out);
        if (*oracle) return cmd_oracle(program_path, model_cap, out, err);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const pipeline::BaselineError& e) {
        err << "baseline error: " << e.what() << "\n";
        return kBaselineError;
    } catch (const llm::AuthError& e) {
        err << "provider error: " << e.what() << "\n";
        return kProviderError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}

}  // namespace streamforge::cli
