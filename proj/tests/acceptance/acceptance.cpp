// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "streamforge/aspkit.hpp"
#include "streamforge/cli.hpp"
#include "streamforge/evalkit.hpp"
#include "streamforge/ground_eval.hpp"
#include "streamforge/pipeline.hpp"
#include "streamforge/solver_backend.hpp"
#include "support/oracle_suite.hpp"
#include "support/reference_grids.hpp"
#include "support/selection_oracle.hpp"
#include "support/toy.hpp"

#include <cerrno>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

using namespace streamforge;

namespace {

// Collects failed expectations for one criterion.
struct Check {
    std::vector<std::string> failures;
    std::string note;

    void expect(bool ok, const std::string& what) {
        if (!ok && failures.size() < 5) failures.push_back(what);
        if (!ok && failures.size() == 5) failures.push_back("...");
    }
};

struct Criterion {
    int number;
    std::string title;
    double limit_seconds;   // 0: no runtime bound
    std::function<void(Check&)> body;
};

// 1. Reductions from grids matching the published sums.
void aggregation_arithmetic(Check& c) {
    std::string got;
    for (const auto& run : sf_test::reference_runs()) {
        if (!run.reported_reduction) continue;
        auto report = eval::aggregate(sf_test::reference_grid(run), sf_test::kReferenceTimeout);
        for (const auto& [v, sum] : run.sums) c.expect(report.par2_sum.at(v) == sum, run.name + " sum of " + v);
        c.expect(report.vbe_sum == run.vbe_sum, run.name + " VBE sum");
        auto md = eval::render_markdown(report);
        auto needle = "VBE reduction over the original encoding: " + std::to_string(*run.reported_reduction) + "%";
        c.expect(report.reduction_percent == *run.reported_reduction && md.find(needle) != std::string::npos,
                 run.name + " reduction " + std::to_string(report.reduction_percent) + "% vs " +
                     std::to_string(*run.reported_reduction) + "%");
        got += (got.empty() ? "" : "/") + std::to_string(report.reduction_percent);
    }
    c.note = got + "%";
}

// 2. Taxonomy percentages from a synthetic ledger.
void taxonomy(Check& c) {
    pipeline::Ledger ledger;
    const std::array<int, 5> counts = {52, 19, 9, 8, 12};
    int id = 0;
    for (std::size_t b = 0; b < counts.size(); ++b) {
        for (int i = 0; i < counts[b]; ++i) {
            ledger.append({{"type", "candidate_verdict"},
                           {"candidate", "c" + std::to_string(id++)},
                           {"reason", pipeline::to_string(pipeline::TaxonomyStats::kOrder[b])}});
        }
    }
    auto stats = pipeline::stats_report(ledger.events());
    c.expect(stats.percents == std::array<int, 5>{52, 19, 9, 8, 12}, "percentages");
    c.expect(stats.total == 100, "total");
    c.note = std::to_string(stats.percents[0]) + "/" + std::to_string(stats.percents[1]) + "/" +
             std::to_string(stats.percents[2]) + "/" + std::to_string(stats.percents[3]) + "/" +
             std::to_string(stats.percents[4]);
}

// 3. Corpus of published streamliners and revisions.
void parser_corpus(Check& c) {
    std::set<std::string> distinct;
    int files = 0;
    for (const char* family : {"pup", "sokoban", "hanoi"}) {
        for (const auto& e : std::filesystem::directory_iterator(sf_test::fixture(std::string("streamliners/") + family))) {
            ++files;
            auto text = sf_test::read_file(e.path());
            auto name = e.path().filename().string();
            auto parsed = asp::parse_program(text);
            c.expect(parsed.ok(), name + " parses");
            std::string canonical;
            for (const auto& rule : parsed.rules) {
                c.expect(asp::check_safety(rule).empty(), name + " is safe");
                auto printed = asp::format_rule(rule);
                auto again = asp::parse_program(printed);
                c.expect(again.ok() && again.rules.size() == 1 && again.rules[0] == rule, name + " round-trips");
                canonical += printed + "\n";
            }
            if (!parsed.rules.empty()) distinct.insert(canonical);
        }
    }
    c.expect(distinct.size() >= 17, "at least 17 distinct texts");
    c.note = std::to_string(files) + " files, " + std::to_string(distinct.size()) + " distinct texts";
}


// 4. Reference enumerator against hand-checked model sets.
void oracle_correctness(Check& c) {
    const auto& suite = sf_test::oracle_suite();
    c.expect(suite.size() >= 20, "suite has at least 20 programs");
    const std::set<std::string> forced = {"empty program", "forced facts", "even loop", "self support"};
    std::size_t forced_seen = 0;
    std::optional<solver::ExternalBackend> external;
    if (auto path = solver::solver_from_environment()) external.emplace(solver::ExternalOptions{*path});
    std::size_t agreed = 0;
    for (const auto& oc : suite) {
        forced_seen += forced.count(oc.name);
        auto rules = asp::parse_program(oc.program).rules;
        auto gp = ground::ground(rules);
        c.expect(gp.visible_atom_count() <= 12, oc.name + " has at most 12 atoms");
        std::set<std::set<std::string>> got;
        for (const auto& m : ground::stable_models(gp, 1u << 20)) {
            std::set<std::string> atoms;
            for (const auto& a : m) atoms.insert(ground::format_ground_atom(a));
            got.insert(atoms);
        }
        c.expect(got == sf_test::model_set(oc.models), oc.name + " models");
        if (external) {
            auto status = external->solve(oc.program, 10.0).status;
            bool ok = status == (oc.models.empty() ? solver::SolveStatus::Unsat : solver::SolveStatus::Sat);
            c.expect(ok, oc.name + " external agreement");
            agreed += ok;
        }
    }
    c.expect(forced_seen == forced.size(), "forced cases present");
    c.note = std::to_string(suite.size()) + " programs; external agreement " +
             (external ? std::to_string(agreed) + "/" + std::to_string(suite.size()) : std::string("skipped (STREAMFORGE_SOLVER unset)"));
}

pipeline::Candidate kept_with(const std::string& id, const std::vector<double>& secs) {
    pipeline::Candidate cand;
    cand.id = id;
    cand.status = pipeline::CandidateStatus::Kept;
    cand.reason = pipeline::Reason::Improved;
    for (std::size_t i = 0; i < secs.size(); ++i) cand.per_instance["i" + std::to_string(i)] = {solver::SolveStatus::Sat, secs[i], {}};
    return cand;
}

// 5. Selection against brute force, and invariance under reordering.
void selection_optimality(Check& c) {
    std::mt19937_64 rng(20250101);
    auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    for (int trial = 0; trial < 100; ++trial) {
        const int n = uni(1, 10), m = uni(1, 8), k = uni(1, 3);
        std::vector<double> baseline(static_cast<std::size_t>(m));
        pipeline::Baselines base;
        for (int i = 0; i < m; ++i) {
            baseline[i] = uni(5, 30);
            base["i" + std::to_string(i)] = {solver::SolveStatus::Sat, baseline[i], {}};
        }
        std::vector<std::string> ids;
        std::vector<std::vector<double>> rt;
        std::vector<pipeline::Candidate> kept;
        for (int j = 0; j < n; ++j) {
            ids.push_back("c" + std::to_string(uni(0, 99)) + "_" + std::to_string(j));
            rt.emplace_back();
            for (int i = 0; i < m; ++i) rt.back().push_back(uni(1, 35));
            kept.push_back(kept_with(ids.back(), rt.back()));
        }
        auto expected = sf_test::brute_select(ids, rt, baseline, k);
        auto got = pipeline::select_best(kept, base, k);
        c.expect(got.selected_ids == expected.ids && got.training_vbe_sum == expected.score,
                 "trial " + std::to_string(trial) + " argmin");
        std::shuffle(kept.begin(), kept.end(), rng);
        auto permuted = pipeline::select_best(kept, base, k);
        c.expect(permuted.selected_ids == got.selected_ids, "trial " + std::to_string(trial) + " permutation");
    }
    c.note = "100 matrices";
}

// 6. One crafted candidate per verdict bucket.
void filter_semantics(Check& c) {
    auto problem = sf_test::toy_problem();
    auto backend = sf_test::toy_backend();
    auto base = pipeline::run_baseline(problem, backend, 10.0);
    pipeline::ValidationSettings vs{pipeline::default_training_timeout(base), 0.0, nullptr};
    int n = 0;
    for (const auto& fc : sf_test::filter_cases()) {
        pipeline::Candidate cand;
        cand.id = "f" + std::to_string(++n);
        cand.snippet = asp::classify_snippet(fc.text, cand.id);
        cand = pipeline::validate_candidate(std::move(cand), problem, base, backend, vs);
        c.expect(cand.reason == fc.reason, fc.text + " -> " + std::string(pipeline::to_string(cand.reason)));
        if (fc.reason == pipeline::Reason::UnsatAll || fc.reason == pipeline::Reason::UnsatSome) {
            auto composed = asp::compose(problem.encoding, std::span<const asp::Snippet>(&cand.snippet, 1));
            std::size_t unsat = 0;
            for (const auto& inst : problem.instances) {
                auto rules = asp::parse_program(pipeline::instance_program(composed, inst)).rules;
                unsat += ground::check_sat(rules) == ground::Satisfiability::Unsat;
            }
            bool all = unsat == problem.instances.size();
            c.expect(fc.reason == pipeline::Reason::UnsatAll ? all : (unsat > 0 && !all), fc.text + " oracle confirms");
        }
    }
    c.note = "5 buckets";
}

int run_cli(std::vector<std::string> args, std::string& out_text) {
    args.insert(args.begin(), "streamforge");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    out_text = out.str() + err.str();
    return code;
}

// 7. Replay training end to end, twice.
void end_to_end_replay(Check& c) {
    sf_test::TempDir tmp;
    for (const char* part : {"encoding.lp", "config.json", "train", "test", "responses"}) {
        std::filesystem::copy(sf_test::fixture(std::string("toy/") + part), tmp / part, std::filesystem::copy_options::recursive);
    }
    const auto config = (tmp / "config.json").string();
    std::string out;
    std::string ledger[2], selection[2];
    for (int k = 0; k < 2; ++k) {
        int code = run_cli({"train", "--config", config, "--fresh"}, out);
        c.expect(code == 0, "train exit code " + std::to_string(code) + ": " + out);
        ledger[k] = sf_test::read_file(tmp / "out" / "ledger.jsonl");
        selection[k] = sf_test::read_file(tmp / "out" / "selection.json");
    }
    c.expect(ledger[0] == ledger[1], "ledger byte-stable");
    c.expect(selection[0] == selection[1], "selection byte-stable");

    // The improving snippets are exactly those the fixture marks as such.
    const std::set<std::string> improving = {":- assign(1,U), U > 1.", ":- assign(2,U), U > 2."};
    std::map<std::string, std::string> text_of;
    std::set<std::string> kinds, kept_texts;
    for (const auto& ev : pipeline::Ledger::read(tmp / "out" / "ledger.jsonl")) {
        if (ev["type"] == "candidate_created") {
            text_of[ev["candidate"]] = ev["text"];
            kinds.insert(ev["kind"].get<std::string>());
        }
        if (ev["type"] == "candidate_verdict" && ev["status"] == "kept") kept_texts.insert(text_of[ev["candidate"]]);
    }
    c.expect(kinds.count("comment-only") && kinds.count("unparseable"), "replay covers comment-only and malformed snippets");
    c.expect(kept_texts == improving, "kept exactly the improving snippets");
    auto doc = nlohmann::json::parse(selection[0]);
    std::set<std::string> selected;
    for (const auto& s : doc["selected"]) selected.insert(s["text"].get<std::string>());
    c.expect(selected == improving, "selected the improving snippets");
    c.note = std::to_string(std::count(ledger[0].begin(), ledger[0].end(), '\n')) + " ledger lines";
}

bool process_gone(pid_t pid) { return ::kill(pid, 0) == -1 && errno == ESRCH; }

// 8. Timeout of a never-finishing solver.
void timeout_fidelity(Check& c) {
    sf_test::TempDir tmp;
    auto pidfile = tmp / "pids";
    ::setenv("SLOW_SOLVER_PIDFILE", pidfile.c_str(), 1);
    solver::ExternalOptions opts;
    opts.path = SLOW_SOLVER;
    opts.args = {};
    solver::ExternalBackend backend(opts);
    auto start = std::chrono::steady_clock::now();
    auto out = backend.solve("hard.", 1.0);
    double observed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ::unsetenv("SLOW_SOLVER_PIDFILE");
    c.expect(out.status == solver::SolveStatus::Timeout, "status TIMEOUT");
    c.expect(out.wall_seconds == 1.0, "reported seconds exactly 1.0");
    c.expect(observed <= 1.5, "observed wall time " + std::to_string(observed));
    std::ifstream in(pidfile);
    int child = 0, grandchild = 0;
    c.expect(static_cast<bool>(in >> child >> grandchild), "solver reported its pids");
    c.expect(child > 0 && process_gone(child), "solver process reaped");
    c.expect(grandchild > 0 && process_gone(grandchild), "solver's child reaped");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", observed);
    c.note = std::string("observed ") + buf + " s";
}

// 9. Aggregation properties on random grids.
void par2_properties(Check& c) {
    std::mt19937_64 rng(31337);
    const double timeout = 100.0;
    for (int trial = 0; trial < 100; ++trial) {
        auto grid = sf_test::random_grid(rng, timeout);
        auto report = eval::aggregate(grid, timeout);
        const std::string t = "grid " + std::to_string(trial) + " ";

        std::map<std::string, std::map<std::string, const solver::RunRecord*>> cells;
        for (const auto& r : grid) cells[r.instance_id][r.variant_id] = &r;
        std::map<std::string, double> sums;
        std::set<std::string> excluded;
        for (const auto& [inst, row] : cells) {
            bool any = false;
            for (const auto& [v, r] : row) any = any || r->outcome.solved();
            if (!any) {
                excluded.insert(inst);
                continue;
            }
            for (const auto& [v, r] : row) sums[v] += eval::par2(r->outcome, timeout);
        }
        for (const auto& [v, sum] : report.par2_sum) {
            c.expect(report.vbe_sum <= sum + 1e-9, t + "VBE dominance for " + v);
            c.expect(std::abs(sum - sums[v]) <= 1e-9 * std::max(1.0, sum), t + "PAR2 additivity for " + v);
        }
        c.expect(std::set<std::string>(report.excluded_instances.begin(), report.excluded_instances.end()) == excluded,
                 t + "excluded set");

        std::vector<solver::RunRecord> filtered;
        for (const auto& r : grid) {
            if (!excluded.count(r.instance_id)) filtered.push_back(r);
        }
        auto again = eval::aggregate(filtered, timeout);
        c.expect(again.par2_sum == report.par2_sum && again.vbe_sum == report.vbe_sum &&
                     again.instances == report.instances && again.excluded_instances.empty() &&
                     again.cactus.size() == report.cactus.size(),
                 t + "exclusion idempotence");

        std::map<std::string, std::vector<eval::CactusRow>> rows;
        for (const auto& row : report.cactus) rows[row.variant].push_back(row);
        for (const auto& [v, rs] : rows) {
            for (std::size_t k = 0; k < rs.size(); ++k) {
                c.expect(rs[k].rank == static_cast<int>(k + 1), t + "cactus ranks for " + v);
                if (k) c.expect(rs[k].seconds >= rs[k - 1].seconds, t + "cactus order for " + v);
            }
            std::size_t solved = v == eval::kVbe ? report.vbe_solved : report.solved.at(v);
            c.expect(rs.size() == solved, t + "cactus counts solved runs for " + v);
        }
    }
    c.note = "100 grids";
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "aggregation arithmetic", 1.0, aggregation_arithmetic},
        {2, "taxonomy reproduction", 1.0, taxonomy},
        {3, "parser corpus", 1.0, parser_corpus},
        {4, "oracle correctness", 5.0, oracle_correctness},
        {5, "selection optimality", 10.0, selection_optimality},
        {6, "filter semantics", 5.0, filter_semantics},
        {7, "end-to-end replay", 60.0, end_to_end_replay},
        {8, "timeout fidelity", 0.0, timeout_fidelity},
        {9, "PAR2/exclusion properties", 5.0, par2_properties},
    };
    int failed = 0;
    for (const auto& cr : criteria) {
        Check check;
        auto start = std::chrono::steady_clock::now();
        try {
            cr.body(check);
        } catch (const std::exception& e) {
            check.failures.push_back(std::string("exception: ") + e.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (cr.limit_seconds > 0 && secs >= cr.limit_seconds) {
            check.failures.push_back("runtime " + std::to_string(secs) + " s over the " + std::to_string(cr.limit_seconds) + " s limit");
        }
        const bool ok = check.failures.empty();
        failed += !ok;
        char timing[32];
        std::snprintf(timing, sizeof timing, "%.3fs", secs);
        std::cout << (ok ? "PASS" : "FAIL") << " " << cr.number << " " << cr.title << " [" << timing << "]";
        if (!check.note.empty()) std::cout << " " << check.note;
        std::cout << "\n";
        for (const auto& f : check.failures) std::cout << "     - " << f << "\n";
    }
    std::cout << (failed ? std::to_string(failed) + " criteria failed\n" : std::string("all criteria passed\n"));
    return failed ? 1 : 0;
}
