#pragma once

// Test-set evaluation: PAR2 scoring, virtual best encoding, exclusion of
// instances no variant solved, cactus data and report files.

#include "streamforge/aspkit.hpp"
#include "streamforge/pipeline.hpp"
#include "streamforge/solver_backend.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace streamforge::eval {

using solver::RunRecord;
using solver::SolveOutcome;

class GridIncomplete : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kSummaryVersion = 1;
inline constexpr const char* kOriginal = "original";
inline constexpr const char* kVbe = "VBE";

// Runtime when solved, twice the timeout for TIMEOUT and ERROR.
double par2(const SolveOutcome& outcome, double timeout_seconds);

// Minimum PAR2 value across the records of one instance.
double vbe(std::span<const RunRecord> records);

// round(100 * (1 - vbe / original)), halves rounded up; 0 when original is 0.
int reduction_percent(double vbe_sum, double original_sum);

struct CactusRow {
    std::string variant;
    int rank = 0;
    double seconds = 0.0;
};

struct EvaluationReport {
    double timeout_seconds = 0.0;
    std::vector<std::string> variants;        // first-appearance order
    std::vector<std::string> instances;       // included, sorted
    std::vector<std::string> excluded_instances;
    std::map<std::string, double> par2_sum;
    std::map<std::string, std::size_t> solved;
    std::vector<std::pair<std::string, std::string>> errors;   // (variant, instance) with ERROR status
    double vbe_sum = 0.0;
    std::size_t vbe_solved = 0;
    int reduction_percent = 0;
    std::vector<CactusRow> cactus;            // per variant then VBE, ranks 1..solved
};

// Requires the full variant x instance grid; throws GridIncomplete otherwise.
EvaluationReport aggregate(const std::vector<RunRecord>& records, double timeout_seconds);

nlohmann::json to_json(const EvaluationReport& report);
std::string render_markdown(const EvaluationReport& report);

// summary.json, par2_table.csv, cactus.csv, report.md.
void emit_outputs(const EvaluationReport& report, const std::filesystem::path& out_dir);

// `variant,instance,status,seconds` rows, header optional.
std::vector<RunRecord> read_records_csv(const std::filesystem::path& path, double timeout_seconds);
void write_records_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path);

struct Variant {
    std::string id;
    std::string text;
};

struct VariantSet {
    Variant original;
    std::vector<Variant> singles;
    std::optional<Variant> combined;   // present when two or more streamliners remain

    std::vector<Variant> all() const;
};

// Streamliners without rules (comment-only) are identical to the original
// and are dropped. The combined id joins the single ids with '+'.
VariantSet build_variants(std::string_view encoding, const std::vector<asp::Snippet>& selected);

std::vector<RunRecord> run_grid(const VariantSet& variants, const std::vector<pipeline::Instance>& instances,
                                solver::Backend& backend, double timeout_seconds, solver::Scheduler* scheduler,
                                bool normalize_timestamps);

}  // namespace streamforge::eval
