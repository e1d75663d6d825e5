#include "streamforge/evalkit.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace streamforge::eval {

namespace {

using nlohmann::json;

// Shortest round-trip text, always with '.' as separator.
std::string number(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

std::string grouped_seconds(double x) {
    if (std::abs(x) < 100.0) {
        std::ostringstream out;
        out.setf(std::ios::fixed);
        out.precision(3);
        out << x;
        return out.str();
    }
    auto digits = std::to_string(static_cast<long long>(std::llround(x)));
    std::string out;
    int since = 0;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
        if (since == 3 && *it != '-') {
            out.insert(out.begin(), ',');
            since = 0;
        }
        out.insert(out.begin(), *it);
        ++since;
    }
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    out.flush();
    if (!out) throw IoError("cannot write " + path.string());
}

// Singles and combined first, then original, as in the result tables.
std::vector<std::string> table_order(const EvaluationReport& report) {
    std::vector<std::string> order;
    for (const auto& v : report.variants) {
        if (v != kOriginal) order.push_back(v);
    }
    for (const auto& v : report.variants) {
        if (v == kOriginal) order.push_back(v);
    }
    return order;
}

}  // namespace

json to_json(const EvaluationReport& report) {
    json cactus = json::array();
    for (const auto& row : report.cactus) {
        cactus.push_back({{"variant", row.variant}, {"rank", row.rank}, {"seconds", row.seconds}});
    }
    json errors = json::array();
    for (const auto& [variant, instance] : report.errors) errors.push_back({{"variant", variant}, {"instance", instance}});
    return json{{"v", kSummaryVersion},
                {"timeout_seconds", report.timeout_seconds},
                {"variants", report.variants},
                {"included_instances", report.instances},
                {"excluded_instances", report.excluded_instances},
                {"par2_sum_seconds", report.par2_sum},
                {"solved", report.solved},
                {"vbe_sum_seconds", report.vbe_sum},
                {"vbe_solved", report.vbe_solved},
                {"reduction_percent", report.reduction_percent},
                {"errors", errors},
                {"cactus", cactus}};
}

std::string render_markdown(const EvaluationReport& report) {
    std::ostringstream out;
    out << "# Evaluation\n\n";
    out << "Sum of PAR2 running times in seconds over " << report.instances.size() << " included instances"
        << " (timeout " << number(report.timeout_seconds) << " s).\n\n";
    const auto order = table_order(report);
    out << "|";
    for (const auto& v : order) out << " " << v << " |";
    out << " " << kVbe << " |\n|";
    for (std::size_t i = 0; i <= order.size(); ++i) out << "---:|";
    out << "\n|";
    for (const auto& v : order) out << " " << grouped_seconds(report.par2_sum.at(v)) << " |";
    out << " " << grouped_seconds(report.vbe_sum) << " |\n|";
    for (const auto& v : order) out << " " << report.solved.at(v) << " solved |";
    out << " " << report.vbe_solved << " solved |\n\n";

    if (report.par2_sum.count(kOriginal)) {
        out << "VBE reduction over the original encoding: " << report.reduction_percent << "%\n";
    }
    if (!report.excluded_instances.empty()) {
        out << "\nExcluded (no variant solved): ";
        for (std::size_t i = 0; i < report.excluded_instances.size(); ++i) {
            out << (i ? ", " : "") << report.excluded_instances[i];
        }
        out << "\n";
    }
    if (!report.errors.empty()) {
        out << "\nRuns that ended in ERROR (scored as timeouts):\n";
        for (const auto& [variant, instance] : report.errors) out << "- " << variant << " on " << instance << "\n";
    }
    return out.str();
}

void emit_outputs(const EvaluationReport& report, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir)) throw IoError("cannot create " + out_dir.string());

    write_file(out_dir / "summary.json", to_json(report).dump(2) + "\n");

    std::ostringstream table;
    table << "variant,par2_sum_seconds,solved,total_included\n";
    for (const auto& v : report.variants) {
        table << v << "," << number(report.par2_sum.at(v)) << "," << report.solved.at(v) << ","
              << report.instances.size() << "\n";
    }
    if (!report.variants.empty()) {
        table << kVbe << "," << number(report.vbe_sum) << "," << report.vbe_solved << "," << report.instances.size()
              << "\n";
    }
    write_file(out_dir / "par2_table.csv", table.str());

    std::ostringstream cactus;
    cactus << "variant,rank,seconds\n";
    for (const auto& row : report.cactus) cactus << row.variant << "," << row.rank << "," << number(row.seconds) << "\n";
    write_file(out_dir / "cactus.csv", cactus.str());

    write_file(out_dir / "report.md", render_markdown(report));
}

}  // namespace streamforge::eval
