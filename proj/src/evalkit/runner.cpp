#include "streamforge/evalkit.hpp"

#include <charconv>
#include <chrono>
#include <fstream>
#include <sstream>

namespace streamforge::eval {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

}  // namespace

std::vector<RunRecord> read_records_csv(const std::filesystem::path& path, double timeout_seconds) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    std::vector<RunRecord> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split(line, ',');
        if (line_no == 1 && !fields.empty() && fields[0] == "variant") continue;
        auto fail = [&](const std::string& why) {
            return std::invalid_argument(path.string() + ":" + std::to_string(line_no) + ": " + why);
        };
        if (fields.size() < 4) throw fail("expected variant,instance,status,seconds");
        auto status = solver::parse_status(fields[2]);
        if (!status) throw fail("unknown status '" + fields[2] + "'");
        double seconds = 0;
        auto [ptr, ec] = std::from_chars(fields[3].data(), fields[3].data() + fields[3].size(), seconds);
        if (ec != std::errc{} || ptr != fields[3].data() + fields[3].size()) throw fail("bad seconds '" + fields[3] + "'");
        RunRecord r;
        r.variant_id = fields[0];
        r.instance_id = fields[1];
        r.outcome = SolveOutcome{*status, seconds, {}};
        r.timeout_seconds = timeout_seconds;
        out.push_back(std::move(r));
    }
    return out;
}

void write_records_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << "variant,instance,status,seconds\n";
    for (const auto& r : records) {
        char buf[64];
        auto [end, ec] = std::to_chars(buf, buf + sizeof buf, r.outcome.wall_seconds);
        out << r.variant_id << "," << r.instance_id << "," << solver::to_string(r.outcome.status) << ","
            << std::string(buf, end) << "\n";
    }
    if (!out) throw IoError("cannot write " + path.string());
}

std::vector<Variant> VariantSet::all() const {
    std::vector<Variant> out{original};
    out.insert(out.end(), singles.begin(), singles.end());
    if (combined) out.push_back(*combined);
    return out;
}

VariantSet build_variants(std::string_view encoding, const std::vector<asp::Snippet>& selected) {
    VariantSet set;
    set.original = Variant{kOriginal, std::string(encoding)};
    std::vector<asp::Snippet> effective;
    for (const auto& s : selected) {
        if (s.kind == asp::SnippetKind::CommentOnly) continue;
        effective.push_back(s);
        set.singles.push_back(Variant{s.id, asp::compose(encoding, std::span<const asp::Snippet>(&s, 1))});
    }
    if (effective.size() >= 2) {
        std::string id;
        for (const auto& s : effective) id += (id.empty() ? "" : "+") + s.id;
        set.combined = Variant{id, asp::compose(encoding, effective)};
    }
    return set;
}

std::vector<RunRecord> run_grid(const VariantSet& variants, const std::vector<pipeline::Instance>& instances,
                                solver::Backend& backend, double timeout_seconds, solver::Scheduler* scheduler,
                                bool normalize_timestamps) {
    const auto all = variants.all();
    std::vector<RunRecord> out(all.size() * instances.size());
    std::vector<std::function<void()>> jobs;
    for (std::size_t v = 0; v < all.size(); ++v) {
        for (std::size_t i = 0; i < instances.size(); ++i) {
            jobs.push_back([&, v, i] {
                RunRecord& r = out[v * instances.size() + i];
                r.variant_id = all[v].id;
                r.instance_id = instances[i].id;
                r.timeout_seconds = timeout_seconds;
                r.timestamp = normalize_timestamps
                                  ? 0
                                  : std::chrono::duration_cast<std::chrono::seconds>(
                                        std::chrono::system_clock::now().time_since_epoch())
                                        .count();
                r.outcome = backend.solve(pipeline::instance_program(all[v].text, instances[i]), timeout_seconds);
            });
        }
    }
    if (scheduler) scheduler->run_all(std::move(jobs));
    else for (auto& job : jobs) job();
    return out;
}

}  // namespace streamforge::eval
