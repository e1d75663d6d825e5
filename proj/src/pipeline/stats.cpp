#include "streamforge/pipeline.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

namespace streamforge::pipeline {

std::array<int, 5> largest_remainder_percents(const std::array<std::size_t, 5>& counts) {
    std::array<int, 5> out{};
    const std::size_t total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
    if (total == 0) return out;
    std::array<std::size_t, 5> remainder{};
    int assigned = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        out[i] = static_cast<int>(counts[i] * 100 / total);
        remainder[i] = counts[i] * 100 % total;
        assigned += out[i];
    }
    std::array<std::size_t, 5> order{0, 1, 2, 3, 4};
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t i = 0; assigned < 100; ++i, ++assigned) ++out[order[i]];
    return out;
}

TaxonomyStats stats_report(const std::vector<json>& events) {
    std::map<std::string, Reason> final_reason;
    for (const auto& ev : events) {
        if (ev.value("type", std::string{}) != "candidate_verdict") continue;
        auto reason = parse_reason(ev.value("reason", std::string{}));
        if (!reason || *reason == Reason::Pending) continue;
        final_reason[ev.value("candidate", std::string{})] = *reason;
    }
    TaxonomyStats stats;
    for (const auto& [id, reason] : final_reason) {
        auto slot = std::find(TaxonomyStats::kOrder.begin(), TaxonomyStats::kOrder.end(), reason);
        ++stats.counts[static_cast<std::size_t>(slot - TaxonomyStats::kOrder.begin())];
        ++stats.total;
    }
    stats.percents = largest_remainder_percents(stats.counts);
    return stats;
}

std::string TaxonomyStats::format() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < kOrder.size(); ++i) {
        out << to_string(kOrder[i]) << ": " << counts[i] << " (" << percents[i] << "%)\n";
    }
    return out.str();
}

}  // namespace streamforge::pipeline
