#include "streamforge/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Dense>

namespace streamforge::eval {

double par2(const SolveOutcome& outcome, double timeout_seconds) {
    return outcome.solved() ? outcome.wall_seconds : 2.0 * timeout_seconds;
}

double vbe(std::span<const RunRecord> records) {
    if (records.empty()) throw std::invalid_argument("vbe needs at least one record");
    double best = par2(records.front().outcome, records.front().timeout_seconds);
    for (const auto& r : records.subspan(1)) best = std::min(best, par2(r.outcome, r.timeout_seconds));
    return best;
}

int reduction_percent(double vbe_sum, double original_sum) {
    if (original_sum <= 0) return 0;
    const long double ratio = 100.0L * (static_cast<long double>(original_sum) - vbe_sum) / original_sum;
    return static_cast<int>(std::floor(ratio + 0.5L));
}

EvaluationReport aggregate(const std::vector<RunRecord>& records, double timeout_seconds) {
    EvaluationReport report;
    report.timeout_seconds = timeout_seconds;

    std::set<std::string> instance_set;
    for (const auto& r : records) {
        if (std::find(report.variants.begin(), report.variants.end(), r.variant_id) == report.variants.end()) {
            report.variants.push_back(r.variant_id);
        }
        instance_set.insert(r.instance_id);
    }
    const std::vector<std::string> all_instances(instance_set.begin(), instance_set.end());

    const auto nv = static_cast<Eigen::Index>(report.variants.size());
    const auto ni = static_cast<Eigen::Index>(all_instances.size());
    auto variant_index = [&](const std::string& id) {
        return static_cast<Eigen::Index>(std::find(report.variants.begin(), report.variants.end(), id) -
                                         report.variants.begin());
    };
    auto instance_index = [&](const std::string& id) {
        return static_cast<Eigen::Index>(std::lower_bound(all_instances.begin(), all_instances.end(), id) -
                                         all_instances.begin());
    };

    std::vector<const RunRecord*> grid(static_cast<std::size_t>(nv * ni), nullptr);
    for (const auto& r : records) {
        auto& cell = grid[static_cast<std::size_t>(instance_index(r.instance_id) * nv + variant_index(r.variant_id))];
        if (cell) throw GridIncomplete("duplicate run for " + r.variant_id + " on " + r.instance_id);
        cell = &r;
    }
    for (Eigen::Index i = 0; i < ni; ++i) {
        for (Eigen::Index v = 0; v < nv; ++v) {
            if (!grid[static_cast<std::size_t>(i * nv + v)]) {
                throw GridIncomplete("missing run for " + report.variants[static_cast<std::size_t>(v)] + " on " +
                                     all_instances[static_cast<std::size_t>(i)]);
            }
        }
    }

    std::vector<Eigen::Index> included;
    for (Eigen::Index i = 0; i < ni; ++i) {
        bool any_solved = false;
        for (Eigen::Index v = 0; v < nv; ++v) any_solved |= grid[static_cast<std::size_t>(i * nv + v)]->outcome.solved();
        if (any_solved) {
            included.push_back(i);
            report.instances.push_back(all_instances[static_cast<std::size_t>(i)]);
        } else {
            report.excluded_instances.push_back(all_instances[static_cast<std::size_t>(i)]);
        }
    }

    // PAR2 matrix over included instances (rows) and variants (columns).
    Eigen::MatrixXd scores(static_cast<Eigen::Index>(included.size()), nv);
    for (Eigen::Index row = 0; row < scores.rows(); ++row) {
        for (Eigen::Index v = 0; v < nv; ++v) {
            const RunRecord* r = grid[static_cast<std::size_t>(included[static_cast<std::size_t>(row)] * nv + v)];
            scores(row, v) = par2(r->outcome, timeout_seconds);
        }
    }
    // Sums run in instance order so filtering or reordering variants cannot
    // change the rounding.
    auto ordered_sum = [](const auto& vec) {
        double total = 0.0;
        for (Eigen::Index k = 0; k < vec.size(); ++k) total += vec(k);
        return total;
    };
    Eigen::VectorXd column_sums(nv);
    for (Eigen::Index v = 0; v < nv; ++v) column_sums(v) = ordered_sum(scores.col(v));
    const Eigen::VectorXd best = nv > 0 ? Eigen::VectorXd(scores.rowwise().minCoeff()) : Eigen::VectorXd();
    report.vbe_sum = ordered_sum(best);
    report.vbe_solved = included.size();

    for (Eigen::Index v = 0; v < nv; ++v) {
        const auto& name = report.variants[static_cast<std::size_t>(v)];
        report.par2_sum[name] = column_sums(v);
        std::vector<double> solved_seconds;
        for (auto i : included) {
            const RunRecord* r = grid[static_cast<std::size_t>(i * nv + v)];
            if (r->outcome.solved()) solved_seconds.push_back(r->outcome.wall_seconds);
        }
        for (Eigen::Index i = 0; i < ni; ++i) {
            const RunRecord* r = grid[static_cast<std::size_t>(i * nv + v)];
            if (r->outcome.status == solver::SolveStatus::Error) report.errors.emplace_back(name, r->instance_id);
        }
        report.solved[name] = solved_seconds.size();
        std::sort(solved_seconds.begin(), solved_seconds.end());
        for (std::size_t k = 0; k < solved_seconds.size(); ++k) {
            report.cactus.push_back(CactusRow{name, static_cast<int>(k + 1), solved_seconds[k]});
        }
    }
    std::vector<double> vbe_seconds(best.data(), best.data() + best.size());
    std::sort(vbe_seconds.begin(), vbe_seconds.end());
    for (std::size_t k = 0; k < vbe_seconds.size(); ++k) {
        report.cactus.push_back(CactusRow{kVbe, static_cast<int>(k + 1), vbe_seconds[k]});
    }

    if (auto it = report.par2_sum.find(kOriginal); it != report.par2_sum.end()) {
        report.reduction_percent = reduction_percent(report.vbe_sum, it->second);
    }
    return report;
}

}  // namespace streamforge::eval
