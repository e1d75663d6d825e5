#include "streamforge/pipeline.hpp"

#include <algorithm>
#include <numeric>

#include <Eigen/Dense>

namespace streamforge::pipeline {

SelectionResult select_best(const std::vector<Candidate>& kept, const Baselines& baselines, int max_selected) {
    if (kept.empty()) throw EmptyPoolError("no kept candidates to select from");
    if (max_selected < 1) throw std::invalid_argument("max_selected must be at least 1");

    // Canonical order first so the result cannot depend on pool order.
    std::vector<const Candidate*> pool;
    for (const auto& c : kept) pool.push_back(&c);
    std::sort(pool.begin(), pool.end(), [](const Candidate* a, const Candidate* b) { return a->id < b->id; });

    const auto m = static_cast<Eigen::Index>(baselines.size());
    const auto n = static_cast<Eigen::Index>(pool.size());
    Eigen::VectorXd base(m);
    Eigen::MatrixXd runtime(m, n);
    Eigen::Index row = 0;
    for (const auto& [instance, outcome] : baselines) {
        base(row) = outcome.wall_seconds;
        for (Eigen::Index col = 0; col < n; ++col) {
            auto it = pool[col]->per_instance.find(instance);
            if (it == pool[col]->per_instance.end()) {
                throw std::invalid_argument("candidate " + pool[col]->id + " has no runtime for " + instance);
            }
            runtime(row, col) = it->second.wall_seconds;
        }
        ++row;
    }

    const int k = static_cast<int>(std::min<Eigen::Index>(max_selected, n));
    std::vector<int> subset(k);
    std::iota(subset.begin(), subset.end(), 0);

    SelectionResult best;
    best.baseline_sum = base.sum();
    std::vector<int> best_subset;
    double best_score = 0.0;
    for (;;) {
        Eigen::VectorXd vbe = base;
        for (int j : subset) vbe = vbe.cwiseMin(runtime.col(j));
        const double score = vbe.sum();
        ++best.considered_combinations;
        if (best_subset.empty() || score < best_score) {
            best_score = score;
            best_subset = subset;
        }
        // Next combination in lexicographic order.
        int i = k - 1;
        while (i >= 0 && subset[i] == static_cast<int>(n) - k + i) --i;
        if (i < 0) break;
        ++subset[i];
        for (int j = i + 1; j < k; ++j) subset[j] = subset[j - 1] + 1;
    }

    best.training_vbe_sum = best_score;
    for (int j : best_subset) best.selected_ids.push_back(pool[j]->id);
    return best;
}

}  // namespace streamforge::pipeline
