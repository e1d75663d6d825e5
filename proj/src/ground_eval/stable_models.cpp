#include "streamforge/ground_eval.hpp"

#include <algorithm>

namespace streamforge::ground {

namespace {

std::vector<char> least_model(const GroundProgram& gp, bool ignore_negation) {
    std::vector<char> in(gp.atoms.size(), 0);
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& r : gp.rules) {
            if (!r.head || in[*r.head]) continue;
            if (!ignore_negation && (!r.negative.empty() || !r.double_negative.empty())) continue;
            if (std::all_of(r.positive.begin(), r.positive.end(), [&](std::size_t a) { return in[a] != 0; })) {
                in[*r.head] = 1;
                changed = true;
            }
        }
    }
    return in;
}

class Enumerator {
public:
    Enumerator(const GroundProgram& gp, std::size_t cap, const SearchLimits& limits, SearchStats& stats)
        : gp_(gp), cap_(cap), limits_(limits), stats_(stats) {}

    std::vector<Interpretation> run() {
        const std::size_t n = gp_.atoms.size();
        const auto definite = least_model(gp_, false);
        const auto upper = least_model(gp_, true);

        value_.assign(n, 0);
        depth_.assign(n, kFixed);
        for (std::size_t i = 0; i < n; ++i) {
            if (gp_.atoms[i].auxiliary) {
                depth_[i] = kAux;
            } else if (definite[i]) {
                value_[i] = 1;
            } else if (upper[i]) {
                order_.push_back(i);
            }
        }
        // Highest index decided first, false before true: leaves come out in
        // ascending bitmask order.
        std::reverse(order_.begin(), order_.end());
        stats_.free_atoms = order_.size();
        if (order_.size() > limits_.max_free_atoms) {
            throw UniverseTooLarge("stable-model enumeration over " + std::to_string(order_.size()) +
                                   " undetermined atoms exceeds the limit of " +
                                   std::to_string(limits_.max_free_atoms));
        }
        for (std::size_t k = 0; k < order_.size(); ++k) depth_[order_[k]] = static_cast<long>(k);

        checks_at_.assign(order_.size() + 1, {});
        for (std::size_t r = 0; r < gp_.rules.size(); ++r) {
            long d = -1;
            bool aux = false;
            auto visit = [&](std::size_t a) {
                if (depth_[a] == kAux) aux = true;
                else d = std::max(d, depth_[a]);
            };
            if (gp_.rules[r].head) visit(*gp_.rules[r].head);
            for (auto a : gp_.rules[r].positive) visit(a);
            for (auto a : gp_.rules[r].negative) visit(a);
            for (auto a : gp_.rules[r].double_negative) visit(a);
            if (!aux) checks_at_[static_cast<std::size_t>(d + 1)].push_back(r);
        }
        for (std::size_t r = 0; r < gp_.rules.size(); ++r) {
            const auto& rule = gp_.rules[r];
            if (rule.head && depth_[*rule.head] == kAux) aux_rules_.push_back(r);
        }

        if (checks_pass(0)) descend(0);
        return std::move(models_);
    }

private:
    static constexpr long kFixed = -1;
    static constexpr long kAux = -2;

    bool body_true(const GroundRule& r) const {
        for (auto a : r.positive) if (!value_[a]) return false;
        for (auto a : r.negative) if (value_[a]) return false;
        for (auto a : r.double_negative) if (!value_[a]) return false;
        return true;
    }

    bool satisfied(const GroundRule& r) {
        ++stats_.rule_checks;
        if (!body_true(r)) return true;
        return r.head && value_[*r.head];
    }

    bool checks_pass(std::size_t slot) {
        for (auto r : checks_at_[slot]) {
            if (!satisfied(gp_.rules[r])) return false;
        }
        return true;
    }

    void tick() {
        ++stats_.nodes;
        if ((stats_.nodes & 1023) == 0 && limits_.deadline && std::chrono::steady_clock::now() >= *limits_.deadline) {
            throw SearchInterrupted("deadline reached");
        }
        if (limits_.work_budget && stats_.work() > *limits_.work_budget) {
            throw SearchInterrupted("work budget exhausted");
        }
    }

    void descend(std::size_t level) {
        tick();
        if (level == order_.size()) {
            leaf();
            return;
        }
        const std::size_t atom = order_[level];
        for (char v : {0, 1}) {
            value_[atom] = v;
            if (checks_pass(level + 1)) descend(level + 1);
            if (models_.size() >= cap_) break;
        }
        value_[atom] = 0;
    }

    void leaf() {
        for (std::size_t i = 0; i < gp_.atoms.size(); ++i) {
            if (depth_[i] == kAux) value_[i] = 0;
        }
        // A complement atom holds exactly when one of its defining bodies does.
        for (auto r : aux_rules_) {
            const auto& rule = gp_.rules[r];
            if (body_true(rule)) value_[*rule.head] = 1;
        }
        for (const auto& r : gp_.rules) {
            if (!satisfied(r)) return;
        }
        ++stats_.stability_checks;
        if (!reduct_reproduces()) return;
        Interpretation model;
        for (std::size_t i = 0; i < gp_.atoms.size(); ++i) {
            if (value_[i] && !gp_.atoms[i].auxiliary) model.insert(gp_.atoms[i]);
        }
        models_.push_back(std::move(model));
    }

    // Least model of the reduct relative to the current assignment.
    bool reduct_reproduces() {
        std::vector<char> derived(gp_.atoms.size(), 0);
        for (bool changed = true; changed;) {
            changed = false;
            for (const auto& r : gp_.rules) {
                if (!r.head || derived[*r.head]) continue;
                bool kept = std::none_of(r.negative.begin(), r.negative.end(), [&](std::size_t a) { return value_[a] != 0; }) &&
                            std::all_of(r.double_negative.begin(), r.double_negative.end(), [&](std::size_t a) { return value_[a] != 0; });
                if (!kept) continue;
                if (std::all_of(r.positive.begin(), r.positive.end(), [&](std::size_t a) { return derived[a] != 0; })) {
                    derived[*r.head] = 1;
                    changed = true;
                }
            }
        }
        for (std::size_t i = 0; i < derived.size(); ++i) {
            if ((derived[i] != 0) != (value_[i] != 0)) return false;
        }
        return true;
    }

    const GroundProgram& gp_;
    std::size_t cap_;
    const SearchLimits& limits_;
    SearchStats& stats_;
    std::vector<char> value_;
    std::vector<long> depth_;
    std::vector<std::size_t> order_;
    std::vector<std::vector<std::size_t>> checks_at_;
    std::vector<std::size_t> aux_rules_;
    std::vector<Interpretation> models_;
};

}  // namespace

std::vector<Interpretation> stable_models(const GroundProgram& program, std::size_t model_cap,
                                          const SearchLimits& limits, SearchStats* stats) {
    SearchStats local;
    SearchStats& s = stats ? *stats : local;
    if (model_cap == 0) return {};
    return Enumerator(program, model_cap, limits, s).run();
}

}  // namespace streamforge::ground
