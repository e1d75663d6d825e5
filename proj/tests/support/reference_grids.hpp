#pragma once

// Published per-variant PAR2 sums and VBE sums (seconds) for the three
// benchmark families, two training runs each, with the reported reduction
// where one is stated.

#include "support/grids.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sf_test {

struct ReferenceRun {
    std::string name;
    std::vector<std::pair<std::string, long>> sums;   // original last
    long vbe_sum;
    std::optional<int> reported_reduction;
};

inline const std::vector<ReferenceRun>& reference_runs() {
    static const std::vector<ReferenceRun> runs = {
        {"pup_run1", {{"P1", 13813}, {"P2", 12091}, {"P3", 18660}, {"P1+P2+P3", 16265}, {"original", 13938}}, 3302, 76},
        {"pup_run2", {{"P4", 12880}, {"P5", 12091}, {"P6", 11696}, {"P4+P5+P6", 13627}, {"original", 13938}}, 7412, 47},
        {"sokoban_run1", {{"S1", 5831}, {"S2", 3026}, {"S3", 3648}, {"S1+S2+S3", 3051}, {"original", 8837}}, 2178, 75},
        {"sokoban_run2", {{"S4", 6948}, {"S5", 7197}, {"S6", 11727}, {"S4+S5+S6", 8144}, {"original", 8837}}, 3758, 57},
        {"hanoi_run1", {{"T1", 15108}, {"T2", 49494}, {"T1+T2", 13702}, {"original", 56710}}, 11833, 79},
        {"hanoi_run2", {{"T4", 20853}, {"T5", 23832}, {"T6", 42569}, {"T4+T5+T6", 24755}, {"original", 56710}}, 16053,
         std::nullopt},
    };
    return runs;
}

inline constexpr double kReferenceTimeout = 1200.0;

// Grid for a reference run, with a few instances nobody solves.
inline std::vector<RunRecord> reference_grid(const ReferenceRun& run, int unsolvable = 4) {
    return exact_grid(run.sums, run.vbe_sum, kReferenceTimeout, unsolvable);
}

}  // namespace sf_test
