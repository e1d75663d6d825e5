#include "streamforge/llm_gateway.hpp"

#include <random>
#include <set>

namespace streamforge::llm {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Unbiased draw in [0, n); std::uniform_int_distribution is not portable
// across standard libraries, the engine output is.
std::uint64_t bounded(std::mt19937_64& gen, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    for (;;) {
        std::uint64_t x = gen();
        if (x < limit) return x % n;
    }
}

}  // namespace

ModelRoster::ModelRoster(std::vector<std::string> models, std::uint64_t seed)
    : models_(std::move(models)), seed_(seed) {
    if (models_.empty()) throw std::invalid_argument("model roster is empty");
    std::set<std::string> unique(models_.begin(), models_.end());
    if (unique.size() != models_.size()) throw std::invalid_argument("model roster contains duplicate identifiers");
}

const std::string& pick_model(const ModelRoster& roster, std::uint64_t iteration) {
    std::mt19937_64 gen(splitmix64(roster.seed() ^ splitmix64(iteration)));
    return roster.models()[bounded(gen, roster.models().size())];
}

}  // namespace streamforge::llm
