#include "gts/synthetic.hpp"

#include <array>
#include <cmath>
#include <random>
#include <stdexcept>

namespace gts::synth {

namespace {

constexpr std::array<const char*, 8> kRegions{"NSW", "VIC", "QLD", "SA", "WA", "TAS", "ACTOT", "NT"};
constexpr std::array<double, 8> kBirthShare{0.36, 0.26, 0.17, 0.08, 0.08, 0.03, 0.015, 0.005};
constexpr std::array<double, 8> kRegionLogOffset{0.0, -0.05, 0.05, -0.08, 0.02, 0.06, -0.10, 0.45};
constexpr double kFemaleShare = 0.487;
constexpr double kMaleLogOffset = 0.22;

}  // namespace

GroupedHierarchy australian_hierarchy() {
    Attribute region{"region", {}};
    for (const char* r : kRegions) {
        region.values.emplace_back(r);
    }
    return GroupedHierarchy::build({Attribute{"sex", {"F", "M"}}, region});
}

Panel australian_shaped(const SyntheticOptions& options) {
    if (options.last_year < options.first_year) {
        throw std::invalid_argument("last year precedes first year");
    }
    auto hierarchy = australian_hierarchy();
    const auto n = static_cast<std::size_t>(options.last_year - options.first_year + 1);
    std::vector<int> years(n);
    for (std::size_t t = 0; t < n; ++t) {
        years[t] = options.first_year + static_cast<int>(t);
    }

    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    // National births: about 120k growing to 250k, with a slowly varying shock.
    std::vector<double> births(n);
    double shock = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        shock = 0.8 * shock + 0.02 * normal(rng);
        births[t] = 120000.0 * std::exp(0.0105 * static_cast<double>(t) + shock);
    }

    std::vector<NodeSeries> bottom;
    for (std::size_t s = 0; s < 2; ++s) {
        const double sex_share = s == 0 ? kFemaleShare : 1.0 - kFemaleShare;
        for (std::size_t r = 0; r < kRegions.size(); ++r) {
            NodeSeries node;
            double noise = 0.0;
            double share_walk = 0.0;
            for (std::size_t t = 0; t < n; ++t) {
                share_walk += 0.01 * normal(rng);
                const double exposure = births[t] * sex_share * kBirthShare[r] * std::exp(share_walk);
                noise = 0.5 * noise + 0.08 * normal(rng);
                const double log_rate = std::log(0.042) - 0.031 * static_cast<double>(t) + kRegionLogOffset[r] +
                                        (s == 1 ? kMaleLogOffset : 0.0) + noise;
                std::poisson_distribution<long> deaths(exposure * std::exp(log_rate));
                node.exposure.push_back(std::round(exposure));
                node.deaths.push_back(static_cast<double>(deaths(rng)));
            }
            bottom.push_back(std::move(node));
        }
    }
    return Panel::aggregate(std::move(hierarchy), std::move(years), std::move(bottom));
}

}  // namespace gts::synth
