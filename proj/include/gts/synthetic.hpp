#pragma once

#include "gts/hierarchy.hpp"
#include "gts/panel.hpp"

#include <cstdint>

namespace gts::synth {

struct SyntheticOptions {
    int first_year = 1933;
    int last_year = 2003;
    std::uint64_t seed = 1;
};

/// sex {F, M} x region {NSW, VIC, QLD, SA, WA, TAS, ACTOT, NT}: m = 27, m_K = 16.
[[nodiscard]] GroupedHierarchy australian_hierarchy();

/**
 * @brief Synthetic infant-mortality panel on the Australian hierarchy.
 *
 * Births grow log-linearly with region-specific shares; log rates decline
 * linearly with region and sex offsets plus AR(1) noise; deaths are Poisson
 * counts. Deterministic given the seed.
 */
[[nodiscard]] Panel australian_shaped(const SyntheticOptions& options = {});

}  // namespace gts::synth
