#pragma once

#include "gts/evaluate.hpp"
#include "gts/forecast.hpp"
#include "gts/intervals.hpp"
#include "gts/reconcile.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace gts::cli {

/// Settings shared by the forecast and evaluate commands.
struct RunConfig {
    std::string panel;
    std::string hierarchy;
    std::vector<std::string> methods{"base", "bottom-up", "ols", "gls"};
    int horizon = 20;
    /// Last training year; 0 means the last year of the panel (forecast) or
    /// the last year minus the horizon (evaluate).
    int train_end = 0;
    double alpha = 0.2;
    bool intervals = false;
    std::size_t replicates = 100;
    std::size_t paths = 100;
    std::string s_mode = "forecast";
    std::uint64_t seed = 1;
    int max_p = 5;
    int max_d = 2;
    int max_q = 5;
    std::size_t min_length = 20;
    bool log_rates = false;
    std::string out_dir = "gts-out";
    /// Worker threads; negative means unset (GTS_THREADS, else 0 = all cores).
    int threads = -1;

    bool operator==(const RunConfig&) const = default;
};

/// TOML-style `key = value` text with keys in a fixed order.
[[nodiscard]] std::string serialize(const RunConfig& config);

/// Parses serialize() output or a hand-written file of the same keys.
/// Unknown keys and malformed values throw std::runtime_error.
[[nodiscard]] RunConfig parse_config(const std::string& text);
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);

/// FNV-1a hash of the settings that determine outputs (paths, out_dir and
/// threads excluded).
[[nodiscard]] std::uint64_t config_hash(const RunConfig& config);

/// Range checks; throws std::invalid_argument naming the field.
void validate(const RunConfig& config);

/// Checks that the panel and hierarchy files exist.
void validate_paths(const RunConfig& config);

[[nodiscard]] std::vector<Method> methods(const RunConfig& config);
[[nodiscard]] SMode s_mode(const RunConfig& config);
[[nodiscard]] ModelingOptions modeling(const RunConfig& config);
[[nodiscard]] boot::IntervalOptions interval_options(const RunConfig& config);
/// Thread count after applying the GTS_THREADS fallback.
[[nodiscard]] std::size_t thread_count(const RunConfig& config);

}  // namespace gts::cli
