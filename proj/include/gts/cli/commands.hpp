#pragma once

#include "gts/cli/config.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

namespace gts::cli {

/// Ingests and validates a panel; prints the ingestion report to `out`.
void cmd_validate(const std::string& panel, const std::string& hierarchy, std::ostream& out);

/// Writes forecast_<method>.csv, intervals_<method>.csv (when enabled),
/// plot_data.csv and summary.json into config.out_dir.
void cmd_forecast(const RunConfig& config, std::ostream& warnings);

/// Writes scores_<method>.csv, table_<metric>.csv and summary.json into
/// config.out_dir.
void cmd_evaluate(const RunConfig& config, std::ostream& warnings);

/// Writes panel.csv and hierarchy.cfg of the synthetic Australian-shaped panel.
void cmd_synth(const std::filesystem::path& out_dir, std::uint64_t seed);

/// Command-line entry point; returns the process exit code.
int run(int argc, char** argv);

}  // namespace gts::cli
