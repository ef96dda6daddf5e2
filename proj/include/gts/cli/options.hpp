#pragma once

#include "gts/cli/config.hpp"

#include <CLI11.hpp>

namespace gts::cli {

/// Registers every RunConfig field as a kebab-case option of `app`. The same
/// names are the keys of configuration files.
void add_run_options(CLI::App& app, RunConfig& config);

}  // namespace gts::cli
