#pragma once

#include "gts/hierarchy.hpp"
#include "gts/panel.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace gts::cli {

/**
 * @brief Parses a hierarchy declaration:
 *
 *     # comment
 *     attributes = sex, region
 *     sex = F, M
 *     region = NSW, VIC
 *
 * Throws std::runtime_error with the line number on malformed input.
 */
[[nodiscard]] GroupedHierarchy parse_hierarchy(std::istream& in);
[[nodiscard]] GroupedHierarchy read_hierarchy(const std::filesystem::path& path);
[[nodiscard]] std::string format_hierarchy(const GroupedHierarchy& hierarchy);

struct IngestReport {
    std::size_t rows = 0;
    std::size_t aggregate_rows = 0;
    int first_year = 0;
    int last_year = 0;
    std::size_t nodes = 0;
    std::size_t bottom_nodes = 0;
};

struct Ingested {
    Panel panel;
    IngestReport report;
};

/**
 * @brief Reads a long-format panel with header year,<attr1>[,<attr2>],deaths,exposure.
 *
 * Rows with "T" in an attribute column are aggregates; they are checked
 * against the sums of their bottom rows (deaths exactly, exposures within
 * relative 1e-9) and otherwise ignored. Throws std::runtime_error citing
 * line numbers for: header mismatch, malformed numbers, unknown attribute
 * values, duplicate (year, key) rows, nonpositive exposures, negative deaths,
 * non-contiguous years and missing (year, key) cells.
 */
[[nodiscard]] Ingested parse_panel(std::istream& in, const GroupedHierarchy& hierarchy);
[[nodiscard]] Ingested read_panel(const std::filesystem::path& path, const GroupedHierarchy& hierarchy);

/// Writes the bottom rows of a panel in the ingestion format.
void write_panel(std::ostream& out, const Panel& panel);

}  // namespace gts::cli
