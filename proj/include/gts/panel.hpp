#pragma once

#include "gts/hierarchy.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace gts {

/// Deaths, exposure-to-risk and their ratio for one node on the panel's time axis.
struct NodeSeries {
    std::vector<double> deaths;
    std::vector<double> exposure;
    std::vector<double> rate;
};

/**
 * @brief Time-aligned deaths/exposure/rate series for every node of a hierarchy.
 *
 * Built from bottom-level series only; parents are derived by summing deaths
 * and exposures, and every rate is recomputed as deaths / exposure.
 */
class Panel {
public:
    /// aggregate_panel: throws std::invalid_argument on misaligned series or
    /// negative deaths, std::domain_error on a nonpositive exposure.
    [[nodiscard]] static Panel aggregate(GroupedHierarchy hierarchy, std::vector<int> years,
                                         std::vector<NodeSeries> bottom);

    [[nodiscard]] const GroupedHierarchy& hierarchy() const { return hierarchy_; }
    [[nodiscard]] const std::vector<int>& years() const { return years_; }
    [[nodiscard]] std::size_t length() const { return years_.size(); }
    [[nodiscard]] std::size_t node_count() const { return nodes_.size(); }
    [[nodiscard]] const NodeSeries& node(std::size_t i) const { return nodes_.at(i); }

    /// Exposures of all m nodes at time index t (0-based).
    [[nodiscard]] std::vector<double> exposures_at(std::size_t t) const;
    /// Bottom exposures at time index t.
    [[nodiscard]] std::vector<double> bottom_exposures_at(std::size_t t) const;
    /// Rates of all m nodes at time index t.
    [[nodiscard]] Eigen::VectorXd rates_at(std::size_t t) const;
    /// length() x m matrix of rates.
    [[nodiscard]] Eigen::MatrixXd rate_matrix() const;

    /// First `count` observations of every node.
    [[nodiscard]] Panel head(std::size_t count) const;

private:
    GroupedHierarchy hierarchy_;
    std::vector<int> years_;
    std::vector<NodeSeries> nodes_;

    Panel(GroupedHierarchy h, std::vector<int> years, std::vector<NodeSeries> nodes)
        : hierarchy_(std::move(h)), years_(std::move(years)), nodes_(std::move(nodes)) {}
};

}  // namespace gts
