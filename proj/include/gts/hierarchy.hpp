#pragma once

#include <Eigen/Dense>

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gts {

/// Attribute value that denotes aggregation over that attribute.
inline constexpr std::string_view kAggregate = "T";

/// A grouping attribute and its ordered domain, e.g. sex = {F, M}.
struct Attribute {
    std::string name;
    std::vector<std::string> values;
};

/**
 * @brief Identifies one node of a grouped hierarchy.
 *
 * Holds one value per attribute; kAggregate marks an attribute that has been
 * summed over. All-aggregate is the top node, no-aggregate is a bottom node.
 */
struct GroupKey {
    std::vector<std::string> values;

    [[nodiscard]] bool is_top() const;
    [[nodiscard]] bool is_bottom() const;
    /// "T" for the top node, otherwise all values joined by '*', e.g. "F*T".
    [[nodiscard]] std::string label() const;

    auto operator<=>(const GroupKey&) const = default;
};

/**
 * @brief Grouped hierarchy over one or two crossing attributes.
 *
 * Canonical node order: the top node, the attribute-1 groups in declaration
 * order, the attribute-2 groups, then the bottom cross product with
 * attribute 1 as the outer loop. With one attribute the bottom level is the
 * attribute's values themselves.
 *
 * Levels are numbered 0 (top) .. level_count()-1 (bottom).
 */
class GroupedHierarchy {
public:
    /// Throws std::invalid_argument on an empty domain, duplicate values,
    /// a reserved value ("T"), duplicate attribute names or more than two
    /// attributes.
    [[nodiscard]] static GroupedHierarchy build(std::vector<Attribute> attributes);

    [[nodiscard]] std::size_t size() const { return keys_.size(); }
    [[nodiscard]] std::size_t bottom_count() const { return bottom_count_; }
    /// Index of the first bottom node in canonical order.
    [[nodiscard]] std::size_t bottom_offset() const { return size() - bottom_count_; }

    [[nodiscard]] const std::vector<Attribute>& attributes() const { return attributes_; }
    [[nodiscard]] const std::vector<GroupKey>& keys() const { return keys_; }
    [[nodiscard]] const GroupKey& key(std::size_t node) const { return keys_.at(node); }
    [[nodiscard]] std::string label(std::size_t node) const { return keys_.at(node).label(); }

    [[nodiscard]] std::size_t level_count() const { return level_names_.size(); }
    [[nodiscard]] std::size_t level(std::size_t node) const { return levels_.at(node); }
    [[nodiscard]] const std::string& level_name(std::size_t level) const {
        return level_names_.at(level);
    }
    [[nodiscard]] std::vector<std::size_t> nodes_at_level(std::size_t level) const;

    /// Bottom-level column indices (0..m_K-1) aggregated into `node`.
    [[nodiscard]] const std::vector<std::size_t>& descendants(std::size_t node) const {
        return descendants_.at(node);
    }

    [[nodiscard]] std::optional<std::size_t> find(const GroupKey& key) const;
    /// Looks a node up by its label ("T", "F*T", "F*R1", ...).
    [[nodiscard]] std::optional<std::size_t> find_label(std::string_view label) const;

private:
    GroupedHierarchy() = default;

    std::vector<Attribute> attributes_;
    std::vector<GroupKey> keys_;
    std::vector<std::size_t> levels_;
    std::vector<std::string> level_names_;
    std::vector<std::vector<std::size_t>> descendants_;
    std::size_t bottom_count_ = 0;
};

enum class SummingMode { counts, rates };

/**
 * @brief m x m_K aggregation matrix.
 *
 * Counts mode holds 0/1 entries. Rates mode holds exposure ratios
 * E_bottom / E_node on each row's descendant columns, generated from the
 * exposures at `time_index` (an observed year or a forecast horizon).
 * The bottom m_K rows are the identity in both modes.
 */
struct SummingMatrix {
    Eigen::MatrixXd weights;
    SummingMode mode = SummingMode::counts;
    std::optional<std::size_t> time_index;

    [[nodiscard]] Eigen::Index rows() const { return weights.rows(); }
    [[nodiscard]] Eigen::Index cols() const { return weights.cols(); }
    /// The non-bottom (aggregation) block.
    [[nodiscard]] Eigen::MatrixXd aggregation_block() const {
        return weights.topRows(weights.rows() - weights.cols());
    }
};

[[nodiscard]] SummingMatrix summing_matrix_counts(const GroupedHierarchy& hierarchy);

/**
 * @brief Rates summing matrix from one time point's exposures.
 *
 * `exposures` is either the m_K bottom exposures (parents are derived by
 * summation) or all m node exposures in canonical order, in which case each
 * parent must equal its children's sum within relative tolerance 1e-9.
 * Throws std::domain_error naming the node and time on a nonpositive or
 * non-finite exposure, std::invalid_argument on incoherent parents or a
 * length mismatch.
 */
[[nodiscard]] SummingMatrix summing_matrix_rates(const GroupedHierarchy& hierarchy,
                                                 std::span<const double> exposures,
                                                 std::optional<std::size_t> time_index = {});

/// Sums bottom values up to every node (counts aggregation).
[[nodiscard]] Eigen::VectorXd aggregate_counts(const GroupedHierarchy& hierarchy,
                                               std::span<const double> bottom);

}  // namespace gts
