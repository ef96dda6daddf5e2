#include "gts/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace gts {

bool GroupKey::is_top() const {
    return std::all_of(values.begin(), values.end(),
                       [](const std::string& v) { return v == kAggregate; });
}

bool GroupKey::is_bottom() const {
    return std::none_of(values.begin(), values.end(),
                        [](const std::string& v) { return v == kAggregate; });
}

std::string GroupKey::label() const {
    if (is_top()) {
        return std::string(kAggregate);
    }
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) {
            out += '*';
        }
        out += values[i];
    }
    return out;
}

GroupedHierarchy GroupedHierarchy::build(std::vector<Attribute> attributes) {
    if (attributes.empty()) {
        throw std::invalid_argument("hierarchy needs at least one attribute");
    }
    if (attributes.size() > 2) {
        throw std::invalid_argument("hierarchy supports at most two grouping attributes");
    }
    std::unordered_set<std::string> names;
    for (const auto& attr : attributes) {
        if (attr.name.empty()) {
            throw std::invalid_argument("attribute name must not be empty");
        }
        if (!names.insert(attr.name).second) {
            throw std::invalid_argument("duplicate attribute name '" + attr.name + "'");
        }
        if (attr.values.empty()) {
            throw std::invalid_argument("attribute '" + attr.name + "' has an empty domain");
        }
        std::unordered_set<std::string> seen;
        for (const auto& v : attr.values) {
            if (v.empty() || v == kAggregate || v.find_first_of("*,") != std::string::npos) {
                throw std::invalid_argument("attribute '" + attr.name + "' has invalid value '" +
                                            v + "'");
            }
            if (!seen.insert(v).second) {
                throw std::invalid_argument("attribute '" + attr.name +
                                            "' has duplicate value '" + v + "'");
            }
        }
    }

    GroupedHierarchy h;
    h.attributes_ = std::move(attributes);
    const auto& a1 = h.attributes_[0];
    const std::string agg(kAggregate);

    if (h.attributes_.size() == 1) {
        h.level_names_ = {"Total", a1.name};
        h.keys_.push_back(GroupKey{{agg}});
        h.levels_.push_back(0);
        for (const auto& v : a1.values) {
            h.keys_.push_back(GroupKey{{v}});
            h.levels_.push_back(1);
        }
        h.bottom_count_ = a1.values.size();
    } else {
        const auto& a2 = h.attributes_[1];
        h.level_names_ = {"Total", a1.name, a2.name, a1.name + " x " + a2.name};
        h.keys_.push_back(GroupKey{{agg, agg}});
        h.levels_.push_back(0);
        for (const auto& v : a1.values) {
            h.keys_.push_back(GroupKey{{v, agg}});
            h.levels_.push_back(1);
        }
        for (const auto& v : a2.values) {
            h.keys_.push_back(GroupKey{{agg, v}});
            h.levels_.push_back(2);
        }
        for (const auto& v1 : a1.values) {
            for (const auto& v2 : a2.values) {
                h.keys_.push_back(GroupKey{{v1, v2}});
                h.levels_.push_back(3);
            }
        }
        h.bottom_count_ = a1.values.size() * a2.values.size();
    }

    // A bottom key matches a node when it agrees on every non-aggregate value.
    const std::size_t offset = h.bottom_offset();
    h.descendants_.resize(h.keys_.size());
    for (std::size_t node = 0; node < h.keys_.size(); ++node) {
        const auto& key = h.keys_[node];
        for (std::size_t b = 0; b < h.bottom_count_; ++b) {
            const auto& bottom = h.keys_[offset + b];
            bool match = true;
            for (std::size_t a = 0; a < key.values.size(); ++a) {
                if (key.values[a] != kAggregate && key.values[a] != bottom.values[a]) {
                    match = false;
                    break;
                }
            }
            if (match) {
                h.descendants_[node].push_back(b);
            }
        }
    }
    return h;
}

std::vector<std::size_t> GroupedHierarchy::nodes_at_level(std::size_t level) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < levels_.size(); ++i) {
        if (levels_[i] == level) {
            out.push_back(i);
        }
    }
    return out;
}

std::optional<std::size_t> GroupedHierarchy::find(const GroupKey& key) const {
    const auto it = std::find(keys_.begin(), keys_.end(), key);
    if (it == keys_.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - keys_.begin());
}

std::optional<std::size_t> GroupedHierarchy::find_label(std::string_view label) const {
    for (std::size_t i = 0; i < keys_.size(); ++i) {
        if (keys_[i].label() == label) {
            return i;
        }
    }
    return std::nullopt;
}

SummingMatrix summing_matrix_counts(const GroupedHierarchy& hierarchy) {
    const auto m = static_cast<Eigen::Index>(hierarchy.size());
    const auto mk = static_cast<Eigen::Index>(hierarchy.bottom_count());
    SummingMatrix s;
    s.mode = SummingMode::counts;
    s.weights = Eigen::MatrixXd::Zero(m, mk);
    for (Eigen::Index node = 0; node < m; ++node) {
        for (auto b : hierarchy.descendants(static_cast<std::size_t>(node))) {
            s.weights(node, static_cast<Eigen::Index>(b)) = 1.0;
        }
    }
    return s;
}

namespace {

std::string where(const GroupedHierarchy& h, std::size_t node, std::optional<std::size_t> t) {
    std::ostringstream os;
    os << "node " << h.label(node);
    if (t) {
        os << " at t=" << *t;
    }
    return os.str();
}

}  // namespace

SummingMatrix summing_matrix_rates(const GroupedHierarchy& hierarchy,
                                   std::span<const double> exposures,
                                   std::optional<std::size_t> time_index) {
    const std::size_t m = hierarchy.size();
    const std::size_t mk = hierarchy.bottom_count();
    const std::size_t offset = hierarchy.bottom_offset();
    if (exposures.size() != m && exposures.size() != mk) {
        throw std::invalid_argument("exposure vector has length " +
                                    std::to_string(exposures.size()) + ", expected " +
                                    std::to_string(mk) + " or " + std::to_string(m));
    }
    const bool bottom_only = exposures.size() == mk && mk != m;
    const auto bottom_exposure = [&](std::size_t b) {
        return bottom_only ? exposures[b] : exposures[offset + b];
    };
    for (std::size_t b = 0; b < mk; ++b) {
        const double e = bottom_exposure(b);
        if (!std::isfinite(e) || e <= 0.0) {
            throw std::domain_error("nonpositive exposure for " +
                                    where(hierarchy, offset + b, time_index));
        }
    }

    SummingMatrix s;
    s.mode = SummingMode::rates;
    s.time_index = time_index;
    s.weights = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(mk));
    for (std::size_t node = 0; node < m; ++node) {
        const auto& cols = hierarchy.descendants(node);
        double total = 0.0;
        for (auto b : cols) {
            total += bottom_exposure(b);
        }
        if (!bottom_only && node < offset) {
            const double supplied = exposures[node];
            if (!std::isfinite(supplied) || supplied <= 0.0) {
                throw std::domain_error("nonpositive exposure for " +
                                        where(hierarchy, node, time_index));
            }
            if (std::abs(supplied - total) > 1e-9 * total) {
                throw std::invalid_argument("exposure for " + where(hierarchy, node, time_index) +
                                            " does not equal the sum of its children");
            }
        }
        for (auto b : cols) {
            s.weights(static_cast<Eigen::Index>(node), static_cast<Eigen::Index>(b)) =
                bottom_exposure(b) / total;
        }
    }
    // Exact identity on the bottom block.
    s.weights.bottomRows(static_cast<Eigen::Index>(mk)).setIdentity();
    return s;
}

Eigen::VectorXd aggregate_counts(const GroupedHierarchy& hierarchy, std::span<const double> bottom) {
    if (bottom.size() != hierarchy.bottom_count()) {
        throw std::invalid_argument("bottom vector length does not match the hierarchy");
    }
    Eigen::VectorXd out(static_cast<Eigen::Index>(hierarchy.size()));
    for (std::size_t node = 0; node < hierarchy.size(); ++node) {
        double sum = 0.0;
        for (auto b : hierarchy.descendants(node)) {
            sum += bottom[b];
        }
        out(static_cast<Eigen::Index>(node)) = sum;
    }
    return out;
}

}  // namespace gts
