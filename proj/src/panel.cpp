#include "gts/panel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gts {

Panel Panel::aggregate(GroupedHierarchy hierarchy, std::vector<int> years,
                       std::vector<NodeSeries> bottom) {
    const std::size_t n = years.size();
    const std::size_t mk = hierarchy.bottom_count();
    const std::size_t offset = hierarchy.bottom_offset();
    if (bottom.size() != mk) {
        throw std::invalid_argument("expected " + std::to_string(mk) + " bottom series, got " +
                                    std::to_string(bottom.size()));
    }
    for (std::size_t b = 0; b < mk; ++b) {
        const auto& s = bottom[b];
        const auto name = hierarchy.label(offset + b);
        if (s.deaths.size() != n || s.exposure.size() != n) {
            throw std::invalid_argument("series " + name + " is not aligned with the time axis");
        }
        for (std::size_t t = 0; t < n; ++t) {
            if (!std::isfinite(s.exposure[t]) || s.exposure[t] <= 0.0) {
                throw std::domain_error("nonpositive exposure for node " + name + " at t=" +
                                        std::to_string(t));
            }
            if (!std::isfinite(s.deaths[t]) || s.deaths[t] < 0.0) {
                throw std::invalid_argument("negative deaths for node " + name + " at t=" +
                                            std::to_string(t));
            }
        }
    }

    std::vector<NodeSeries> nodes(hierarchy.size());
    for (std::size_t node = 0; node < hierarchy.size(); ++node) {
        auto& out = nodes[node];
        out.deaths.assign(n, 0.0);
        out.exposure.assign(n, 0.0);
        for (auto b : hierarchy.descendants(node)) {
            for (std::size_t t = 0; t < n; ++t) {
                out.deaths[t] += bottom[b].deaths[t];
                out.exposure[t] += bottom[b].exposure[t];
            }
        }
        out.rate.resize(n);
        for (std::size_t t = 0; t < n; ++t) {
            out.rate[t] = out.deaths[t] / out.exposure[t];
        }
    }
    return Panel(std::move(hierarchy), std::move(years), std::move(nodes));
}

std::vector<double> Panel::exposures_at(std::size_t t) const {
    std::vector<double> out(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        out[i] = nodes_[i].exposure.at(t);
    }
    return out;
}

std::vector<double> Panel::bottom_exposures_at(std::size_t t) const {
    const std::size_t offset = hierarchy_.bottom_offset();
    std::vector<double> out(hierarchy_.bottom_count());
    for (std::size_t b = 0; b < out.size(); ++b) {
        out[b] = nodes_[offset + b].exposure.at(t);
    }
    return out;
}

Eigen::VectorXd Panel::rates_at(std::size_t t) const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(nodes_.size()));
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        out(static_cast<Eigen::Index>(i)) = nodes_[i].rate.at(t);
    }
    return out;
}

Eigen::MatrixXd Panel::rate_matrix() const {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(length()), static_cast<Eigen::Index>(nodes_.size()));
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        for (std::size_t t = 0; t < length(); ++t) {
            out(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)) = nodes_[i].rate[t];
        }
    }
    return out;
}

Panel Panel::head(std::size_t count) const {
    if (count > length()) {
        throw std::out_of_range("panel head beyond series length");
    }
    std::vector<NodeSeries> nodes(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& s = nodes_[i];
        nodes[i].deaths.assign(s.deaths.begin(), s.deaths.begin() + static_cast<std::ptrdiff_t>(count));
        nodes[i].exposure.assign(s.exposure.begin(),
                                 s.exposure.begin() + static_cast<std::ptrdiff_t>(count));
        nodes[i].rate.assign(s.rate.begin(), s.rate.begin() + static_cast<std::ptrdiff_t>(count));
    }
    return Panel(hierarchy_, std::vector<int>(years_.begin(), years_.begin() + static_cast<std::ptrdiff_t>(count)),
                 std::move(nodes));
}

}  // namespace gts
