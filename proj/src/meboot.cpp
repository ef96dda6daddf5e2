#include "gts/meboot.hpp"

#include "gts/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gts::boot {

namespace {

constexpr double kMaxRate = 700.0;

// Mean of the density proportional to exp(c s) on [0, 1].
double exponential_mean(double c) {
    if (std::abs(c) < 1e-6) {
        return 0.5 + c / 12.0;
    }
    return -1.0 / std::expm1(-c) - 1.0 / c;
}

// Rate c whose density on [0, 1] has mean `target`.
double solve_rate(double target) {
    if (target <= exponential_mean(-kMaxRate)) {
        return -kMaxRate;
    }
    if (target >= exponential_mean(kMaxRate)) {
        return kMaxRate;
    }
    double lo = -kMaxRate;
    double hi = kMaxRate;
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        (exponential_mean(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Inverse CDF of the density proportional to exp(c s) on [0, 1].
double exponential_quantile(double c, double v) {
    if (std::abs(c) < 1e-12) {
        return v;
    }
    return std::clamp(std::log1p(v * std::expm1(c)) / c, 0.0, 1.0);
}

double tail_rate(double a, double b, double mean) {
    const double width = b - a;
    if (!(width > 0.0)) {
        return 0.0;
    }
    return solve_rate(std::clamp((mean - a) / width, 0.0, 1.0));
}

}  // namespace

MebootPlan::MebootPlan(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 4) {
        throw std::invalid_argument("maximum entropy bootstrap needs at least 4 observations");
    }
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    sorted_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        sorted_[i] = x[order_[i]];
    }
    constant_ = sorted_.front() == sorted_.back();

    std::vector<double> deviations(n - 1);
    for (std::size_t t = 1; t < n; ++t) {
        deviations[t - 1] = std::abs(x[t] - x[t - 1]);
    }
    m_trim_ = stats::trimmed_mean(std::move(deviations), kTrimProportion);

    z_.resize(n + 1);
    z_[0] = sorted_[0] - m_trim_;
    for (std::size_t k = 1; k < n; ++k) {
        z_[k] = 0.5 * (sorted_[k - 1] + sorted_[k]);
    }
    z_[n] = sorted_[n - 1] + m_trim_;

    means_.resize(n);
    means_[0] = 0.75 * sorted_[0] + 0.25 * sorted_[1];
    for (std::size_t k = 1; k + 1 < n; ++k) {
        means_[k] = 0.25 * sorted_[k - 1] + 0.5 * sorted_[k] + 0.25 * sorted_[k + 1];
    }
    means_[n - 1] = 0.25 * sorted_[n - 2] + 0.75 * sorted_[n - 1];

    lower_rate_ = tail_rate(z_[0], z_[1], means_[0]);
    upper_rate_ = tail_rate(z_[n - 1], z_[n], means_[n - 1]);
}

double MebootPlan::quantile(double u) const {
    const std::size_t n = sorted_.size();
    const double scaled = std::clamp(u, 0.0, 1.0) * static_cast<double>(n);
    const auto k = std::min(n - 1, static_cast<std::size_t>(scaled));
    const double s = scaled - static_cast<double>(k);
    const double a = z_[k];
    const double b = z_[k + 1];
    if (k == 0) {
        return a + (b - a) * exponential_quantile(lower_rate_, s);
    }
    if (k == n - 1) {
        return a + (b - a) * exponential_quantile(upper_rate_, s);
    }
    return a + (b - a) * s;
}

std::vector<double> MebootPlan::replicate(std::span<const double> sorted_uniforms) const {
    const std::size_t n = sorted_.size();
    if (sorted_uniforms.size() != n) {
        throw std::invalid_argument("uniform draws do not match the series length");
    }
    if (constant_) {
        return sorted_;
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[order_[i]] = quantile(sorted_uniforms[i]);
    }
    return out;
}

std::vector<double> sorted_uniforms(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> u(n);
    for (auto& v : u) {
        v = unif(rng);
    }
    std::sort(u.begin(), u.end());
    return u;
}

std::vector<double> meboot_replicate(std::span<const double> x, std::mt19937_64& rng) {
    const MebootPlan plan(x);
    return plan.replicate(sorted_uniforms(x.size(), rng));
}

std::vector<std::vector<double>> meboot_panel(const std::vector<MebootPlan>& plans, std::mt19937_64& rng) {
    if (plans.empty()) {
        return {};
    }
    const std::size_t n = plans.front().size();
    for (const auto& p : plans) {
        if (p.size() != n) {
            throw std::invalid_argument("panel series have different lengths");
        }
    }
    const auto u = sorted_uniforms(n, rng);
    std::vector<std::vector<double>> out;
    out.reserve(plans.size());
    for (const auto& p : plans) {
        out.push_back(p.replicate(u));
    }
    return out;
}

std::vector<std::vector<double>> meboot_panel(const std::vector<std::vector<double>>& series,
                                              std::mt19937_64& rng) {
    std::vector<MebootPlan> plans;
    plans.reserve(series.size());
    for (const auto& s : series) {
        plans.emplace_back(s);
    }
    return meboot_panel(plans, rng);
}

}  // namespace gts::boot
