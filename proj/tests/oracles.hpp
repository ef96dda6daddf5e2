#pragma once

#include "gts/arima.hpp"
#include "gts/hierarchy.hpp"
#include "gts/panel.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace gts::test {

/// KPSS level statistic written out directly from its textbook definition.
inline double kpss_oracle(const std::vector<double>& x) {
    const auto n = static_cast<long double>(x.size());
    long double mu = 0.0L;
    for (double v : x) {
        mu += v;
    }
    mu /= n;
    const auto lags = static_cast<std::size_t>(std::floor(4.0 * std::pow(static_cast<double>(x.size()) / 100.0, 0.25)));
    long double num = 0.0L;
    long double s = 0.0L;
    for (double v : x) {
        s += v - mu;
        num += s * s;
    }
    long double lrv = 0.0L;
    for (std::size_t l = 0; l <= lags; ++l) {
        long double g = 0.0L;
        for (std::size_t t = l; t < x.size(); ++t) {
            g += (x[t] - mu) * (x[t - l] - mu);
        }
        g /= n;
        lrv += (l == 0 ? 1.0L : 2.0L * (1.0L - static_cast<long double>(l) / (lags + 1))) * g;
    }
    return static_cast<double>(num / (n * n) / lrv);
}

/// Concentrated exact Gaussian log-likelihood of a stationary ARMA model with
/// mean `mu`, from the dense autocovariance matrix (psi-weight sums) and a
/// Cholesky factorisation. Returns {loglik, sigma2}.
inline std::pair<double, double> dense_arma_loglik(const std::vector<double>& x, const std::vector<double>& ar,
                                                    const std::vector<double>& ma, double mu) {
    const std::size_t n = x.size();
    const std::size_t K = 20000;
    std::vector<double> psi(K, 0.0);
    for (std::size_t j = 0; j < K; ++j) {
        double v = j == 0 ? 1.0 : (j <= ma.size() ? ma[j - 1] : 0.0);
        for (std::size_t i = 1; i <= std::min(j, ar.size()); ++i) {
            v += ar[i - 1] * psi[j - i];
        }
        psi[j] = v;
    }
    Eigen::MatrixXd G(n, n);
    for (std::size_t h = 0; h < n; ++h) {
        double g = 0.0;
        for (std::size_t j = 0; j + h < K; ++j) {
            g += psi[j] * psi[j + h];
        }
        for (std::size_t i = 0; i + h < n; ++i) {
            G(i, i + h) = g;
            G(i + h, i) = g;
        }
    }
    Eigen::VectorXd u(n);
    for (std::size_t i = 0; i < n; ++i) {
        u(i) = x[i] - mu;
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(G);
    const double q = u.dot(llt.solve(u));
    double logdet = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        logdet += 2.0 * std::log(llt.matrixL()(i, i));
    }
    const double s2 = q / static_cast<double>(n);
    const double nn = static_cast<double>(n);
    return {-0.5 * nn * (std::log(2.0 * std::numbers::pi * s2) + 1.0) - 0.5 * logdet, s2};
}

/// beta from the dense weighted normal equations (S'WS) beta = S'W y.
inline Eigen::VectorXd normal_equations(const Eigen::MatrixXd& S, const Eigen::VectorXd& y, const Eigen::VectorXd& w) {
    const Eigen::MatrixXd StW = S.transpose() * w.asDiagonal();
    return (StW * S).inverse() * (StW * y);
}

/// Rate of every node from bottom deaths and exposures by explicit summation
/// over the node's bottom descendants.
inline std::vector<double> brute_force_rates(const GroupedHierarchy& h, const std::vector<double>& deaths,
                                             const std::vector<double>& exposure) {
    std::vector<double> out(h.size());
    for (std::size_t j = 0; j < h.size(); ++j) {
        double d = 0.0;
        double e = 0.0;
        for (std::size_t k = 0; k < h.bottom_count(); ++k) {
            const auto& bk = h.key(h.bottom_offset() + k);
            bool inside = true;
            for (std::size_t a = 0; a < bk.values.size(); ++a) {
                inside = inside && (h.key(j).values[a] == kAggregate || h.key(j).values[a] == bk.values[a]);
            }
            if (inside) {
                d += deaths[k];
                e += exposure[k];
            }
        }
        out[j] = d / e;
    }
    return out;
}

inline GroupedHierarchy two_attribute(std::size_t a, std::size_t b) {
    Attribute first{"sex", {}};
    for (std::size_t i = 0; i < a; ++i) {
        first.values.push_back("S" + std::to_string(i + 1));
    }
    Attribute second{"region", {}};
    for (std::size_t i = 0; i < b; ++i) {
        second.values.push_back("R" + std::to_string(i + 1));
    }
    return GroupedHierarchy::build({first, second});
}

/// Random coherent panel: positive exposures, integer deaths.
inline Panel random_panel(const GroupedHierarchy& h, std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> expo(200.0, 5000.0);
    std::uniform_real_distribution<double> rate(0.001, 0.05);
    std::vector<NodeSeries> bottom(h.bottom_count());
    for (auto& s : bottom) {
        for (std::size_t t = 0; t < n; ++t) {
            const double e = std::round(expo(rng));
            s.exposure.push_back(e);
            s.deaths.push_back(std::round(e * rate(rng)));
        }
    }
    std::vector<int> years(n);
    for (std::size_t t = 0; t < n; ++t) {
        years[t] = 1900 + static_cast<int>(t);
    }
    return Panel::aggregate(h, years, std::move(bottom));
}

inline std::vector<double> simulate_ar1(double phi, double mu, std::size_t n, std::mt19937_64& rng,
                                        std::size_t burn = 200) {
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> x(n);
    double u = 0.0;
    for (std::size_t t = 0; t < n + burn; ++t) {
        u = phi * u + z(rng);
        if (t >= burn) {
            x[t - burn] = mu + u;
        }
    }
    return x;
}

inline std::vector<double> random_walk(std::size_t n, std::mt19937_64& rng, double drift = 0.0) {
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> x(n);
    double v = 0.0;
    for (auto& xi : x) {
        v += drift + z(rng);
        xi = v;
    }
    return x;
}

}  // namespace gts::test
