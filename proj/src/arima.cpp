#include "gts/arima.hpp"

#include "gts/optimize.hpp"
#include "gts/stats.hpp"

#include "dual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <tuple>
#include <utility>

namespace gts::arima {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Partial autocorrelations are confined to (-kPacfBound, kPacfBound).
constexpr double kPacfBound = 0.9999;

using ad::value;

// Durbin-Levinson map from partial autocorrelations to AR coefficients.
template <class T>
std::vector<T> pacf_to_coefficients(std::span<const T> pacf) {
    const std::size_t p = pacf.size();
    std::vector<T> phi(p, T(0.0));
    std::vector<T> prev(p, T(0.0));
    for (std::size_t j = 0; j < p; ++j) {
        prev = phi;
        phi[j] = pacf[j];
        for (std::size_t k = 0; k < j; ++k) {
            phi[k] = prev[k] - pacf[j] * prev[j - k - 1];
        }
    }
    return phi;
}

// Sample partial autocorrelations of a centred series up to `lags`.
std::vector<double> sample_pacf(std::span<const double> y, std::size_t lags) {
    const std::size_t n = y.size();
    std::vector<double> acf(lags + 1, 0.0);
    for (std::size_t k = 0; k <= lags; ++k) {
        for (std::size_t t = k; t < n; ++t) {
            acf[k] += y[t] * y[t - k];
        }
    }
    std::vector<double> pacf(lags, 0.0);
    if (acf[0] <= 0.0) {
        return pacf;
    }
    for (auto& a : acf) {
        a /= acf[0] == 0.0 ? 1.0 : acf[0];
    }
    acf[0] = 1.0;
    std::vector<double> phi(lags, 0.0);
    std::vector<double> prev(lags, 0.0);
    double v = 1.0;
    for (std::size_t j = 0; j < lags; ++j) {
        double num = acf[j + 1];
        for (std::size_t k = 0; k < j; ++k) {
            num -= phi[k] * acf[j - k];
        }
        const double r = v > 0.0 ? num / v : 0.0;
        prev = phi;
        phi[j] = r;
        for (std::size_t k = 0; k < j; ++k) {
            phi[k] = prev[k] - r * prev[j - k - 1];
        }
        v *= (1.0 - r * r);
        pacf[j] = r;
    }
    return pacf;
}

// Solves A x = b in place by Gaussian elimination with partial pivoting on
// an n x n column-major matrix. Returns false when A is singular.
template <class T>
bool solve_in_place(std::vector<T>& A, std::vector<T>& b, std::size_t n) {
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t pivot = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(value(A[r + c * n])) > std::abs(value(A[pivot + c * n]))) {
                pivot = r;
            }
        }
        if (value(A[pivot + c * n]) == 0.0) {
            return false;
        }
        if (pivot != c) {
            for (std::size_t j = c; j < n; ++j) {
                std::swap(A[c + j * n], A[pivot + j * n]);
            }
            std::swap(b[c], b[pivot]);
        }
        for (std::size_t r = c + 1; r < n; ++r) {
            const T factor = A[r + c * n] / A[c + c * n];
            for (std::size_t j = c + 1; j < n; ++j) {
                A[r + j * n] -= factor * A[c + j * n];
            }
            b[r] -= factor * b[c];
        }
    }
    for (std::size_t c = n; c-- > 0;) {
        T v = b[c];
        for (std::size_t j = c + 1; j < n; ++j) {
            v -= A[c + j * n] * b[j];
        }
        b[c] = v / A[c + c * n];
    }
    return true;
}

/**
 * Kalman filter for a zero-mean ARMA process in the state-space form
 * alpha_{t+1} = T alpha_t + R eps_t, u_t = alpha_t[0], with T the companion
 * matrix of the AR part and R = (1, theta_1, ..., theta_{r-1}).
 * Innovation variances are relative to sigma2. The scalar type may be a dual
 * number, giving exact likelihood gradients.
 */
template <class T>
class ArmaFilter {
public:
    ArmaFilter(std::span<const T> phi, std::span<const T> theta)
        : r_(std::max(phi.size(), theta.size() + 1)), phi_(r_, T(0.0)), R_(r_, T(0.0)),
          P_(r_ * r_, T(0.0)), work_(r_ * r_, T(0.0)), a_(r_, T(0.0)), ones_(r_, T(0.0)) {
        std::copy(phi.begin(), phi.end(), phi_.begin());
        R_[0] = T(1.0);
        std::copy(theta.begin(), theta.end(), R_.begin() + 1);
    }

    struct Output {
        T ssq = T(0.0);
        T sumlog = T(0.0);
        /// With profile_mean: sum v_1^2 / f and sum v_y v_1 / f, where v_1 are
        /// the innovations of a constant series of ones.
        T ones_ssq = T(0.0);
        T cross = T(0.0);
        bool ok = false;

        /// GLS estimate of the mean offset.
        [[nodiscard]] T mean() const { return value(ones_ssq) > 0.0 ? cross / ones_ssq : T(0.0); }
        /// Sum of squares at the GLS mean.
        [[nodiscard]] T profiled_ssq() const {
            return value(ones_ssq) > 0.0 ? ssq - cross * cross / ones_ssq : ssq;
        }
    };

    // Filters u_t = y_t - offset. Optionally records the innovations and the
    // final predicted state.
    Output run(std::span<const double> y, double offset, std::vector<double>* innovations,
               std::vector<double>* final_state, bool profile_mean = false) {
        using std::log;
        Output out;
        if (!initial_covariance()) {
            return out;
        }
        std::fill(a_.begin(), a_.end(), T(0.0));
        std::fill(ones_.begin(), ones_.end(), T(0.0));
        if (innovations) {
            innovations->resize(y.size());
        }
        bool steady = false;
        std::vector<T> gain(r_, T(0.0));
        T steady_f(1.0);
        std::size_t steady_steps = 0;
        for (std::size_t t = 0; t < y.size(); ++t) {
            const T v = (y[t] - offset) - a_[0];
            if (innovations) {
                (*innovations)[t] = value(v);
            }
            const T v1 = profile_mean ? 1.0 - ones_[0] : T(0.0);
            if (steady) {
                out.ssq += v * v / steady_f;
                ++steady_steps;
                for (std::size_t i = 0; i < r_; ++i) {
                    a_[i] += gain[i] * v;
                }
                advance(a_);
                if (profile_mean) {
                    out.ones_ssq += v1 * v1 / steady_f;
                    out.cross += v * v1 / steady_f;
                    for (std::size_t i = 0; i < r_; ++i) {
                        ones_[i] += gain[i] * v1;
                    }
                    advance(ones_);
                }
                continue;
            }
            const T f = P_[0];
            if (!(value(f) > 0.0) || !std::isfinite(value(f))) {
                return out;
            }
            out.ssq += v * v / f;
            out.sumlog += log(f);
            for (std::size_t i = 0; i < r_; ++i) {
                gain[i] = P_[i] / f;
                a_[i] += gain[i] * v;
            }
            advance(a_);
            if (profile_mean) {
                out.ones_ssq += v1 * v1 / f;
                out.cross += v * v1 / f;
                for (std::size_t i = 0; i < r_; ++i) {
                    ones_[i] += gain[i] * v1;
                }
                advance(ones_);
            }
            predict_covariance(f);
            if (std::abs(value(f) - 1.0) < 1e-10) {
                steady = true;
                steady_f = P_[0];
                for (std::size_t i = 0; i < r_; ++i) {
                    gain[i] = P_[i] / steady_f;
                }
            }
        }
        if (steady_steps > 0) {
            out.sumlog += static_cast<double>(steady_steps) * log(steady_f);
        }
        if (final_state) {
            final_state->resize(r_);
            for (std::size_t i = 0; i < r_; ++i) {
                (*final_state)[i] = value(a_[i]);
            }
        }
        out.ok = std::isfinite(value(out.ssq)) && std::isfinite(value(out.sumlog));
        return out;
    }

private:
    std::size_t r_;
    std::vector<T> phi_;
    std::vector<T> R_;
    std::vector<T> P_;
    std::vector<T> work_;
    std::vector<T> a_;
    std::vector<T> ones_;

    void advance(std::vector<T>& a) const {
        const T a0 = a[0];
        for (std::size_t i = 0; i + 1 < r_; ++i) {
            a[i] = phi_[i] * a0 + a[i + 1];
        }
        a[r_ - 1] = phi_[r_ - 1] * a0;
    }

    // Prediction covariance T (P - P e1 e1' P / f) T' + R R'. The filtered
    // covariance has a zero first row and column, so T only shifts it.
    void predict_covariance(const T& f) {
        const std::size_t r = r_;
        for (std::size_t j = 0; j < r; ++j) {
            const T cj = j + 1 < r ? P_[j + 1] : T(0.0);
            for (std::size_t i = 0; i <= j; ++i) {
                T v = R_[i] * R_[j];
                if (j + 1 < r) {
                    v += P_[(i + 1) + (j + 1) * r] - P_[i + 1] * cj / f;
                }
                work_[i + j * r] = v;
                work_[j + i * r] = v;
            }
        }
        std::swap(P_, work_);
    }

    // Stationary covariance solving P = T P T' + R R', built from the ARMA
    // autocovariances gamma(h) and the cross-covariances E[u_t eps_{t-h}] = psi_h.
    bool initial_covariance() {
        const std::size_t r = r_;
        const T zero(0.0);
        const auto theta_at = [&](std::size_t k) -> const T& { return k < r ? R_[k] : zero; };
        const auto phi_at = [&](std::size_t k) -> const T& {
            return k >= 1 && k <= r ? phi_[k - 1] : zero;
        };
        std::size_t p = r;
        while (p > 0 && value(phi_[p - 1]) == 0.0) {
            --p;
        }

        std::vector<T> psi(r + 1, zero);
        for (std::size_t j = 0; j <= r; ++j) {
            T v = theta_at(j);
            for (std::size_t i = 1; i <= std::min(j, p); ++i) {
                v += phi_at(i) * psi[j - i];
            }
            psi[j] = v;
        }
        // rhs_k = sum_{j>=k} theta_j psi_{j-k}.
        auto ma_term = [&](std::size_t k) {
            T v = zero;
            for (std::size_t j = k; j < r; ++j) {
                v += theta_at(j) * psi[j - k];
            }
            return v;
        };

        const std::size_t pp = p + 1;
        std::vector<T> A(pp * pp, zero);
        std::vector<T> g(pp, zero);
        for (std::size_t k = 0; k <= p; ++k) {
            A[k + k * pp] = T(1.0);
        }
        for (std::size_t k = 0; k <= p; ++k) {
            for (std::size_t i = 1; i <= p; ++i) {
                const std::size_t lag = k >= i ? k - i : i - k;
                A[k + lag * pp] -= phi_at(i);
            }
            g[k] = ma_term(k);
        }
        if (p > 0 && !solve_in_place(A, g, pp)) {
            return false;
        }
        if (!std::all_of(g.begin(), g.end(), [](const T& v) { return std::isfinite(value(v)); }) ||
            !(value(g[0]) > 0.0)) {
            return false;
        }
        std::vector<T> gamma(r + 1, zero);
        for (std::size_t k = 0; k <= r; ++k) {
            if (k <= p) {
                gamma[k] = g[k];
            } else {
                T v = ma_term(k);
                for (std::size_t i = 1; i <= p; ++i) {
                    v += phi_at(i) * gamma[k - i];
                }
                gamma[k] = v;
            }
        }
        auto gam = [&](long h) -> const T& { return gamma[static_cast<std::size_t>(h < 0 ? -h : h)]; };
        // E[u_s eps_{s'}] with s - s' = lag.
        auto cross = [&](long lag) -> const T& { return lag >= 0 ? psi[static_cast<std::size_t>(lag)] : zero; };

        // alpha_t[0] = u_t;
        // alpha_t[i] = sum_{a=0}^{r-1-i} phi_{i+a+1} u_{t-1-a} + theta_{i+a} eps_{t-a}, i >= 1.
        P_[0] = gamma[0];
        for (std::size_t j = 1; j < r; ++j) {
            T v = zero;
            for (std::size_t b = 0; b + j < r; ++b) {
                v += phi_at(j + b + 1) * gamma[b + 1] + theta_at(j + b) * psi[b];
            }
            P_[j] = v;
            P_[j * r] = v;
        }
        for (std::size_t i = 1; i < r; ++i) {
            for (std::size_t j = i; j < r; ++j) {
                T v = zero;
                for (std::size_t a = 0; a + i < r; ++a) {
                    const T& pa = phi_at(i + a + 1);
                    const T& ta = theta_at(i + a);
                    for (std::size_t b = 0; b + j < r; ++b) {
                        const T& pb = phi_at(j + b + 1);
                        const T& tb = theta_at(j + b);
                        const long ab = static_cast<long>(b) - static_cast<long>(a);
                        v += pa * pb * gam(ab) + pa * tb * cross(ab - 1) + ta * pb * cross(-ab - 1);
                        if (a == b) {
                            v += ta * tb;
                        }
                    }
                }
                P_[i + j * r] = v;
                P_[j + i * r] = v;
            }
        }
        return std::all_of(P_.begin(), P_.end(), [](const T& v) { return std::isfinite(value(v)); });
    }
};

template <class T>
T concentrated_loglik(const typename ArmaFilter<T>::Output& out, std::size_t n) {
    using std::log;
    const double nn = static_cast<double>(n);
    const T sigma2 = out.ssq / nn;
    if (!(value(sigma2) > 0.0)) {
        return T(-kInf);
    }
    return -0.5 * nn * (std::log(2.0 * std::numbers::pi) + log(sigma2) + 1.0) - 0.5 * out.sumlog;
}

template <class T>
struct Decoded {
    std::vector<T> phi;
    std::vector<T> theta;
};

template <class T>
Decoded<T> decode(std::span<const T> z, int p, int q) {
    using std::tanh;
    Decoded<T> d;
    std::vector<T> r(static_cast<std::size_t>(std::max(p, q)));
    for (int i = 0; i < p; ++i) {
        r[static_cast<std::size_t>(i)] = kPacfBound * tanh(z[static_cast<std::size_t>(i)]);
    }
    d.phi = pacf_to_coefficients(std::span<const T>(r.data(), static_cast<std::size_t>(p)));
    for (int i = 0; i < q; ++i) {
        r[static_cast<std::size_t>(i)] = kPacfBound * tanh(z[static_cast<std::size_t>(p + i)]);
    }
    d.theta = pacf_to_coefficients(std::span<const T>(r.data(), static_cast<std::size_t>(q)));
    for (auto& t : d.theta) {
        t = -t;
    }
    return d;
}

Decoded<double> decode(const Eigen::VectorXd& z, int p, int q) {
    return decode(std::span<const double>(z.data(), static_cast<std::size_t>(z.size())), p, q);
}

// Negative profiled log-likelihood per observation of the standardised series.
template <class T>
T negative_loglik(std::span<const T> z, int p, int q, std::span<const double> y, bool profile_mean) {
    const auto d = decode(z, p, q);
    ArmaFilter<T> filter(d.phi, d.theta);
    auto out = filter.run(y, 0.0, nullptr, nullptr, profile_mean);
    if (!out.ok) {
        return T(kInf);
    }
    out.ssq = out.profiled_ssq();
    return -concentrated_loglik<T>(out, y.size()) / static_cast<double>(y.size());
}

template <int N>
double negative_loglik_gradient(const Eigen::VectorXd& z, int p, int q, std::span<const double> y,
                                bool profile_mean, Eigen::VectorXd& gradient) {
    std::vector<ad::Dual<N>> zd(N);
    for (int i = 0; i < N; ++i) {
        zd[static_cast<std::size_t>(i)] = ad::Dual<N>::variable(z(i), i);
    }
    const auto f = negative_loglik<ad::Dual<N>>(zd, p, q, y, profile_mean);
    gradient.resize(N);
    for (int i = 0; i < N; ++i) {
        gradient(i) = f.d[static_cast<std::size_t>(i)];
    }
    return f.v;
}

// Largest p + q with an exact gradient; larger models use finite differences.
constexpr int kMaxGradientParameters = 10;

template <int... Ns>
double dispatch_gradient(std::integer_sequence<int, Ns...>, const Eigen::VectorXd& z, int p, int q,
                         std::span<const double> y, bool profile_mean, Eigen::VectorXd& gradient) {
    double result = kInf;
    const int k = p + q;
    ((k == Ns + 1 ? (result = negative_loglik_gradient<Ns + 1>(z, p, q, y, profile_mean, gradient), true)
                  : false) ||
     ...);
    return result;
}

std::vector<double> binomial_difference(int d) {
    // Coefficients c_0..c_d of (1 - B)^d.
    std::vector<double> c(static_cast<std::size_t>(d) + 1, 0.0);
    c[0] = 1.0;
    for (int k = 1; k <= d; ++k) {
        for (int i = k; i >= 1; --i) {
            c[static_cast<std::size_t>(i)] -= c[static_cast<std::size_t>(i - 1)];
        }
    }
    return c;
}

Model deterministic_model(std::span<const double> x, std::span<const double> w, Order order,
                          bool include_mean) {
    Model m;
    m.order = order;
    m.has_mean = include_mean;
    m.mean = include_mean ? stats::mean(w) : 0.0;
    m.sigma2 = 0.0;
    m.residuals.assign(w.size(), 0.0);
    m.loglik = kInf;
    m.n_effective = w.size();
    m.aicc = -kInf;
    m.tail.assign(x.end() - order.d, x.end());
    m.state.assign(1, 0.0);
    return m;
}

}  // namespace

std::string to_string(const Order& order) {
    std::ostringstream os;
    os << "(" << order.p << "," << order.d << "," << order.q << ")";
    return os.str();
}

double Model::intercept() const {
    double s = 1.0;
    for (double phi : ar) {
        s -= phi;
    }
    return mean * s;
}

int Model::parameter_count() const {
    return order.p + order.q + (has_mean ? 1 : 0) + 1;
}

double aicc(double loglik, int k, std::size_t n_effective) {
    const double n = static_cast<double>(n_effective);
    const double kk = static_cast<double>(k);
    if (n - kk - 1.0 <= 0.0) {
        return kInf;
    }
    return -2.0 * loglik + 2.0 * kk + 2.0 * kk * (kk + 1.0) / (n - kk - 1.0);
}

bool roots_outside_unit_circle(std::span<const double> coefficients, double margin) {
    std::size_t k = coefficients.size();
    while (k > 0 && coefficients[k - 1] == 0.0) {
        --k;
    }
    if (k == 0) {
        return true;
    }
    // Roots of 1 + c_1 z + ... + c_k z^k are reciprocals of the eigenvalues of
    // the companion matrix with first row -c.
    const auto kk = static_cast<Eigen::Index>(k);
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(kk, kk);
    for (Eigen::Index i = 0; i < kk; ++i) {
        companion(0, i) = -coefficients[static_cast<std::size_t>(i)];
        if (i + 1 < kk) {
            companion(i + 1, i) = 1.0;
        }
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success) {
        return false;
    }
    for (Eigen::Index i = 0; i < kk; ++i) {
        const double modulus = std::abs(solver.eigenvalues()(i));
        if (modulus * (1.0 + margin) >= 1.0) {
            return false;
        }
    }
    return true;
}

Model fit(std::span<const double> x, Order order, bool include_mean) {
    if (order.p < 0 || order.d < 0 || order.q < 0) {
        throw std::invalid_argument("negative ARIMA order");
    }
    const std::size_t n = x.size();
    if (n <= static_cast<std::size_t>(order.d + order.p + order.q + 2)) {
        throw std::invalid_argument("series too short for ARIMA" + to_string(order));
    }
    for (double v : x) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("series contains non-finite values");
        }
    }
    const std::vector<double> w = stats::difference(x, order.d);
    const std::size_t N = w.size();
    const int p = order.p;
    const int q = order.q;

    const double center = include_mean ? stats::mean(w) : 0.0;
    double ss = 0.0;
    double max_abs = 0.0;
    for (double v : w) {
        ss += (v - center) * (v - center);
        max_abs = std::max(max_abs, std::abs(v));
    }
    const double scale = std::sqrt(ss / static_cast<double>(N));
    if (scale <= 1e-12 * max_abs || scale == 0.0) {
        if (p > 0 || q > 0) {
            throw FitError("series is degenerate (zero variance) for ARIMA" + to_string(order));
        }
        return deterministic_model(x, w, order, include_mean);
    }

    std::vector<double> y(N);
    for (std::size_t t = 0; t < N; ++t) {
        y[t] = (w[t] - center) / scale;
    }

    // The mean is profiled out of the likelihood in closed form.
    const int k = p + q;
    Eigen::VectorXd z0 = Eigen::VectorXd::Zero(k);
    if (p > 0) {
        const auto pacf = sample_pacf(y, static_cast<std::size_t>(p));
        for (int i = 0; i < p; ++i) {
            const double r = std::clamp(pacf[static_cast<std::size_t>(i)], -0.9, 0.9);
            z0(i) = std::atanh(r / kPacfBound);
        }
    }

    auto objective = [&](const Eigen::VectorXd& z) {
        return negative_loglik(std::span<const double>(z.data(), static_cast<std::size_t>(k)), p, q, y,
                               include_mean);
    };
    auto with_gradient = [&](const Eigen::VectorXd& z, Eigen::VectorXd& gradient) {
        return dispatch_gradient(std::make_integer_sequence<int, kMaxGradientParameters>{}, z, p, q, y,
                                 include_mean, gradient);
    };

    const auto best = k <= kMaxGradientParameters ? optim::minimize_bfgs(objective, with_gradient, z0)
                                                  : optim::minimize_bfgs(objective, z0);
    if (!best.converged) {
        const double ll = -best.value * static_cast<double>(N) - static_cast<double>(N) * std::log(scale);
        throw FitError("ARIMA" + to_string(order) + " did not converge in " +
                           std::to_string(best.iterations) + " iterations (best loglik " +
                           std::to_string(ll) + ")",
                       ll, best.iterations);
    }
    if (!std::isfinite(best.value)) {
        throw FitError("ARIMA" + to_string(order) + " has no finite likelihood", -kInf, best.iterations);
    }

    const auto dec = decode(best.x, p, q);
    std::vector<double> ar_poly(dec.phi.size());
    std::transform(dec.phi.begin(), dec.phi.end(), ar_poly.begin(), [](double v) { return -v; });
    if (!roots_outside_unit_circle(ar_poly) || !roots_outside_unit_circle(dec.theta)) {
        throw FitError("ARIMA" + to_string(order) + " estimate has roots on the unit circle boundary",
                       -best.value * static_cast<double>(N), best.iterations);
    }

    Model m;
    m.order = order;
    m.ar = dec.phi;
    m.ma = dec.theta;
    m.has_mean = include_mean;
    if (include_mean) {
        ArmaFilter<double> profile(dec.phi, dec.theta);
        m.mean = center + scale * profile.run(y, 0.0, nullptr, nullptr, true).mean();
    }
    m.n_effective = N;
    m.iterations = best.iterations;

    ArmaFilter<double> filter(m.ar, m.ma);
    const auto out = filter.run(w, m.mean, &m.residuals, &m.state);
    if (!out.ok) {
        throw FitError("ARIMA" + to_string(order) + " final filter pass failed");
    }
    m.sigma2 = out.ssq / static_cast<double>(N);
    m.loglik = concentrated_loglik<double>(out, N);
    m.aicc = aicc(m.loglik, m.parameter_count(), N);
    m.tail.assign(x.end() - order.d, x.end());
    return m;
}

AutoFitResult auto_fit_detailed(std::span<const double> x, const OrderBounds& bounds) {
    if (bounds.max_p < 0 || bounds.max_q < 0 || bounds.max_d < 0) {
        throw std::invalid_argument("order bounds must be nonnegative");
    }
    if (x.size() < static_cast<std::size_t>(bounds.max_d) + std::max<std::size_t>(10, bounds.min_length)) {
        throw std::invalid_argument("series of length " + std::to_string(x.size()) +
                                    " is below the automatic ARIMA minimum");
    }
    const int d = select_d(x, bounds.max_d);
    const std::vector<double> w = stats::difference(x, d);
    if (w.size() < bounds.min_length) {
        throw std::invalid_argument("differenced series shorter than " +
                                    std::to_string(bounds.min_length));
    }

    std::vector<bool> mean_options;
    if (d == 0) {
        mean_options = {true};
    } else if (d == 1 && bounds.allow_drift) {
        mean_options = {false, true};
    } else {
        mean_options = {false};
    }

    AutoFitResult result;
    const double w0 = w.front();
    const bool constant = std::all_of(w.begin(), w.end(), [&](double v) {
        return std::abs(v - w0) <= 1e-12 * std::max(1.0, std::abs(w0));
    });
    if (constant) {
        const bool with_mean = mean_options.back();
        result.model = fit(x, Order{0, d, 0}, with_mean);
        result.candidates.push_back(Candidate{result.model.order, with_mean, result.model.aicc, {}});
        return result;
    }

    std::optional<Model> best;
    auto better = [](const Model& a, const Model& b) {
        return std::make_tuple(a.aicc, a.parameter_count(), a.order.p, a.order.q, a.has_mean) <
               std::make_tuple(b.aicc, b.parameter_count(), b.order.p, b.order.q, b.has_mean);
    };
    for (int p = 0; p <= bounds.max_p; ++p) {
        for (int q = 0; q <= bounds.max_q; ++q) {
            for (bool with_mean : mean_options) {
                Candidate cand{Order{p, d, q}, with_mean, std::nullopt, {}};
                if (x.size() <= static_cast<std::size_t>(d + p + q + 2)) {
                    cand.failure = "too few observations";
                    result.candidates.push_back(std::move(cand));
                    continue;
                }
                try {
                    Model m = fit(x, cand.order, with_mean);
                    if (!std::isfinite(m.aicc) && m.aicc > 0) {
                        cand.failure = "AICc undefined for this sample size";
                    } else {
                        cand.aicc = m.aicc;
                        if (!best || better(m, *best)) {
                            best = std::move(m);
                        }
                    }
                } catch (const std::exception& e) {
                    cand.failure = e.what();
                }
                result.candidates.push_back(std::move(cand));
            }
        }
    }
    if (!best) {
        std::ostringstream os;
        os << "no ARIMA candidate could be fitted:";
        for (const auto& c : result.candidates) {
            os << " " << to_string(c.order) << ": " << c.failure << ";";
        }
        throw FitError(os.str());
    }
    result.model = std::move(*best);
    return result;
}

std::vector<double> psi_weights(const Model& model, std::size_t count) {
    // phi*(B) = phi(B)(1 - B)^d written as 1 - sum a_i B^i.
    const auto diff = binomial_difference(model.order.d);
    std::vector<double> phi_poly(model.ar.size() + 1, 0.0);
    phi_poly[0] = 1.0;
    for (std::size_t i = 0; i < model.ar.size(); ++i) {
        phi_poly[i + 1] = -model.ar[i];
    }
    std::vector<double> prod(phi_poly.size() + diff.size() - 1, 0.0);
    for (std::size_t i = 0; i < phi_poly.size(); ++i) {
        for (std::size_t j = 0; j < diff.size(); ++j) {
            prod[i + j] += phi_poly[i] * diff[j];
        }
    }
    std::vector<double> psi(count, 0.0);
    for (std::size_t j = 0; j < count; ++j) {
        double v = j == 0 ? 1.0 : (j <= model.ma.size() ? model.ma[j - 1] : 0.0);
        for (std::size_t i = 1; i <= j && i < prod.size(); ++i) {
            v -= prod[i] * psi[j - i];
        }
        psi[j] = v;
    }
    return psi;
}

ForecastDistribution forecast(const Model& model, std::size_t horizon) {
    if (horizon == 0) {
        throw std::invalid_argument("forecast horizon must be at least 1");
    }
    ForecastDistribution out;
    out.mean.resize(horizon);
    out.variance.resize(horizon);

    // Differenced-scale forecasts by propagating the predicted state.
    std::vector<double> a = model.state;
    const std::size_t r = a.size();
    std::vector<double> phi(r, 0.0);
    std::copy(model.ar.begin(), model.ar.end(), phi.begin());
    std::vector<double> w_hat(horizon);
    for (std::size_t h = 0; h < horizon; ++h) {
        w_hat[h] = model.mean + a[0];
        const double a0 = a[0];
        for (std::size_t i = 0; i + 1 < r; ++i) {
            a[i] = phi[i] * a0 + a[i + 1];
        }
        a[r - 1] = phi[r - 1] * a0;
    }

    // Undo differencing: x_t = w_t - sum_{i=1..d} c_i x_{t-i}.
    const auto c = binomial_difference(model.order.d);
    std::vector<double> hist = model.tail;
    for (std::size_t h = 0; h < horizon; ++h) {
        double v = w_hat[h];
        for (std::size_t i = 1; i < c.size(); ++i) {
            v -= c[i] * hist[hist.size() - i];
        }
        out.mean[h] = v;
        hist.push_back(v);
    }

    const auto psi = psi_weights(model, horizon);
    double acc = 0.0;
    for (std::size_t h = 0; h < horizon; ++h) {
        acc += psi[h] * psi[h];
        out.variance[h] = model.sigma2 * acc;
    }
    out.one_step_variance = model.sigma2;
    return out;
}

Eigen::MatrixXd simulate_paths(const Model& model, const Eigen::MatrixXd& standard_normals) {
    const auto horizon = static_cast<std::size_t>(standard_normals.cols());
    const auto fc = forecast(model, horizon);
    const auto psi = psi_weights(model, horizon);
    Eigen::MatrixXd paths(standard_normals.rows(), standard_normals.cols());
    const double sd = std::sqrt(model.sigma2);
    for (Eigen::Index path = 0; path < paths.rows(); ++path) {
        for (std::size_t h = 0; h < horizon; ++h) {
            double v = fc.mean[h];
            for (std::size_t i = 0; i <= h; ++i) {
                v += psi[h - i] * sd * standard_normals(path, static_cast<Eigen::Index>(i));
            }
            paths(path, static_cast<Eigen::Index>(h)) = v;
        }
    }
    return paths;
}

Eigen::MatrixXd simulate_paths(const Model& model, std::size_t horizon, std::size_t n_paths,
                               std::mt19937_64& rng) {
    if (horizon == 0) {
        throw std::invalid_argument("forecast horizon must be at least 1");
    }
    Eigen::MatrixXd z(static_cast<Eigen::Index>(n_paths), static_cast<Eigen::Index>(horizon));
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index path = 0; path < z.rows(); ++path) {
        for (Eigen::Index h = 0; h < z.cols(); ++h) {
            z(path, h) = normal(rng);
        }
    }
    return simulate_paths(model, z);
}

Eigen::MatrixXd simulate_paths(const Model& model, std::size_t horizon, std::size_t n_paths,
                               std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return simulate_paths(model, horizon, n_paths, rng);
}

OrderBounds exposure_bounds(OrderBounds bounds) {
    bounds.allow_drift = true;
    return bounds;
}

ExposureForecast fit_forecast_log_exposure(std::span<const double> exposure, std::size_t horizon,
                                           const OrderBounds& bounds) {
    std::vector<double> logs(exposure.size());
    for (std::size_t t = 0; t < exposure.size(); ++t) {
        if (!std::isfinite(exposure[t]) || exposure[t] <= 0.0) {
            throw std::domain_error("nonpositive exposure at t=" + std::to_string(t));
        }
        logs[t] = std::log(exposure[t]);
    }
    ExposureForecast out;
    out.model = auto_fit(logs, bounds);
    const auto fc = forecast(out.model, horizon);
    out.mean.resize(horizon);
    for (std::size_t h = 0; h < horizon; ++h) {
        out.mean[h] = std::exp(fc.mean[h]);
    }
    return out;
}

Eigen::MatrixXd simulate_exposure_paths(const Model& log_model, std::size_t horizon,
                                        std::size_t n_paths, std::mt19937_64& rng) {
    return simulate_paths(log_model, horizon, n_paths, rng).array().exp().matrix();
}

}  // namespace gts::arima
