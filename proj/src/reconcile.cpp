#include "gts/reconcile.hpp"

#include <cmath>
#include <stdexcept>

namespace gts {

namespace {

void check_base(const SummingMatrix& S, std::span<const double> base, bool bottom_only = false) {
    if (static_cast<Eigen::Index>(base.size()) != S.rows()) {
        throw std::invalid_argument("base forecast length " + std::to_string(base.size()) +
                                    " does not match " + std::to_string(S.rows()) + " series");
    }
    const std::size_t first = bottom_only ? base.size() - static_cast<std::size_t>(S.cols()) : 0;
    for (std::size_t j = first; j < base.size(); ++j) {
        if (!std::isfinite(base[j])) {
            throw std::invalid_argument("base forecast for series " + std::to_string(j) + " is not finite");
        }
    }
}

std::vector<double> inverse_variances(const SummingMatrix& S, std::span<const double> variances,
                                      std::span<const std::string> labels) {
    if (static_cast<Eigen::Index>(variances.size()) != S.rows()) {
        throw std::invalid_argument("GLS needs one variance per series, got " +
                                    std::to_string(variances.size()));
    }
    std::vector<double> w(variances.size());
    for (std::size_t j = 0; j < variances.size(); ++j) {
        if (!(variances[j] > 0.0) || !std::isfinite(variances[j])) {
            const std::string name = j < labels.size() ? labels[j] : "#" + std::to_string(j);
            throw std::invalid_argument("GLS variance for series " + name + " is not positive");
        }
        w[j] = 1.0 / variances[j];
    }
    return w;
}

Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> x) {
    return {x.data(), static_cast<Eigen::Index>(x.size())};
}

Reconciled from_bottom(const SummingMatrix& S, Eigen::VectorXd beta) {
    Reconciled r;
    r.values = S.weights * beta;
    r.bottom = std::move(beta);
    return r;
}

}  // namespace

std::string_view to_string(Method method) {
    switch (method) {
    case Method::base:
        return "base";
    case Method::bottom_up:
        return "bottom-up";
    case Method::ols:
        return "ols";
    case Method::gls:
        return "gls";
    }
    return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
    for (Method m : {Method::base, Method::bottom_up, Method::ols, Method::gls}) {
        if (to_string(m) == name) {
            return m;
        }
    }
    return std::nullopt;
}

Eigen::MatrixXd projection_matrix(const SummingMatrix& S, std::span<const double> weights) {
    if (static_cast<Eigen::Index>(weights.size()) != S.rows()) {
        throw std::invalid_argument("projection needs one weight per series");
    }
    const Eigen::VectorXd sqrt_w = as_vector(weights).cwiseSqrt();
    const Eigen::MatrixXd A = sqrt_w.asDiagonal() * S.weights;
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (qr.rank() < S.cols()) {
        throw std::logic_error("summing matrix is rank deficient");
    }
    return qr.solve(Eigen::MatrixXd(sqrt_w.asDiagonal()));
}

Reconciled bottom_up(const SummingMatrix& S, std::span<const double> base) {
    check_base(S, base, true);
    return from_bottom(S, as_vector(base).tail(S.cols()));
}

Reconciled ols_combine(const SummingMatrix& S, std::span<const double> base) {
    check_base(S, base);
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(S.weights);
    if (qr.rank() < S.cols()) {
        throw std::logic_error("summing matrix is rank deficient");
    }
    return from_bottom(S, qr.solve(as_vector(base)));
}

Reconciled gls_combine(const SummingMatrix& S, std::span<const double> base, std::span<const double> variances,
                       std::span<const std::string> labels) {
    check_base(S, base);
    const auto w = inverse_variances(S, variances, labels);
    const Eigen::VectorXd sqrt_w = as_vector(w).cwiseSqrt();
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sqrt_w.asDiagonal() * S.weights);
    if (qr.rank() < S.cols()) {
        throw std::logic_error("summing matrix is rank deficient");
    }
    return from_bottom(S, qr.solve(Eigen::VectorXd(sqrt_w.cwiseProduct(as_vector(base)))));
}

Reconciled reconcile(Method method, const SummingMatrix& S, std::span<const double> base,
                     std::span<const double> variances, std::span<const std::string> labels) {
    switch (method) {
    case Method::base: {
        check_base(S, base);
        Reconciled r;
        r.values = as_vector(base);
        r.bottom = r.values.tail(S.cols());
        return r;
    }
    case Method::bottom_up:
        return bottom_up(S, base);
    case Method::ols:
        return ols_combine(S, base);
    case Method::gls:
        return gls_combine(S, base, variances, labels);
    }
    throw std::invalid_argument("unknown reconciliation method");
}

Reconciler::Reconciler(Method method, const SummingMatrix& S, std::span<const double> variances,
                       std::span<const std::string> labels)
    : method_(method) {
    const Eigen::Index m = S.rows();
    const Eigen::Index k = S.cols();
    switch (method) {
    case Method::base:
        map_ = Eigen::MatrixXd::Identity(m, m);
        break;
    case Method::bottom_up:
        map_ = Eigen::MatrixXd::Zero(m, m);
        map_.rightCols(k) = S.weights;
        break;
    case Method::ols:
        map_ = S.weights * projection_matrix(S, std::vector<double>(static_cast<std::size_t>(m), 1.0));
        break;
    case Method::gls:
        map_ = S.weights * projection_matrix(S, inverse_variances(S, variances, labels));
        break;
    }
}

Eigen::VectorXd Reconciler::apply(const Eigen::Ref<const Eigen::VectorXd>& base) const {
    if (base.size() != map_.cols()) {
        throw std::invalid_argument("base forecast length does not match the reconciler");
    }
    return map_ * base;
}

}  // namespace gts
