#pragma once

#include "gts/hierarchy.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gts {

enum class Method { base, bottom_up, ols, gls };

[[nodiscard]] std::string_view to_string(Method method);
/// Accepts "base", "bottom-up", "ols", "gls" (case-sensitive).
[[nodiscard]] std::optional<Method> parse_method(std::string_view name);

/// Reconciled values for one horizon: R_bar = S * beta.
struct Reconciled {
    Eigen::VectorXd values;
    Eigen::VectorXd bottom;
};

/// Bottom block of `base` aggregated through S; bottom values are unchanged
/// and upper-level base values are ignored.
[[nodiscard]] Reconciled bottom_up(const SummingMatrix& S, std::span<const double> base);

/// beta = argmin ||base - S beta||_2 via Householder QR of S.
[[nodiscard]] Reconciled ols_combine(const SummingMatrix& S, std::span<const double> base);

/**
 * @brief Weighted combination with weights 1 / variance.
 *
 * beta = argmin sum_j (base_j - (S beta)_j)^2 / variance_j, solved by QR of
 * diag(sqrt(w)) S. Throws std::invalid_argument naming the series (from
 * `labels` when given, else its index) on a nonpositive or non-finite variance.
 */
[[nodiscard]] Reconciled gls_combine(const SummingMatrix& S, std::span<const double> base,
                                     std::span<const double> variances,
                                     std::span<const std::string> labels = {});

/// Dispatch on method; `base` passes the input through with its bottom block.
[[nodiscard]] Reconciled reconcile(Method method, const SummingMatrix& S, std::span<const double> base,
                                   std::span<const double> variances = {},
                                   std::span<const std::string> labels = {});

/**
 * @brief The m_K x m map P = (S' W S)^{-1} S' W for diagonal positive W,
 * computed by QR of diag(sqrt(w)) S. Satisfies P S = I and S P S = S.
 */
[[nodiscard]] Eigen::MatrixXd projection_matrix(const SummingMatrix& S, std::span<const double> weights);

/**
 * @brief Reconciliation map for a fixed S and method, reusable across many
 * base vectors (e.g. simulated paths sharing one summing matrix).
 */
class Reconciler {
public:
    Reconciler(Method method, const SummingMatrix& S, std::span<const double> variances = {},
               std::span<const std::string> labels = {});

    [[nodiscard]] Method method() const { return method_; }
    /// Reconciled values S * P * base (or base itself for Method::base).
    [[nodiscard]] Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& base) const;

private:
    Method method_;
    Eigen::MatrixXd map_;
};

}  // namespace gts
