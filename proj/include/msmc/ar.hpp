#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "msmc/error.hpp"

namespace msmc {

/// OLS fit of y_t on (1, y_{t-1}, ..., y_{t-r}).
struct ARFit {
  double intercept = 0.0;
  std::vector<double> phi;
  std::vector<double> phi_se;
  double intercept_se = 0.0;
  /// Residual variance with the n - (r + 1) divisor used for the standard errors.
  double sigma2 = 0.0;
  /// Number of regression observations, T - r.
  std::size_t T_eff = 0;
  std::vector<double> residuals;

  std::size_t order() const noexcept { return phi.size(); }
};

inline ARFit ols_ar_fit(std::span<const double> y, std::size_t r) {
  const std::size_t T = y.size();
  if (T <= r + 2) {
    throw InvalidInput("ols_ar_fit: need more than r + 2 = " + std::to_string(r + 2) +
                       " observations, got " + std::to_string(T));
  }
  const auto n = static_cast<Eigen::Index>(T - r);
  const auto k = static_cast<Eigen::Index>(r + 1);
  Eigen::MatrixXd X(n, k);
  Eigen::VectorXd target(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t t = r + static_cast<std::size_t>(i);
    target(i) = y[t];
    X(i, 0) = 1.0;
    for (std::size_t lag = 1; lag <= r; ++lag) X(i, static_cast<Eigen::Index>(lag)) = y[t - lag];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < k) {
    throw RankDeficient("ols_ar_fit: regressor matrix has rank " + std::to_string(qr.rank()) +
                        " < " + std::to_string(k));
  }
  const Eigen::VectorXd beta = qr.solve(target);
  const Eigen::VectorXd resid = target - X * beta;

  ARFit fit;
  fit.T_eff = static_cast<std::size_t>(n);
  fit.intercept = beta(0);
  fit.residuals.assign(resid.data(), resid.data() + n);
  const double dof = static_cast<double>(n - k);
  fit.sigma2 = dof > 0 ? resid.squaredNorm() / dof : 0.0;

  const Eigen::MatrixXd xtx_inv =
      (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(k, k));
  fit.intercept_se = std::sqrt(fit.sigma2 * xtx_inv(0, 0));
  fit.phi.resize(r);
  fit.phi_se.resize(r);
  for (std::size_t j = 0; j < r; ++j) {
    const auto col = static_cast<Eigen::Index>(j + 1);
    fit.phi[j] = beta(col);
    fit.phi_se[j] = std::sqrt(fit.sigma2 * xtx_inv(col, col));
  }
  return fit;
}

/// z_t = y_t - sum_k phi_k y_{t-k} for t = r+1..T; length T - r.
inline std::vector<double> ar_filter(std::span<const double> y, std::span<const double> phi) {
  const std::size_t r = phi.size();
  if (y.size() <= r) {
    throw InvalidInput("ar_filter: series length " + std::to_string(y.size()) +
                       " must exceed the lag order " + std::to_string(r));
  }
  std::vector<double> z(y.size() - r);
  for (std::size_t t = r; t < y.size(); ++t) {
    double v = y[t];
    for (std::size_t k = 1; k <= r; ++k) v -= phi[k - 1] * y[t - k];
    z[t - r] = v;
  }
  return z;
}

/// Smallest modulus among the roots of 1 - phi_1 z - ... - phi_r z^r.
/// The roots are the reciprocals of the companion-matrix eigenvalues, so
/// the answer is 1 / (spectral radius). All-zero phi gives +infinity.
inline double min_root_modulus(std::span<const double> phi) {
  const std::size_t r = phi.size();
  if (r == 0) return std::numeric_limits<double>::infinity();
  double radius = 0.0;
  if (r == 1) {
    radius = std::abs(phi[0]);
  } else {
    const auto n = static_cast<Eigen::Index>(r);
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) companion(0, j) = phi[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
    radius = solver.eigenvalues().cwiseAbs().maxCoeff();
  }
  if (radius == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / radius;
}

inline bool is_stationary(std::span<const double> phi) { return min_root_modulus(phi) > 1.0; }

}  // namespace msmc
