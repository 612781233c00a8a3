#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "msmc/ar.hpp"
#include "msmc/error.hpp"
#include "msmc/parallel.hpp"
#include "msmc/random.hpp"

// Information-matrix tests for Markov switching in a Gaussian AR(1):
// supremum- and exponential-type statistics with a parametric bootstrap.

namespace msmc {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

/// Per-observation scores and Hessians of the null AR(1) log density
///   l_t = -log(2 pi s2)/2 - (y_t - c - phi y_{t-1})^2 / (2 s2)
/// in (c, phi, s2), at the conditional ML fit. Derivatives are taken on the
/// series divided by the fitted residual standard deviation, so the panel
/// is invariant to affine maps of y and the fitted s2 is exactly 1.
struct NullScorePanel {
  /// (c, phi, s2) in the units of the input series; s2 uses the 1/n divisor.
  Vec3 theta0_hat{};
  /// Residual standard deviation used for standardization.
  double scale = 1.0;
  /// Standardized series y / scale (all T observations).
  std::vector<double> y_std;
  /// (c / scale, phi, 1).
  Vec3 theta_std{};
  /// Scores and Hessians for t = 2..T.
  std::vector<Vec3> scores;
  std::vector<Mat3> hessians;

  std::size_t size() const noexcept { return scores.size(); }
};

inline NullScorePanel null_score_panel(std::span<const double> y) {
  if (y.size() < 10) {
    throw InvalidInput("null_score_panel: need at least 10 observations, got " +
                       std::to_string(y.size()));
  }
  const ARFit fit = ols_ar_fit(y, 1);
  const std::size_t n = fit.T_eff;
  double ssr = 0.0;
  for (double e : fit.residuals) ssr += e * e;
  const double s2 = ssr / static_cast<double>(n);
  if (!(s2 > 0.0) || !std::isfinite(s2)) {
    throw InvalidInput("null_score_panel: degenerate regression (zero residual variance)");
  }
  NullScorePanel p;
  p.theta0_hat = {fit.intercept, fit.phi[0], s2};
  p.scale = std::sqrt(s2);
  p.y_std.resize(y.size());
  for (std::size_t t = 0; t < y.size(); ++t) p.y_std[t] = y[t] / p.scale;
  p.theta_std = {fit.intercept / p.scale, fit.phi[0], 1.0};

  p.scores.resize(n);
  p.hessians.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double lag = p.y_std[i];
    const double e = p.y_std[i + 1] - p.theta_std[0] - p.theta_std[1] * lag;
    p.scores[i] = {e, e * lag, 0.5 * (e * e - 1.0)};
    p.hessians[i] = Mat3{Vec3{-1.0, -lag, -e}, Vec3{-lag, -lag * lag, -e * lag},
                         Vec3{-e, -e * lag, 0.5 - e * e}};
  }
  return p;
}

namespace detail {

inline double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

inline double quad3(const Mat3& m, const Vec3& h) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += h[i] * m[i][j] * h[j];
  return s;
}

}  // namespace detail

/// Direction h (unit norm, zero AR component) and chain persistence rho.
struct NuisanceDraw {
  Vec3 h{1.0, 0.0, 0.0};
  double rho = 0.0;
};

inline constexpr double kRhoLower = -0.7;
inline constexpr double kRhoUpper = 0.7;

/// h uniform on the unit circle of the (mean, variance) coordinates,
/// rho uniform on [-0.7, 0.7].
inline std::vector<NuisanceDraw> draw_nuisance(std::size_t count, Stream& rng) {
  std::vector<NuisanceDraw> out(count);
  for (auto& d : out) {
    const double angle = 2.0 * std::numbers::pi * uniform01(rng);
    d.h = {std::cos(angle), 0.0, std::sin(angle)};
    d.rho = kRhoLower + (kRhoUpper - kRhoLower) * uniform01(rng);
  }
  return out;
}

struct GammaStar {
  double gamma = 0.0;
  std::vector<double> mu2;
};

/// mu*_{2,t} = h'[H_t + g_t g_t' + 2 sum_{s<t} rho^{t-s} g_t g_s'] h / 2 and
/// Gamma* = sum_t mu*_{2,t} / sqrt(n). The inner sum runs through the
/// accumulator b_t = rho (b_{t-1} + h'g_{t-1}).
inline GammaStar gamma_star(const NullScorePanel& panel, const Vec3& h, double rho) {
  const std::size_t n = panel.size();
  GammaStar out;
  out.mu2.resize(n);
  double acc = 0.0;
  double prev_hg = 0.0;
  double total = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    if (t > 0) acc = rho * (acc + prev_hg);
    const double hg = detail::dot3(h, panel.scores[t]);
    const double mu = 0.5 * (detail::quad3(panel.hessians[t], h) + hg * hg + 2.0 * hg * acc);
    out.mu2[t] = mu;
    total += mu;
    prev_hg = hg;
  }
  out.gamma = total / std::sqrt(static_cast<double>(n));
  return out;
}

/// Least-squares projection onto the score columns (no intercept). Columns
/// found collinear by a rank-revealing QR are dropped and listed.
class ScoreProjector {
public:
  explicit ScoreProjector(const NullScorePanel& panel) {
    const auto n = static_cast<Eigen::Index>(panel.size());
    Eigen::MatrixXd L(n, 3);
    for (Eigen::Index t = 0; t < n; ++t)
      for (Eigen::Index j = 0; j < 3; ++j) L(t, j) = panel.scores[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)];
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> pivoted(L);
    pivoted.setThreshold(1e-10);
    const auto rank = pivoted.rank();
    std::vector<int> keep;
    for (Eigen::Index j = 0; j < rank; ++j) keep.push_back(pivoted.colsPermutation().indices()(j));
    std::sort(keep.begin(), keep.end());
    for (int j = 0; j < 3; ++j)
      if (std::find(keep.begin(), keep.end(), j) == keep.end()) dropped_.push_back(j);
    if (rank == 0) return;
    Eigen::MatrixXd kept(n, rank);
    for (Eigen::Index j = 0; j < rank; ++j) kept.col(j) = L.col(keep[static_cast<std::size_t>(j)]);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(kept);
    q_ = qr.householderQ() * Eigen::MatrixXd::Identity(n, rank);
  }

  /// Indices (0 = c, 1 = phi, 2 = s2) of score columns left out.
  const std::vector<int>& dropped_columns() const noexcept { return dropped_; }

  /// Residuals of regressing v on the kept score columns.
  std::vector<double> residuals(std::span<const double> v) const {
    std::vector<double> out(v.begin(), v.end());
    if (q_.cols() == 0) return out;
    Eigen::Map<Eigen::VectorXd> r(out.data(), static_cast<Eigen::Index>(out.size()));
    const Eigen::VectorXd coef = q_.transpose() * r;
    r -= q_ * coef;
    return out;
  }

private:
  Eigen::MatrixXd q_;
  std::vector<int> dropped_;
};

inline std::vector<double> projection_residuals(std::span<const double> mu2,
                                                const NullScorePanel& panel) {
  return ScoreProjector(panel).residuals(mu2);
}

namespace detail {

/// erfcx(u) = exp(u^2) erfc(u) for u >= 5 by its continued fraction.
inline long double erfcx_large(long double u) {
  long double k = u;
  for (int j = 60; j >= 1; --j) k = u + (static_cast<long double>(j) / 2.0L) / k;
  return 1.0L / (std::sqrt(std::numbers::pi_v<long double>) * k);
}

}  // namespace detail

/// Psi = sqrt(2 pi) exp((g - 1)^2 / 2) Phi(g - 1), in extended precision.
/// For g - 1 < -8 the product is evaluated as sqrt(2 pi) erfcx(-(g-1)/sqrt 2) / 2.
inline long double psi(double g) {
  const long double x = static_cast<long double>(g) - 1.0L;
  const long double root2pi = std::sqrt(2.0L * std::numbers::pi_v<long double>);
  if (x < -8.0L) return root2pi * 0.5L * detail::erfcx_large(-x / std::numbers::sqrt2_v<long double>);
  const long double Phi = 0.5L * std::erfc(-x / std::numbers::sqrt2_v<long double>);
  return root2pi * std::exp(0.5L * x * x) * Phi;
}

/// The standardized criterion g = Gamma* / sqrt(e'e / n) for one draw;
/// `degenerate` marks draws whose projection residuals vanish.
struct DrawCriterion {
  double g = 0.0;
  bool degenerate = false;
};

inline DrawCriterion draw_criterion(const NullScorePanel& panel, const ScoreProjector& proj,
                                    const NuisanceDraw& d) {
  const auto gs = gamma_star(panel, d.h, d.rho);
  const auto resid = proj.residuals(gs.mu2);
  double ee = 0.0, mm = 0.0;
  for (std::size_t t = 0; t < resid.size(); ++t) {
    ee += resid[t] * resid[t];
    mm += gs.mu2[t] * gs.mu2[t];
  }
  if (!(ee > 1e-20 * mm) || ee == 0.0) return {0.0, true};
  const double n = static_cast<double>(panel.size());
  return {gs.gamma / std::sqrt(ee / n), false};
}

struct CHPStatistics {
  double sup = 0.0;
  /// Mean of Psi over the draws.
  long double exp_mean = 0.0L;
};

inline CHPStatistics chp_statistics(const NullScorePanel& panel,
                                    std::span<const NuisanceDraw> draws) {
  if (draws.empty()) throw InvalidInput("CHP statistics: need at least one nuisance draw");
  const ScoreProjector proj(panel);
  CHPStatistics s;
  long double psi_sum = 0.0L;
  for (const auto& d : draws) {
    const auto c = draw_criterion(panel, proj, d);
    if (c.degenerate) {
      psi_sum += 1.0L;
      continue;
    }
    const double pos = std::max(0.0, c.g);
    s.sup = std::max(s.sup, 0.5 * pos * pos);
    psi_sum += psi(c.g);
  }
  s.exp_mean = psi_sum / static_cast<long double>(draws.size());
  return s;
}

/// Supremum over `draws` random nuisance draws of max(0, g)^2 / 2.
inline double sup_ts(const NullScorePanel& panel, std::size_t draws, Stream& rng) {
  if (draws == 0) throw InvalidInput("sup_ts: draws must be at least 1");
  const auto d = draw_nuisance(draws, rng);
  return chp_statistics(panel, d).sup;
}

/// Monte Carlo average of Psi over `draws` random nuisance draws.
inline long double exp_ts(const NullScorePanel& panel, std::size_t draws, Stream& rng) {
  if (draws == 0) throw InvalidInput("exp_ts: draws must be at least 1");
  const auto d = draw_nuisance(draws, rng);
  return chp_statistics(panel, d).exp_mean;
}

struct CHPReport {
  double supTS = 0.0;
  /// Converted from extended precision; log_expTS is exact where this overflows.
  double expTS = 0.0;
  double log_expTS = 0.0;
  double bootstrap_p_sup = 1.0;
  double bootstrap_p_exp = 1.0;
  std::size_t B = 0;
  std::size_t draws = 0;
  std::uint64_t seed = 0;
};

/// Gaussian AR(1) sample of length T from (c, phi, s2); y_1 from the
/// stationary marginal when |phi| < 1, else y_1 = `start`.
inline std::vector<double> simulate_ar1(const Vec3& theta, std::size_t T, double start,
                                        Stream& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double c = theta[0], phi = theta[1], sd = std::sqrt(theta[2]);
  std::vector<double> y(T);
  if (std::abs(phi) < 1.0) {
    y[0] = c / (1.0 - phi) + sd / std::sqrt(1.0 - phi * phi) * normal(rng);
  } else {
    y[0] = start;
  }
  for (std::size_t t = 1; t < T; ++t) y[t] = c + phi * y[t - 1] + sd * normal(rng);
  return y;
}

/// supTS and expTS on y with parametric-bootstrap p-values
/// (1 + #{boot >= data}) / (B + 1). One set of nuisance draws is shared by
/// the data and every bootstrap sample.
inline CHPReport chp_bootstrap_test(std::span<const double> y, std::size_t B, std::size_t draws,
                                    std::uint64_t master_seed, unsigned workers = 1) {
  if (B < 2) throw InvalidInput("chp_bootstrap_test: B must be at least 2");
  if (draws == 0) throw InvalidInput("chp_bootstrap_test: draws must be at least 1");
  Stream draw_rng = make_stream(master_seed, {stream_tag::nuisance_draws});
  const auto nuisance = draw_nuisance(draws, draw_rng);

  const auto panel = null_score_panel(y);
  const auto data = chp_statistics(panel, nuisance);

  std::vector<double> boot_sup(B);
  std::vector<long double> boot_exp(B);
  parallel_for(B, workers, [&](std::size_t b) {
    Stream rng = make_stream(master_seed, {stream_tag::bootstrap, b});
    const auto sample = simulate_ar1(panel.theta0_hat, y.size(), y[0], rng);
    const auto s = chp_statistics(null_score_panel(sample), nuisance);
    boot_sup[b] = s.sup;
    boot_exp[b] = s.exp_mean;
  });

  std::size_t ge_sup = 0, ge_exp = 0;
  for (std::size_t b = 0; b < B; ++b) {
    if (boot_sup[b] >= data.sup) ++ge_sup;
    if (boot_exp[b] >= data.exp_mean) ++ge_exp;
  }
  CHPReport rep;
  rep.supTS = data.sup;
  rep.expTS = static_cast<double>(data.exp_mean);
  rep.log_expTS = static_cast<double>(std::log(data.exp_mean));
  rep.bootstrap_p_sup = static_cast<double>(1 + ge_sup) / static_cast<double>(B + 1);
  rep.bootstrap_p_exp = static_cast<double>(1 + ge_exp) / static_cast<double>(B + 1);
  rep.B = B;
  rep.draws = draws;
  rep.seed = master_seed;
  return rep;
}

}  // namespace msmc
