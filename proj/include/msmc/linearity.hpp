#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "msmc/ar.hpp"
#include "msmc/error.hpp"
#include "msmc/mc_engine.hpp"
#include "msmc/moment_stats.hpp"
#include "msmc/parallel.hpp"
#include "msmc/random.hpp"

namespace msmc {

enum class McMethod { LMC_min, LMC_prod, MMC_min, MMC_prod };

inline const char* to_string(McMethod m) {
  switch (m) {
    case McMethod::LMC_min: return "LMC_min";
    case McMethod::LMC_prod: return "LMC_prod";
    case McMethod::MMC_min: return "MMC_min";
    case McMethod::MMC_prod: return "MMC_prod";
  }
  return "?";
}

inline Combination combination_of(McMethod m) {
  return m == McMethod::LMC_min || m == McMethod::MMC_min ? Combination::min
                                                          : Combination::product;
}

inline bool is_maximized(McMethod m) { return m == McMethod::MMC_min || m == McMethod::MMC_prod; }

/// Combined statistic of a filtered series: approximate p-values of the
/// quartet of demean(z), looked up at T = length(z), then combined.
inline double combined_statistic(std::span<const double> z, const ApproxPValues& approx,
                                 Combination c) {
  return combine(approx(compute_quartet(demean(z))), c);
}

/// The N - 1 simulated standard-normal vectors of one MC test, reduced to
/// their combined statistics under both rules, plus the N tie-breakers.
/// Replicate i is drawn from the substream (seed, replicate, i, attempt);
/// a degenerate draw moves on to the next attempt.
class ReplicateSet {
public:
  ReplicateSet(std::size_t length, std::size_t N, const LogisticCoeffTable& table,
               std::uint64_t master_seed, unsigned workers = 1)
      : length_(length), N_(N), seed_(master_seed), approx_(table, length) {
    if (N < 2) throw InvalidInput("MC test: N must be at least 2");
    if (length < 4) throw InvalidInput("MC test: series length must be at least 4");
    const std::size_t reps = N - 1;
    stat_min_.resize(reps);
    stat_prod_.resize(reps);
    std::vector<std::size_t> attempts(reps, 0);
    parallel_for(reps, workers, [&](std::size_t i) {
      constexpr std::size_t kMaxAttempts = 1000;
      for (std::size_t a = 0; a < kMaxAttempts; ++a) {
        Stream rng = make_stream(master_seed, {stream_tag::replicate, i + 1, a});
        const auto eta = standard_normal_vector(length, rng);
        try {
          const auto p = approx_(compute_quartet(demean(eta)));
          stat_min_[i] = combine_min(p);
          stat_prod_[i] = combine_prod(p);
          attempts[i] = a;
          return;
        } catch (const DegenerateSample&) {
        }
      }
      throw DegenerateSample("replicate", "no non-degenerate draw after 1000 attempts");
    });
    for (auto a : attempts) resampled_ += a;
    Stream tie_rng = make_stream(master_seed, {stream_tag::tie_breaker});
    tie_breakers_ = draw_tie_breakers(N, tie_rng);
  }

  std::size_t length() const noexcept { return length_; }
  std::size_t N() const noexcept { return N_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const ApproxPValues& approx() const noexcept { return approx_; }
  /// Number of degenerate replicate draws that were redrawn.
  std::size_t resampled() const noexcept { return resampled_; }

  std::span<const double> statistics(Combination c) const {
    return c == Combination::min ? std::span<const double>(stat_min_)
                                 : std::span<const double>(stat_prod_);
  }
  std::span<const double> tie_breakers() const { return tie_breakers_; }

  MCTestReport pvalue(double xi0, Combination c) const {
    auto rep = mc_pvalue_with_tie_breakers(xi0, statistics(c), tie_breakers_);
    rep.seed = seed_;
    return rep;
  }

private:
  std::size_t length_;
  std::size_t N_;
  std::uint64_t seed_;
  ApproxPValues approx_;
  std::vector<double> stat_min_;
  std::vector<double> stat_prod_;
  std::vector<double> tie_breakers_;
  std::size_t resampled_ = 0;
};

/// MC test of the i.i.d. normal null for z against a normal mixture.
inline MCTestReport mc_mixture_test(std::span<const double> z, std::size_t N, Combination c,
                                    const LogisticCoeffTable& table, std::uint64_t master_seed,
                                    unsigned workers = 1) {
  const double xi0 = combined_statistic(z, ApproxPValues(table, z.size()), c);
  ReplicateSet reps(z.size(), N, table, master_seed, workers);
  return reps.pvalue(xi0, c);
}

/// Box of AR coefficients searched by the MMC test.
struct NuisanceBox {
  std::vector<double> center;
  std::vector<double> half_width;
  std::size_t points_per_dim = 1;
  bool stationarity_filter = true;
  /// Retained points in row-major order (first coefficient varies slowest).
  std::vector<std::vector<double>> points;
  std::size_t raw_point_count = 0;

  std::size_t order() const noexcept { return center.size(); }
};

inline std::size_t default_points_per_dim(std::size_t r) {
  switch (r) {
    case 0: return 1;
    case 1: return 41;
    case 2: return 21;
    case 3: return 13;
    case 4: return 9;
    default: return 5;
  }
}

/// Cartesian grid on [phi_k - m se_k, phi_k + m se_k] with m = se_multiplier.
inline NuisanceBox build_grid(std::span<const double> center, std::span<const double> se,
                              std::size_t points_per_dim, bool stationarity_filter,
                              double se_multiplier = 2.0) {
  if (center.size() != se.size()) throw InvalidInput("build_grid: center/se length mismatch");
  if (center.empty()) throw InvalidInput("build_grid: lag order must be at least 1");
  if (points_per_dim == 0 || points_per_dim % 2 == 0) {
    throw InvalidInput("build_grid: points per dimension must be odd so the center is a grid point");
  }
  const std::size_t r = center.size();
  NuisanceBox box;
  box.center.assign(center.begin(), center.end());
  box.half_width.resize(r);
  for (std::size_t k = 0; k < r; ++k) box.half_width[k] = se_multiplier * se[k];
  box.points_per_dim = points_per_dim;
  box.stationarity_filter = stationarity_filter;

  std::vector<std::vector<double>> axis(r, std::vector<double>(points_per_dim));
  for (std::size_t k = 0; k < r; ++k) {
    for (std::size_t j = 0; j < points_per_dim; ++j) {
      const double u = points_per_dim == 1
                           ? 0.0
                           : 2.0 * static_cast<double>(j) / static_cast<double>(points_per_dim - 1) - 1.0;
      axis[k][j] = box.center[k] + box.half_width[k] * u;
    }
  }
  std::size_t total = 1;
  for (std::size_t k = 0; k < r; ++k) total *= points_per_dim;
  box.raw_point_count = total;

  std::vector<std::size_t> idx(r, 0);
  std::vector<double> phi(r);
  for (std::size_t n = 0; n < total; ++n) {
    for (std::size_t k = 0; k < r; ++k) phi[k] = axis[k][idx[k]];
    if (!stationarity_filter || is_stationary(phi)) box.points.push_back(phi);
    for (std::size_t k = r; k-- > 0;) {
      if (++idx[k] < points_per_dim) break;
      idx[k] = 0;
    }
  }
  if (box.points.empty()) {
    throw InvalidInput("build_grid: every grid point is non-stationary; use a smaller box");
  }
  return box;
}

inline NuisanceBox build_grid(const ARFit& fit, std::size_t points_per_dim,
                              bool stationarity_filter, double se_multiplier = 2.0) {
  return build_grid(fit.phi, fit.phi_se, points_per_dim, stationarity_filter, se_multiplier);
}

struct LinearityReport {
  McMethod method = McMethod::LMC_min;
  double p_value = 1.0;
  std::vector<double> phi_at_report;
  double min_root_modulus = std::numeric_limits<double>::infinity();
  std::size_t N = 0;
  std::uint64_t seed = 0;
  std::size_t grid_points_evaluated = 0;
  /// Combined statistic of the data at phi_at_report.
  double statistic_value = 0.0;
  std::size_t rank = 0;
};

/// Called once per evaluated grid point, in grid order.
using GridObserver = std::function<void(std::size_t point, std::span<const double> phi,
                                        const MCTestReport& report,
                                        std::span<const double> replicate_statistics)>;

struct GridOptions {
  std::size_t points_per_dim = 0;  // 0: default_points_per_dim(r)
  bool stationarity_filter = true;
  double se_multiplier = 2.0;
};

/// Runs the requested LMC/MMC variants on y with lag order r. All variants
/// share one replicate set drawn from master_seed, so the MMC p-value at
/// phi-hat equals the LMC p-value.
inline std::vector<LinearityReport> run_linearity_tests(
    std::span<const double> y, std::size_t r, std::size_t N, std::span<const McMethod> methods,
    const LogisticCoeffTable& table, std::uint64_t master_seed, const GridOptions& grid_opts = {},
    unsigned workers = 1, const std::optional<NuisanceBox>& grid = std::nullopt,
    const GridObserver& observer = {}) {
  const ARFit fit = ols_ar_fit(y, r);
  const std::size_t length = y.size() - r;
  const ReplicateSet reps(length, N, table, master_seed, workers);

  bool want_mmc = false;
  for (auto m : methods) want_mmc = want_mmc || is_maximized(m);

  std::vector<LinearityReport> out;
  const double lmc_root = min_root_modulus(fit.phi);
  const auto quartet_hat = approx_pvalues(compute_quartet(demean(ar_filter(y, fit.phi))), table, length);

  std::optional<NuisanceBox> box = grid;
  std::vector<PValueQuad> point_p;
  if (want_mmc) {
    if (!box) {
      if (r == 0) throw InvalidInput("MMC test: lag order must be at least 1");
      const std::size_t k = grid_opts.points_per_dim ? grid_opts.points_per_dim : default_points_per_dim(r);
      box = build_grid(fit, k, grid_opts.stationarity_filter, grid_opts.se_multiplier);
    }
    if (box->points.empty()) throw InvalidInput("MMC test: empty grid");
    if (box->order() != r) throw InvalidInput("MMC test: grid order does not match lag order");
    point_p.resize(box->points.size());
    parallel_for(box->points.size(), workers, [&](std::size_t i) {
      point_p[i] = reps.approx()(compute_quartet(demean(ar_filter(y, box->points[i]))));
    });
  }

  for (McMethod m : methods) {
    const Combination c = combination_of(m);
    LinearityReport rep;
    rep.method = m;
    rep.N = N;
    rep.seed = master_seed;
    if (!is_maximized(m)) {
      const auto mc = reps.pvalue(combine(quartet_hat, c), c);
      rep.p_value = mc.p_value;
      rep.rank = mc.rank;
      rep.statistic_value = mc.statistic_value;
      rep.phi_at_report = fit.phi;
      rep.min_root_modulus = lmc_root;
      rep.grid_points_evaluated = 1;
    } else {
      std::size_t best = 0;
      MCTestReport best_mc;
      best_mc.p_value = -1.0;
      for (std::size_t i = 0; i < box->points.size(); ++i) {
        const auto mc = reps.pvalue(combine(point_p[i], c), c);
        if (observer) observer(i, box->points[i], mc, reps.statistics(c));
        if (mc.p_value > best_mc.p_value) {
          best_mc = mc;
          best = i;
        }
      }
      rep.p_value = best_mc.p_value;
      rep.rank = best_mc.rank;
      rep.statistic_value = best_mc.statistic_value;
      rep.phi_at_report = box->points[best];
      rep.min_root_modulus = min_root_modulus(rep.phi_at_report);
      rep.grid_points_evaluated = box->points.size();
    }
    out.push_back(std::move(rep));
  }
  return out;
}

/// Local MC test at the OLS estimate phi-hat.
inline LinearityReport lmc_test(std::span<const double> y, std::size_t r, std::size_t N,
                                Combination c, const LogisticCoeffTable& table,
                                std::uint64_t master_seed, unsigned workers = 1) {
  const McMethod m = c == Combination::min ? McMethod::LMC_min : McMethod::LMC_prod;
  return run_linearity_tests(y, r, N, std::span<const McMethod>(&m, 1), table, master_seed, {},
                             workers)
      .front();
}

/// Maximized MC test: the largest MC p-value over the grid, with the
/// replicate set held fixed. Ties keep the first point in grid order.
inline LinearityReport mmc_test(std::span<const double> y, std::size_t r, std::size_t N,
                                Combination c, const LogisticCoeffTable& table,
                                const NuisanceBox& grid, std::uint64_t master_seed,
                                unsigned workers = 1, const GridObserver& observer = {}) {
  const McMethod m = c == Combination::min ? McMethod::MMC_min : McMethod::MMC_prod;
  return run_linearity_tests(y, r, N, std::span<const McMethod>(&m, 1), table, master_seed, {},
                             workers, grid, observer)
      .front();
}

}  // namespace msmc
