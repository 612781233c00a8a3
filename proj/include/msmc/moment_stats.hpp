#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "msmc/error.hpp"

namespace msmc {

/// Deviations from the sample mean.
class ResidualVector {
public:
  ResidualVector() = default;

  /// Wraps values that are already deviations from their mean. Throws if
  /// |sum| exceeds T * eps * max|value|.
  static ResidualVector from_deviations(std::vector<double> values) {
    long double sum = 0.0L;
    double largest = 0.0;
    for (double v : values) {
      sum += v;
      largest = std::max(largest, std::abs(v));
    }
    const double bound = static_cast<double>(values.size()) *
                         std::numeric_limits<double>::epsilon() * largest;
    if (std::abs(static_cast<double>(sum)) > bound) {
      throw InvalidInput("ResidualVector: values do not sum to zero");
    }
    return ResidualVector(std::move(values));
  }

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

private:
  explicit ResidualVector(std::vector<double> v) : values_(std::move(v)) {}
  friend ResidualVector demean(std::span<const double> y);

  std::vector<double> values_;
};

/// y_t - ybar. The mean gets one correction pass so the result sums to zero
/// to working precision.
inline ResidualVector demean(std::span<const double> y) {
  if (y.size() < 2) throw InvalidInput("demean: need at least 2 observations");
  const double n = static_cast<double>(y.size());
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= n;
  double correction = 0.0;
  for (double v : y) correction += v - mean;
  mean += correction / n;
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] - mean;
  return ResidualVector(std::move(out));
}

/// The four mixture-detecting statistics.
struct StatQuartet {
  double M = 0.0;
  double V = 0.0;
  double S = 0.0;
  double K = 0.0;
};

namespace detail {

inline double mean_square(std::span<const double> e) {
  double s = 0.0;
  for (double v : e) s += v * v;
  return s / static_cast<double>(e.size());
}

}  // namespace detail

/// Standardized distance between the means of positive and negative
/// residuals. Zero residuals belong to neither group.
inline double stat_M(const ResidualVector& e) {
  double sum_pos = 0.0, sum_neg = 0.0;
  std::size_t n_pos = 0, n_neg = 0;
  for (double v : e.values()) {
    if (v > 0.0) {
      sum_pos += v;
      ++n_pos;
    } else if (v < 0.0) {
      sum_neg += v;
      ++n_neg;
    }
  }
  if (n_pos == 0 || n_neg == 0) throw DegenerateSample("M", "empty sign partition");
  const double m2 = sum_pos / static_cast<double>(n_pos);
  const double m1 = sum_neg / static_cast<double>(n_neg);
  double ss_pos = 0.0, ss_neg = 0.0;
  for (double v : e.values()) {
    if (v > 0.0) {
      ss_pos += (v - m2) * (v - m2);
    } else if (v < 0.0) {
      ss_neg += (v - m1) * (v - m1);
    }
  }
  const double pooled = ss_pos / static_cast<double>(n_pos) + ss_neg / static_cast<double>(n_neg);
  if (!(pooled > 0.0)) throw DegenerateSample("M", "zero within-partition dispersion");
  return std::abs(m2 - m1) / std::sqrt(pooled);
}

/// Ratio of mean squares above and below the sample variance.
inline double stat_V(const ResidualVector& e) {
  if (e.size() == 0) throw DegenerateSample("V", "empty sample");
  const double var = detail::mean_square(e.values());
  double hi = 0.0, lo = 0.0;
  std::size_t n_hi = 0, n_lo = 0;
  for (double v : e.values()) {
    const double sq = v * v;
    if (sq > var) {
      hi += sq;
      ++n_hi;
    } else if (sq < var) {
      lo += sq;
      ++n_lo;
    }
  }
  if (n_hi == 0 || n_lo == 0) throw DegenerateSample("V", "empty variance partition");
  const double v1 = lo / static_cast<double>(n_lo);
  if (!(v1 > 0.0)) throw DegenerateSample("V", "zero lower-partition mean square");
  return (hi / static_cast<double>(n_hi)) / v1;
}

inline double stat_S(const ResidualVector& e) {
  if (e.size() == 0) throw DegenerateSample("S", "empty sample");
  const double var = detail::mean_square(e.values());
  if (!(var > 0.0)) throw DegenerateSample("S", "zero variance");
  double cube = 0.0;
  for (double v : e.values()) cube += v * v * v;
  return std::abs(cube / (static_cast<double>(e.size()) * var * std::sqrt(var)));
}

inline double stat_K(const ResidualVector& e) {
  if (e.size() == 0) throw DegenerateSample("K", "empty sample");
  const double var = detail::mean_square(e.values());
  if (!(var > 0.0)) throw DegenerateSample("K", "zero variance");
  double quart = 0.0;
  for (double v : e.values()) {
    const double sq = v * v;
    quart += sq * sq;
  }
  return std::abs(quart / (static_cast<double>(e.size()) * var * var) - 3.0);
}

/// Errors carry the name of the failing statistic (DegenerateSample::statistic).
inline StatQuartet compute_quartet(const ResidualVector& e) {
  return {stat_M(e), stat_V(e), stat_S(e), stat_K(e)};
}

}  // namespace msmc
