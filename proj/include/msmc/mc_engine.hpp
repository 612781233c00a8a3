#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "msmc/error.hpp"
#include "msmc/format.hpp"
#include "msmc/moment_stats.hpp"
#include "msmc/random.hpp"

namespace msmc {

enum class Statistic { M = 0, V = 1, S = 2, K = 3 };

inline constexpr std::array<Statistic, 4> kStatistics{Statistic::M, Statistic::V, Statistic::S,
                                                      Statistic::K};

inline const char* to_string(Statistic s) {
  switch (s) {
    case Statistic::M: return "M";
    case Statistic::V: return "V";
    case Statistic::S: return "S";
    case Statistic::K: return "K";
  }
  return "?";
}

inline Statistic parse_statistic(const std::string& s) {
  if (s == "M") return Statistic::M;
  if (s == "V") return Statistic::V;
  if (s == "S") return Statistic::S;
  if (s == "K") return Statistic::K;
  throw InvalidInput("unknown statistic '" + s + "' (expected M, V, S or K)");
}

inline double quartet_value(const StatQuartet& q, Statistic s) {
  switch (s) {
    case Statistic::M: return q.M;
    case Statistic::V: return q.V;
    case Statistic::S: return q.S;
    case Statistic::K: return q.K;
  }
  return 0.0;
}

/// F(x) = exp(g0 + g1 x) / (1 + exp(g0 + g1 x)).
struct LogisticCoeffs {
  double gamma0 = 0.0;
  double gamma1 = 1.0;
  Statistic statistic = Statistic::M;
  std::size_t T = 0;
};

namespace detail {

/// exp(z) / (1 + exp(z)) without overflow.
inline double logistic(double z) {
  if (z > 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double ez = std::exp(z);
  return ez / (1.0 + ez);
}

}  // namespace detail

inline double logistic_cdf(double x, const LogisticCoeffs& c) {
  return detail::logistic(c.gamma0 + c.gamma1 * x);
}

/// 1 - F(x), evaluated directly so small tail probabilities keep precision.
inline double logistic_sf(double x, const LogisticCoeffs& c) {
  return detail::logistic(-(c.gamma0 + c.gamma1 * x));
}

enum class SizeLookup { interpolate, exact };

/// Logistic coefficients per (statistic, sample size).
class LogisticCoeffTable {
public:
  LogisticCoeffTable() = default;

  /// The published coefficients for T = 50, 100, 150, 200, 250.
  static LogisticCoeffTable published() {
    struct Row {
      std::size_t T;
      double m0, m1, v0, v1, s0, s1, k0, k1;
    };
    static constexpr Row rows[] = {
        {50, -16.178, 8.380, -7.700, 0.879, -1.944, 8.423, -2.191, 5.106},
        {100, -23.041, 12.125, -10.923, 1.253, -1.975, 11.614, -2.101, 6.538},
        {150, -28.289, 14.961, -13.394, 1.539, -1.995, 14.128, -2.068, 7.690},
        {200, -32.719, 17.348, -15.484, 1.781, -2.012, 16.311, -2.051, 8.680},
        {250, -36.653, 19.463, -17.312, 1.992, -2.021, 18.197, -2.046, 9.597},
    };
    LogisticCoeffTable table;
    for (const auto& r : rows) {
      table.set({r.m0, r.m1, Statistic::M, r.T});
      table.set({r.v0, r.v1, Statistic::V, r.T});
      table.set({r.s0, r.s1, Statistic::S, r.T});
      table.set({r.k0, r.k1, Statistic::K, r.T});
    }
    return table;
  }

  void set(const LogisticCoeffs& c) {
    if (!(c.gamma1 > 0.0)) {
      throw InvalidInput(std::string("LogisticCoeffTable: gamma1 must be positive for ") +
                         to_string(c.statistic) + " at T=" + std::to_string(c.T));
    }
    if (c.T == 0) throw InvalidInput("LogisticCoeffTable: T must be positive");
    entries_[{c.statistic, c.T}] = c;
  }

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  std::vector<std::size_t> supported_sizes(Statistic s) const {
    std::vector<std::size_t> out;
    for (const auto& [key, c] : entries_)
      if (key.first == s) out.push_back(key.second);
    return out;
  }

  bool has(Statistic s, std::size_t T) const { return entries_.count({s, T}) != 0; }

  /// Coefficients for sample size T. With interpolation, (gamma0, gamma1)
  /// are linear in T between the bracketing entries and held at the nearest
  /// entry outside the tabulated range.
  LogisticCoeffs lookup(Statistic s, std::size_t T,
                        SizeLookup mode = SizeLookup::interpolate) const {
    if (auto it = entries_.find({s, T}); it != entries_.end()) return it->second;
    if (mode == SizeLookup::exact) {
      throw InvalidInput(std::string("LogisticCoeffTable: no coefficients for ") + to_string(s) +
                         " at T=" + std::to_string(T));
    }
    const auto sizes = supported_sizes(s);
    if (sizes.empty()) {
      throw InvalidInput(std::string("LogisticCoeffTable: no entries for statistic ") +
                         to_string(s));
    }
    LogisticCoeffs out;
    if (T < sizes.front()) {
      out = entries_.at({s, sizes.front()});
    } else if (T > sizes.back()) {
      out = entries_.at({s, sizes.back()});
    } else {
      auto hi = std::upper_bound(sizes.begin(), sizes.end(), T);
      const std::size_t t1 = *hi, t0 = *(hi - 1);
      const auto& a = entries_.at({s, t0});
      const auto& b = entries_.at({s, t1});
      const double w = static_cast<double>(T - t0) / static_cast<double>(t1 - t0);
      out.gamma0 = a.gamma0 + w * (b.gamma0 - a.gamma0);
      out.gamma1 = a.gamma1 + w * (b.gamma1 - a.gamma1);
    }
    out.statistic = s;
    out.T = T;
    return out;
  }

  /// Columns: statistic,T,gamma0,gamma1.
  void write_csv(std::ostream& os) const {
    os << "statistic,T,gamma0,gamma1\n";
    std::vector<LogisticCoeffs> rows;
    for (const auto& [key, c] : entries_) rows.push_back(c);
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
      return a.T != b.T ? a.T < b.T : a.statistic < b.statistic;
    });
    for (const auto& c : rows) {
      os << to_string(c.statistic) << ',' << c.T << ',' << format_double(c.gamma0) << ','
         << format_double(c.gamma1) << '\n';
    }
  }

  static LogisticCoeffTable read_csv(std::istream& is) {
    LogisticCoeffTable table;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(is, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      if (!header_seen) {
        header_seen = true;
        if (line.rfind("statistic", 0) == 0) continue;
      }
      std::stringstream ss(line);
      std::string stat, t, g0, g1;
      if (!std::getline(ss, stat, ',') || !std::getline(ss, t, ',') ||
          !std::getline(ss, g0, ',') || !std::getline(ss, g1, ',')) {
        throw InvalidInput("coefficient table line " + std::to_string(line_no) +
                           ": expected 4 comma-separated fields");
      }
      try {
        table.set({std::stod(g0), std::stod(g1), parse_statistic(stat),
                   static_cast<std::size_t>(std::stoul(t))});
      } catch (const std::logic_error& e) {
        throw InvalidInput("coefficient table line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    if (table.empty()) throw InvalidInput("coefficient table: no rows");
    return table;
  }

  static LogisticCoeffTable load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open coefficient table '" + path + "'");
    return read_csv(in);
  }

  void save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write coefficient table '" + path + "'");
    write_csv(out);
  }

private:
  std::map<std::pair<Statistic, std::size_t>, LogisticCoeffs> entries_;
};

using PValueQuad = std::array<double, 4>;

/// Approximate p-values 1 - F(statistic) in M, V, S, K order.
inline PValueQuad approx_pvalues(const StatQuartet& q, const LogisticCoeffTable& table,
                                 std::size_t T, SizeLookup mode = SizeLookup::interpolate) {
  PValueQuad out{};
  for (Statistic s : kStatistics) {
    out[static_cast<std::size_t>(s)] = logistic_sf(quartet_value(q, s), table.lookup(s, T, mode));
  }
  return out;
}

/// Quartet-to-p-value map with the four coefficient pairs resolved once.
class ApproxPValues {
public:
  ApproxPValues(const LogisticCoeffTable& table, std::size_t T,
                SizeLookup mode = SizeLookup::interpolate) {
    for (Statistic s : kStatistics) coeffs_[static_cast<std::size_t>(s)] = table.lookup(s, T, mode);
  }

  PValueQuad operator()(const StatQuartet& q) const {
    PValueQuad out{};
    for (Statistic s : kStatistics) {
      const auto i = static_cast<std::size_t>(s);
      out[i] = logistic_sf(quartet_value(q, s), coeffs_[i]);
    }
    return out;
  }

  const LogisticCoeffs& coeffs(Statistic s) const { return coeffs_[static_cast<std::size_t>(s)]; }

private:
  std::array<LogisticCoeffs, 4> coeffs_{};
};

enum class Combination { min, product };

inline const char* to_string(Combination c) { return c == Combination::min ? "min" : "prod"; }

/// 1 - min(p).
inline double combine_min(const PValueQuad& p) {
  return 1.0 - *std::min_element(p.begin(), p.end());
}

/// 1 - prod(p).
inline double combine_prod(const PValueQuad& p) {
  return 1.0 - p[0] * p[1] * p[2] * p[3];
}

inline double combine(const PValueQuad& p, Combination c) {
  return c == Combination::min ? combine_min(p) : combine_prod(p);
}

/// Data statistic xi0 and N - 1 simulated statistics.
struct MCEnsemble {
  double xi0 = 0.0;
  std::vector<double> xi_sim;

  std::size_t N() const noexcept { return xi_sim.size() + 1; }
};

struct MCTestReport {
  double statistic_value = 0.0;
  std::size_t rank = 0;
  double p_value = 1.0;
  std::size_t N = 0;
  std::uint64_t seed = 0;
  /// True when some simulated value equalled the data value and the
  /// tie-breakers decided the rank.
  bool tie_breaker_used = false;
};

/// Rank of xi0 among all N values in increasing (value, tie-breaker) order,
/// with tie_breakers[0] attached to xi0 and tie_breakers[i] to xi_sim[i-1].
inline MCTestReport mc_pvalue_with_tie_breakers(double xi0, std::span<const double> xi_sim,
                                                std::span<const double> tie_breakers) {
  MCTestReport rep;
  rep.statistic_value = xi0;
  rep.N = xi_sim.size() + 1;
  std::size_t below = 0;
  for (std::size_t i = 0; i < xi_sim.size(); ++i) {
    const double v = xi_sim[i];
    if (v < xi0) {
      ++below;
    } else if (v == xi0) {
      rep.tie_breaker_used = true;
      if (tie_breakers[i + 1] < tie_breakers[0]) ++below;
    }
  }
  rep.rank = below + 1;
  rep.p_value = static_cast<double>(rep.N + 1 - rep.rank) / static_cast<double>(rep.N);
  return rep;
}

inline std::vector<double> draw_tie_breakers(std::size_t N, Stream& rng) {
  std::vector<double> u(N);
  for (auto& v : u) v = uniform01(rng);
  return u;
}

/// p = (N + 1 - R) / N. Draws N uniform tie-breakers from rng.
inline MCTestReport mc_pvalue(const MCEnsemble& ens, Stream& rng) {
  const auto u = draw_tie_breakers(ens.N(), rng);
  return mc_pvalue_with_tie_breakers(ens.xi0, ens.xi_sim, u);
}

/// c_N(alpha) = N - floor(N alpha) + 1. A 1e-9 guard keeps products such as
/// 100 * 0.29 from flooring one below the intended integer.
inline std::size_t critical_rank(std::size_t N, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInput("critical_rank: alpha must lie in (0, 1)");
  }
  const auto k = static_cast<std::size_t>(std::floor(static_cast<double>(N) * alpha + 1e-9));
  return N - k + 1;
}

/// Induced test: reject when any p-value is at or below its own level.
inline bool bonferroni_decision(const PValueQuad& pvals, const PValueQuad& alphas) {
  for (std::size_t i = 0; i < 4; ++i)
    if (pvals[i] <= alphas[i]) return true;
  return false;
}

inline constexpr std::size_t kQuantileGridSize = 999;

/// Empirical quantiles at levels 0.001, ..., 0.999 (inverse empirical CDF).
inline std::vector<double> quantile_grid(std::vector<double> samples) {
  if (samples.empty()) throw InvalidInput("quantile_grid: no samples");
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  std::vector<double> out(kQuantileGridSize);
  for (std::size_t k = 1; k <= kQuantileGridSize; ++k) {
    // smallest order statistic with empirical CDF >= q; q = k / 1000.
    std::size_t idx = (n * k + 999) / 1000;
    idx = std::clamp<std::size_t>(idx, 1, n);
    out[k - 1] = samples[idx - 1];
  }
  return out;
}

inline double quantile_level(std::size_t k) { return static_cast<double>(k + 1) / 1000.0; }

struct LogisticFit {
  LogisticCoeffs coeffs;
  double sse = 0.0;
  std::size_t iterations = 0;
  /// max_q |F(x_q) - q| over the quantile grid.
  double sup_error = 0.0;
};

/// Nonlinear least-squares fit of the logistic form to the empirical CDF on
/// the 999-point quantile grid, minimizing sum_q (F(x_q) - q)^2 with
/// Levenberg-Marquardt started from the logit-linear regression.
inline LogisticFit fit_logistic_cdf(std::vector<double> samples, Statistic statistic = Statistic::M,
                                    std::size_t T = 0) {
  if (samples.size() < 10000) {
    throw InvalidInput("fit_logistic_cdf: need at least 10^4 samples, got " +
                       std::to_string(samples.size()));
  }
  const auto x = quantile_grid(std::move(samples));
  const std::size_t m = x.size();

  // Start: OLS of logit(q) on x.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < m; ++k) {
    const double q = quantile_level(k);
    const double l = std::log(q / (1.0 - q));
    sx += x[k];
    sy += l;
    sxx += x[k] * x[k];
    sxy += x[k] * l;
  }
  const double md = static_cast<double>(m);
  const double den = sxx - sx * sx / md;
  if (!(den > 0.0)) throw ConvergenceFailure("fit_logistic_cdf: samples have no spread");
  double g1 = (sxy - sx * sy / md) / den;
  double g0 = (sy - g1 * sx) / md;

  auto sse_at = [&](double a, double b) {
    double s = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double r = detail::logistic(a + b * x[k]) - quantile_level(k);
      s += r * r;
    }
    return s;
  };

  double sse = sse_at(g0, g1);
  double lambda = 1e-3;
  std::size_t iter = 0;
  bool converged = false;
  constexpr std::size_t kMaxIter = 500;
  for (; iter < kMaxIter; ++iter) {
    double j00 = 0, j01 = 0, j11 = 0, r0 = 0, r1 = 0;
    for (std::size_t k = 0; k < m; ++k) {
      const double F = detail::logistic(g0 + g1 * x[k]);
      const double d = F * (1.0 - F);
      const double res = F - quantile_level(k);
      j00 += d * d;
      j01 += d * d * x[k];
      j11 += d * d * x[k] * x[k];
      r0 += d * res;
      r1 += d * x[k] * res;
    }
    if (std::abs(r0) + std::abs(r1) < 1e-15) {
      converged = true;
      break;
    }
    bool stepped = false;
    for (int attempt = 0; attempt < 60; ++attempt) {
      const double a00 = j00 * (1.0 + lambda), a11 = j11 * (1.0 + lambda);
      const double det = a00 * a11 - j01 * j01;
      if (det == 0.0) {
        lambda *= 10.0;
        continue;
      }
      const double d0 = -(a11 * r0 - j01 * r1) / det;
      const double d1 = -(a00 * r1 - j01 * r0) / det;
      const double trial = sse_at(g0 + d0, g1 + d1);
      if (trial <= sse) {
        const double rel = (sse - trial) / std::max(sse, 1e-300);
        const double step = std::abs(d0) / (1.0 + std::abs(g0)) + std::abs(d1) / (1.0 + std::abs(g1));
        g0 += d0;
        g1 += d1;
        sse = trial;
        lambda = std::max(lambda / 10.0, 1e-12);
        stepped = true;
        if (rel < 1e-14 || step < 1e-12) converged = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!stepped) {
      // No descent direction left at machine precision: a minimum.
      converged = true;
      break;
    }
    if (converged) break;
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "fit_logistic_cdf: no convergence after " << iter << " iterations (gamma0=" << g0
        << ", gamma1=" << g1 << ", sse=" << sse << ")";
    throw ConvergenceFailure(msg.str());
  }
  if (!(g1 > 0.0)) {
    std::ostringstream msg;
    msg << "fit_logistic_cdf: fitted gamma1=" << g1 << " is not positive";
    throw ConvergenceFailure(msg.str());
  }
  LogisticFit fit;
  fit.coeffs = {g0, g1, statistic, T};
  fit.sse = sse;
  fit.iterations = iter;
  for (std::size_t k = 0; k < m; ++k) {
    fit.sup_error = std::max(fit.sup_error, std::abs(detail::logistic(g0 + g1 * x[k]) - quantile_level(k)));
  }
  return fit;
}

}  // namespace msmc
