#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "msmc/ar.hpp"
#include "msmc/error.hpp"
#include "msmc/random.hpp"

namespace msmc {

/// Two-state transition matrix; p12 = 1 - p11 and p21 = 1 - p22.
struct TransitionMatrix {
  double p11 = 0.9;
  double p22 = 0.9;

  double p12() const noexcept { return 1.0 - p11; }
  double p21() const noexcept { return 1.0 - p22; }

  bool valid() const noexcept { return p11 >= 0.0 && p11 <= 1.0 && p22 >= 0.0 && p22 <= 1.0; }

  bool ergodic() const noexcept { return valid() && p11 < 1.0 && p22 < 1.0 && p11 + p22 > 0.0; }

  /// Throws InvalidInput naming the violated condition.
  void require_ergodic(const char* where) const {
    const std::string prefix = std::string(where) + ": transition matrix is not ergodic (";
    if (!valid()) throw InvalidInput(prefix + "probabilities must lie in [0, 1])");
    if (p11 >= 1.0) throw InvalidInput(prefix + "p11 < 1 violated)");
    if (p22 >= 1.0) throw InvalidInput(prefix + "p22 < 1 violated)");
    if (p11 + p22 <= 0.0) throw InvalidInput(prefix + "p11 + p22 > 0 violated)");
  }
};

/// Regime means and standard deviations. Separations are reported as
/// mu2 - mu1 and sigma2 - sigma1.
struct RegimeParams {
  double mu1 = 0.0;
  double mu2 = 0.0;
  double sigma1 = 1.0;
  double sigma2 = 1.0;

  double delta_mu() const noexcept { return mu2 - mu1; }
  double delta_sigma() const noexcept { return sigma2 - sigma1; }

  static RegimeParams from_separation(double delta_mu, double delta_sigma, double mu1 = 0.0,
                                      double sigma1 = 1.0) {
    return {mu1, mu1 + delta_mu, sigma1, sigma1 + delta_sigma};
  }
};

/// Full switching-model parameter vector (mu1, mu2, sigma1, sigma2, phi, p11, p22).
struct MSARSpec {
  RegimeParams regimes;
  TransitionMatrix transition;
  std::vector<double> phi;

  std::size_t order() const noexcept { return phi.size(); }
  bool is_linear() const noexcept {
    return regimes.mu1 == regimes.mu2 && regimes.sigma1 == regimes.sigma2;
  }
};

struct MixtureMoments {
  double mean = 0.0;
  double variance = 0.0;
  /// Signed sqrt(b1).
  double skewness = 0.0;
  /// b2, the excess kurtosis.
  double excess_kurtosis = 0.0;
};

inline std::pair<double, double> ergodic_probabilities(const TransitionMatrix& P) {
  P.require_ergodic("ergodic_probabilities");
  const double pi1 = (1.0 - P.p22) / (2.0 - P.p11 - P.p22);
  return {pi1, 1.0 - pi1};
}

/// States are coded 1 and 2. The first state is drawn from the ergodic
/// distribution.
inline std::vector<int> simulate_chain(const TransitionMatrix& P, std::size_t T, Stream& rng) {
  if (T == 0) throw InvalidInput("simulate_chain: T must be at least 1");
  const auto [pi1, pi2] = ergodic_probabilities(P);
  (void)pi2;
  std::vector<int> states(T);
  int s = uniform01(rng) < pi1 ? 1 : 2;
  states[0] = s;
  for (std::size_t t = 1; t < T; ++t) {
    const double stay = s == 1 ? P.p11 : P.p22;
    if (uniform01(rng) >= stay) s = 3 - s;
    states[t] = s;
  }
  return states;
}

inline std::size_t default_burn_in(std::size_t r) { return 100 + 10 * r; }

/// Path of T observations from
///   y_t = mu_{s_t} + sum_k phi_k (y_{t-k} - mu_{s_{t-k}}) + sigma_{s_t} eps_t.
/// The chain and the innovations use separate substreams seeded from `rng`,
/// so two specs that differ only in the transition matrix share their
/// innovations. Initial lagged deviations are zero and the first `burn_in`
/// observations are discarded.
inline std::vector<double> simulate_msar(const MSARSpec& spec, std::size_t T, Stream& rng,
                                         std::size_t burn_in) {
  if (T == 0) throw InvalidInput("simulate_msar: T must be at least 1");
  if (spec.regimes.sigma1 < 0.0 || spec.regimes.sigma2 < 0.0) {
    throw InvalidInput("simulate_msar: regime standard deviations must be non-negative");
  }
  const std::size_t r = spec.order();
  if (r > 0 && !is_stationary(spec.phi)) {
    throw InvalidInput("simulate_msar: AR polynomial has a root on or inside the unit circle");
  }
  Stream chain_rng(rng());
  Stream noise_rng(rng());

  const std::size_t total = T + burn_in;
  const auto states = simulate_chain(spec.transition, total, chain_rng);
  std::normal_distribution<double> normal(0.0, 1.0);

  // Deviations d_t = y_t - mu_{s_t} follow the linear AR recursion.
  std::vector<double> dev(total + r, 0.0);
  std::vector<double> y(T);
  for (std::size_t t = 0; t < total; ++t) {
    const bool first = states[t] == 1;
    double d = (first ? spec.regimes.sigma1 : spec.regimes.sigma2) * normal(noise_rng);
    for (std::size_t k = 1; k <= r; ++k) d += spec.phi[k - 1] * dev[r + t - k];
    dev[r + t] = d;
    if (t >= burn_in) y[t - burn_in] = (first ? spec.regimes.mu1 : spec.regimes.mu2) + d;
  }
  return y;
}

inline std::vector<double> simulate_msar(const MSARSpec& spec, std::size_t T, Stream& rng) {
  return simulate_msar(spec, T, rng, default_burn_in(spec.order()));
}

/// Mean, variance, skewness and excess kurtosis of
/// pi1 N(mu1, sigma1^2) + (1 - pi1) N(mu2, sigma2^2).
inline MixtureMoments mixture_moments(const RegimeParams& p, double pi1) {
  if (!(pi1 > 0.0 && pi1 < 1.0)) {
    throw InvalidInput("mixture_moments: pi1 must lie in (0, 1), got " + std::to_string(pi1));
  }
  const double pi2 = 1.0 - pi1;
  const double s1 = p.sigma1 * p.sigma1;
  const double s2 = p.sigma2 * p.sigma2;
  const double dmu = p.mu2 - p.mu1;
  const double dmu2 = dmu * dmu;
  const double pp = pi1 * pi2;

  MixtureMoments m;
  m.mean = pi1 * p.mu1 + pi2 * p.mu2;
  m.variance = pi1 * s1 + pi2 * s2 + pp * dmu2;
  if (m.variance == 0.0) return m;

  m.skewness = pp * (p.mu1 - p.mu2) * (3.0 * (s1 - s2) + (1.0 - 2.0 * pi1) * dmu2) /
               std::pow(m.variance, 1.5);
  const double ds = s2 - s1;
  const double a = 3.0 * pp * ds * ds + 6.0 * dmu2 * pp * (2.0 * pi1 - 1.0) * ds +
                   pp * dmu2 * dmu2 * (1.0 - 6.0 * pp);
  m.excess_kurtosis = a / (m.variance * m.variance);
  return m;
}

/// Means of z_t = y_t - phi y_{t-1} in the four (s_t, s_{t-1}) states:
/// (1,1), (2,1), (1,2), (2,2).
inline std::array<double, 4> filtered_mixture_components(double mu1, double mu2, double phi) {
  return {mu1 * (1.0 - phi), mu2 - phi * mu1, mu1 - phi * mu2, mu2 * (1.0 - phi)};
}

inline std::size_t count_distinct(std::array<double, 4> values) {
  std::sort(values.begin(), values.end());
  return static_cast<std::size_t>(std::unique(values.begin(), values.end()) - values.begin());
}

using Matrix4 = std::array<std::array<double, 4>, 4>;

/// Transition matrix of the joint state (s_t, s_{t-1}), ordered as in
/// filtered_mixture_components.
inline Matrix4 four_state_transition(const TransitionMatrix& P) {
  if (!P.valid()) throw InvalidInput("four_state_transition: probabilities must lie in [0, 1]");
  const std::array<double, 4> from1{P.p11, P.p12(), 0.0, 0.0};
  const std::array<double, 4> from2{0.0, 0.0, P.p21(), P.p22};
  return {from1, from2, from1, from2};
}

}  // namespace msmc
