#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <vector>

#include "msmc/ar.hpp"
#include "msmc/data.hpp"
#include "msmc/error.hpp"
#include "msmc/random.hpp"

using namespace msmc;

namespace {

std::vector<double> simulate_ar(const std::vector<double>& phi, double c, std::size_t T, std::uint64_t seed) {
  auto rng = make_stream(seed, {});
  const std::size_t burn = 500;
  const auto e = standard_normal_vector(T + burn, rng);
  std::vector<double> y(T + burn, 0.0);
  for (std::size_t t = 0; t < y.size(); ++t) {
    y[t] = c + e[t];
    for (std::size_t k = 1; k <= phi.size() && k <= t; ++k) y[t] += phi[k - 1] * y[t - k];
  }
  return {y.begin() + burn, y.end()};
}

}  // namespace

TEST(OlsArFit, ConsistentForAr1) {
  const auto y = simulate_ar({0.5}, 0.0, 100000, 11);
  const auto fit = ols_ar_fit(y, 1);
  EXPECT_NEAR(fit.phi[0], 0.5, 0.01);
  EXPECT_NEAR(fit.sigma2, 1.0, 0.02);
  EXPECT_EQ(fit.T_eff, 99999u);
}

TEST(OlsArFit, OrderZeroInterceptIsMean) {
  const std::vector<double> y{1.0, 4.0, 2.0, 7.0, 3.0};
  const auto fit = ols_ar_fit(y, 0);
  EXPECT_NEAR(fit.intercept, 17.0 / 5.0, 1e-12);
  EXPECT_TRUE(fit.phi.empty());
}

TEST(OlsArFit, MatchesNormalEquations) {
  const auto y = simulate_ar({0.4, -0.2}, 1.0, 300, 5);
  const auto fit = ols_ar_fit(y, 2);
  // X'e = 0 for every regressor.
  double s0 = 0, s1 = 0, s2 = 0;
  for (std::size_t i = 0; i < fit.residuals.size(); ++i) {
    s0 += fit.residuals[i];
    s1 += fit.residuals[i] * y[i + 1];
    s2 += fit.residuals[i] * y[i];
  }
  EXPECT_NEAR(s0, 0.0, 1e-9);
  EXPECT_NEAR(s1, 0.0, 1e-9);
  EXPECT_NEAR(s2, 0.0, 1e-9);
}

TEST(OlsArFit, RejectsShortAndCollinearInput) {
  EXPECT_THROW(ols_ar_fit(std::vector<double>{1, 2, 3}, 2), InvalidInput);
  EXPECT_THROW(ols_ar_fit(std::vector<double>(20, 3.0), 1), RankDeficient);
}

TEST(OlsArFit, HamiltonSampleCoefficients) {
  const auto data = ingest_series(std::string(MSMC_DATA_DIR) + "/gnp_hamilton.csv", Transformation::none);
  const auto fit = ols_ar_fit(data.values, 4);
  const double expected[] = {0.31, 0.13, -0.12, -0.09};
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(fit.phi[k], expected[k], 0.005) << "phi" << k + 1;
  EXPECT_NEAR(min_root_modulus(fit.phi), 1.50, 0.01);
}

TEST(ArFilter, HandComputation) {
  const std::vector<double> y{1, 2, 3, 4};
  const auto z = ar_filter(y, std::vector<double>{0.5});
  ASSERT_EQ(z.size(), 3u);
  EXPECT_DOUBLE_EQ(z[0], 1.5);
  EXPECT_DOUBLE_EQ(z[1], 2.0);
  EXPECT_DOUBLE_EQ(z[2], 2.5);
}

TEST(ArFilter, ZeroCoefficientsTruncate) {
  const std::vector<double> y{5, 6, 7, 8, 9};
  const auto z = ar_filter(y, std::vector<double>{0.0, 0.0});
  EXPECT_EQ(z, (std::vector<double>{7, 8, 9}));
}

TEST(ArFilter, WhitensTrueNull) {
  // Ljung-Box with 10 lags at the 5% point: over 200 filtered null series the
  // rejection count stays within 3 binomial SE of 10.
  std::size_t rejections = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto y = simulate_ar({0.7}, 0.0, 1000, 1000 + s);
    const auto z = ar_filter(y, std::vector<double>{0.7});
    double mean = 0;
    for (double v : z) mean += v;
    mean /= z.size();
    double c0 = 0;
    for (double v : z) c0 += (v - mean) * (v - mean);
    const double n = z.size();
    double q = 0;
    for (std::size_t k = 1; k <= 10; ++k) {
      double ck = 0;
      for (std::size_t t = k; t < z.size(); ++t) ck += (z[t] - mean) * (z[t - k] - mean);
      const double rk = ck / c0;
      q += rk * rk / (n - k);
    }
    q *= n * (n + 2);
    rejections += q > 18.307;
  }
  EXPECT_LE(rejections, 10 + 3 * std::sqrt(200 * 0.05 * 0.95));
}

TEST(MinRootModulus, KnownValues) {
  EXPECT_NEAR(min_root_modulus(std::vector<double>{0.5}), 2.0, 1e-12);
  EXPECT_NEAR(min_root_modulus(std::vector<double>{1.0}), 1.0, 1e-12);
  EXPECT_NEAR(min_root_modulus(std::vector<double>{0.31, 0.13, -0.12, -0.09}), 1.50, 0.01);
  EXPECT_TRUE(std::isinf(min_root_modulus(std::vector<double>{0.0, 0.0})));
  EXPECT_FALSE(is_stationary(std::vector<double>{1.0}));
  EXPECT_TRUE(is_stationary(std::vector<double>{0.5, 0.3}));
}

TEST(MinRootModulus, AgreesWithQuadraticFormula) {
  // 1 - a z - b z^2 with real roots.
  const double a = 0.3, b = 0.4;
  const double disc = std::sqrt(a * a + 4 * b);
  const double r1 = std::abs((-a + disc) / (2 * b));
  const double r2 = std::abs((-a - disc) / (2 * b));
  EXPECT_NEAR(min_root_modulus(std::vector<double>{a, b}), std::min(r1, r2), 1e-10);
}
