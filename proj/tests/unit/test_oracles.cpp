#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"

namespace {

double prox_objective(const std::vector<double>& w, const std::vector<double>& z, double lambda) {
  double v = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    v += 0.5 * (w[i] - z[i]) * (w[i] - z[i]) + lambda * std::abs(w[i]);
  }
  return v;
}

}  // namespace

TEST(OracleHuber, Pieces) {
  EXPECT_EQ(oracle::huber(1.5, 0.5), 0.0);
  EXPECT_DOUBLE_EQ(oracle::huber(0.75, 0.5), 0.0625);
  EXPECT_DOUBLE_EQ(oracle::huber(0.0, 0.5), 0.75);
  EXPECT_DOUBLE_EQ(oracle::huber(0.5, 0.5), 0.25);
}

TEST(OracleObjectives, SmallHandInstance) {
  oracle::DenseBinary d{{{1.0, 0.0}, {0.0, 2.0}}, {1, -1}};
  const std::vector<double> w{0.5, 0.25};
  // Margins: 1 * (0 + 0.5) = 0.5 and -1 * (0 + 0.5) = -0.5; delta = 1.
  EXPECT_DOUBLE_EQ(oracle::binary_smooth(d, 0.0, w, 1.0), 0.5 * (0.125 + 1.0));
  const oracle::Penalty pen{0.1, 2.0, 4.0, 1.0};
  EXPECT_DOUBLE_EQ(oracle::binary_objective(d, 0.5, w, pen),
                   oracle::binary_smooth(d, 0.5, w, 1.0) + 0.1 * 0.75 + 0.3125 + 0.5);

  oracle::DenseMulti m{{{1.0}}, {1}, 2};
  // Only class 2 is charged: phi(b_2 + w_2) with u = (b1, b2, w1, w2).
  const std::vector<double> u{0.0, 0.0, 0.5, -0.5};
  EXPECT_DOUBLE_EQ(oracle::multi_smooth(m, u, 1.0), oracle::huber(-0.5, 1.0));
}

TEST(OracleFiniteDiff, ExactOnQuadratics) {
  const oracle::Objective f = [](std::span<const double> x) {
    return 3.0 * x[0] * x[0] - x[0] * x[1] + 2.0 * x[1];
  };
  const std::vector<double> x{0.7, -1.2};
  const auto g = oracle::finite_diff_grad(f, x, 1e-3);
  EXPECT_NEAR(g[0], 6.0 * 0.7 + 1.2, 1e-9);
  EXPECT_NEAR(g[1], -0.7 + 2.0, 1e-9);
}

TEST(OracleEqProx, HandCase) {
  const std::vector<double> z{3.0, 0.0, -1.0};
  const auto w = oracle::bruteforce_eq_prox(z, 1.0);
  EXPECT_NEAR(w[0], 1.0, 1e-14);
  EXPECT_NEAR(w[1], 0.0, 1e-14);
  EXPECT_NEAR(w[2], -1.0, 1e-14);
}

TEST(OracleEqProx, BeatsFeasiblePerturbations) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 2.0);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t J = 2 + rep % 11;
    std::vector<double> z(J);
    for (double& v : z) v = normal(rng) * 2.0;
    const double lambda = unit(rng);
    const auto w = oracle::bruteforce_eq_prox(z, lambda);
    EXPECT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), 0.0, 1e-12);
    const double best = prox_objective(w, z, lambda);
    for (int t = 0; t < 20; ++t) {
      std::vector<double> v = w;
      const std::size_t a = rng() % J, b = (a + 1 + rng() % (J - 1)) % J;
      const double eps = normal(rng) * 1e-3;
      v[a] += eps;
      v[b] -= eps;
      EXPECT_GE(prox_objective(v, z, lambda), best - 1e-14);
    }
  }
}

TEST(OracleGrid, FindsInteriorMinimum) {
  const std::vector<double> lo{-1.0}, hi{1.0};
  const auto r = oracle::grid_minimize(
      [](std::span<const double> x) { return (x[0] - 0.3) * (x[0] - 0.3); }, lo, hi, 0.1);
  EXPECT_NEAR(r.x[0], 0.3, 1e-9);
  EXPECT_FALSE(r.on_boundary);

  const std::vector<double> lo2{-2.0, -2.0}, hi2{2.0, 2.0};
  const auto r2 = oracle::grid_minimize(
      [](std::span<const double> x) {
        return std::abs(x[0] - 0.25) + (x[1] + 0.5) * (x[1] + 0.5);
      },
      lo2, hi2, 0.1);
  EXPECT_NEAR(r2.x[0], 0.25, 1e-9);
  EXPECT_NEAR(r2.x[1], -0.5, 1e-9);
}

TEST(OracleGrid, FlagsBoundaryMinimum) {
  const std::vector<double> lo{0.0}, hi{1.0};
  const auto r = oracle::grid_minimize([](std::span<const double> x) { return x[0]; }, lo, hi, 0.1);
  EXPECT_TRUE(r.on_boundary);
}

TEST(OracleSubgradient, StaysFeasibleAndDescends) {
  oracle::DenseMulti d{{{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.5}}, {1, 2, 3}, 3};
  const oracle::Penalty pen{0.05, 1.0, 1.0, 1.0};
  const auto r = oracle::projected_subgradient(d, pen, 20000);
  EXPECT_LE(r.max_row_residual, 1e-12);
  EXPECT_LE(r.max_b_residual, 1e-12);
  const std::vector<double> zero(3 + 2 * 3, 0.0);
  EXPECT_LT(r.objective, oracle::multi_objective(d, zero, pen));
  EXPECT_DOUBLE_EQ(r.objective, oracle::multi_objective(d, r.u, pen));
}

TEST(OracleNormal, KnownValues) {
  EXPECT_NEAR(oracle::normal_cdf_series(0.0), 0.5, 1e-16);
  EXPECT_NEAR(oracle::normal_cdf_series(1.0), 0.8413447460685429, 1e-15);
  EXPECT_NEAR(oracle::normal_cdf_series(-1.96), 0.024997895148220435, 1e-15);
}

TEST(OracleChi2, KnownForms) {
  for (double x : {0.1, 1.0, 4.0, 12.0}) {
    EXPECT_NEAR(oracle::chi2_upper_closed(x, 2), std::exp(-x / 2), 1e-15);
    EXPECT_NEAR(oracle::chi2_upper_closed(x, 1), std::erfc(std::sqrt(x / 2)), 1e-14);
    EXPECT_NEAR(oracle::chi2_upper_closed(x, 4), std::exp(-x / 2) * (1 + x / 2), 1e-15);
  }
}
