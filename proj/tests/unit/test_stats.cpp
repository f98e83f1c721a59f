#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hsvm/error.hpp"
#include "hsvm/stats.hpp"
#include "oracles.hpp"

using namespace hsvm;

namespace {

// Accuracy ranks of five binary classifiers on ten real data sets.
RankTable real_data_ranks() {
  RankTable t;
  t.kind = TableKind::ranks;
  t.values = {{1.5, 1.5, 4, 3, 5},   {2.5, 2.5, 2.5, 2.5, 5}, {2.5, 2.5, 2.5, 2.5, 5},
              {1, 2, 4, 3, 5},       {2, 2, 4.5, 4.5, 2},     {1.5, 1.5, 3, 4, 5},
              {1.5, 1.5, 4, 3, 5},   {1.5, 1.5, 4, 4, 4},     {2, 2, 4, 2, 5},
              {1.5, 1.5, 4, 3, 5}};
  return t;
}

void expect_rel(double actual, double expected, double rel) {
  EXPECT_NEAR(actual, expected, rel * std::abs(expected)) << "expected " << expected;
}

}  // namespace

TEST(Distributions, NormalCdfMatchesSeries) {
  for (double x = -8.0; x <= 8.0; x += 0.37) {
    EXPECT_NEAR(normal_cdf(x), oracle::normal_cdf_series(x), 1e-10) << x;
  }
  EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
  EXPECT_NEAR(normal_two_sided(1.959963984540054), 0.05, 1e-12);
  EXPECT_DOUBLE_EQ(normal_two_sided(-1.3), normal_two_sided(1.3));
}

TEST(Distributions, ChiSquareMatchesClosedForm) {
  for (int k = 1; k <= 9; ++k) {
    for (double x : {0.05, 0.5, 1.0, 3.0, 7.5, 15.0, 40.0}) {
      EXPECT_NEAR(chi2_upper(x, k), oracle::chi2_upper_closed(x, k), 1e-10) << k << " " << x;
    }
  }
  EXPECT_DOUBLE_EQ(chi2_upper(0.0, 3), 1.0);
  EXPECT_NEAR(chi2_upper(5.6, 2), std::exp(-2.8), 1e-14);
}

TEST(Distributions, GammaQ) {
  EXPECT_NEAR(gamma_q(1.0, 2.0), std::exp(-2.0), 1e-14);
  EXPECT_NEAR(gamma_q(0.5, 0.7), std::erfc(std::sqrt(0.7)), 1e-13);
  EXPECT_THROW(gamma_q(0.0, 1.0), DomainError);
  EXPECT_THROW(gamma_q(1.0, -1.0), DomainError);
}

TEST(Wilcoxon, ReferenceZAndP) {
  const auto a = wilcoxon_from_T(10, 0.5);
  EXPECT_NEAR(a.z, -2.7521, 1e-4);
  EXPECT_NEAR(a.p, 0.0060, 5e-4);
  const auto b = wilcoxon_from_T(10, 1.5);
  EXPECT_NEAR(b.z, -2.6502, 1e-4);
  EXPECT_NEAR(b.p, 0.0080, 5e-4);
}

TEST(Wilcoxon, HandExampleWithZeroDifferences) {
  // d = (0, 1, -2, 3): |d| ranks 1..4; the zero splits 1 as 0.5 / 0.5.
  const std::vector<double> a{1, 2, 0, 4}, b{1, 1, 2, 1};
  const auto r = wilcoxon_z(a, b);
  EXPECT_DOUBLE_EQ(r.r_plus, 0.5 + 2 + 4);
  EXPECT_DOUBLE_EQ(r.r_minus, 0.5 + 3);
  EXPECT_DOUBLE_EQ(r.T, 3.5);
}

TEST(Wilcoxon, TiedMagnitudesGetAverageRanks) {
  const std::vector<double> a{1, -1, 2}, b{0, 0, 0};
  const auto r = wilcoxon_z(a, b);
  EXPECT_DOUBLE_EQ(r.r_plus, 1.5 + 3);
  EXPECT_DOUBLE_EQ(r.r_minus, 1.5);
}

TEST(Wilcoxon, RankSumsAndSymmetry) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> normal;
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t N = 5 + rep % 20;
    std::vector<double> a(N), b(N);
    for (std::size_t i = 0; i < N; ++i) {
      a[i] = std::round(normal(rng) * 3);
      b[i] = std::round(normal(rng) * 3);
    }
    const auto r = wilcoxon_z(a, b);
    EXPECT_DOUBLE_EQ(r.r_plus + r.r_minus, N * (N + 1) / 2.0);
    EXPECT_LE(r.z, 0.0);
    const auto s = wilcoxon_z(b, a);
    EXPECT_DOUBLE_EQ(s.r_plus, r.r_minus);
    EXPECT_DOUBLE_EQ(s.p, r.p);
  }
}

TEST(Wilcoxon, Errors) {
  const std::vector<double> a{1, 2}, b{1};
  EXPECT_THROW(wilcoxon_z(a, b), ShapeError);
  EXPECT_THROW(wilcoxon_z({}, {}), ShapeError);
}

TEST(Friedman, RealDataRankTable) {
  const RankTable t = real_data_ranks();
  const auto ar = average_ranks(t);
  const std::vector<double> expected{1.75, 1.85, 3.65, 3.15, 4.6};
  for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(ar[j], expected[j], 1e-12);
  const auto f = friedman(t);
  EXPECT_NEAR(f.chi2, 23.56, 0.01);
  expect_rel(f.p, 9.78e-5, 0.02);
}

TEST(Friedman, MultiClassAverageRanks) {
  const std::vector<double> ar{1.4, 2.4, 2.2};
  const auto f = friedman_from_average_ranks(ar, 10);
  EXPECT_NEAR(f.chi2, 5.6, 1e-9);
  EXPECT_NEAR(f.p, 0.0608, 5e-5);
  const auto c = compare_to_control(ar, 10, 0);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_NEAR(c[0].p, 0.0253, 1e-4);
  EXPECT_NEAR(c[1].p, 0.0736, 1e-4);
}

TEST(Friedman, RawScoresAreRankedPerRow) {
  RankTable t;
  t.kind = TableKind::raw_scores;
  t.values = {{0.9, 0.8, 0.8}, {0.5, 0.7, 0.6}};
  const auto r = rank_rows(t);
  EXPECT_EQ(r[0], (std::vector<double>{1, 2.5, 2.5}));
  EXPECT_EQ(r[1], (std::vector<double>{3, 1, 2}));
  t.higher_is_better = false;
  EXPECT_EQ(rank_rows(t)[1], (std::vector<double>{1, 3, 2}));
}

TEST(Friedman, InvariantUnderMonotoneTransform) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.5, 1.0);
  RankTable t;
  t.kind = TableKind::raw_scores;
  t.values.assign(12, std::vector<double>(4));
  for (auto& row : t.values) {
    for (double& v : row) v = u(rng);
  }
  RankTable s = t;
  for (auto& row : s.values) {
    for (double& v : row) v = std::log(v) * 7.0 + 3.0;
  }
  const auto a = friedman(t), b = friedman(s);
  EXPECT_DOUBLE_EQ(a.chi2, b.chi2);
  EXPECT_DOUBLE_EQ(a.p, b.p);
}

TEST(Friedman, IdenticalMethodsGiveZero) {
  RankTable t;
  t.kind = TableKind::raw_scores;
  t.values = {{1, 1, 1}, {2, 2, 2}};
  const auto f = friedman(t);
  EXPECT_NEAR(f.chi2, 0.0, 1e-12);
  EXPECT_NEAR(f.p, 1.0, 1e-12);
}

TEST(Friedman, Errors) {
  RankTable ragged;
  ragged.values = {{1, 2}, {1}};
  EXPECT_THROW(rank_rows(ragged), ShapeError);
  RankTable bad;
  bad.values = {{1, 1, 1}};
  EXPECT_THROW(rank_rows(bad), DomainError);
  RankTable one;
  one.values = {{1}, {1}};
  EXPECT_THROW(friedman(one), DomainError);
  EXPECT_THROW(rank_rows(RankTable{}), ShapeError);
}

TEST(ControlComparison, ReferencePValues) {
  const auto c = compare_to_control(real_data_ranks(), 0);
  ASSERT_EQ(c.size(), 4u);
  const std::vector<double> expected{0.8875, 0.0072, 0.0477, 5.57e-5};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(c[i].method, i + 1);
    expect_rel(c[i].p, expected[i], 0.02);
  }
  EXPECT_THROW(compare_to_control(real_data_ranks(), 5), DomainError);
}

TEST(Holm, ReferenceDecisions) {
  const std::vector<double> p{0.8875, 0.0072, 0.0477, 5.57e-5};
  EXPECT_EQ(holm(p, 0.05), (std::vector<bool>{false, true, false, true}));
  EXPECT_EQ(holm(p, 0.10), (std::vector<bool>{false, true, true, true}));
}

TEST(Holm, StopsAtFirstAcceptance) {
  // 0.04 < 0.05 would pass alone but follows an accepted hypothesis.
  const std::vector<double> p{0.04, 0.03, 0.001};
  EXPECT_EQ(holm(p, 0.05), (std::vector<bool>{false, false, true}));
  EXPECT_EQ(holm(std::vector<double>{}, 0.05), std::vector<bool>{});
}
