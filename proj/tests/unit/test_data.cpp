#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "hsvm/error.hpp"
#include "hsvm/libsvm.hpp"
#include "hsvm/preprocess.hpp"
#include "hsvm/synth.hpp"

using namespace hsvm;

namespace {

Dataset parse(const std::string& text, const ParseOptions& opts = {}) {
  std::istringstream in(text);
  return parse_libsvm(in, opts);
}

std::string write(const Dataset& d) {
  std::ostringstream out;
  write_libsvm(d, out);
  return out.str();
}

std::size_t parse_error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(Libsvm, ParsesSingleRow) {
  const Dataset d = parse("+1 1:0.5 3:-2\n");
  ASSERT_EQ(d.rows(), 1u);
  EXPECT_EQ(d.features(), 3u);
  EXPECT_EQ(d.nnz(), 2u);
  EXPECT_EQ(d.label(0), 1);
  EXPECT_EQ(d.kind(), LabelKind::binary);
  const auto row = d.row(0);
  EXPECT_EQ(row.index[0], 0u);
  EXPECT_EQ(row.index[1], 2u);
  EXPECT_DOUBLE_EQ(row.value[1], -2.0);
}

TEST(Libsvm, LabelOnlyLineIsAZeroRow) {
  const Dataset d = parse("2\n");
  ASSERT_EQ(d.rows(), 1u);
  EXPECT_EQ(d.row(0).nnz(), 0u);
  EXPECT_EQ(d.label(0), 2);
  EXPECT_EQ(d.kind(), LabelKind::multiclass);
}

TEST(Libsvm, SkipsBlankLinesAndInfersClasses) {
  const Dataset d = parse("1 1:1\n\n3 2:1\n2 1:-1\n");
  EXPECT_EQ(d.rows(), 3u);
  EXPECT_EQ(d.classes(), 3);
}

TEST(Libsvm, FeatureOverride) {
  ParseOptions opts;
  opts.n_features = 10;
  EXPECT_EQ(parse("+1 2:1\n", opts).features(), 10u);
  opts.n_features = 1;
  EXPECT_THROW(parse("+1 2:1\n", opts), ParseError);
}

TEST(Libsvm, ErrorsCarryLineNumbers) {
  EXPECT_EQ(parse_error_line("+1 1:1\n-1 3:1 2:1\n"), 2u);
  EXPECT_EQ(parse_error_line("+1 0:1\n"), 1u);
  EXPECT_EQ(parse_error_line("+1 1:1\n\n-1 1:abc\n"), 3u);
  EXPECT_EQ(parse_error_line("+1 1:1 1:2\n"), 1u);
  EXPECT_EQ(parse_error_line("1.5 1:1\n"), 1u);
  EXPECT_EQ(parse_error_line("+1 1-1\n"), 1u);
  EXPECT_EQ(parse_error_line("1:0.5\n"), 1u);
}

TEST(Libsvm, UnlabeledInputWhenAllowed) {
  ParseOptions opts;
  opts.allow_missing_labels = true;
  const Dataset d = parse("1:0.5 2:1\n3:1\n", opts);
  EXPECT_FALSE(d.has_labels());
  EXPECT_EQ(d.rows(), 2u);
}

TEST(Libsvm, WriteParseRoundTrip) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 10; ++rep) {
    auto bin = testing_support::random_binary(rng, 20, 7, 0.5);
    EXPECT_EQ(parse(write(bin.data)), bin.data);
    auto multi = testing_support::random_multi(rng, 20, 7, 4, 0.5);
    EXPECT_EQ(parse(write(multi.data)), multi.data);
  }
}

TEST(Libsvm, WritesSignedBinaryLabelsAndZeroRows) {
  Dataset::Builder b;
  b.features(2);
  const std::vector<double> zero{0.0, 0.0}, one{0.0, 0.25};
  b.add_dense_row(1, one).add_dense_row(-1, zero);
  const std::string text = write(std::move(b).build());
  EXPECT_EQ(text, "+1 2:0.25\n-1\n");
}

TEST(Libsvm, ValuesSurviveExactly) {
  Dataset::Builder b;
  const std::vector<std::pair<FeatureIndex, double>> row{{0, 0.1}, {4, 1.0 / 3.0}, {5, -1e-300}};
  b.add_row(1, row);
  const Dataset d = std::move(b).build();
  const Dataset back = parse(write(d), {d.features(), std::nullopt, std::nullopt, false});
  EXPECT_EQ(back.row(0).value[1], 1.0 / 3.0);
  EXPECT_EQ(back.row(0).value[2], -1e-300);
}

TEST(DatasetBuilder, RejectsBadRows) {
  Dataset::Builder b;
  const std::vector<std::pair<FeatureIndex, double>> bad{{2, 1.0}, {1, 1.0}};
  EXPECT_THROW(b.add_row(1, bad), ShapeError);
  Dataset::Builder m;
  const std::vector<double> x{1.0};
  m.add_dense_row(0, x).add_dense_row(2, x);
  EXPECT_THROW(std::move(m).build(), LabelError);
}

TEST(DatasetViews, SubsetAndRestrict) {
  std::mt19937_64 rng(2);
  auto inst = testing_support::random_binary(rng, 10, 6, 0.0);
  const std::vector<std::size_t> rows{7, 2};
  const Dataset s = inst.data.subset(rows);
  ASSERT_EQ(s.rows(), 2u);
  EXPECT_EQ(s.label(0), inst.data.label(7));
  EXPECT_DOUBLE_EQ(s.row(1).value[3], inst.dense.X[2][3]);

  const std::vector<FeatureIndex> cols{4, 1};
  const Dataset r = inst.data.restrict_features(cols);
  EXPECT_EQ(r.features(), 2u);
  for (std::size_t i = 0; i < r.rows(); ++i) {
    std::vector<double> dense(2, 0.0);
    const auto row = r.row(i);
    for (std::size_t k = 0; k < row.nnz(); ++k) dense[row.index[k]] = row.value[k];
    EXPECT_DOUBLE_EQ(dense[0], inst.dense.X[i][4]);
    EXPECT_DOUBLE_EQ(dense[1], inst.dense.X[i][1]);
  }
}

TEST(Synth, BinaryCovarianceInstance) {
  SynthSpec s{10, 3, 2, 0.8, 1, SynthKind::binary_gaussian};
  const Matrix S = binary_covariance(s);
  const double expected[3][3] = {{1, 0.8, 0}, {0.8, 1, 0}, {0, 0, 1}};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(S(i, j), expected[i][j]);
  }
  EXPECT_EQ(binary_mean(s), (std::vector<double>{1.0, 1.0, 0.0}));
}

TEST(Synth, FourClassInstances) {
  SynthSpec s{8, 4, 2, 0.5, 1, SynthKind::four_class};
  EXPECT_EQ(fourclass_mean(s, 1), (std::vector<double>{1, 1, 0, 0}));
  EXPECT_EQ(fourclass_mean(s, 2), (std::vector<double>{-1, -1, 0, 0}));
  EXPECT_EQ(fourclass_mean(s, 3), (std::vector<double>{0, 1, 1, 0}));
  EXPECT_EQ(fourclass_mean(s, 4), (std::vector<double>{0, -1, -1, 0}));
  const Matrix S3 = fourclass_covariance(s, 3);
  EXPECT_DOUBLE_EQ(S3(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(S3(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(S3(1, 2), 0.5);
  EXPECT_DOUBLE_EQ(S3(3, 3), 1.0);
  EXPECT_EQ(fourclass_covariance(s, 4), S3);
  EXPECT_EQ(fourclass_covariance(s, 2), fourclass_covariance(s, 1));
}

TEST(Synth, RejectsInvalidShapes) {
  EXPECT_THROW((SynthSpec{10, 3, 4, 0.0, 1, SynthKind::binary_gaussian}.validate()), DomainError);
  EXPECT_THROW((SynthSpec{9, 3, 2, 0.0, 1, SynthKind::binary_gaussian}.validate()), DomainError);
  EXPECT_THROW((SynthSpec{10, 3, 2, 1.0, 1, SynthKind::binary_gaussian}.validate()), DomainError);
  EXPECT_THROW((SynthSpec{8, 100, 31, 0.0, 1, SynthKind::four_class}.validate()), DomainError);
  EXPECT_THROW((SynthSpec{8, 4, 4, 0.0, 1, SynthKind::four_class}.validate()), DomainError);
  EXPECT_NO_THROW((SynthSpec{8, 6, 4, 0.0, 1, SynthKind::four_class}.validate()));
}

TEST(Synth, LabelsAndSupport) {
  const Dataset b = generate({50, 30, 5, 0.0, 3, SynthKind::binary_gaussian});
  int pos = 0;
  for (int y : b.labels()) pos += y == 1;
  EXPECT_EQ(pos, 25);
  EXPECT_EQ(*b.true_support(), (std::vector<FeatureIndex>{0, 1, 2, 3, 4}));
  const Dataset f = generate({40, 30, 6, 0.0, 3, SynthKind::four_class});
  std::vector<int> count(5, 0);
  for (int y : f.labels()) ++count[y];
  EXPECT_EQ(count, (std::vector<int>{0, 10, 10, 10, 10}));
  EXPECT_EQ(f.true_support()->size(), 9u);
}

TEST(Synth, Reproducible) {
  const SynthSpec s{20, 10, 3, 0.3, 42, SynthKind::binary_gaussian};
  EXPECT_EQ(generate(s), generate(s));
  SynthSpec other = s;
  other.seed = 43;
  EXPECT_FALSE(generate(s) == generate(other));
  EXPECT_FALSE(generate(s) == generate_test(s, 20));
}

TEST(Synth, MonteCarloMoments) {
  const SynthSpec s{100000, 4, 2, 0.0, 9, SynthKind::binary_gaussian};
  const Dataset d = generate(s);
  std::vector<double> mean(4, 0.0);
  std::vector<double> cov(16, 0.0);
  std::size_t npos = 0;
  for (std::size_t i = 0; i < d.rows(); ++i) {
    std::vector<double> x(4, 0.0);
    const auto row = d.row(i);
    for (std::size_t k = 0; k < row.nnz(); ++k) x[row.index[k]] = row.value[k];
    const double y = d.label(i);
    if (y > 0) {
      ++npos;
      for (int j = 0; j < 4; ++j) mean[j] += x[j];
    }
    // Centre each sample on its class mean +-mu before accumulating.
    for (int j = 0; j < 2; ++j) x[j] -= y;
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) cov[a * 4 + b] += x[a] * x[b];
    }
  }
  const std::vector<double> mu{1, 1, 0, 0};
  for (int j = 0; j < 4; ++j) EXPECT_NEAR(mean[j] / npos, mu[j], 0.02);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      EXPECT_NEAR(cov[a * 4 + b] / d.rows(), a == b ? 1.0 : 0.0, 0.02);
    }
  }
}

TEST(Synth, CorrelatedBlockMoments) {
  const SynthSpec s{100000, 3, 2, 0.8, 10, SynthKind::binary_gaussian};
  const Dataset d = generate(s);
  double c01 = 0.0, c02 = 0.0;
  for (std::size_t i = 0; i < d.rows(); ++i) {
    std::vector<double> x(3, 0.0);
    const auto row = d.row(i);
    for (std::size_t k = 0; k < row.nnz(); ++k) x[row.index[k]] = row.value[k];
    const double y = d.label(i);
    c01 += (x[0] - y) * (x[1] - y);
    c02 += (x[0] - y) * x[2];
  }
  EXPECT_NEAR(c01 / d.rows(), 0.8, 0.02);
  EXPECT_NEAR(c02 / d.rows(), 0.0, 0.02);
}

TEST(Synth, CholeskyOfCovariances) {
  for (double rho : {0.0, 0.5, 0.99}) {
    const Matrix S = binary_covariance({10, 6, 4, rho, 1, SynthKind::binary_gaussian});
    const Matrix C = cholesky(S);
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        double v = 0.0;
        for (int k = 0; k < 6; ++k) v += C(i, k) * C(j, k);
        EXPECT_NEAR(v, S(i, j), 1e-12);
      }
    }
  }
  Matrix bad(2, 2, 1.0);
  EXPECT_THROW(cholesky(bad), DomainError);
}

TEST(Standardize, TrainColumnsAreUnitScale) {
  std::mt19937_64 rng(6);
  auto train = testing_support::random_binary(rng, 30, 5, 0.2);
  auto test = testing_support::random_binary(rng, 10, 5, 0.2);
  const auto out = standardize(train.data, test.data);
  for (std::size_t g = 0; g < 5; ++g) {
    double m = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < 30; ++i) {
      std::vector<double> x(5, 0.0);
      const auto row = out.train.row(i);
      for (std::size_t k = 0; k < row.nnz(); ++k) x[row.index[k]] = row.value[k];
      m += x[g];
      ss += x[g] * x[g];
    }
    m /= 30;
    EXPECT_NEAR(m, 0.0, 1e-12);
    EXPECT_NEAR(std::sqrt((ss - 30 * m * m) / 29), 1.0, 1e-12);
    EXPECT_NE(out.stats.mean[g], 0.0);
  }
  // The test set uses training statistics.
  const auto row = out.test.row(0);
  double x0 = 0.0;
  for (std::size_t k = 0; k < row.nnz(); ++k) {
    if (row.index[k] == 0) x0 = row.value[k];
  }
  EXPECT_NEAR(x0, (test.dense.X[0][0] - out.stats.mean[0]) / out.stats.stddev[0], 1e-12);

  const auto again = standardize(out.train, out.train);
  for (std::size_t i = 0; i < 30; ++i) {
    const auto a = again.train.row(i);
    const auto b = out.train.row(i);
    ASSERT_EQ(a.nnz(), b.nnz());
    for (std::size_t k = 0; k < a.nnz(); ++k) EXPECT_NEAR(a.value[k], b.value[k], 1e-10);
  }
}

TEST(Standardize, ConstantColumnIsFlagged) {
  Dataset::Builder b;
  const std::vector<double> r0{1.0, 3.0}, r1{2.0, 3.0}, r2{4.0, 3.0};
  b.add_dense_row(1, r0).add_dense_row(-1, r1).add_dense_row(1, r2);
  const Dataset d = std::move(b).build();
  const auto out = standardize(d, d);
  EXPECT_TRUE(out.stats.constant[1]);
  EXPECT_FALSE(out.stats.constant[0]);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto row = out.train.row(i);
    for (std::size_t k = 0; k < row.nnz(); ++k) {
      if (row.index[k] == 1) {
        EXPECT_EQ(row.value[k], 0.0);
      }
    }
  }
}

TEST(GeneRank, HandComputedRatio) {
  Dataset::Builder b;
  b.kind(LabelKind::multiclass, 2);
  const double xs[] = {0, 2, 1, 3};
  const int ys[] = {1, 1, 2, 2};
  for (int i = 0; i < 4; ++i) {
    const std::vector<double> x{xs[i]};
    b.add_dense_row(ys[i], x);
  }
  const auto r = gene_rank(std::move(b).build());
  ASSERT_EQ(r.size(), 1u);
  EXPECT_NEAR(r[0], 0.25, 1e-15);
}

TEST(GeneRank, PerfectFeatureRanksFirst) {
  Dataset::Builder b;
  b.kind(LabelKind::multiclass, 2);
  const std::vector<std::vector<double>> rows{{1.0, 0.3}, {1.0, -0.2}, {5.0, 0.1}, {5.0, 0.4}};
  const int ys[] = {1, 1, 2, 2};
  for (int i = 0; i < 4; ++i) b.add_dense_row(ys[i], rows[i]);
  const auto r = gene_rank(std::move(b).build());
  EXPECT_TRUE(std::isinf(r[0]));
  EXPECT_EQ(select_top_features(r, 1), (std::vector<FeatureIndex>{0}));
}

TEST(GeneRank, DegenerateDenominatorsNeedGuard) {
  Dataset::Builder b;
  b.kind(LabelKind::multiclass, 2);
  const std::vector<double> x0{1.0}, x1{2.0};
  b.add_dense_row(1, x0).add_dense_row(2, x1);
  const Dataset d = std::move(b).build();
  EXPECT_THROW(gene_rank(d), DomainError);
  const auto r = gene_rank(d, {1e-6});
  EXPECT_TRUE(std::isfinite(r[0]));
}

TEST(GeneRank, NoiseFeatureScoresNearNull) {
  // Under the null, between SS / within SS ~ (J - 1) / (n - J).
  std::mt19937_64 rng(77);
  std::normal_distribution<double> normal;
  Dataset::Builder b;
  b.kind(LabelKind::multiclass, 3);
  const int n = 30000;
  for (int i = 0; i < n; ++i) {
    const int y = i % 3 + 1;
    const std::vector<double> x{normal(rng), normal(rng) + (y == 2 ? 1.0 : 0.0)};
    b.add_dense_row(y, x);
  }
  const auto r = gene_rank(std::move(b).build());
  EXPECT_NEAR(r[0], 2.0 / (n - 3), 5e-4);
  EXPECT_GT(r[1], 100 * r[0]);
  EXPECT_EQ(select_top_features(r, 2), (std::vector<FeatureIndex>{1, 0}));
}
