#include "hsvm/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hsvm/error.hpp"

namespace hsvm {
namespace {

std::vector<double> dense_row(const SparseRow& x, std::size_t p) {
  std::vector<double> out(p, 0.0);
  for (std::size_t k = 0; k < x.nnz(); ++k) out[x.index[k]] = x.value[k];
  return out;
}

}  // namespace

FeatureStats feature_stats(const Dataset& data) {
  const std::size_t n = data.rows();
  const std::size_t p = data.features();
  if (n == 0) throw DomainError("cannot standardize an empty dataset");
  FeatureStats stats{std::vector<double>(p, 0.0), std::vector<double>(p, 0.0),
                     std::vector<bool>(p, false)};
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = data.row(i);
    for (std::size_t k = 0; k < x.nnz(); ++k) stats.mean[x.index[k]] += x.value[k];
  }
  for (double& m : stats.mean) m /= static_cast<double>(n);

  // Two-pass variance; implicit zeros contribute mean^2 each.
  std::vector<double> ss(p, 0.0);
  std::vector<std::size_t> explicit_count(p, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = data.row(i);
    for (std::size_t k = 0; k < x.nnz(); ++k) {
      const double d = x.value[k] - stats.mean[x.index[k]];
      ss[x.index[k]] += d * d;
      ++explicit_count[x.index[k]];
    }
  }
  for (std::size_t g = 0; g < p; ++g) {
    ss[g] += static_cast<double>(n - explicit_count[g]) * stats.mean[g] * stats.mean[g];
    const double var = n > 1 ? ss[g] / static_cast<double>(n - 1) : 0.0;
    stats.stddev[g] = std::sqrt(var);
    stats.constant[g] = !(stats.stddev[g] > 0.0);
  }
  return stats;
}

Dataset apply_standardization(const Dataset& data, const FeatureStats& stats) {
  const std::size_t p = stats.mean.size();
  if (data.features() > p) throw ShapeError("dataset has more features than the statistics");
  Dataset::Builder builder;
  builder.reserve(data.rows(), data.rows() * p).features(p);
  builder.kind(data.kind(), data.classes());
  if (!data.has_labels()) builder.unlabeled();
  std::vector<FeatureIndex> idx(p);
  std::iota(idx.begin(), idx.end(), FeatureIndex{0});
  for (std::size_t i = 0; i < data.rows(); ++i) {
    auto x = dense_row(data.row(i), p);
    for (std::size_t g = 0; g < p; ++g) {
      x[g] = stats.constant[g] ? 0.0 : (x[g] - stats.mean[g]) / stats.stddev[g];
    }
    builder.add_row(data.has_labels() ? data.label(i) : 0, idx, x);
  }
  auto out = std::move(builder).build();
  if (data.true_support()) out = out.with_true_support(*data.true_support());
  return out;
}

Standardized standardize(const Dataset& train, const Dataset& test) {
  auto stats = feature_stats(train);
  auto train_out = apply_standardization(train, stats);
  auto test_out = apply_standardization(test.features() < train.features()
                                            ? test.with_features(train.features())
                                            : test,
                                        stats);
  return {std::move(train_out), std::move(test_out), std::move(stats)};
}

std::vector<double> gene_rank(const Dataset& data, const GeneRankOptions& options) {
  data.require_multiclass();
  const std::size_t n = data.rows();
  const std::size_t p = data.features();
  const int classes = data.classes();
  if (n == 0) throw DomainError("gene ranking needs samples");

  std::vector<double> class_count(static_cast<std::size_t>(classes), 0.0);
  std::vector<double> class_sum(static_cast<std::size_t>(classes) * p, 0.0);
  std::vector<double> total(p, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(data.label(i) - 1);
    class_count[c] += 1.0;
    const auto x = data.row(i);
    for (std::size_t k = 0; k < x.nnz(); ++k) {
      class_sum[c * p + x.index[k]] += x.value[k];
      total[x.index[k]] += x.value[k];
    }
  }

  std::vector<double> numerator(p, 0.0);
  std::vector<double> class_mean(class_sum.size(), 0.0);
  for (std::size_t g = 0; g < p; ++g) {
    const double overall = total[g] / static_cast<double>(n);
    for (std::size_t c = 0; c < class_count.size(); ++c) {
      if (class_count[c] == 0.0) continue;
      const double m = class_sum[c * p + g] / class_count[c];
      class_mean[c * p + g] = m;
      numerator[g] += class_count[c] * (m - overall) * (m - overall);
    }
  }

  std::vector<double> denominator(p, 0.0);
  std::vector<double> dense(p);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(data.label(i) - 1);
    std::fill(dense.begin(), dense.end(), 0.0);
    const auto x = data.row(i);
    for (std::size_t k = 0; k < x.nnz(); ++k) dense[x.index[k]] = x.value[k];
    for (std::size_t g = 0; g < p; ++g) {
      const double d = dense[g] - class_mean[c * p + g];
      denominator[g] += d * d;
    }
  }

  if (options.epsilon <= 0.0 &&
      std::all_of(denominator.begin(), denominator.end(), [](double d) { return d == 0.0; })) {
    throw DomainError("every feature has zero within-class scatter; set an epsilon guard");
  }

  std::vector<double> scores(p, 0.0);
  for (std::size_t g = 0; g < p; ++g) {
    const double den = denominator[g] + std::max(options.epsilon, 0.0);
    if (den > 0.0) {
      scores[g] = numerator[g] / den;
    } else {
      scores[g] = numerator[g] > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
  }
  return scores;
}

std::vector<FeatureIndex> select_top_features(const std::vector<double>& scores, std::size_t k) {
  std::vector<FeatureIndex> order(scores.size());
  std::iota(order.begin(), order.end(), FeatureIndex{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](FeatureIndex a, FeatureIndex b) { return scores[a] > scores[b]; });
  order.resize(std::min(k, order.size()));
  return order;
}

}  // namespace hsvm
