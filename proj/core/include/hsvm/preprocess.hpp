#pragma once

#include <cstddef>
#include <vector>

#include "hsvm/dataset.hpp"

namespace hsvm {

struct FeatureStats {
  std::vector<double> mean;
  // Sample standard deviation (n-1 denominator).
  std::vector<double> stddev;
  // Columns with zero spread; they map to 0 in every transformed row.
  std::vector<bool> constant;
};

struct Standardized {
  Dataset train;
  Dataset test;
  FeatureStats stats;
};

// Per-feature z-scoring with statistics taken from the training set only;
// the same transform is applied to the test set. Implicit zeros of sparse
// rows count as values. Outputs are stored densely.
Standardized standardize(const Dataset& train, const Dataset& test);
FeatureStats feature_stats(const Dataset& data);
Dataset apply_standardization(const Dataset& data, const FeatureStats& stats);

struct GeneRankOptions {
  // Added to every within-class denominator when > 0.
  double epsilon = 0.0;
};

// Between-class over within-class sum of squares per feature:
//   R(g) = sum_j n_j (m_g^j - m_g)^2 / sum_i (x_gi - m_g^{y_i})^2.
// A zero denominator with a positive numerator scores +infinity; a feature
// that is constant everywhere scores 0. Throws DomainError when every
// denominator vanishes and no epsilon is set.
std::vector<double> gene_rank(const Dataset& data, const GeneRankOptions& options = {});

// Indices of the k highest scores, best first; ties keep the lower index.
std::vector<FeatureIndex> select_top_features(const std::vector<double>& scores, std::size_t k);

}  // namespace hsvm
