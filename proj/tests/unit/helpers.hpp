#pragma once

#include <random>
#include <vector>

#include "hsvm/dataset.hpp"
#include "oracles.hpp"

namespace testing_support {

struct RandomBinary {
  hsvm::Dataset data;
  oracle::DenseBinary dense;
};

struct RandomMulti {
  hsvm::Dataset data;
  oracle::DenseMulti dense;
};

// Dense Gaussian features with a fraction of exact zeros; labels alternate
// so both classes are present.
inline RandomBinary random_binary(std::mt19937_64& rng, std::size_t n, std::size_t p,
                                  double zero_fraction = 0.3) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  RandomBinary out;
  hsvm::Dataset::Builder b;
  b.features(p);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x(p);
    for (double& v : x) v = unit(rng) < zero_fraction ? 0.0 : normal(rng);
    const int y = i % 2 == 0 ? 1 : -1;
    b.add_dense_row(y, x);
    out.dense.X.push_back(x);
    out.dense.y.push_back(y);
  }
  out.data = std::move(b).build();
  return out;
}

inline RandomMulti random_multi(std::mt19937_64& rng, std::size_t n, std::size_t p, int J,
                                double zero_fraction = 0.3) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  RandomMulti out;
  out.dense.J = J;
  hsvm::Dataset::Builder b;
  b.features(p).kind(hsvm::LabelKind::multiclass, J);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x(p);
    for (double& v : x) v = unit(rng) < zero_fraction ? 0.0 : normal(rng);
    const int y = static_cast<int>(i % static_cast<std::size_t>(J)) + 1;
    b.add_dense_row(y, x);
    out.dense.X.push_back(x);
    out.dense.y.push_back(y);
  }
  out.data = std::move(b).build();
  return out;
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  std::vector<double> v(n);
  for (double& x : v) x = normal(rng);
  return v;
}

// Zero-sum (b; W row-major) point.
inline std::vector<double> random_feasible(std::mt19937_64& rng, std::size_t p, int J,
                                           double scale = 1.0) {
  const std::size_t Ju = static_cast<std::size_t>(J);
  auto u = random_vector(rng, Ju + p * Ju, scale);
  for (std::size_t r = 0; r <= p; ++r) {
    double* row = r == 0 ? u.data() : u.data() + Ju + (r - 1) * Ju;
    double m = 0.0;
    for (std::size_t j = 0; j < Ju; ++j) m += row[j];
    m /= J;
    for (std::size_t j = 0; j < Ju; ++j) row[j] -= m;
  }
  return u;
}

}  // namespace testing_support
