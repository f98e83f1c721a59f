#include "hsvm/synth.hpp"

#include <cmath>
#include <string>

#include "hsvm/error.hpp"
#include "hsvm/random.hpp"

namespace hsvm {
namespace {

// Correlated s x s block rho*11' + (1-rho)*I.
Matrix equicorrelated(std::size_t s, double rho) {
  Matrix m(s, s, rho);
  for (std::size_t i = 0; i < s; ++i) m(i, i) = 1.0;
  return m;
}

// Draws one sample: mean + N(0, Sigma) where Sigma is identity except for
// a correlated block [offset, offset + chol.rows()) with factor chol.
void draw_sample(Rng& rng, const Matrix& chol, std::size_t offset, double sign,
                 const std::vector<double>& mean, std::vector<double>& z,
                 std::vector<double>& out) {
  const std::size_t p = mean.size();
  const std::size_t s = chol.rows();
  for (std::size_t j = 0; j < p; ++j) z[j] = rng.normal();
  for (std::size_t j = 0; j < p; ++j) out[j] = sign * mean[j];
  for (std::size_t j = 0; j < p; ++j) {
    if (j < offset || j >= offset + s) out[j] += z[j];
  }
  for (std::size_t r = 0; r < s; ++r) {
    double acc = 0.0;
    const auto lrow = chol.row(r);
    for (std::size_t c = 0; c <= r; ++c) acc += lrow[c] * z[offset + c];
    out[offset + r] += acc;
  }
}

Dataset::Builder dense_builder(const SynthSpec& spec) {
  Dataset::Builder b;
  b.reserve(spec.n, spec.n * spec.p).features(spec.p);
  return b;
}

void add_full_row(Dataset::Builder& b, int label, const std::vector<double>& x) {
  // Every coordinate is stored, exact zeros included, so rows are dense.
  std::vector<FeatureIndex> idx(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) idx[j] = static_cast<FeatureIndex>(j);
  b.add_row(label, idx, x);
}

std::vector<FeatureIndex> leading_support(std::size_t count) {
  std::vector<FeatureIndex> out(count);
  for (std::size_t j = 0; j < count; ++j) out[j] = static_cast<FeatureIndex>(j);
  return out;
}

}  // namespace

void SynthSpec::validate() const {
  if (!(rho >= 0.0 && rho < 1.0)) throw DomainError("rho must lie in [0, 1)");
  if (p == 0 || n == 0) throw DomainError("n and p must be positive");
  if (kind == SynthKind::binary_gaussian) {
    if (s > p) throw DomainError("s must not exceed p");
    if (n % 2 != 0) throw DomainError("binary generator needs an even n");
  } else {
    if (s % 2 != 0) throw DomainError("four-class generator needs an even s");
    if (3 * s / 2 > p) throw DomainError("four-class generator needs 3s/2 <= p");
    if (n % 4 != 0) throw DomainError("four-class generator needs n divisible by 4");
  }
}

Matrix cholesky(const Matrix& a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw ShapeError("cholesky needs a square matrix");
  Matrix l(n, n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) throw DomainError("matrix is not positive definite");
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = a(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / l(j, j);
    }
  }
  return l;
}

std::vector<double> binary_mean(const SynthSpec& spec) {
  std::vector<double> mu(spec.p, 0.0);
  for (std::size_t j = 0; j < spec.s; ++j) mu[j] = 1.0;
  return mu;
}

Matrix binary_covariance(const SynthSpec& spec) {
  Matrix sigma(spec.p, spec.p, 0.0);
  for (std::size_t j = 0; j < spec.p; ++j) sigma(j, j) = 1.0;
  for (std::size_t i = 0; i < spec.s; ++i) {
    for (std::size_t j = 0; j < spec.s; ++j) {
      if (i != j) sigma(i, j) = spec.rho;
    }
  }
  return sigma;
}

std::vector<double> fourclass_mean(const SynthSpec& spec, int cls) {
  if (cls < 1 || cls > 4) throw DomainError("four-class generator has classes 1..4");
  std::vector<double> mu(spec.p, 0.0);
  const std::size_t offset = cls <= 2 ? 0 : spec.s / 2;
  const double sign = (cls % 2 == 1) ? 1.0 : -1.0;
  for (std::size_t j = 0; j < spec.s; ++j) mu[offset + j] = sign;
  return mu;
}

Matrix fourclass_covariance(const SynthSpec& spec, int cls) {
  if (cls < 1 || cls > 4) throw DomainError("four-class generator has classes 1..4");
  const std::size_t offset = cls <= 2 ? 0 : spec.s / 2;
  Matrix sigma(spec.p, spec.p, 0.0);
  for (std::size_t j = 0; j < spec.p; ++j) sigma(j, j) = 1.0;
  for (std::size_t i = 0; i < spec.s; ++i) {
    for (std::size_t j = 0; j < spec.s; ++j) {
      if (i != j) sigma(offset + i, offset + j) = spec.rho;
    }
  }
  return sigma;
}

Dataset gen_binary_gaussian(const SynthSpec& spec) {
  if (spec.kind != SynthKind::binary_gaussian) throw DomainError("spec kind is not binary_gaussian");
  spec.validate();
  Rng rng(spec.seed);
  const Matrix chol = cholesky(equicorrelated(spec.s, spec.rho));
  const auto mu = binary_mean(spec);
  std::vector<double> z(spec.p), x(spec.p);
  auto builder = dense_builder(spec);
  builder.kind(LabelKind::binary, 2);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const bool positive = i < spec.n / 2;
    draw_sample(rng, chol, 0, positive ? 1.0 : -1.0, mu, z, x);
    add_full_row(builder, positive ? 1 : -1, x);
  }
  return std::move(builder).build().with_true_support(leading_support(spec.s));
}

Dataset gen_fourclass(const SynthSpec& spec) {
  if (spec.kind != SynthKind::four_class) throw DomainError("spec kind is not four_class");
  spec.validate();
  Rng rng(spec.seed);
  const Matrix chol = cholesky(equicorrelated(spec.s, spec.rho));
  const std::vector<double> mu1 = fourclass_mean(spec, 1);
  const std::vector<double> mu3 = fourclass_mean(spec, 3);
  std::vector<double> z(spec.p), x(spec.p);
  auto builder = dense_builder(spec);
  builder.kind(LabelKind::multiclass, 4);
  const std::size_t per_class = spec.n / 4;
  for (int cls = 1; cls <= 4; ++cls) {
    const bool first_pair = cls <= 2;
    const double sign = (cls % 2 == 1) ? 1.0 : -1.0;
    for (std::size_t i = 0; i < per_class; ++i) {
      draw_sample(rng, chol, first_pair ? 0 : spec.s / 2, sign, first_pair ? mu1 : mu3, z, x);
      add_full_row(builder, cls, x);
    }
  }
  return std::move(builder).build().with_true_support(leading_support(3 * spec.s / 2));
}

Dataset generate(const SynthSpec& spec) {
  return spec.kind == SynthKind::binary_gaussian ? gen_binary_gaussian(spec) : gen_fourclass(spec);
}

Dataset generate_test(const SynthSpec& spec, std::size_t n_test) {
  SynthSpec test = spec;
  test.n = n_test;
  test.seed = derive_seed(spec.seed, 1);
  return generate(test);
}

}  // namespace hsvm
