#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hsvm/dataset.hpp"
#include "hsvm/matrix.hpp"

namespace hsvm {

enum class SynthKind { binary_gaussian, four_class };

// Synthetic benchmark description.
//
// binary_gaussian: n/2 samples from N(mu, Sigma) labeled +1 and n/2 from
// N(-mu, Sigma) labeled -1, mu = (1_s, 0_{p-s}), Sigma block-diagonal with
// rho*11' + (1-rho)*I on the leading s x s block.
//
// four_class: n/4 samples per class from N(mu_j, Sigma_j) with
// mu_2 = -mu_1, mu_4 = -mu_3, Sigma_2 = Sigma_1, Sigma_4 = Sigma_3; mu_1 has
// s leading ones, mu_3 has s ones starting at s/2, and Sigma_3 carries its
// correlated block at the same offset.
struct SynthSpec {
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t s = 0;
  double rho = 0.0;
  std::uint64_t seed = 0;
  SynthKind kind = SynthKind::binary_gaussian;

  // Throws DomainError on constraint violations.
  void validate() const;
};

Dataset gen_binary_gaussian(const SynthSpec& spec);
Dataset gen_fourclass(const SynthSpec& spec);
// Dispatches on spec.kind.
Dataset generate(const SynthSpec& spec);

// Held-out set drawn from the same distribution with an independent stream
// derived from spec.seed.
Dataset generate_test(const SynthSpec& spec, std::size_t n_test);

// Dense class means / covariances (p x p), for inspection and tests.
std::vector<double> binary_mean(const SynthSpec& spec);
Matrix binary_covariance(const SynthSpec& spec);
std::vector<double> fourclass_mean(const SynthSpec& spec, int cls);
Matrix fourclass_covariance(const SynthSpec& spec, int cls);

// Lower Cholesky factor of a symmetric positive definite matrix.
// Throws DomainError if the matrix is not positive definite.
Matrix cholesky(const Matrix& spd);

}  // namespace hsvm
