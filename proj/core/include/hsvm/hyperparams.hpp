#pragma once

namespace hsvm {

// Objective weights: lambda1 on ||w||_1, lambda2/2 on ||w||^2 (Frobenius
// for W), lambda3/2 on the intercept(s), and the huberization width delta.
// Linear convergence needs lambda2 > 0 and lambda3 > 0.
struct Hyperparams {
  double lambda1 = 0.0;
  double lambda2 = 1.0;
  double lambda3 = 1.0;
  double delta = 1.0;

  // Throws DomainError unless delta > 0 and every lambda >= 0 (all finite).
  void validate() const;

  bool operator==(const Hyperparams&) const = default;
};

}  // namespace hsvm
