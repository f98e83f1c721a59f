#pragma once

#include <span>
#include <utility>
#include <vector>

#include "hsvm/hyperparams.hpp"

namespace hsvm {

// sign(t) * max(|t| - nu, 0).
inline double shrink(double t, double nu) {
  if (t > nu) return t - nu;
  if (t < -nu) return t + nu;
  return 0.0;
}

// Binary proximal step from the extrapolated point u_hat = (b; w):
//   b = (L b_hat - grad_b) / (L + lambda3)
//   w = S_lambda1(L w_hat - grad_w) / (L + lambda2)
// u_hat, grad and out are (b; w) flattened, length 1 + p.
void binary_prox_step(std::span<const double> u_hat, std::span<const double> grad, double L,
                      const Hyperparams& hp, std::span<double> out);

// sum_j S_lambda(z_j - sigma): derivative of the dual of
//   min 0.5 ||w - z||^2 + lambda ||w||_1  s.t. e'w = 0.
// Nonincreasing and piecewise linear in sigma with breakpoints z_j +- lambda.
double dual_residual(std::span<const double> z, double lambda, double sigma);

struct DualProxResult {
  std::vector<double> w;
  double sigma = 0.0;
  // Bracket [v_l, v_{l+1}] that contains sigma.
  std::pair<double, double> interval{0.0, 0.0};
};

// Exact minimizer of 0.5 ||w - z||^2 + lambda ||w||_1 subject to e'w = 0.
//
// Sorts the 2J breakpoints z -+ lambda, walks from the middle (l = J) toward
// the sign change of dual_residual, then solves the affine equation on that
// piece in closed form; w = S_lambda(z - sigma). When w = 0 the root set is
// the flat segment [z_max - lambda, z_min + lambda] and its midpoint is
// returned. Throws DomainError for lambda <= 0 or J < 2.
DualProxResult eq_constrained_l1_prox(std::span<const double> z, double lambda);

// Writes only w into out (row-wise multi-class step, no allocation of the
// result vector). Scratch space is reused across calls.
class EqConstrainedProx {
 public:
  double solve(std::span<const double> z, double lambda, std::span<double> w);

 private:
  std::vector<double> breakpoints_;
};

// Zero-sum intercept step: b = P bbar with P = [I; -e'] and
//   bbar = (P'P)^{-1} P' (L b_hat - grad_b) / (lambda3 + L).
void multi_b_step(std::span<const double> b_hat, std::span<const double> grad_b, double L,
                  double lambda3, std::span<double> out);
std::vector<double> multi_b_step(std::span<const double> b_hat, std::span<const double> grad_b,
                                 double L, double lambda3);

// Row-decomposed weight step. Each of the p rows of the p x J matrices
// (row-major) is solved by the zero-sum l1 prox with
//   z = (L W_hat - grad_W) / (L + lambda2),  lambda = lambda1 / (L + lambda2).
// lambda1 = 0 degenerates to projecting z onto e'w = 0.
void multi_w_step(std::span<const double> W_hat, std::span<const double> grad_W, std::size_t p,
                  std::size_t J, double L, double lambda1, double lambda2, std::span<double> out);

}  // namespace hsvm
