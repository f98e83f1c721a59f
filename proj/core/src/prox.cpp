#include "hsvm/prox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hsvm/error.hpp"

namespace hsvm {
namespace {

struct Root {
  double sigma;
  double lo;
  double hi;
};

// Root of sum_j S_lambda(z_j - sigma) by bisection on the bracket
// [z_min - lambda, z_max + lambda]. Only reached if the breakpoint walk
// leaves its index range, which valid inputs never do.
Root bisect_root(std::span<const double> z, double lambda) {
  const auto [mn, mx] = std::minmax_element(z.begin(), z.end());
  double lo = *mn - lambda;
  double hi = *mx + lambda;
  for (int it = 0; it < 200 && lo < hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (dual_residual(z, lambda, mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {0.5 * (lo + hi), lo, hi};
}

Root locate_root(std::span<const double> z, double lambda, std::vector<double>& v) {
  const std::size_t J = z.size();
  v.resize(2 * J);
  for (std::size_t j = 0; j < J; ++j) {
    v[j] = z[j] - lambda;
    v[J + j] = z[j] + lambda;
  }
  std::stable_sort(v.begin(), v.end());

  // 0-based l indexes the lower end of the bracket [v[l], v[l+1]].
  std::ptrdiff_t l = static_cast<std::ptrdiff_t>(J) - 1;
  const auto last = static_cast<std::ptrdiff_t>(2 * J) - 2;
  double g_lo = dual_residual(z, lambda, v[static_cast<std::size_t>(l)]);
  double g_hi = dual_residual(z, lambda, v[static_cast<std::size_t>(l) + 1]);
  while (g_lo * g_hi > 0.0) {
    if (g_lo > 0.0) {
      ++l;
      if (l > last) return bisect_root(z, lambda);
      g_lo = g_hi;
      g_hi = dual_residual(z, lambda, v[static_cast<std::size_t>(l) + 1]);
    } else {
      --l;
      if (l < 0) return bisect_root(z, lambda);
      g_hi = g_lo;
      g_lo = dual_residual(z, lambda, v[static_cast<std::size_t>(l)]);
    }
  }

  const double lo = v[static_cast<std::size_t>(l)];
  const double hi = v[static_cast<std::size_t>(l) + 1];
  if (g_lo == 0.0 && g_hi != 0.0) return {lo, lo, hi};
  if (g_hi == 0.0 && g_lo != 0.0) return {hi, lo, hi};

  // On (lo, hi) the active set is fixed; the residual is
  //   sum_{z_j - lambda > s} (z_j - lambda - s) + sum_{z_j + lambda < s} (z_j + lambda - s).
  const double mid = 0.5 * (lo + hi);
  double constant = 0.0;
  std::size_t active = 0;
  for (double zj : z) {
    if (zj - lambda > mid) {
      constant += zj - lambda;
      ++active;
    } else if (zj + lambda < mid) {
      constant += zj + lambda;
      ++active;
    }
  }
  if (active == 0) return {mid, lo, hi};
  const double sigma = std::clamp(constant / static_cast<double>(active), lo, hi);
  return {sigma, lo, hi};
}

double apply_root(std::span<const double> z, double lambda, Root& root, std::span<double> w) {
  bool all_zero = true;
  for (std::size_t j = 0; j < z.size(); ++j) {
    w[j] = shrink(z[j] - root.sigma, lambda);
    all_zero = all_zero && w[j] == 0.0;
  }
  if (all_zero) {
    // Flat piece of the dual: every sigma in [z_max - lambda, z_min + lambda]
    // is optimal; report its midpoint.
    const auto [mn, mx] = std::minmax_element(z.begin(), z.end());
    root = {0.5 * (*mn + *mx), *mx - lambda, *mn + lambda};
  }
  return root.sigma;
}

void check_prox_args(std::span<const double> z, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be positive");
  if (z.size() < 2) throw DomainError("zero-sum prox needs J >= 2");
}

}  // namespace

void binary_prox_step(std::span<const double> u_hat, std::span<const double> grad, double L,
                      const Hyperparams& hp, std::span<double> out) {
  const std::size_t m = u_hat.size();
  if (grad.size() != m || out.size() != m || m == 0) throw ShapeError("prox step size mismatch");
  out[0] = (L * u_hat[0] - grad[0]) / (L + hp.lambda3);
  const double scale = 1.0 / (L + hp.lambda2);
  for (std::size_t j = 1; j < m; ++j) {
    out[j] = shrink(L * u_hat[j] - grad[j], hp.lambda1) * scale;
  }
}

double dual_residual(std::span<const double> z, double lambda, double sigma) {
  double acc = 0.0;
  for (double zj : z) acc += shrink(zj - sigma, lambda);
  return acc;
}

DualProxResult eq_constrained_l1_prox(std::span<const double> z, double lambda) {
  check_prox_args(z, lambda);
  std::vector<double> v;
  Root root = locate_root(z, lambda, v);
  DualProxResult result;
  result.w.resize(z.size());
  result.sigma = apply_root(z, lambda, root, result.w);
  result.interval = {root.lo, root.hi};
  return result;
}

double EqConstrainedProx::solve(std::span<const double> z, double lambda, std::span<double> w) {
  check_prox_args(z, lambda);
  if (w.size() != z.size()) throw ShapeError("prox output size mismatch");
  Root root = locate_root(z, lambda, breakpoints_);
  return apply_root(z, lambda, root, w);
}

void multi_b_step(std::span<const double> b_hat, std::span<const double> grad_b, double L,
                  double lambda3, std::span<double> out) {
  const std::size_t J = b_hat.size();
  if (J < 2 || grad_b.size() != J || out.size() != J) throw ShapeError("intercept step size mismatch");
  // c = L b_hat - grad; P'c = c_{1:J-1} - c_J e; (P'P)^{-1} = I - ee'/J.
  double ptc_sum = 0.0;
  for (std::size_t j = 0; j + 1 < J; ++j) {
    out[j] = (L * b_hat[j] - grad_b[j]) - (L * b_hat[J - 1] - grad_b[J - 1]);
    ptc_sum += out[j];
  }
  const double correction = ptc_sum / static_cast<double>(J);
  const double scale = 1.0 / (lambda3 + L);
  double bbar_sum = 0.0;
  for (std::size_t j = 0; j + 1 < J; ++j) {
    out[j] = (out[j] - correction) * scale;
    bbar_sum += out[j];
  }
  out[J - 1] = -bbar_sum;
}

std::vector<double> multi_b_step(std::span<const double> b_hat, std::span<const double> grad_b,
                                 double L, double lambda3) {
  std::vector<double> out(b_hat.size());
  multi_b_step(b_hat, grad_b, L, lambda3, out);
  return out;
}

void multi_w_step(std::span<const double> W_hat, std::span<const double> grad_W, std::size_t p,
                  std::size_t J, double L, double lambda1, double lambda2, std::span<double> out) {
  if (W_hat.size() != p * J || grad_W.size() != p * J || out.size() != p * J) {
    throw ShapeError("weight step size mismatch");
  }
  const double denom = L + lambda2;
  const double lambda = lambda1 / denom;
  std::vector<double> z(J);
  EqConstrainedProx prox;
  for (std::size_t r = 0; r < p; ++r) {
    const double* wh = W_hat.data() + r * J;
    const double* gr = grad_W.data() + r * J;
    for (std::size_t j = 0; j < J; ++j) z[j] = (L * wh[j] - gr[j]) / denom;
    std::span<double> row(out.data() + r * J, J);
    if (lambda > 0.0) {
      prox.solve(z, lambda, row);
    } else {
      double mean = 0.0;
      for (double v : z) mean += v;
      mean /= static_cast<double>(J);
      for (std::size_t j = 0; j < J; ++j) row[j] = z[j] - mean;
    }
  }
}

}  // namespace hsvm
