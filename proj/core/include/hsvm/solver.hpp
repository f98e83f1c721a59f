#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "hsvm/dataset.hpp"
#include "hsvm/hyperparams.hpp"
#include "hsvm/model.hpp"

namespace hsvm {

enum class Extrapolation {
  // omega = min((t_{k-1} - 1) / t_k, sqrt(L_{k-1} / L_k)) with the FISTA t recursion.
  fista_capped,
  none,
};

struct IterationRecord {
  int k = 0;
  double objective = 0.0;
  double L = 0.0;
  double omega = 0.0;
  // ||u^k - u^{k-1}||
  double step = 0.0;
  bool restarted = false;
  std::size_t nnz = 0;
  // Full data products computed this iteration (one per line-search trial).
  int products = 0;
  int trials = 0;
  // f(u_hat) + <grad, u - u_hat> + L/2 ||u - u_hat||^2 - f(u) at the accepted point.
  double decrease_gap = 0.0;
  int stage = 0;
};

struct SolverTrace {
  std::vector<IterationRecord> records;
  // Index of the first record of the second stage (two-stage runs only).
  std::optional<std::size_t> stage_boundary;
};

// Called after every iteration with the new iterate, flattened as (b; w)
// for binary models and (b; W row-major) for multi-class models, and its
// cached data products.
using IterationObserver = std::function<void(const IterationRecord& record,
                                             std::span<const double> iterate,
                                             std::span<const double> margins)>;

struct SolverOptions {
  double eta = 1.5;
  // Defaults to 2 L_f / n (binary) or L_m / (n J) (multi-class).
  std::optional<double> L0;
  double tol = 1e-6;
  int max_iter = 5000;
  Extrapolation extrapolation = Extrapolation::fista_capped;
  bool monotone = true;
  // When false, L_k is fixed to the global Lipschitz constant.
  bool backtracking = true;
  int consec_stop = 3;
  double stage1_tol = 1e-3;
  int support_stable_iters = 3;
  IterationObserver observer;

  // Throws DomainError on invalid settings.
  void validate() const;
};

template <class Model>
struct FitResult {
  Model model;
  SolverTrace trace;
  int iterations = 0;
  bool converged = false;
  double final_objective = 0.0;
  long long products = 0;
  // Two-stage only: stage 1 did not stabilize and a plain solve was used.
  bool fell_back = false;
  // Two-stage only: features kept in the reduced problem.
  std::vector<FeatureIndex> support;
};

using BinaryFit = FitResult<BinaryModel>;
using MultiFit = FitResult<MultiModel>;

// min((t_prev - 1) / t_curr, sqrt(L_prev / L_curr)).
double extrapolation_weight(double t_prev, double t_curr, double L_prev, double L_curr);
// t_k = (1 + sqrt(1 + 4 t_{k-1}^2)) / 2.
double next_fista_t(double t);

struct StopState {
  bool stop = false;
  int counter = 0;
};

// Counts consecutive iterations with both
//   (F_prev - F_curr) / (1 + F_prev) <= tol  and
//   ||u_prev - u_curr|| / (1 + ||u_prev||) <= tol;
// any violation resets the counter. stop is set once counter reaches consec_stop.
StopState check_stop(double F_prev, double F_curr, std::span<const double> u_prev,
                     std::span<const double> u_curr, double tol, int counter, int consec_stop = 3);

// Returns the common pattern when the last stable_iters patterns are identical.
std::optional<std::vector<FeatureIndex>> detect_support(
    std::span<const std::vector<FeatureIndex>> recent_patterns, int stable_iters);

struct LineSearchResult {
  double L = 0.0;
  std::vector<double> candidate;  // (b; w)
  int trials = 0;
  double decrease_gap = 0.0;
};

// Backtracking for the binary problem from a fixed extrapolated point
// u_hat = (b; w): L starts at L_prev and grows by eta (capped at L_global)
// until the prox candidate satisfies the sufficient-decrease inequality.
// L_global always passes, so the search terminates.
LineSearchResult line_search(const Dataset& data, const Hyperparams& hp,
                             std::span<const double> u_hat, double L_prev, double L_global,
                             double eta = 1.5);

// B-PGH. Starts from zero unless a start point is given.
BinaryFit fit_binary(const Dataset& data, const Hyperparams& hp, const SolverOptions& opts = {},
                     const std::optional<BinaryModel>& start = std::nullopt);

// B-PGH-2: stage 1 runs with L_k = L_f, omega = 0 and stage1_tol until the
// stopping rule holds and the support has been identical for
// support_stable_iters iterations; stage 2 solves the problem restricted to
// that support at full tolerance. The embedded solution is then checked
// against the optimality condition |grad_i f| <= lambda1 on the frozen
// coordinates, and violators are added back before re-solving.
BinaryFit fit_binary_two_stage(const Dataset& data, const Hyperparams& hp,
                               const SolverOptions& opts = {});

// M-PGH. Iterates stay feasible (We = 0, e'b = 0).
MultiFit fit_multi(const Dataset& data, const Hyperparams& hp, const SolverOptions& opts = {},
                   const std::optional<MultiModel>& start = std::nullopt);

enum class AblationSetting {
  // Backtracking, monotone restarts, capped FISTA weights.
  ours,
  // L_k = L_f throughout, no restarts.
  fixed_L_no_monotone,
  // Backtracking, no restarts.
  backtrack_no_monotone,
};

BinaryFit ablation_run(const Dataset& data, const Hyperparams& hp, AblationSetting setting,
                       const SolverOptions& base = {});

}  // namespace hsvm
