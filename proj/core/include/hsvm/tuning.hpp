#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "hsvm/dataset.hpp"
#include "hsvm/hyperparams.hpp"
#include "hsvm/solver.hpp"

namespace hsvm {

enum class SolverChoice { bpgh, bpgh2, mpgh };

// logspace(lo, hi, count): count points 10^lo .. 10^hi.
std::vector<double> logspace(double lo, double hi, int count);

struct Grid {
  std::vector<double> lambda1_values = logspace(-4.0, 1.0, 7);
  std::vector<double> lambda2_values = logspace(-4.0, 1.0, 7);
  // nullopt ties lambda3 to lambda2 at every grid point.
  std::optional<double> lambda3 = 1.0;
  double delta = 1.0;
  int folds = 10;

  // Throws DomainError on empty or non-positive values, or folds < 2.
  void validate() const;
  Hyperparams at(double lambda1, double lambda2) const;
};

// k disjoint index sets covering 0..n-1. Indices are shuffled per label and
// dealt round-robin, continuing across labels, so every fold gets its share
// of each class and fold sizes differ by at most one. Deterministic per seed.
// Throws DomainError for k < 1 or k > n, ShapeError if labels.size() != n.
std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, int k, std::span<const int> labels,
                                                  std::uint64_t seed);

struct CvRow {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  int fold = 0;
  double accuracy = 0.0;
  // The solver threw on this fold; accuracy is recorded as 0.
  bool failed = false;
};

struct CvPoint {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double mean_accuracy = 0.0;
};

struct GridResult {
  double best_lambda1 = 0.0;
  double best_lambda2 = 0.0;
  double best_score = 0.0;
  // One entry per grid point, lambda1-major.
  std::vector<CvPoint> points;
  // One row per (grid point, fold).
  std::vector<CvRow> table;
};

// Trains with the chosen solver and returns accuracy on `eval`.
double fit_and_score(const Dataset& train, const Dataset& eval, const Hyperparams& hp,
                     SolverChoice solver, const SolverOptions& opts = {});

// k-fold grid search. The maximizer of mean validation accuracy wins; ties
// go to the larger lambda1, then the larger lambda2.
GridResult grid_search(const Dataset& data, const Grid& grid, SolverChoice solver,
                       std::uint64_t seed, const SolverOptions& opts = {});

// Same selection rule scored on a single validation set (fold = 0 rows).
GridResult holdout_search(const Dataset& train, const Dataset& valid, const Grid& grid,
                          SolverChoice solver, const SolverOptions& opts = {});

// CSV: header lambda1,lambda2,fold,accuracy; one row per fold; then one
// "mean" row per grid point; then "best,<lambda1>,<lambda2>,<score>".
void write_cv_table(std::ostream& out, const GridResult& result);

}  // namespace hsvm
