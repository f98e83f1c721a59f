#include "hsvm/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "hsvm/error.hpp"
#include "hsvm/libsvm.hpp"
#include "hsvm/model.hpp"
#include "hsvm/parallel.hpp"
#include "hsvm/random.hpp"

namespace hsvm {

std::vector<double> logspace(double lo, double hi, int count) {
  if (count < 1) throw DomainError("logspace: count must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double e = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
    out[static_cast<std::size_t>(i)] = std::pow(10.0, e);
  }
  return out;
}

void Grid::validate() const {
  auto check = [](const std::vector<double>& v, const char* name) {
    if (v.empty()) throw DomainError(std::string("grid: ") + name + " is empty");
    for (double x : v) {
      if (!(x > 0.0) || !std::isfinite(x)) {
        throw DomainError(std::string("grid: ") + name + " values must be positive");
      }
    }
  };
  check(lambda1_values, "lambda1");
  check(lambda2_values, "lambda2");
  if (lambda3 && !(*lambda3 >= 0.0 && std::isfinite(*lambda3))) {
    throw DomainError("grid: lambda3 must be >= 0");
  }
  if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("grid: delta must be positive");
  if (folds < 2) throw DomainError("grid: folds must be >= 2");
}

Hyperparams Grid::at(double lambda1, double lambda2) const {
  Hyperparams hp;
  hp.lambda1 = lambda1;
  hp.lambda2 = lambda2;
  hp.lambda3 = lambda3.value_or(lambda2);
  hp.delta = delta;
  return hp;
}

std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, int k, std::span<const int> labels,
                                                  std::uint64_t seed) {
  if (k < 1 || static_cast<std::size_t>(k) > n) throw DomainError("kfold_split: need 1 <= k <= n");
  if (labels.size() != n) throw ShapeError("kfold_split: labels length differs from n");

  std::map<int, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < n; ++i) by_label[labels[i]].push_back(i);

  Rng rng(seed);
  std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
  std::size_t slot = 0;
  for (auto& [label, idx] : by_label) {
    for (std::size_t i = idx.size(); i > 1; --i) {
      std::swap(idx[i - 1], idx[rng.below(i)]);
    }
    for (std::size_t i : idx) {
      folds[slot].push_back(i);
      slot = (slot + 1) % folds.size();
    }
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

double fit_and_score(const Dataset& train, const Dataset& eval, const Hyperparams& hp,
                     SolverChoice solver, const SolverOptions& opts) {
  AnyModel model;
  switch (solver) {
    case SolverChoice::bpgh:
      model = fit_binary(train, hp, opts).model;
      break;
    case SolverChoice::bpgh2:
      model = fit_binary_two_stage(train, hp, opts).model;
      break;
    case SolverChoice::mpgh:
      model = fit_multi(train, hp, opts).model;
      break;
  }
  return evaluate(model, eval).accuracy;
}

namespace {

struct Task {
  std::size_t point = 0;
  int fold = 0;
};

GridResult select_best(const Grid& grid, std::vector<CvRow> rows, int folds) {
  GridResult result;
  result.table = std::move(rows);
  const std::size_t n2 = grid.lambda2_values.size();
  const std::size_t points = grid.lambda1_values.size() * n2;
  result.points.resize(points);
  for (std::size_t pt = 0; pt < points; ++pt) {
    CvPoint& cp = result.points[pt];
    cp.lambda1 = grid.lambda1_values[pt / n2];
    cp.lambda2 = grid.lambda2_values[pt % n2];
    double sum = 0.0;
    for (int f = 0; f < folds; ++f) sum += result.table[pt * folds + f].accuracy;
    cp.mean_accuracy = sum / folds;
  }
  const CvPoint* best = &result.points.front();
  for (const CvPoint& cp : result.points) {
    if (cp.mean_accuracy > best->mean_accuracy ||
        (cp.mean_accuracy == best->mean_accuracy &&
         (cp.lambda1 > best->lambda1 ||
          (cp.lambda1 == best->lambda1 && cp.lambda2 > best->lambda2)))) {
      best = &cp;
    }
  }
  result.best_lambda1 = best->lambda1;
  result.best_lambda2 = best->lambda2;
  result.best_score = best->mean_accuracy;
  return result;
}

CvRow score_point(const Grid& grid, std::size_t pt, int fold, const Dataset& train,
                  const Dataset& eval, SolverChoice solver, const SolverOptions& opts) {
  const std::size_t n2 = grid.lambda2_values.size();
  CvRow row;
  row.lambda1 = grid.lambda1_values[pt / n2];
  row.lambda2 = grid.lambda2_values[pt % n2];
  row.fold = fold;
  try {
    row.accuracy = fit_and_score(train, eval, grid.at(row.lambda1, row.lambda2), solver, opts);
  } catch (const Error&) {
    row.accuracy = 0.0;
    row.failed = true;
  }
  return row;
}

}  // namespace

GridResult grid_search(const Dataset& data, const Grid& grid, SolverChoice solver,
                       std::uint64_t seed, const SolverOptions& opts) {
  grid.validate();
  if (static_cast<std::size_t>(grid.folds) > data.rows()) {
    throw DomainError("grid_search: more folds than samples");
  }
  const auto folds = kfold_split(data.rows(), grid.folds, data.labels(), seed);
  std::vector<Dataset> train_sets, valid_sets;
  for (int f = 0; f < grid.folds; ++f) {
    std::vector<std::size_t> train_idx;
    for (int g = 0; g < grid.folds; ++g) {
      if (g == f) continue;
      train_idx.insert(train_idx.end(), folds[g].begin(), folds[g].end());
    }
    std::sort(train_idx.begin(), train_idx.end());
    train_sets.push_back(data.subset(train_idx));
    valid_sets.push_back(data.subset(folds[f]));
  }

  const std::size_t points = grid.lambda1_values.size() * grid.lambda2_values.size();
  const std::size_t tasks = points * static_cast<std::size_t>(grid.folds);
  std::vector<CvRow> rows(tasks);
  SolverOptions local = opts;
  local.observer = nullptr;
  parallel_for(tasks, [&](std::size_t i) {
    const std::size_t pt = i / grid.folds;
    const int f = static_cast<int>(i % grid.folds);
    rows[i] = score_point(grid, pt, f, train_sets[f], valid_sets[f], solver, local);
  });
  return select_best(grid, std::move(rows), grid.folds);
}

GridResult holdout_search(const Dataset& train, const Dataset& valid, const Grid& grid,
                          SolverChoice solver, const SolverOptions& opts) {
  Grid g = grid;
  g.folds = 2;
  g.validate();
  const std::size_t points = grid.lambda1_values.size() * grid.lambda2_values.size();
  std::vector<CvRow> rows(points);
  SolverOptions local = opts;
  local.observer = nullptr;
  parallel_for(points, [&](std::size_t pt) {
    rows[pt] = score_point(grid, pt, 0, train, valid, solver, local);
  });
  return select_best(grid, std::move(rows), 1);
}

void write_cv_table(std::ostream& out, const GridResult& result) {
  out << "lambda1,lambda2,fold,accuracy\n";
  for (const CvRow& r : result.table) {
    out << format_double(r.lambda1) << ',' << format_double(r.lambda2) << ',' << r.fold << ','
        << format_double(r.accuracy) << '\n';
  }
  for (const CvPoint& p : result.points) {
    out << format_double(p.lambda1) << ',' << format_double(p.lambda2) << ",mean,"
        << format_double(p.mean_accuracy) << '\n';
  }
  out << "best," << format_double(result.best_lambda1) << ',' << format_double(result.best_lambda2)
      << ',' << format_double(result.best_score) << '\n';
}

}  // namespace hsvm
