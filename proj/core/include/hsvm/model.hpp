#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hsvm/dataset.hpp"
#include "hsvm/hyperparams.hpp"
#include "hsvm/matrix.hpp"

namespace hsvm {

// Hyperplane w'x + b = 0.
struct BinaryModel {
  double b = 0.0;
  std::vector<double> w;

  BinaryModel() = default;
  explicit BinaryModel(std::size_t p) : w(p, 0.0) {}

  std::size_t features() const noexcept { return w.size(); }
  double score(const SparseRow& x) const;

  bool operator==(const BinaryModel&) const = default;
};

// Class scores b_j + x'w_j with W stored p x J. Feasible models satisfy
// We = 0 and e'b = 0.
struct MultiModel {
  std::vector<double> b;
  Matrix W;

  MultiModel() = default;
  MultiModel(std::size_t p, int classes)
      : b(static_cast<std::size_t>(classes), 0.0), W(p, static_cast<std::size_t>(classes), 0.0) {}

  std::size_t features() const noexcept { return W.rows(); }
  int classes() const noexcept { return static_cast<int>(b.size()); }

  // max_i |sum_j W_ij| and |sum_j b_j|.
  double row_sum_residual() const;
  double intercept_sum_residual() const;
  // Throws ConstraintError when either residual exceeds tol.
  void require_feasible(double tol = 1e-8) const;

  bool operator==(const MultiModel&) const = default;
};

using AnyModel = std::variant<BinaryModel, MultiModel>;

// +1 when w'x + b >= 0 (ties go to +1), else -1.
int predict_binary(const BinaryModel& model, const SparseRow& x);
// argmin_j (b_j + x'w_j): the loss charges every wrong class j for a score
// below 1, so the true class is the one with the smallest score. Ties go to
// the smallest class index. Returns 1..J.
int predict_multi(const MultiModel& model, const SparseRow& x);
std::vector<int> predict(const AnyModel& model, const Dataset& data);

struct Metrics {
  double accuracy = 0.0;
  std::size_t correct = 0;
  std::size_t total = 0;
  // Selected relevant / noise variables; set only when a true support is known.
  std::optional<std::size_t> n_true;
  std::optional<std::size_t> n_false;
  // Exactly nonzero weights (NZ).
  std::size_t nnz = 0;
  // Rows of W with any nonzero (NR); equals nnz for binary models.
  std::size_t nnz_rows = 0;
  // True-support rows of W that are entirely zero (IZ), multi-class only.
  std::optional<std::size_t> incorrect_zeros;
  // Nonzeros per class column (multi-class only).
  std::vector<std::size_t> nnz_per_class;
};

// Accuracy on labelled test data plus sparsity counts. A support passed in
// overrides test.true_support().
Metrics evaluate(const AnyModel& model, const Dataset& test,
                 const std::optional<std::vector<FeatureIndex>>& true_support = std::nullopt);

// Text persistence:
//   HSVM <binary|multi> p=<p> J=<J>
//   hyper lambda1=<v> lambda2=<v> lambda3=<v> delta=<v>
//   b <v> [<v> ...]
//   w <row> [<col>] <v>     one line per nonzero weight, 1-based indices
//   end
// Values carry 17 significant digits.
struct SavedModel {
  AnyModel model;
  Hyperparams hyper;
};

void save_model(std::ostream& out, const AnyModel& model, const Hyperparams& hyper);
void save_model_file(const std::string& path, const AnyModel& model, const Hyperparams& hyper);
// Throws FormatError on any malformed or truncated input; multi-class
// models are re-validated against the zero-sum constraints.
SavedModel load_model(std::istream& in);
SavedModel load_model_file(const std::string& path);

}  // namespace hsvm
