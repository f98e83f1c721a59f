#include "hsvm/loss.hpp"

#include <algorithm>
#include <cmath>

#include "hsvm/error.hpp"

namespace hsvm {

void Hyperparams::validate() const {
  if (!std::isfinite(delta) || !(delta > 0.0)) throw DomainError("delta must be positive");
  for (double l : {lambda1, lambda2, lambda3}) {
    if (!std::isfinite(l) || l < 0.0) throw DomainError("lambdas must be finite and nonnegative");
  }
}

namespace {

void check_delta(double t, double delta) {
  if (!std::isfinite(delta) || !(delta > 0.0)) throw DomainError("delta must be positive");
  if (!std::isfinite(t)) throw DomainError("loss argument must be finite");
}

// Unchecked versions for the hot loops; arguments were validated upstream.
inline double phi(double t, double delta) {
  if (t > 1.0) return 0.0;
  if (t > 1.0 - delta) return (1.0 - t) * (1.0 - t) / (2.0 * delta);
  return 1.0 - t - delta / 2.0;
}

inline double dphi(double t, double delta) {
  if (t > 1.0) return 0.0;
  if (t > 1.0 - delta) return (t - 1.0) / delta;
  return -1.0;
}

void check_dims(const Dataset& data, std::size_t p) {
  if (data.features() > p) throw ShapeError("model dimension smaller than data feature count");
}

}  // namespace

double huber_loss(double t, double delta) {
  check_delta(t, delta);
  return phi(t, delta);
}

double huber_grad(double t, double delta) {
  check_delta(t, delta);
  return dphi(t, delta);
}

MarginCache binary_margins(const BinaryModel& model, const Dataset& data) {
  data.require_binary();
  check_dims(data, model.w.size());
  MarginCache cache;
  cache.values.resize(data.rows());
  for (std::size_t i = 0; i < data.rows(); ++i) {
    cache.values[i] = data.label(i) * (model.b + data.row(i).dot(model.w));
  }
  return cache;
}

MarginCache multi_margins(const MultiModel& model, const Dataset& data) {
  data.require_multiclass();
  check_dims(data, model.W.rows());
  const std::size_t J = model.b.size();
  MarginCache cache;
  cache.values.resize(data.rows() * J);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    double* out = cache.values.data() + i * J;
    std::copy(model.b.begin(), model.b.end(), out);
    const auto x = data.row(i);
    for (std::size_t k = 0; k < x.nnz(); ++k) {
      const auto wrow = model.W.row(x.index[k]);
      for (std::size_t j = 0; j < J; ++j) out[j] += x.value[k] * wrow[j];
    }
  }
  return cache;
}

double binary_smooth(std::span<const double> margins, double delta) {
  if (margins.empty()) throw DomainError("empty dataset");
  double acc = 0.0;
  for (double m : margins) acc += phi(m, delta);
  return acc / static_cast<double>(margins.size());
}

double multi_smooth(std::span<const double> margins, std::span<const int> labels, int classes,
                    double delta) {
  const auto J = static_cast<std::size_t>(classes);
  if (labels.empty()) throw DomainError("empty dataset");
  if (margins.size() != labels.size() * J) throw StateError("margin cache has the wrong length");
  double acc = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto yi = static_cast<std::size_t>(labels[i] - 1);
    for (std::size_t j = 0; j < J; ++j) {
      if (j != yi) acc += phi(margins[i * J + j], delta);
    }
  }
  return acc / static_cast<double>(labels.size());
}

double binary_penalty(double b, std::span<const double> w, const Hyperparams& hp) {
  double l1 = 0.0, l2 = 0.0;
  for (double v : w) {
    l1 += std::fabs(v);
    l2 += v * v;
  }
  return hp.lambda1 * l1 + 0.5 * hp.lambda2 * l2 + 0.5 * hp.lambda3 * b * b;
}

double multi_penalty(std::span<const double> b, std::span<const double> w, const Hyperparams& hp) {
  double l1 = 0.0, l2 = 0.0, bb = 0.0;
  for (double v : w) {
    l1 += std::fabs(v);
    l2 += v * v;
  }
  for (double v : b) bb += v * v;
  return hp.lambda1 * l1 + 0.5 * hp.lambda2 * l2 + 0.5 * hp.lambda3 * bb;
}

BinaryObjectiveParts binary_objective(const BinaryModel& model, const Dataset& data,
                                      const Hyperparams& hp) {
  hp.validate();
  const auto margins = binary_margins(model, data);
  BinaryObjectiveParts parts;
  parts.smooth = binary_smooth(margins.values, hp.delta);
  parts.penalty = binary_penalty(model.b, model.w, hp);
  parts.total = parts.smooth + parts.penalty;
  return parts;
}

MultiObjectiveParts multi_objective(const MultiModel& model, const Dataset& data,
                                    const Hyperparams& hp) {
  hp.validate();
  model.require_feasible(1e-8);
  if (model.classes() != data.classes()) throw ShapeError("model and data class counts differ");
  const auto margins = multi_margins(model, data);
  MultiObjectiveParts parts;
  parts.smooth = multi_smooth(margins.values, data.labels(), model.classes(), hp.delta);
  parts.penalty = multi_penalty(model.b, model.W.values(), hp);
  parts.total = parts.smooth + parts.penalty;
  return parts;
}

void binary_smooth_grad_into(std::span<const double> margins, const Dataset& data, double delta,
                             std::span<double> out) {
  if (margins.size() != data.rows()) throw StateError("margin cache has the wrong length");
  if (out.size() < data.features() + 1) throw ShapeError("gradient buffer too small");
  std::fill(out.begin(), out.end(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(data.rows());
  double* gw = out.data() + 1;
  double gb = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const double d = dphi(margins[i], delta);
    if (d == 0.0) continue;
    const double coef = d * data.label(i);
    gb += coef;
    const auto x = data.row(i);
    for (std::size_t k = 0; k < x.nnz(); ++k) gw[x.index[k]] += coef * x.value[k];
  }
  out[0] = gb * inv_n;
  for (std::size_t j = 1; j < out.size(); ++j) out[j] *= inv_n;
}

BinaryGradient binary_smooth_grad(const MarginCache& margins, const Dataset& data, double delta) {
  if (!std::isfinite(delta) || !(delta > 0.0)) throw DomainError("delta must be positive");
  std::vector<double> flat(data.features() + 1, 0.0);
  binary_smooth_grad_into(margins.values, data, delta, flat);
  BinaryGradient g;
  g.b = flat[0];
  g.w.assign(flat.begin() + 1, flat.end());
  return g;
}

void multi_smooth_grad_into(std::span<const double> margins, const Dataset& data, double delta,
                            std::span<double> out) {
  const auto J = static_cast<std::size_t>(data.classes());
  if (margins.size() != data.rows() * J) throw StateError("margin cache has the wrong length");
  if (out.size() < J + data.features() * J) throw ShapeError("gradient buffer too small");
  std::fill(out.begin(), out.end(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(data.rows());
  double* gb = out.data();
  double* gW = out.data() + J;
  std::vector<double> r(J);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const auto yi = static_cast<std::size_t>(data.label(i) - 1);
    bool any = false;
    for (std::size_t j = 0; j < J; ++j) {
      r[j] = j == yi ? 0.0 : dphi(margins[i * J + j], delta);
      any = any || r[j] != 0.0;
    }
    if (!any) continue;
    for (std::size_t j = 0; j < J; ++j) gb[j] += r[j];
    const auto x = data.row(i);
    for (std::size_t k = 0; k < x.nnz(); ++k) {
      double* row = gW + static_cast<std::size_t>(x.index[k]) * J;
      for (std::size_t j = 0; j < J; ++j) row[j] += x.value[k] * r[j];
    }
  }
  for (double& v : out) v *= inv_n;
}

MultiGradient multi_smooth_grad(const MultiModel& model, const Dataset& data, double delta) {
  if (!std::isfinite(delta) || !(delta > 0.0)) throw DomainError("delta must be positive");
  model.require_feasible(1e-8);
  const auto margins = multi_margins(model, data);
  const auto J = model.b.size();
  const auto p = model.W.rows();
  std::vector<double> flat(J + p * J, 0.0);
  multi_smooth_grad_into(margins.values, data, delta, flat);
  MultiGradient g;
  g.b.assign(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(J));
  g.W = Matrix(p, J);
  std::copy(flat.begin() + static_cast<std::ptrdiff_t>(J), flat.end(), g.W.values().begin());
  return g;
}

double lipschitz_binary(const Dataset& data, double delta) {
  if (!std::isfinite(delta) || !(delta > 0.0)) throw DomainError("delta must be positive");
  if (data.rows() == 0) throw DomainError("Lipschitz constant of an empty dataset");
  double acc = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const double y = data.has_labels() ? data.label(i) : 1.0;
    acc += y * y * (1.0 + data.row(i).squared_norm());
  }
  return acc / (static_cast<double>(data.rows()) * delta);
}

double lipschitz_multi(const Dataset& data, double delta, int classes) {
  if (!std::isfinite(delta) || !(delta > 0.0)) throw DomainError("delta must be positive");
  if (classes < 2) throw DomainError("multi-class Lipschitz constant needs J >= 2");
  if (data.rows() == 0) throw DomainError("Lipschitz constant of an empty dataset");
  double acc = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) acc += 1.0 + data.row(i).squared_norm();
  return static_cast<double>(classes) * acc / (static_cast<double>(data.rows()) * delta);
}

}  // namespace hsvm
