#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hsvm/dataset.hpp"
#include "hsvm/hyperparams.hpp"
#include "hsvm/matrix.hpp"
#include "hsvm/model.hpp"

namespace hsvm {

// Huberized hinge loss:
//   0                    t > 1
//   (1 - t)^2 / (2 delta)  1 - delta < t <= 1
//   1 - t - delta / 2     t <= 1 - delta
// Throws DomainError for non-finite t or delta <= 0.
double huber_loss(double t, double delta);
// Derivative: 0, (t - 1) / delta, -1 on the same pieces; 1/delta-Lipschitz.
double huber_grad(double t, double delta);

struct BinaryObjectiveParts {
  double smooth = 0.0;   // f
  double penalty = 0.0;  // g
  double total = 0.0;    // F = f + g
};

struct MultiObjectiveParts {
  double smooth = 0.0;   // l_M
  double penalty = 0.0;  // G
  double total = 0.0;    // H = l_M + G
};

// Products of the data with a model, reused across the steps of one
// solver iteration.
//
// Binary: values[i] = y_i (b + x_i'w), one entry per sample.
// Multi:  values[i*J + j] = b_j + x_i'w_j, row-major n x J.
struct MarginCache {
  std::vector<double> values;
  std::uint64_t stamp = 0;
};

MarginCache binary_margins(const BinaryModel& model, const Dataset& data);
MarginCache multi_margins(const MultiModel& model, const Dataset& data);

// (1/n) sum_i phi_H(m_i), summed left to right.
double binary_smooth(std::span<const double> margins, double delta);
// (1/n) sum_i sum_{j != y_i} phi_H(m_ij).
double multi_smooth(std::span<const double> margins, std::span<const int> labels, int classes,
                    double delta);
double binary_penalty(double b, std::span<const double> w, const Hyperparams& hp);
double multi_penalty(std::span<const double> b, std::span<const double> w, const Hyperparams& hp);

BinaryObjectiveParts binary_objective(const BinaryModel& model, const Dataset& data,
                                      const Hyperparams& hp);
MultiObjectiveParts multi_objective(const MultiModel& model, const Dataset& data,
                                    const Hyperparams& hp);

struct BinaryGradient {
  double b = 0.0;
  std::vector<double> w;
};

struct MultiGradient {
  std::vector<double> b;
  Matrix W;
};

// (1/n) sum_i phi_H'(m_i) v_i with v_i = (y_i; y_i x_i). Throws StateError
// if the cache length differs from the sample count.
BinaryGradient binary_smooth_grad(const MarginCache& margins, const Dataset& data, double delta);

// Writes the gradient into out = (b; w), length 1 + p. Used by the solver to
// avoid reallocating per iteration.
void binary_smooth_grad_into(std::span<const double> margins, const Dataset& data, double delta,
                             std::span<double> out);

MultiGradient multi_smooth_grad(const MultiModel& model, const Dataset& data, double delta);
// Cache-driven form; out = (b; W row-major), length J + p*J.
void multi_smooth_grad_into(std::span<const double> margins, const Dataset& data, double delta,
                            std::span<double> out);

// L_f = (1 / (n delta)) sum_i y_i^2 (1 + ||x_i||^2).
double lipschitz_binary(const Dataset& data, double delta);
// L_m = (J / (n delta)) sum_i (1 + ||x_i||^2).
double lipschitz_multi(const Dataset& data, double delta, int classes);

}  // namespace hsvm
