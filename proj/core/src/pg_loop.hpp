#pragma once

// Accelerated proximal gradient loop shared by the binary and multi-class
// solvers. Parameters are flat vectors; a Problem supplies
//   dim(), margin_size()
//   margins(u, out)             one pass over the data
//   smooth(margins)
//   gradient(margins, out)
//   prox(u_hat, grad, L, out)
//   penalty(u)
//   pattern(u, out)             indices of nonzero feature rows
// Margins are affine in u, so the extrapolated point's margins are a linear
// combination of the cached ones and cost no data pass.

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <span>
#include <vector>

#include "hsvm/solver.hpp"

namespace hsvm::detail {

struct LoopSettings {
  double eta = 1.5;
  double L0 = 1.0;
  double L_cap = 1.0;
  double tol = 1e-6;
  int max_iter = 5000;
  bool extrapolate = true;
  bool monotone = true;
  bool backtracking = true;
  int consec_stop = 3;
  // 0 disables the support stability requirement.
  int support_stable_iters = 0;
  int stage = 0;
  int k_offset = 0;
  const IterationObserver* observer = nullptr;
};

struct LoopResult {
  std::vector<double> u;
  std::vector<double> margins;
  std::vector<IterationRecord> records;
  int iterations = 0;
  bool converged = false;
  double objective = 0.0;
  long long products = 0;
  std::vector<FeatureIndex> pattern;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline int max_retries(double eta, double L0, double L_cap) {
  if (L_cap <= L0) return 1;
  return static_cast<int>(std::ceil(std::log(L_cap / L0) / std::log(eta))) + 1;
}

// One backtracking search from a fixed extrapolated point.
template <class Problem>
struct Backtracker {
  const Problem& problem;
  std::vector<double> cand;
  std::vector<double> cand_margins;
  std::vector<double> diff;
  double f_cand = 0.0;
  double gap = 0.0;
  int trials = 0;

  explicit Backtracker(const Problem& p)
      : problem(p), cand(p.dim()), cand_margins(p.margin_size()), diff(p.dim()) {}

  bool trial(std::span<const double> u_hat, double f_hat, std::span<const double> grad, double L) {
    problem.prox(u_hat, grad, L, cand);
    problem.margins(cand, cand_margins);
    ++trials;
    f_cand = problem.smooth(cand_margins);
    for (std::size_t i = 0; i < cand.size(); ++i) diff[i] = cand[i] - u_hat[i];
    gap = f_hat + dot(grad, diff) + 0.5 * L * dot(diff, diff) - f_cand;
    return gap >= 0.0;
  }
};

template <class Problem>
LoopResult run_loop(const Problem& problem, std::vector<double> u0, const LoopSettings& s) {
  const std::size_t dim = problem.dim();
  const std::size_t msize = problem.margin_size();
  const double L_cap = s.L_cap;
  const double L0 = std::min(s.L0, L_cap);
  const int retry_cap = max_retries(s.eta, L0, L_cap);

  LoopResult out;
  out.u = std::move(u0);
  out.margins.assign(msize, 0.0);
  problem.margins(out.u, out.margins);
  out.products = 1;
  double F = problem.smooth(out.margins) + problem.penalty(out.u);

  std::vector<double> u_prev = out.u;
  std::vector<double> m_prev = out.margins;
  std::vector<double> u_hat(dim), m_hat(msize), grad(dim);
  Backtracker<Problem> bt(problem);

  double t = 1.0;
  double L_prev = s.backtracking ? L0 : L_cap;
  int counter = 0;
  std::deque<std::vector<FeatureIndex>> patterns;
  std::vector<FeatureIndex> pattern;

  for (int k = 1; k <= s.max_iter; ++k) {
    IterationRecord rec;
    rec.k = s.k_offset + k;
    rec.stage = s.stage;
    bt.trials = 0;
    const double t_next = next_fista_t(t);

    double hat_omega = -1.0;
    double f_hat = 0.0;
    auto prepare = [&](double omega) {
      if (omega == hat_omega) return;
      hat_omega = omega;
      for (std::size_t i = 0; i < dim; ++i) u_hat[i] = out.u[i] + omega * (out.u[i] - u_prev[i]);
      for (std::size_t i = 0; i < msize; ++i)
        m_hat[i] = out.margins[i] + omega * (out.margins[i] - m_prev[i]);
      f_hat = problem.smooth(m_hat);
      problem.gradient(m_hat, grad);
    };
    auto weight = [&](double L, bool extrapolate) {
      return extrapolate ? extrapolation_weight(t, t_next, L_prev, L) : 0.0;
    };
    // Returns accepted L; the omega used is left in hat_omega.
    auto search = [&](double L_start, bool extrapolate) {
      double L = L_start;
      if (!s.backtracking) {
        prepare(weight(L_cap, extrapolate));
        bt.trial(u_hat, f_hat, grad, L_cap);
        return L_cap;
      }
      for (int retry = 0;; ++retry) {
        prepare(weight(L, extrapolate));
        if (bt.trial(u_hat, f_hat, grad, L) || L >= L_cap) return L;
        if (retry + 1 >= retry_cap) {
          L = L_cap;
          prepare(weight(L, extrapolate));
          bt.trial(u_hat, f_hat, grad, L);
          return L;
        }
        L = std::min(s.eta * L, L_cap);
      }
    };

    const bool extrapolate = s.extrapolate && k > 1;
    double L = search(L_prev, extrapolate);
    double F_cand = bt.f_cand + problem.penalty(bt.cand);
    double t_after = t_next;
    if (s.monotone && F_cand > F && hat_omega > 0.0) {
      rec.restarted = true;
      L = search(L, false);
      F_cand = bt.f_cand + problem.penalty(bt.cand);
      t_after = 1.0;
    }
    rec.omega = hat_omega;
    rec.L = L;
    rec.trials = bt.trials;
    rec.products = bt.trials;
    rec.decrease_gap = bt.gap;
    out.products += bt.trials;

    std::swap(u_prev, out.u);
    std::swap(m_prev, out.margins);
    out.u = bt.cand;
    out.margins = bt.cand_margins;
    const double F_prev = F;
    F = F_cand;
    L_prev = L;
    t = t_after;

    for (std::size_t i = 0; i < dim; ++i) bt.diff[i] = out.u[i] - u_prev[i];
    rec.step = norm(bt.diff);
    rec.objective = F;
    problem.pattern(out.u, pattern);
    rec.nnz = pattern.size();
    out.records.push_back(rec);
    out.iterations = k;
    if (s.observer && *s.observer) (*s.observer)(rec, out.u, out.margins);

    const StopState st = check_stop(F_prev, F, u_prev, out.u, s.tol, counter, s.consec_stop);
    counter = st.counter;
    bool stable = true;
    if (s.support_stable_iters > 0) {
      patterns.push_back(pattern);
      while (static_cast<int>(patterns.size()) > s.support_stable_iters) patterns.pop_front();
      std::vector<std::vector<FeatureIndex>> recent(patterns.begin(), patterns.end());
      stable = detect_support(recent, s.support_stable_iters).has_value();
    }
    if (st.stop && stable) {
      out.converged = true;
      break;
    }
  }
  out.objective = F;
  problem.pattern(out.u, out.pattern);
  return out;
}

}  // namespace hsvm::detail
