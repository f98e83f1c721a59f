#include "hsvm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "hsvm/error.hpp"
#include "hsvm/loss.hpp"
#include "hsvm/prox.hpp"
#include "pg_loop.hpp"

namespace hsvm {

namespace {

class BinaryProblem {
 public:
  BinaryProblem(const Dataset& data, const Hyperparams& hp) : data_(data), hp_(hp) {}

  std::size_t dim() const { return 1 + data_.features(); }
  std::size_t margin_size() const { return data_.rows(); }

  void margins(std::span<const double> u, std::span<double> out) const {
    const double b = u[0];
    const auto w = u.subspan(1);
    for (std::size_t i = 0; i < data_.rows(); ++i) {
      out[i] = static_cast<double>(data_.label(i)) * (b + data_.row(i).dot(w));
    }
  }
  double smooth(std::span<const double> m) const { return binary_smooth(m, hp_.delta); }
  void gradient(std::span<const double> m, std::span<double> out) const {
    binary_smooth_grad_into(m, data_, hp_.delta, out);
  }
  void prox(std::span<const double> u_hat, std::span<const double> grad, double L,
            std::span<double> out) const {
    binary_prox_step(u_hat, grad, L, hp_, out);
  }
  double penalty(std::span<const double> u) const {
    return binary_penalty(u[0], u.subspan(1), hp_);
  }
  void pattern(std::span<const double> u, std::vector<FeatureIndex>& out) const {
    out.clear();
    for (std::size_t j = 1; j < u.size(); ++j) {
      if (u[j] != 0.0) out.push_back(static_cast<FeatureIndex>(j - 1));
    }
  }

 private:
  const Dataset& data_;
  Hyperparams hp_;
};

class MultiProblem {
 public:
  MultiProblem(const Dataset& data, const Hyperparams& hp)
      : data_(data), hp_(hp), J_(static_cast<std::size_t>(data.classes())), p_(data.features()) {}

  std::size_t dim() const { return J_ + p_ * J_; }
  std::size_t margin_size() const { return data_.rows() * J_; }

  void margins(std::span<const double> u, std::span<double> out) const {
    const double* W = u.data() + J_;
    for (std::size_t i = 0; i < data_.rows(); ++i) {
      double* m = out.data() + i * J_;
      for (std::size_t j = 0; j < J_; ++j) m[j] = u[j];
      const SparseRow row = data_.row(i);
      for (std::size_t k = 0; k < row.nnz(); ++k) {
        const double x = row.value[k];
        const double* w = W + static_cast<std::size_t>(row.index[k]) * J_;
        for (std::size_t j = 0; j < J_; ++j) m[j] += x * w[j];
      }
    }
  }
  double smooth(std::span<const double> m) const {
    return multi_smooth(m, data_.labels(), static_cast<int>(J_), hp_.delta);
  }
  void gradient(std::span<const double> m, std::span<double> out) const {
    multi_smooth_grad_into(m, data_, hp_.delta, out);
  }
  void prox(std::span<const double> u_hat, std::span<const double> grad, double L,
            std::span<double> out) const {
    multi_b_step(u_hat.first(J_), grad.first(J_), L, hp_.lambda3, out.first(J_));
    multi_w_step(u_hat.subspan(J_), grad.subspan(J_), p_, J_, L, hp_.lambda1, hp_.lambda2,
                 out.subspan(J_));
  }
  double penalty(std::span<const double> u) const {
    return multi_penalty(u.first(J_), u.subspan(J_), hp_);
  }
  void pattern(std::span<const double> u, std::vector<FeatureIndex>& out) const {
    out.clear();
    for (std::size_t r = 0; r < p_; ++r) {
      const double* w = u.data() + J_ + r * J_;
      if (std::any_of(w, w + J_, [](double v) { return v != 0.0; })) {
        out.push_back(static_cast<FeatureIndex>(r));
      }
    }
  }

 private:
  const Dataset& data_;
  Hyperparams hp_;
  std::size_t J_;
  std::size_t p_;
};

detail::LoopSettings settings_from(const SolverOptions& opts, double L0, double L_cap) {
  detail::LoopSettings s;
  s.eta = opts.eta;
  s.L0 = opts.L0.value_or(L0);
  s.L_cap = L_cap;
  s.tol = opts.tol;
  s.max_iter = opts.max_iter;
  s.extrapolate = opts.extrapolation == Extrapolation::fista_capped;
  s.monotone = opts.monotone;
  s.backtracking = opts.backtracking;
  s.consec_stop = opts.consec_stop;
  s.observer = &opts.observer;
  return s;
}

std::vector<double> flatten(const BinaryModel& m) {
  std::vector<double> u(1 + m.w.size());
  u[0] = m.b;
  std::copy(m.w.begin(), m.w.end(), u.begin() + 1);
  return u;
}

BinaryModel unflatten_binary(std::span<const double> u) {
  BinaryModel m(u.size() - 1);
  m.b = u[0];
  std::copy(u.begin() + 1, u.end(), m.w.begin());
  return m;
}

// Largest L with which the smooth part is guaranteed to be majorized; an
// empty data set has no smooth part, so any positive value works.
double safe_lipschitz(double L) { return L > 0.0 ? L : 1.0; }

}  // namespace

void SolverOptions::validate() const {
  if (!(eta > 1.0) || !std::isfinite(eta)) throw DomainError("eta must be > 1");
  if (L0 && !(*L0 > 0.0 && std::isfinite(*L0))) throw DomainError("L0 must be positive");
  if (!(tol > 0.0)) throw DomainError("tol must be positive");
  if (max_iter < 1) throw DomainError("max_iter must be >= 1");
  if (consec_stop < 1) throw DomainError("consec_stop must be >= 1");
  if (!(stage1_tol > 0.0)) throw DomainError("stage1_tol must be positive");
  if (support_stable_iters < 1) throw DomainError("support_stable_iters must be >= 1");
}

double next_fista_t(double t) { return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t)); }

double extrapolation_weight(double t_prev, double t_curr, double L_prev, double L_curr) {
  if (!(t_curr > 0.0) || !(L_prev > 0.0) || !(L_curr > 0.0)) {
    throw DomainError("extrapolation_weight: t and L must be positive");
  }
  return std::min((t_prev - 1.0) / t_curr, std::sqrt(L_prev / L_curr));
}

StopState check_stop(double F_prev, double F_curr, std::span<const double> u_prev,
                     std::span<const double> u_curr, double tol, int counter, int consec_stop) {
  if (u_prev.size() != u_curr.size()) throw ShapeError("check_stop: iterate sizes differ");
  double diff2 = 0.0;
  for (std::size_t i = 0; i < u_prev.size(); ++i) {
    const double d = u_curr[i] - u_prev[i];
    diff2 += d * d;
  }
  const double rel_f = (F_prev - F_curr) / (1.0 + F_prev);
  const double rel_u = std::sqrt(diff2) / (1.0 + detail::norm(u_prev));
  StopState st;
  st.counter = (rel_f <= tol && rel_u <= tol) ? counter + 1 : 0;
  st.stop = st.counter >= consec_stop;
  return st;
}

std::optional<std::vector<FeatureIndex>> detect_support(
    std::span<const std::vector<FeatureIndex>> recent_patterns, int stable_iters) {
  if (stable_iters < 1) throw DomainError("detect_support: stable_iters must be >= 1");
  if (recent_patterns.size() < static_cast<std::size_t>(stable_iters)) return std::nullopt;
  const auto tail = recent_patterns.last(static_cast<std::size_t>(stable_iters));
  for (const auto& p : tail) {
    if (p != tail.front()) return std::nullopt;
  }
  return tail.front();
}

LineSearchResult line_search(const Dataset& data, const Hyperparams& hp,
                             std::span<const double> u_hat, double L_prev, double L_global,
                             double eta) {
  data.require_binary();
  hp.validate();
  if (u_hat.size() != 1 + data.features()) throw ShapeError("line_search: u_hat has wrong length");
  if (!(L_prev > 0.0) || !(L_global > 0.0)) throw DomainError("line_search: L must be positive");
  if (!(eta > 1.0)) throw DomainError("line_search: eta must be > 1");
  const BinaryProblem problem(data, hp);
  std::vector<double> m(data.rows()), grad(u_hat.size());
  problem.margins(u_hat, m);
  const double f_hat = problem.smooth(m);
  problem.gradient(m, grad);

  detail::Backtracker<BinaryProblem> bt(problem);
  double L = std::min(L_prev, L_global);
  const int retry_cap = detail::max_retries(eta, L, L_global);
  for (int retry = 0;; ++retry) {
    if (bt.trial(u_hat, f_hat, grad, L) || L >= L_global) break;
    if (retry + 1 >= retry_cap) {
      L = L_global;
      bt.trial(u_hat, f_hat, grad, L);
      break;
    }
    L = std::min(eta * L, L_global);
  }
  LineSearchResult r;
  r.L = L;
  r.candidate = bt.cand;
  r.trials = bt.trials;
  r.decrease_gap = bt.gap;
  return r;
}

BinaryFit fit_binary(const Dataset& data, const Hyperparams& hp, const SolverOptions& opts,
                     const std::optional<BinaryModel>& start) {
  data.require_binary();
  hp.validate();
  opts.validate();
  if (start && start->features() != data.features()) {
    throw ShapeError("fit_binary: start model has the wrong feature count");
  }
  const double Lf = safe_lipschitz(lipschitz_binary(data, hp.delta));
  const double n = static_cast<double>(std::max<std::size_t>(data.rows(), 1));
  const BinaryProblem problem(data, hp);
  const auto s = settings_from(opts, 2.0 * Lf / n, Lf);
  auto r = detail::run_loop(problem, start ? flatten(*start) : std::vector<double>(problem.dim()), s);

  BinaryFit fit;
  fit.model = unflatten_binary(r.u);
  fit.trace.records = std::move(r.records);
  fit.iterations = r.iterations;
  fit.converged = r.converged;
  fit.final_objective = r.objective;
  fit.products = r.products;
  fit.support = std::move(r.pattern);
  return fit;
}

BinaryFit fit_binary_two_stage(const Dataset& data, const Hyperparams& hp,
                               const SolverOptions& opts) {
  data.require_binary();
  hp.validate();
  opts.validate();
  const double Lf = safe_lipschitz(lipschitz_binary(data, hp.delta));
  const BinaryProblem full(data, hp);

  detail::LoopSettings s1 = settings_from(opts, Lf, Lf);
  s1.backtracking = false;
  s1.extrapolate = false;
  s1.monotone = false;
  s1.tol = opts.stage1_tol;
  s1.support_stable_iters = opts.support_stable_iters;
  s1.stage = 1;
  auto r1 = detail::run_loop(full, std::vector<double>(full.dim()), s1);

  BinaryFit fit;
  fit.trace.records = std::move(r1.records);
  fit.products = r1.products;
  int iterations = r1.iterations;

  if (!r1.converged) {
    BinaryFit plain = fit_binary(data, hp, opts);
    for (auto& rec : plain.trace.records) {
      rec.k += iterations;
      rec.stage = 2;
    }
    fit.trace.stage_boundary = fit.trace.records.size();
    fit.trace.records.insert(fit.trace.records.end(), plain.trace.records.begin(),
                             plain.trace.records.end());
    fit.model = std::move(plain.model);
    fit.iterations = iterations + plain.iterations;
    fit.converged = plain.converged;
    fit.final_objective = plain.final_objective;
    fit.products += plain.products;
    fit.fell_back = true;
    fit.support = std::move(plain.support);
    return fit;
  }

  std::vector<FeatureIndex> support = std::move(r1.pattern);
  std::vector<double> u = std::move(r1.u);
  std::vector<double> grad(full.dim()), m(data.rows());
  const double slack = 1e-9 * std::max(1.0, hp.lambda1);
  bool converged = false;
  double objective = 0.0;
  fit.trace.stage_boundary = fit.trace.records.size();

  // Each round strictly grows the support, so at most p + 1 rounds run.
  for (int round = 0;; ++round) {
    const Dataset reduced = data.restrict_features(support);
    BinaryModel start(support.size());
    start.b = u[0];
    for (std::size_t k = 0; k < support.size(); ++k) start.w[k] = u[1 + support[k]];

    const BinaryProblem problem(reduced, hp);
    const double Lr = safe_lipschitz(lipschitz_binary(reduced, hp.delta));
    const double n = static_cast<double>(std::max<std::size_t>(reduced.rows(), 1));
    auto s2 = settings_from(opts, 2.0 * Lr / n, Lr);
    s2.stage = 2 + round;
    s2.k_offset = iterations;
    // The observer expects full-length iterates; it only sees stage 1.
    s2.observer = nullptr;
    auto r2 = detail::run_loop(problem, flatten(start), s2);
    iterations += r2.iterations;
    fit.products += r2.products + 1;
    fit.trace.records.insert(fit.trace.records.end(), r2.records.begin(), r2.records.end());
    converged = r2.converged;
    objective = r2.objective;

    std::fill(u.begin(), u.end(), 0.0);
    u[0] = r2.u[0];
    for (std::size_t k = 0; k < support.size(); ++k) u[1 + support[k]] = r2.u[1 + k];

    full.margins(u, m);
    full.gradient(m, grad);
    std::vector<FeatureIndex> grown = support;
    std::size_t pos = 0;
    for (std::size_t j = 0; j < data.features(); ++j) {
      while (pos < support.size() && support[pos] < j) ++pos;
      if (pos < support.size() && support[pos] == j) continue;
      if (std::abs(grad[1 + j]) > hp.lambda1 + slack) grown.push_back(static_cast<FeatureIndex>(j));
    }
    if (grown.size() == support.size()) break;
    std::sort(grown.begin(), grown.end());
    support = std::move(grown);
  }

  fit.model = unflatten_binary(u);
  fit.iterations = iterations;
  fit.converged = converged;
  fit.final_objective = objective;
  fit.support = std::move(support);
  return fit;
}

MultiFit fit_multi(const Dataset& data, const Hyperparams& hp, const SolverOptions& opts,
                   const std::optional<MultiModel>& start) {
  data.require_multiclass();
  hp.validate();
  opts.validate();
  const int J = data.classes();
  const std::size_t p = data.features();
  if (start) {
    if (start->features() != p || start->classes() != J) {
      throw ShapeError("fit_multi: start model has the wrong shape");
    }
    start->require_feasible();
  }
  const double Lm = safe_lipschitz(lipschitz_multi(data, hp.delta, J));
  const double n = static_cast<double>(std::max<std::size_t>(data.rows(), 1));
  const MultiProblem problem(data, hp);
  const auto s = settings_from(opts, Lm / (n * J), Lm);

  std::vector<double> u0(problem.dim(), 0.0);
  if (start) {
    std::copy(start->b.begin(), start->b.end(), u0.begin());
    const auto v = start->W.values();
    std::copy(v.begin(), v.end(), u0.begin() + J);
  }
  auto r = detail::run_loop(problem, std::move(u0), s);

  MultiFit fit;
  fit.model = MultiModel(p, J);
  std::copy(r.u.begin(), r.u.begin() + J, fit.model.b.begin());
  std::copy(r.u.begin() + J, r.u.end(), fit.model.W.values().begin());
  fit.trace.records = std::move(r.records);
  fit.iterations = r.iterations;
  fit.converged = r.converged;
  fit.final_objective = r.objective;
  fit.products = r.products;
  fit.support = std::move(r.pattern);
  return fit;
}

BinaryFit ablation_run(const Dataset& data, const Hyperparams& hp, AblationSetting setting,
                       const SolverOptions& base) {
  SolverOptions opts = base;
  opts.extrapolation = Extrapolation::fista_capped;
  switch (setting) {
    case AblationSetting::ours:
      opts.backtracking = true;
      opts.monotone = true;
      break;
    case AblationSetting::fixed_L_no_monotone:
      opts.backtracking = false;
      opts.monotone = false;
      break;
    case AblationSetting::backtrack_no_monotone:
      opts.backtracking = true;
      opts.monotone = false;
      break;
  }
  return fit_binary(data, hp, opts);
}

}  // namespace hsvm
