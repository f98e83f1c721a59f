#include "hsvm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hsvm/error.hpp"

namespace hsvm {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_two_sided(double z) { return std::min(1.0, 2.0 * normal_cdf(-std::abs(z))); }

namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 10000;

// P(a, x) by its power series; used for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxIter; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Q(a, x) by the continued fraction (modified Lentz); used for x >= a + 1.
double gamma_q_fraction(double a, double x) {
  const double tiny = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) throw DomainError("gamma_q: need a > 0 and x >= 0");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_fraction(a, x);
}

double chi2_upper(double x, double dof) {
  if (!(dof > 0.0)) throw DomainError("chi2_upper: dof must be positive");
  if (x <= 0.0) return 1.0;
  return gamma_q(0.5 * dof, 0.5 * x);
}

namespace {

// Average ranks (1-based) of values, ascending.
std::vector<double> average_rank(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

WilcoxonResult wilcoxon_from_T(std::size_t N, double T) {
  if (N == 0) throw ShapeError("wilcoxon: empty sample");
  const double n = static_cast<double>(N);
  WilcoxonResult r;
  r.T = T;
  r.z = (T - n * (n + 1.0) / 4.0) / std::sqrt(n * (n + 1.0) * (2.0 * n + 1.0) / 24.0);
  r.p = normal_two_sided(r.z);
  return r;
}

WilcoxonResult wilcoxon_z(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("wilcoxon: length mismatch");
  if (a.empty()) throw ShapeError("wilcoxon: empty sample");
  std::vector<double> d(a.size()), mag(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    d[i] = a[i] - b[i];
    mag[i] = std::abs(d[i]);
  }
  const auto ranks = average_rank(mag);
  double plus = 0.0, minus = 0.0, zero = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] > 0.0) {
      plus += ranks[i];
    } else if (d[i] < 0.0) {
      minus += ranks[i];
    } else {
      zero += ranks[i];
    }
  }
  plus += 0.5 * zero;
  minus += 0.5 * zero;
  WilcoxonResult r = wilcoxon_from_T(a.size(), std::min(plus, minus));
  r.r_plus = plus;
  r.r_minus = minus;
  return r;
}

std::vector<std::vector<double>> rank_rows(const RankTable& table) {
  const std::size_t K = table.methods();
  if (table.datasets() == 0 || K == 0) throw ShapeError("rank table is empty");
  for (const auto& row : table.values) {
    if (row.size() != K) throw ShapeError("rank table is ragged");
  }
  if (table.kind == TableKind::ranks) {
    const double expected = 0.5 * static_cast<double>(K * (K + 1));
    for (const auto& row : table.values) {
      double sum = 0.0;
      for (double r : row) {
        if (!(r >= 1.0 && r <= static_cast<double>(K))) throw DomainError("rank out of range");
        sum += r;
      }
      if (std::abs(sum - expected) > 1e-9 * expected) {
        throw DomainError("rank row does not sum to K(K+1)/2");
      }
    }
    return table.values;
  }
  std::vector<std::vector<double>> out;
  out.reserve(table.datasets());
  for (const auto& row : table.values) {
    std::vector<double> key = row;
    if (table.higher_is_better) {
      for (double& v : key) v = -v;
    }
    out.push_back(average_rank(key));
  }
  return out;
}

std::vector<double> average_ranks(const RankTable& table) {
  const auto ranks = rank_rows(table);
  std::vector<double> ar(table.methods(), 0.0);
  for (const auto& row : ranks) {
    for (std::size_t j = 0; j < ar.size(); ++j) ar[j] += row[j];
  }
  for (double& v : ar) v /= static_cast<double>(ranks.size());
  return ar;
}

FriedmanResult friedman_from_average_ranks(std::span<const double> ar, std::size_t N) {
  const double K = static_cast<double>(ar.size());
  if (ar.size() < 2) throw DomainError("friedman: need at least two methods");
  if (N == 0) throw DomainError("friedman: need at least one data set");
  double sumsq = 0.0;
  for (double r : ar) sumsq += r * r;
  FriedmanResult res;
  res.chi2 = 12.0 * static_cast<double>(N) / (K * (K + 1.0)) *
             (sumsq - K * (K + 1.0) * (K + 1.0) / 4.0);
  // Rounding can leave a tiny negative value for the null configuration.
  if (std::abs(res.chi2) < 1e-12) res.chi2 = 0.0;
  res.p = chi2_upper(res.chi2, K - 1.0);
  res.average_ranks.assign(ar.begin(), ar.end());
  return res;
}

FriedmanResult friedman(const RankTable& table) {
  if (table.methods() < 2) throw DomainError("friedman: need at least two methods");
  const auto ar = average_ranks(table);
  return friedman_from_average_ranks(ar, table.datasets());
}

std::vector<ControlComparison> compare_to_control(std::span<const double> ar, std::size_t N,
                                                  std::size_t control) {
  if (control >= ar.size()) throw DomainError("compare_to_control: control out of range");
  if (N == 0) throw DomainError("compare_to_control: need at least one data set");
  const double K = static_cast<double>(ar.size());
  const double se = std::sqrt(K * (K + 1.0) / (6.0 * static_cast<double>(N)));
  std::vector<ControlComparison> out;
  for (std::size_t j = 0; j < ar.size(); ++j) {
    if (j == control) continue;
    ControlComparison c;
    c.method = j;
    c.z = (ar[control] - ar[j]) / se;
    c.p = normal_two_sided(c.z);
    out.push_back(c);
  }
  return out;
}

std::vector<ControlComparison> compare_to_control(const RankTable& table, std::size_t control) {
  const auto ar = average_ranks(table);
  return compare_to_control(ar, table.datasets(), control);
}

std::vector<bool> holm(std::span<const double> p_values, double alpha) {
  const std::size_t m = p_values.size();
  for (double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("holm: p-values must lie in [0, 1]");
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
  std::vector<bool> reject(m, false);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(p_values[order[i]] < alpha / static_cast<double>(m - i))) break;
    reject[order[i]] = true;
  }
  return reject;
}

}  // namespace hsvm
