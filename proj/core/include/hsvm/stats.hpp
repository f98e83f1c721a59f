#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hsvm {

// Standard normal CDF.
double normal_cdf(double x);
// Two-sided normal tail 2 * Phi(-|z|).
double normal_two_sided(double z);
// Regularized upper incomplete gamma Q(a, x), a > 0, x >= 0.
double gamma_q(double a, double x);
// P(X >= x) for X ~ chi-square with dof degrees of freedom.
double chi2_upper(double x, double dof);

struct WilcoxonResult {
  double r_plus = 0.0;
  double r_minus = 0.0;
  double T = 0.0;
  double z = 0.0;
  double p = 0.0;
};

// Signed-ranks test on d_i = a_i - b_i. |d_i| are ranked with average ranks
// on ties; zero differences split their rank evenly between R+ and R-.
// T = min(R+, R-), z = (T - N(N+1)/4) / sqrt(N(N+1)(2N+1)/24), p two-sided.
// Throws ShapeError on length mismatch or empty input.
WilcoxonResult wilcoxon_z(std::span<const double> a, std::span<const double> b);
// z and p for a given T and sample count N.
WilcoxonResult wilcoxon_from_T(std::size_t N, double T);

enum class TableKind { raw_scores, ranks };

// N x K table: N data sets (rows), K methods (columns).
struct RankTable {
  std::vector<std::vector<double>> values;
  TableKind kind = TableKind::ranks;
  // For raw scores: the largest score gets rank 1.
  bool higher_is_better = true;

  std::size_t datasets() const { return values.size(); }
  std::size_t methods() const { return values.empty() ? 0 : values.front().size(); }
};

// Per-row ranks 1..K with average ranks on ties. Rank tables are validated
// (each row sums to K(K+1)/2) and returned as is. Throws ShapeError on a
// ragged or empty table, DomainError on an invalid rank row.
std::vector<std::vector<double>> rank_rows(const RankTable& table);
// AR_j = (1/N) sum_i r_i^j.
std::vector<double> average_ranks(const RankTable& table);

struct FriedmanResult {
  double chi2 = 0.0;
  double p = 0.0;
  std::vector<double> average_ranks;
};

// chi2_F = 12N / (K(K+1)) * (sum_j AR_j^2 - K(K+1)^2 / 4), p from the
// chi-square upper tail with K - 1 degrees of freedom. Throws DomainError for K < 2.
FriedmanResult friedman(const RankTable& table);
FriedmanResult friedman_from_average_ranks(std::span<const double> average_ranks, std::size_t N);

struct ControlComparison {
  std::size_t method = 0;
  double z = 0.0;
  double p = 0.0;
};

// z_j = (AR_control - AR_j) / sqrt(K(K+1) / (6N)) with two-sided normal p,
// for every method j other than the control, in column order.
// Throws DomainError if control is out of range.
std::vector<ControlComparison> compare_to_control(const RankTable& table, std::size_t control);
std::vector<ControlComparison> compare_to_control(std::span<const double> average_ranks,
                                                  std::size_t N, std::size_t control);

// Holm step-down: p-values sorted ascending, the i-th (0-based) of m is
// rejected while p_(i) < alpha / (m - i); the first failure accepts the
// rest. Decisions are returned in input order.
std::vector<bool> holm(std::span<const double> p_values, double alpha);

}  // namespace hsvm
