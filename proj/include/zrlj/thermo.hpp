#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace zrlj {

enum class RateKind { identity, indicator, figure3, table };

/// Behaviour of a tabulated rate function past its last entry.
enum class TailRule { constant, identity };

/// The jump-rate function g: N_0 -> [0, inf) of the zero-range process.
class RateFunction {
 public:
  /// g(k) = k
  static RateFunction identity();
  /// g(k) = 1_{k > 0}
  static RateFunction indicator();
  /// g(k) = (1 + 3/k)^3 for k >= 1
  static RateFunction figure3();
  /// values[k-1] = g(k) for k = 1..K; beyond K the tail rule applies.
  static RateFunction table(std::vector<double> values, TailRule tail, double tail_constant = 0.0);

  /// Parses lines "k value" plus one "tail: constant c" or "tail: identity"
  /// line. '#' starts a comment. Keys must cover 1..K without gaps.
  static RateFunction parse_table(std::istream& in);
  static RateFunction load_table(const std::string& path);

  /// Resolves "identity", "indicator", "figure3" or "table:PATH".
  static RateFunction from_spec(const std::string& spec);

  double operator()(std::int64_t k) const;

  RateKind kind() const { return kind_; }
  std::string name() const;

  /// lim_{k} g(k) where it exists in closed form; +inf for unbounded g.
  double limit() const;

  /// Checks g(1..K) for monotonicity.
  bool non_decreasing(std::int64_t K = 10000) const;

 private:
  RateKind kind_ = RateKind::identity;
  std::vector<double> values_;
  TailRule tail_ = TailRule::identity;
  double tail_constant_ = 0.0;
  std::string source_;
};

/// liminf of g over a window ending at K; the ratio-test value of phi*.
double estimate_phi_star(const RateFunction& g, std::int64_t K = 10000);

/// Partial sums of sum_k k^j phi^k / g(k)! for j = 0, 1, 2, held in scaled
/// form: true value = exp(log_scale) * s_j.
struct SeriesMoments {
  double log_scale = 0.0;
  double s0 = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
  std::int64_t terms = 0;
};

/// Evaluators for Z, R, Phi of one rate function. Immutable after construction.
class ThermoTables {
 public:
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  explicit ThermoTables(RateFunction rate, double truncation_tol = 1e-16);

  const RateFunction& rate() const { return rate_; }
  double phi_star() const { return phi_star_; }
  double m_star() const { return m_star_; }
  double truncation_tol() const { return tol_; }
  /// Largest admissible fugacity: 0.999 phi*, or +inf.
  double phi_limit() const { return phi_limit_; }

  double partition_Z(double phi) const;
  double log_Z(double phi) const;
  double mean_R(double phi) const;
  double mean_R_derivative(double phi) const;
  /// Inverse of R by safeguarded Newton; |R(Phi(m)) - m| < 1e-12.
  double fugacity_Phi(double m) const;
  /// phi^k / (Z(phi) g(k)!)
  double ness_marginal_pmf(double phi, std::int64_t k) const;
  /// log g(k)! = sum_{j<=k} log g(j)
  double log_factorial(std::int64_t k) const;

  /// Raw series with the domain check of the public evaluators.
  SeriesMoments moments(double phi) const;

 private:
  SeriesMoments series(double phi) const;
  void check_phi(double phi, const char* who) const;
  double log_g(std::int64_t k) const;

  RateFunction rate_;
  double tol_;
  double phi_star_;
  double phi_limit_;
  double m_star_;
  std::vector<double> log_g_;       // log g(k), k = 1..size
  std::vector<double> log_fact_;    // log g(k)!, k = 0..size
};

}  // namespace zrlj
