#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "zrlj/smooth_function.hpp"

namespace zrlj {

/// Riemann zeta for s > 1, absolute error below 1e-12.
double riemann_zeta(double s);

/// sum_{k >= m} k^{-s} for m >= 1, s > 1 (Hurwitz-type tail), absolute error
/// below 1e-12. Direct summation of a short head followed by an
/// Euler-Maclaurin remainder with three derivative corrections.
double tail_sum(std::int64_t m, double s);

enum class Normalization {
  normalized,     ///< c_gamma = 1 / (2 zeta(1+gamma)), so sum_z p(z) = 1
  paper_literal,  ///< c_gamma = 2 / zeta(1+gamma)
  custom,         ///< c_gamma supplied by the caller
};

struct KernelParams {
  double gamma = 1.5;
  double c_gamma = 0.0;
  Normalization mode = Normalization::normalized;

  /// Validates 0 < gamma < 2 and fills c_gamma for the given mode.
  static KernelParams make(double gamma, Normalization mode = Normalization::normalized);
  static KernelParams with_constant(double gamma, double c_gamma);
};

enum class Side { left, right };

struct VPotentials {
  double v0;
  double v1;
};

/// The symmetric long-jump kernel p(z) = c_gamma |z|^{-(1+gamma)}, p(0) = 0.
class JumpKernel {
 public:
  explicit JumpKernel(KernelParams params);

  double gamma() const { return params_.gamma; }
  double c_gamma() const { return params_.c_gamma; }
  const KernelParams& params() const { return params_; }

  /// p(z)
  double operator()(std::int64_t z) const;
  double jump_prob(std::int64_t z) const { return (*this)(z); }

  /// sum_{z != 0} p(z) = 2 c_gamma zeta(1+gamma); equals 1 when normalized.
  double total_mass() const { return 2.0 * params_.c_gamma * zeta_1g_; }

  /// sum_{j >= k} p(j) for k >= 1.
  double tail(std::int64_t k) const;

  /// T[k] = sum_{j >= max(k,1)} p(j) for k = 0..kmax, built by downward
  /// accumulation from a single tail evaluation.
  std::vector<double> tails(std::int64_t kmax) const;

  /// d = sum_{z>=1} z p(z) = c_gamma zeta(gamma); gamma must exceed 1.
  double first_moment_half() const;

  /// r^-(u) = c_gamma/gamma u^{-gamma}, r^+(u) = c_gamma/gamma (1-u)^{-gamma}.
  double continuum_rate(double u, Side side) const;

  /// V1 = r^- + r^+, V0 = alpha_t r^- + beta_t r^+.
  VPotentials v_potentials(double u, double alpha_t, double beta_t) const;

 private:
  KernelParams params_;
  double zeta_1g_;
};

/// r_N^-(x/N) and r_N^+(x/N) for x in {1..N-1}. Entry i refers to site x = i+1.
struct ReservoirRates {
  std::int64_t N = 0;
  std::vector<double> left;
  std::vector<double> right;

  double left_at(std::int64_t x) const { return left[static_cast<std::size_t>(x - 1)]; }
  double right_at(std::int64_t x) const { return right[static_cast<std::size_t>(x - 1)]; }
};

/// right[N-x] and left[x] come from the same tail entry, so the reflection
/// identity holds bit-exactly.
ReservoirRates reservoir_rates(const JumpKernel& kernel, std::int64_t N);

/// In-bulk mass q_x = sum_{y in Lambda_N} p(y-x) = total - left - right.
std::vector<double> bulk_mass(const JumpKernel& kernel, const ReservoirRates& rates);

/// (L_N G)(x) = sum_{y in Lambda_N} p(y-x) [G(y/N) - G(x/N)], with G sampled
/// on the lattice: samples[i] = G((i+1)/N).
double discrete_frac_laplacian(const JumpKernel& kernel, std::span<const double> samples,
                               std::int64_t x);

/// Same operator at every site (OpenMP kernel, O(N^2)).
std::vector<double> discrete_frac_laplacian_all(const JumpKernel& kernel,
                                                std::span<const double> samples);

/// Regional fractional Laplacian c_gamma PV int_0^1 (G(v)-G(u)) |u-v|^{-1-gamma} dv
/// for u in (0,1).
double regional_frac_laplacian(const JumpKernel& kernel, const SmoothFunction& G, double u);

/// Time scale Theta(N): N^gamma for theta >= 0, N^{gamma+theta} otherwise.
double time_scale(double gamma, double theta, std::int64_t N);

}  // namespace zrlj
