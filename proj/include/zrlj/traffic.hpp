#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "zrlj/kernel.hpp"
#include "zrlj/thermo.hpp"

namespace zrlj {

struct ModelParams {
  double gamma = 1.5;
  double theta = 0.0;
  double kappa = 1.0;
  double alpha = 0.2;
  double beta = 0.8;
  std::int64_t N = 256;
  RateFunction rate = RateFunction::identity();
  Normalization normalization = Normalization::normalized;

  /// Checks ranges and 0 < alpha <= beta < m*.
  void validate(const ThermoTables& thermo) const;
  KernelParams kernel_params() const { return KernelParams::make(gamma, normalization); }
  /// kappa N^{-theta}
  double boundary_scale() const;
};

/// (D - P) phi = R on the bulk sites x = 1..N-1, stored at index x-1.
struct TrafficSystem {
  std::int64_t N = 0;
  std::vector<double> diag;        ///< D_N[x]
  std::vector<double> kernel_row;  ///< p(k), k = 0..N-2 (p(0) = 0)
  std::vector<double> rhs;         ///< R_N[x]
  std::vector<double> margin;      ///< D_N[x] - sum_y p(y-x)
  ReservoirRates rates;
  std::vector<double> tails;       ///< sum_{j>=k} p(j), k = 0..N
  double boundary_scale = 0.0;
  double phi_alpha = 0.0;
  double phi_beta = 0.0;

  std::size_t size() const { return diag.size(); }
  /// y = (D - P) x, dense OpenMP product.
  void apply(std::span<const double> x, std::span<double> y) const;
};

TrafficSystem assemble(const ModelParams& params, const ThermoTables& thermo, const JumpKernel& kernel);

/// Same system from boundary fugacities directly.
TrafficSystem assemble_fugacities(const JumpKernel& kernel, std::int64_t N, double theta, double kappa,
                                  double phi_alpha, double phi_beta);

struct SolveInfo {
  std::string method;
  int iterations = 0;
  double residual = 0.0;  ///< max-norm of (D-P)phi - R
  std::vector<double> residual_history;
};

struct FugacityProfile {
  std::int64_t N = 0;
  std::vector<double> values;  ///< phi_N(x) at index x-1
  double phi_alpha = 0.0;
  double phi_beta = 0.0;
  SolveInfo info;

  double at(std::int64_t x) const { return values[static_cast<std::size_t>(x - 1)]; }
  /// phi_N at the real position uN, linearly interpolated between sites;
  /// the reservoir fugacities stand in at x = 0 and x = N.
  double interpolate(double u) const;
};

inline constexpr std::int64_t kDirectSolverCap = 8192;

/// Gaussian elimination with partial pivoting.
FugacityProfile solve_direct(const TrafficSystem& system, std::int64_t cap = kDirectSolverCap);

struct IterativeOptions {
  double tol = 1e-14;  ///< on max|r| / (2 max|D| max|x| + max|R|)
  int max_iter = 20000;
  bool use_fft = true;
  /// Called after every iteration with the current iterate.
  std::function<void(int, std::span<const double>)> on_iterate;
};

/// Jacobi-preconditioned conjugate gradients on the SPD matrix D - P.
FugacityProfile solve_iterative(const TrafficSystem& system, const IterativeOptions& opts = {});

/// Direct below the cap, iterative above.
FugacityProfile solve(const TrafficSystem& system, double tol = 1e-14);

/// m_N[x] = R(phi_N[x])
std::vector<double> density_profile(const FugacityProfile& profile, const ThermoTables& thermo);

/// max_x |((D - P) phi - R)_x|
double residual(const TrafficSystem& system, std::span<const double> phi);

}  // namespace zrlj
