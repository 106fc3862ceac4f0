#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "zrlj/extrapolation.hpp"
#include "zrlj/hydrostatic.hpp"
#include "zrlj/kernel.hpp"
#include "zrlj/traffic.hpp"

namespace zrlj {

/// Expected current E[W_x] across the bond x - 1/2, x = 1..N, from the exact
/// profile. `phi` holds phi_N (or the mapped exclusion density, with the
/// matching boundary values).
double stationary_current(const TrafficSystem& system, std::span<const double> phi, double left_value,
                          double right_value, std::int64_t x);

/// All bonds at once: out[x-1] = E[W_x].
std::vector<double> bond_currents(const TrafficSystem& system, std::span<const double> phi, double left_value,
                                  double right_value);

struct CurrentReport {
  std::int64_t N = 0;
  std::vector<double> per_x;
  double current = 0.0;      ///< E[W_1]
  double scale_B = 0.0;
  double rescaled = 0.0;     ///< E[W_1] / B_N
  double max_rel_dev = 0.0;  ///< max_x |W_x - W_1| / |W_1|
};

CurrentReport current_report(const TrafficSystem& system, const FugacityProfile& profile, double gamma,
                             double theta);

/// Exclusion current from the mapped profile rho_x = phi_N(x)/(Phi(a)+Phi(b)).
std::vector<double> exclusion_bond_currents(const TrafficSystem& system, const FugacityProfile& profile);

/// N^{1-gamma} for theta >= 0, N^{1-theta-gamma} otherwise.
double scaling_B(std::int64_t N, double gamma, double theta);

double h_theta_fn(double u, double gamma, double theta, double kappa, double c_gamma);

double fick_constant(double alpha_t, double beta_t, double gamma, double theta, double kappa, double c_gamma);

struct FickLimit {
  double value = 0.0;   ///< mean over the probe points, zero-range units
  double spread = 0.0;  ///< max - min over the probe points
  std::vector<double> u;
  std::vector<double> per_u;
  double closed_form = 0.0;  ///< theta < 0 only
  bool has_closed_form = false;
  double h_route = 0.0;      ///< (Phi(a)+Phi(b)) (int h_theta rho + C)
};

/// Limit of E[W_{[uN]}]/B_N for the profile rho (exclusion units in, zero-range
/// units out), evaluated at five interior points.
FickLimit fick_limit(const JumpKernel& kernel, const Regime& regime, double theta, double kappa, const Tildes& t,
                     const std::function<double(double)>& rho);

/// kappa c/gamma int_0^1 (Phi(a) - Phi(b)) / (v^gamma + (1-v)^gamma) dv
double fick_closed_form(const JumpKernel& kernel, double kappa, const Tildes& t);

/// c int_0^u int_u^1 (f(v) - f(w)) (w-v)^{-1-gamma} dw dv
double fick_double_integral(const JumpKernel& kernel, const std::function<double(double)>& f, double u);

struct SweepRow {
  std::int64_t N = 0;
  double scale_B = 0.0;
  double current = 0.0;
  double rescaled = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  Extrapolation limit;
  double closed_form = 0.0;
  bool has_closed_form = false;
  double rel_err = 0.0;  ///< against the closed form when present
};

SweepResult fick_sweep(ModelParams base, const ThermoTables& thermo, const JumpKernel& kernel,
                       const std::vector<std::int64_t>& Ns);

}  // namespace zrlj
