#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "zrlj/extrapolation.hpp"
#include "zrlj/kernel.hpp"
#include "zrlj/smooth_function.hpp"
#include "zrlj/thermo.hpp"
#include "zrlj/traffic.hpp"

namespace zrlj {

enum class RegimeTag { ExplicitRatio, ReactionDiffusion, Dirichlet, Robin, Neumann };

std::string to_string(RegimeTag tag);

struct Regime {
  RegimeTag tag = RegimeTag::ExplicitRatio;
  double kappa_hat = 0.0;
  /// theta = 0 uses both branches of h_theta.
  bool theta_zero = false;
};

/// Theta within this distance of 0 or of gamma-1 counts as the boundary case.
inline constexpr double kRegimeTieTol = 1e-12;

/// kappa_hat uses d = kernel.first_moment_half() in the Robin case.
Regime classify_regime(const JumpKernel& kernel, double theta, double kappa);

/// alpha~ = Phi(a)/(Phi(a)+Phi(b)), beta~ = Phi(b)/(Phi(a)+Phi(b))
struct Tildes {
  double alpha = 0.0;
  double beta = 0.0;
  double phi_sum = 0.0;  ///< Phi(a) + Phi(b)
};
Tildes tildes(double phi_alpha, double phi_beta);

/// Closed-form rho for the explicit-ratio and Neumann regimes.
double rho_explicit(const JumpKernel& kernel, const Regime& regime, const Tildes& t, double u);

enum class Provenance { closed_form, extrapolated };

struct ContinuumProfile {
  std::vector<double> grid;
  std::vector<double> rho;
  std::vector<double> m;
  std::vector<double> err;
  Regime regime;
  Provenance provenance = Provenance::closed_form;
  Tildes tilde;
  int fallback_points = 0;  ///< grid points where extrapolation fell back
  /// Boundary values for the Dirichlet and Robin regimes (one-sided limits).
  double rho0 = 0.0;
  double rho1 = 0.0;
};

/// 257 uniform points on [1/256, 255/256].
std::vector<double> default_grid(int points = 257);

/// Solved profiles for an increasing N sequence, used as a large-N limit.
class ProfileSequence {
 public:
  explicit ProfileSequence(std::vector<FugacityProfile> profiles);

  const std::vector<FugacityProfile>& profiles() const { return profiles_; }
  std::vector<double> Ns() const;
  Tildes tilde() const { return tilde_; }

  /// Richardson limit of phi_N(uN)/(Phi(a)+Phi(b)).
  Extrapolation rho(double u) const;
  /// Limit of the reservoir-weighted boundary average sum_x r(x) rho_x / sum_x r(x)
  /// at the given side; tends to rho(0) or rho(1) for continuous profiles.
  Extrapolation boundary_value(const JumpKernel& kernel, Side side) const;

  /// Least-squares fit rho0 + a w^{gamma-1} + b w (w the distance to the
  /// boundary) to extrapolated values on [w_cut, 4 w_cut]. Returns rho0.
  struct BoundaryFit {
    double rho0 = 0.0;
    double a = 0.0;
    double b = 0.0;
    double w_cut = 0.0;
    double gamma = 1.5;
    double operator()(double w) const { return rho0 + a * std::pow(w, gamma - 1.0) + b * w; }
  };
  BoundaryFit fit_boundary(Side side, double gamma, double w_cut = 1.0 / 64.0) const;

  /// Extrapolated rho on [w_cut, 1 - w_cut] joined to the boundary fits
  /// outside; used wherever rho must be evaluated up to the endpoints.
  std::function<double(double)> continuum_rho(double gamma, double w_cut = 1.0 / 64.0) const;

 private:
  void require_three() const;

  std::vector<FugacityProfile> profiles_;
  Tildes tilde_;
};

/// Solves the traffic equation for each N of the sequence.
ProfileSequence solve_sequence(ModelParams base, const ThermoTables& thermo, const JumpKernel& kernel,
                               const std::vector<std::int64_t>& Ns);

ContinuumProfile closed_form_profile(const JumpKernel& kernel, const Regime& regime, const Tildes& t,
                                     const ThermoTables& thermo, const std::vector<double>& grid);

ContinuumProfile rho_extrapolated(const ProfileSequence& seq, const JumpKernel& kernel, const Regime& regime,
                                  const ThermoTables& thermo, const std::vector<double>& grid);

/// <rho, L G> by graded Gauss-Legendre quadrature.
double pairing_with_laplacian(const JumpKernel& kernel, const std::function<double(double)>& rho,
                              const SmoothFunction& G, int uniform_panels = 32);

struct WeakFormInputs {
  Regime regime;
  Tildes tilde;
  std::function<double(double)> rho;
  double rho0 = 0.0;  ///< Robin boundary values
  double rho1 = 0.0;
  int panels = 32;
  /// Evaluate the boundary term with the opposite sign (A/B diagnostic).
  bool literal_robin_sign = false;
};

/// |F(rho, G)| for the regime's functional. RD and Dirichlet require G to
/// vanish near 0 and 1.
double weak_form_residual(const JumpKernel& kernel, const WeakFormInputs& in, const SmoothFunction& G);

struct AverageGap {
  double discrete = 0.0;
  double continuum = 0.0;
  double gap = 0.0;
};

/// (1/#Lambda_N) sum_x G(x/N) F(phi_N(x), x/N) against
/// int G(u) F((Phi(a)+Phi(b)) rho(u), u) du.
AverageGap hydrostatic_average(const FugacityProfile& profile, const std::function<double(double)>& rho,
                               const std::function<double(double)>& G,
                               const std::function<double(double, double)>& F);

}  // namespace zrlj
