#include "zrlj/hydrostatic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "zrlj/errors.hpp"
#include "zrlj/quadrature.hpp"

namespace zrlj {

std::string to_string(RegimeTag tag) {
  switch (tag) {
    case RegimeTag::ExplicitRatio: return "explicit-ratio";
    case RegimeTag::ReactionDiffusion: return "reaction-diffusion";
    case RegimeTag::Dirichlet: return "dirichlet";
    case RegimeTag::Robin: return "robin";
    case RegimeTag::Neumann: return "neumann";
  }
  return "?";
}

Regime classify_regime(const JumpKernel& kernel, double theta, double kappa) {
  const double g = kernel.gamma();
  Regime r;
  if (std::abs(theta) <= kRegimeTieTol) {
    if (std::abs(g - 1.0) <= kRegimeTieTol)
      throw UnsupportedError("theta = 0 with gamma = 1 is not covered by the limit theorems");
    r.tag = RegimeTag::ReactionDiffusion;
    r.kappa_hat = kappa;
    r.theta_zero = true;
    return r;
  }
  if (theta < 0.0) {
    r.tag = RegimeTag::ExplicitRatio;
    r.kappa_hat = kappa;
    return r;
  }
  if (g <= 1.0 || theta > g - 1.0 + kRegimeTieTol) {
    r.tag = RegimeTag::Neumann;
    r.kappa_hat = 0.0;
  } else if (std::abs(theta - (g - 1.0)) <= kRegimeTieTol) {
    r.tag = RegimeTag::Robin;
    r.kappa_hat = kappa * kernel.first_moment_half();
  } else {
    r.tag = RegimeTag::Dirichlet;
    r.kappa_hat = 0.0;
  }
  return r;
}

Tildes tildes(double phi_alpha, double phi_beta) {
  const double s = phi_alpha + phi_beta;
  if (!(s > 0.0)) throw DomainError("tildes: boundary fugacities must not both vanish");
  return {phi_alpha / s, phi_beta / s, s};
}

double rho_explicit(const JumpKernel& kernel, const Regime& regime, const Tildes& t, double u) {
  switch (regime.tag) {
    case RegimeTag::ExplicitRatio: {
      const VPotentials v = kernel.v_potentials(u, t.alpha, t.beta);
      return v.v0 / v.v1;
    }
    case RegimeTag::Neumann: return 0.5 * (t.alpha + t.beta);
    default: throw UnsupportedError("rho_explicit: no closed form in the " + to_string(regime.tag) + " regime");
  }
}

std::vector<double> default_grid(int points) {
  if (points < 2) throw ConfigError("grid needs at least two points");
  std::vector<double> g(static_cast<std::size_t>(points));
  const double a = 1.0 / 256.0, b = 255.0 / 256.0;
  for (int i = 0; i < points; ++i) g[i] = a + (b - a) * i / (points - 1);
  return g;
}

ProfileSequence::ProfileSequence(std::vector<FugacityProfile> profiles) : profiles_(std::move(profiles)) {
  if (profiles_.empty()) throw ConfigError("profile sequence is empty");
  for (std::size_t i = 1; i < profiles_.size(); ++i) {
    if (profiles_[i].N <= profiles_[i - 1].N) throw ConfigError("profile sequence: N must increase");
  }
  tilde_ = tildes(profiles_.front().phi_alpha, profiles_.front().phi_beta);
}

void ProfileSequence::require_three() const {
  if (profiles_.size() < 3) throw ConfigError("extrapolation needs at least three N values");
}

std::vector<double> ProfileSequence::Ns() const {
  std::vector<double> n;
  for (const auto& p : profiles_) n.push_back(static_cast<double>(p.N));
  return n;
}

Extrapolation ProfileSequence::rho(double u) const {
  require_three();
  std::vector<double> f;
  f.reserve(profiles_.size());
  for (const auto& p : profiles_) f.push_back(p.interpolate(u) / tilde_.phi_sum);
  return richardson(Ns(), f);
}

Extrapolation ProfileSequence::boundary_value(const JumpKernel& kernel, Side side) const {
  require_three();
  std::vector<double> f;
  for (const auto& p : profiles_) {
    const ReservoirRates r = reservoir_rates(kernel, p.N);
    const auto& w = side == Side::left ? r.left : r.right;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      num += w[i] * p.values[i];
      den += w[i];
    }
    f.push_back(num / den / tilde_.phi_sum);
  }
  return richardson(Ns(), f);
}

ProfileSequence::BoundaryFit ProfileSequence::fit_boundary(Side side, double gamma, double w_cut) const {
  constexpr int kPoints = 12;
  double ata[9] = {};
  double atb[3] = {};
  for (int i = 0; i < kPoints; ++i) {
    const double w = w_cut * (1.0 + 3.0 * i / (kPoints - 1));
    const double y = rho(side == Side::left ? w : 1.0 - w).value;
    const double row[3] = {1.0, std::pow(w, gamma - 1.0), w};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) ata[3 * r + c] += row[r] * row[c];
      atb[r] += row[r] * y;
    }
  }
  // Cramer's rule on the 3x3 normal equations.
  auto det3 = [](const double* m) {
    return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
           m[2] * (m[3] * m[7] - m[4] * m[6]);
  };
  const double d = det3(ata);
  double coef[3];
  for (int k = 0; k < 3; ++k) {
    double m[9];
    std::copy(ata, ata + 9, m);
    for (int r = 0; r < 3; ++r) m[3 * r + k] = atb[r];
    coef[k] = det3(m) / d;
  }
  BoundaryFit f;
  f.rho0 = coef[0];
  f.a = coef[1];
  f.b = coef[2];
  f.w_cut = w_cut;
  f.gamma = gamma;
  return f;
}

std::function<double(double)> ProfileSequence::continuum_rho(double gamma, double w_cut) const {
  if (!(gamma > 1.0)) {
    return [this](double u) { return rho(u).value; };
  }
  const BoundaryFit left = fit_boundary(Side::left, gamma, w_cut);
  const BoundaryFit right = fit_boundary(Side::right, gamma, w_cut);
  return [this, left, right, w_cut](double u) {
    if (u < w_cut) return left(u);
    if (u > 1.0 - w_cut) return right(1.0 - u);
    return rho(u).value;
  };
}

ProfileSequence solve_sequence(ModelParams base, const ThermoTables& thermo, const JumpKernel& kernel,
                               const std::vector<std::int64_t>& Ns) {
  std::vector<FugacityProfile> out;
  for (std::int64_t N : Ns) {
    base.N = N;
    out.push_back(solve(assemble(base, thermo, kernel)));
  }
  return ProfileSequence(std::move(out));
}

ContinuumProfile closed_form_profile(const JumpKernel& kernel, const Regime& regime, const Tildes& t,
                                     const ThermoTables& thermo, const std::vector<double>& grid) {
  ContinuumProfile c;
  c.grid = grid;
  c.regime = regime;
  c.tilde = t;
  c.provenance = Provenance::closed_form;
  for (double u : grid) {
    const double r = rho_explicit(kernel, regime, t, u);
    c.rho.push_back(r);
    c.m.push_back(thermo.mean_R(t.phi_sum * r));
    c.err.push_back(0.0);
  }
  const bool ratio = regime.tag == RegimeTag::ExplicitRatio;
  c.rho0 = ratio ? t.alpha : 0.5 * (t.alpha + t.beta);
  c.rho1 = ratio ? t.beta : 0.5 * (t.alpha + t.beta);
  return c;
}

ContinuumProfile rho_extrapolated(const ProfileSequence& seq, const JumpKernel& kernel, const Regime& regime,
                                  const ThermoTables& thermo, const std::vector<double>& grid) {
  ContinuumProfile c;
  c.grid = grid;
  c.regime = regime;
  c.tilde = seq.tilde();
  c.provenance = Provenance::extrapolated;
  const std::size_t n = grid.size();
  c.rho.resize(n);
  c.err.resize(n);
  std::vector<char> fell(n, 0);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
    const Extrapolation e = seq.rho(grid[i]);
    c.rho[i] = e.value;
    c.err[i] = e.error;
    fell[i] = e.fallback ? 1 : 0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    c.fallback_points += fell[i];
    c.m.push_back(thermo.mean_R(c.tilde.phi_sum * c.rho[i]));
  }
  c.rho0 = seq.boundary_value(kernel, Side::left).value;
  c.rho1 = seq.boundary_value(kernel, Side::right).value;
  return c;
}

double pairing_with_laplacian(const JumpKernel& kernel, const std::function<double(double)>& rho,
                              const SmoothFunction& G, int uniform_panels) {
  const auto& rule = quad::gauss_legendre(16);
  const double g = kernel.gamma();
  auto inside = [](double u) { return std::clamp(u, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0)); };
  if (g <= 1.0) {
    const auto edges = quad::graded_edges(0.0, 1.0, uniform_panels, true, true, 1e-10);
    auto f = [&](double u) {
      u = inside(u);
      return rho(u) * regional_frac_laplacian(kernel, G, u);
    };
    const std::size_t last = edges.size() - 2;
    double acc = quad::apply_endpoint(rule, f, 0.0, edges[1], 2.0) +
                 quad::apply_endpoint(rule, f, 1.0, edges[last] - 1.0, 2.0);
    for (std::size_t i = 1; i < last; ++i) acc += quad::apply(rule, f, edges[i], edges[i + 1]);
    return acc;
  }

  // LG = S + bounded, S = k G'(u) (u^{1-g} - (1-u)^{1-g})
  const double k = kernel.c_gamma() / (g - 1.0);
  auto bounded = [&](double u) {
    u = inside(u);
    const double sing = k * G.d1(u) * (std::pow(u, 1.0 - g) - std::pow(1.0 - u, 1.0 - g));
    return rho(u) * (regional_frac_laplacian(kernel, G, u) - sing);
  };
  const auto edges = quad::graded_edges(0.0, 1.0, uniform_panels, true, true, 1e-6);
  const std::size_t last = edges.size() - 2;
  double acc = quad::apply_endpoint(rule, bounded, 0.0, edges[1], 2.0) +
               quad::apply_endpoint(rule, bounded, 1.0, edges[last] - 1.0, 2.0);
  for (std::size_t i = 1; i < last; ++i) acc += quad::apply(rule, bounded, edges[i], edges[i + 1]);

  // int_0^1 f(w) w^{1-g} dw = q int_0^1 f(s^q) ds with q = 1/(2-g)
  const double q = 1.0 / (2.0 - g);
  auto near_left = [&](double s) {
    const double u = inside(std::pow(s, q));
    return rho(u) * G.d1(u);
  };
  auto near_right = [&](double s) {
    const double u = inside(1.0 - std::pow(s, q));
    return rho(u) * G.d1(u);
  };
  const int panels = 2 * uniform_panels;
  double sl = 0.0, sr = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double a = static_cast<double>(i) / panels, b = static_cast<double>(i + 1) / panels;
    sl += quad::apply(rule, near_left, a, b);
    sr += quad::apply(rule, near_right, a, b);
  }
  return acc + k * q * (sl - sr);
}

namespace {

void require_interior_support(const SmoothFunction& G, RegimeTag tag) {
  for (double u : {0.0, 1e-6, 1.0 - 1e-6, 1.0}) {
    if (G.value(u) != 0.0 || G.d1(u) != 0.0)
      throw ConfigError("weak_form_residual: the " + to_string(tag) +
                        " functional needs a test function supported inside (0,1); '" + G.label + "' is not");
  }
}

}  // namespace

double weak_form_residual(const JumpKernel& kernel, const WeakFormInputs& in, const SmoothFunction& G) {
  const RegimeTag tag = in.regime.tag;
  const double lap = pairing_with_laplacian(kernel, in.rho, G, in.panels);
  switch (tag) {
    case RegimeTag::ExplicitRatio:
    case RegimeTag::ReactionDiffusion: {
      require_interior_support(G, tag);
      const auto edges = quad::graded_edges(0.0, 1.0, in.panels, true, true, 1e-10);
      const auto& rule = quad::gauss_legendre(16);
      double react = 0.0;
      for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        react += quad::apply(
            rule,
            [&](double u) {
              const double g = G.value(u);
              if (g == 0.0) return 0.0;
              const VPotentials v = kernel.v_potentials(u, in.tilde.alpha, in.tilde.beta);
              return g * (v.v0 - in.rho(u) * v.v1);
            },
            edges[i], edges[i + 1]);
      }
      return std::abs(lap + in.regime.kappa_hat * react);
    }
    case RegimeTag::Dirichlet:
      require_interior_support(G, tag);
      return std::abs(lap);
    case RegimeTag::Robin: {
      const double boundary =
          G.value(0.0) * (in.tilde.alpha - in.rho0) + G.value(1.0) * (in.tilde.beta - in.rho1);
      const double sign = in.literal_robin_sign ? -1.0 : 1.0;
      return std::abs(lap + sign * in.regime.kappa_hat * boundary);
    }
    case RegimeTag::Neumann: return std::abs(lap);
  }
  return 0.0;
}

AverageGap hydrostatic_average(const FugacityProfile& profile, const std::function<double(double)>& rho,
                               const std::function<double(double)>& G,
                               const std::function<double(double, double)>& F) {
  AverageGap out;
  const double N = static_cast<double>(profile.N);
  double acc = 0.0;
  for (std::int64_t x = 1; x < profile.N; ++x) {
    const double u = static_cast<double>(x) / N;
    acc += G(u) * F(profile.at(x), u);
  }
  out.discrete = acc / static_cast<double>(profile.N - 1);
  const double s = profile.phi_alpha + profile.phi_beta;
  const auto edges = quad::graded_edges(0.0, 1.0, 32, true, true, 1e-10);
  const auto& rule = quad::gauss_legendre(16);
  double cont = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    cont += quad::apply(rule, [&](double u) { return G(u) * F(s * rho(u), u); }, edges[i], edges[i + 1]);
  out.continuum = cont;
  out.gap = std::abs(out.discrete - out.continuum);
  return out;
}

}  // namespace zrlj
