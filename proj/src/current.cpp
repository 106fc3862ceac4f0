#include "zrlj/current.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "zrlj/errors.hpp"
#include "zrlj/parallel_kernels.hpp"
#include "zrlj/quadrature.hpp"

namespace zrlj {

namespace {

kernels::CurrentInputs inputs(const TrafficSystem& s, std::span<const double> phi, double left_value,
                              double right_value) {
  if (phi.size() != s.size()) throw ConfigError("current: profile size does not match the system");
  return {phi, s.tails, s.rates.left, s.rates.right, s.boundary_scale, left_value, right_value};
}

double integrate_graded(const std::function<double(double)>& f, double a, double b, int panels = 16) {
  if (!(b > a)) return 0.0;
  const auto edges = quad::graded_edges(a, b, panels, true, true, 1e-9 * (b - a));
  const std::size_t last = edges.size() - 2;
  auto inside = [&](double x) {
    return f(std::clamp(x, std::nextafter(a, b), std::nextafter(b, a)));
  };
  // q = 10 flattens endpoint powers down to |x-a|^{-0.9}
  const auto& rule = quad::gauss_legendre(16);
  double acc = quad::apply_endpoint(rule, inside, a, edges[1] - a, 10.0) +
               quad::apply_endpoint(rule, inside, b, edges[last] - b, 10.0);
  if (last > 1) acc += quad::integrate_panels(f, std::span<const double>(edges).subspan(1, last), 16);
  return acc;
}

constexpr double kProbes[5] = {0.2, 0.35, 0.5, 0.65, 0.8};

}  // namespace

double stationary_current(const TrafficSystem& system, std::span<const double> phi, double left_value,
                          double right_value, std::int64_t x) {
  if (x < 1 || x > system.N) throw DomainError("stationary_current: bond index outside 1..N");
  return kernels::bond_current(inputs(system, phi, left_value, right_value), x);
}

std::vector<double> bond_currents(const TrafficSystem& system, std::span<const double> phi, double left_value,
                                  double right_value) {
  std::vector<double> out(static_cast<std::size_t>(system.N));
  kernels::omp::bond_currents(inputs(system, phi, left_value, right_value), out);
  return out;
}

CurrentReport current_report(const TrafficSystem& system, const FugacityProfile& profile, double gamma,
                             double theta) {
  CurrentReport r;
  r.N = system.N;
  r.per_x = bond_currents(system, profile.values, profile.phi_alpha, profile.phi_beta);
  r.current = r.per_x.front();
  r.scale_B = scaling_B(system.N, gamma, theta);
  r.rescaled = r.current / r.scale_B;
  for (double w : r.per_x) {
    const double d = std::abs(w - r.current);
    r.max_rel_dev = std::max(r.max_rel_dev, r.current != 0.0 ? d / std::abs(r.current) : d);
  }
  return r;
}

std::vector<double> exclusion_bond_currents(const TrafficSystem& system, const FugacityProfile& profile) {
  const Tildes t = tildes(profile.phi_alpha, profile.phi_beta);
  std::vector<double> rho(profile.values.size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = profile.values[i] / t.phi_sum;
  return bond_currents(system, rho, t.alpha, t.beta);
}

double scaling_B(std::int64_t N, double gamma, double theta) {
  const double n = static_cast<double>(N);
  return theta >= 0.0 ? std::pow(n, 1.0 - gamma) : std::pow(n, 1.0 - theta - gamma);
}

double h_theta_fn(double u, double gamma, double theta, double kappa, double c_gamma) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("h_theta: u must lie in (0,1)");
  if (gamma == 1.0) return theta >= 0.0 ? c_gamma * (std::log(1.0 - u) - std::log(u)) : 0.0;
  const double weight = (theta <= 0.0 ? kappa / gamma : 0.0) + (theta >= 0.0 ? 1.0 / (1.0 - gamma) : 0.0);
  return c_gamma * weight * (std::pow(1.0 - u, 1.0 - gamma) - std::pow(u, 1.0 - gamma));
}

double fick_constant(double alpha_t, double beta_t, double gamma, double theta, double kappa, double c_gamma) {
  if (theta > 0.0) return 0.0;
  return c_gamma * kappa * (alpha_t - beta_t) / (gamma * (2.0 - gamma));
}

double fick_closed_form(const JumpKernel& kernel, double kappa, const Tildes& t) {
  const double g = kernel.gamma();
  const double I = integrate_graded([g](double v) { return 1.0 / (std::pow(v, g) + std::pow(1.0 - v, g)); }, 0.0, 1.0);
  const double phi_a = t.alpha * t.phi_sum, phi_b = t.beta * t.phi_sum;
  return kappa * kernel.c_gamma() / g * (phi_a - phi_b) * I;
}

double fick_double_integral(const JumpKernel& kernel, const std::function<double(double)>& f, double u) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("fick_double_integral: u must lie in (0,1)");
  const double g = kernel.gamma();
  // a = u - v in (0, u), b = w - u in (0, 1 - u); the integrand is singular only at a = b = 0.
  const auto ea = quad::graded_edges(0.0, u, 4, true, true, 1e-13);
  const auto eb = quad::graded_edges(0.0, 1.0 - u, 4, true, true, 1e-13);
  const auto& rule = quad::gauss_legendre(16);
  const std::size_t q = rule.nodes.size();
  struct Axis {
    std::vector<double> x, w, f;
  };
  auto build = [&](const std::vector<double>& edges, double sign) {
    Axis ax;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      const double h = 0.5 * (edges[i + 1] - edges[i]), m = 0.5 * (edges[i + 1] + edges[i]);
      for (std::size_t k = 0; k < q; ++k) {
        const double x = m + h * rule.nodes[k];
        ax.x.push_back(x);
        ax.w.push_back(h * rule.weights[k]);
        ax.f.push_back(f(u + sign * x));
      }
    }
    return ax;
  };
  const Axis A = build(ea, -1.0);
  const Axis B = build(eb, 1.0);
  const std::size_t pa = ea.size() - 1, pb = eb.size() - 1;
  double acc = 0.0;
  for (std::size_t i = 0; i < pa; ++i) {
    for (std::size_t j = 0; j < pb; ++j) {
      if (i == 0 && j == 0) continue;
      double s = 0.0;
      for (std::size_t k = i * q; k < (i + 1) * q; ++k) {
        for (std::size_t l = j * q; l < (j + 1) * q; ++l)
          s += A.w[k] * B.w[l] * (A.f[k] - B.f[l]) * std::pow(A.x[k] + B.x[l], -1.0 - g);
      }
      acc += s;
    }
  }
  // Corner cell: f(u-a) - f(u+b) ~ -f'(u)(a+b).
  const double a0 = ea[1], b0 = eb[1];
  const double h = 1e-4 * std::min(u, 1.0 - u);
  const double fp = (f(u + h) - f(u - h)) / (2.0 * h);
  double J;
  if (std::abs(g - 1.0) < 1e-12) {
    auto xl = [](double x) { return x * std::log(x); };
    J = xl(a0 + b0) - xl(a0) - xl(b0);
  } else {
    J = (std::pow(a0 + b0, 2.0 - g) - std::pow(a0, 2.0 - g) - std::pow(b0, 2.0 - g)) / ((1.0 - g) * (2.0 - g));
  }
  acc -= fp * J;
  return kernel.c_gamma() * acc;
}

namespace {

// kappa [int_u^1 (a~ - rho) r^- - int_0^u (b~ - rho) r^+], exclusion units.
double reservoir_part(const JumpKernel& kernel, double kappa, const Tildes& t,
                      const std::function<double(double)>& rho, double u) {
  const double in_left = integrate_graded(
      [&](double w) { return (t.alpha - rho(w)) * kernel.continuum_rate(w, Side::left); }, u, 1.0);
  const double in_right = integrate_graded(
      [&](double v) { return (t.beta - rho(v)) * kernel.continuum_rate(v, Side::right); }, 0.0, u);
  return kappa * (in_left - in_right);
}

}  // namespace

FickLimit fick_limit(const JumpKernel& kernel, const Regime& regime, double theta, double kappa, const Tildes& t,
                     const std::function<double(double)>& rho) {
  if (regime.tag == RegimeTag::ReactionDiffusion && std::abs(kernel.gamma() - 1.0) < 1e-12)
    throw UnsupportedError("fick_limit: theta = 0 with gamma = 1 is excluded");
  FickLimit out;
  const bool bulk = theta >= 0.0;
  const bool boundary = theta <= 0.0;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
  for (double u : kProbes) {
    double v = 0.0;
    if (bulk) v += fick_double_integral(kernel, rho, u);
    if (boundary) v += reservoir_part(kernel, kappa, t, rho, u);
    v *= t.phi_sum;
    out.u.push_back(u);
    out.per_u.push_back(v);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    sum += v;
  }
  out.value = sum / 5.0;
  out.spread = hi - lo;
  if (theta < 0.0) {
    out.closed_form = fick_closed_form(kernel, kappa, t);
    out.has_closed_form = true;
  }
  const double g = kernel.gamma(), c = kernel.c_gamma();
  const double hint =
      integrate_graded([&](double u) { return h_theta_fn(u, g, theta, kappa, c) * rho(u); }, 0.0, 1.0);
  out.h_route = t.phi_sum * (hint + fick_constant(t.alpha, t.beta, g, theta, kappa, c));
  return out;
}

SweepResult fick_sweep(ModelParams base, const ThermoTables& thermo, const JumpKernel& kernel,
                       const std::vector<std::int64_t>& Ns) {
  if (Ns.size() < 3) throw ConfigError("fick_sweep: need at least three N values");
  SweepResult out;
  std::vector<double> n, f;
  for (std::int64_t N : Ns) {
    base.N = N;
    const TrafficSystem s = assemble(base, thermo, kernel);
    const FugacityProfile p = solve(s);
    SweepRow row;
    row.N = N;
    row.scale_B = scaling_B(N, base.gamma, base.theta);
    row.current = stationary_current(s, p.values, p.phi_alpha, p.phi_beta, 1);
    row.rescaled = row.current / row.scale_B;
    out.rows.push_back(row);
    n.push_back(static_cast<double>(N));
    f.push_back(row.rescaled);
    if (N == Ns.front() && base.theta < 0.0) {
      out.closed_form = fick_closed_form(kernel, base.kappa, tildes(p.phi_alpha, p.phi_beta));
      out.has_closed_form = true;
    }
  }
  out.limit = richardson(n, f);
  if (out.has_closed_form && out.closed_form != 0.0)
    out.rel_err = std::abs(out.limit.value - out.closed_form) / std::abs(out.closed_form);
  return out;
}

}  // namespace zrlj
