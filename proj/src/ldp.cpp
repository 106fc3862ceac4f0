#include "zrlj/ldp.hpp"

#include <cmath>
#include <string>

#include "zrlj/errors.hpp"
#include "zrlj/quadrature.hpp"

namespace zrlj {

void require_infinite_radius(const ThermoTables& thermo, const char* who) {
  if (std::isfinite(thermo.phi_star()))
    throw DomainError(std::string(who) + ": the large-deviation functionals need phi* = +inf; rate function '" +
                      thermo.rate().name() + "' has phi* = " + std::to_string(thermo.phi_star()));
}

double log_mgf_scaled(const FugacityProfile& profile, const ThermoTables& thermo, const Profile1D& G) {
  require_infinite_radius(thermo, "log_mgf_scaled");
  const double N = static_cast<double>(profile.N);
  double acc = 0.0;
  for (std::int64_t x = 1; x < profile.N; ++x) {
    const double phi = profile.at(x);
    const double g = G(static_cast<double>(x) / N);
    if (g == 0.0) continue;
    try {
      acc += thermo.log_Z(std::exp(g) * phi) - thermo.log_Z(phi);
    } catch (const DomainError& e) {
      throw DomainError("log_mgf_scaled: site x = " + std::to_string(x) + ": " + e.what());
    }
  }
  return acc / N;
}

QuadValue integrate_unit(const Profile1D& f, int panels, int order) {
  const auto& rule = quad::gauss_legendre(order);
  auto level = [&](int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += quad::apply(rule, f, static_cast<double>(i) / n, static_cast<double>(i + 1) / n);
    return s;
  };
  const double coarse = level(panels);
  const double fine = level(2 * panels);
  return {fine, std::abs(fine - coarse)};
}

LdpGrid::LdpGrid(const Profile1D& m_bar, const ThermoTables& thermo, int panels, int order) : thermo_(&thermo) {
  require_infinite_radius(thermo, "ldp");
  const auto& rule = quad::gauss_legendre(order);
  auto fill = [&](Level& L, int n) {
    for (int i = 0; i < n; ++i) {
      const double a = static_cast<double>(i) / n, h = 0.5 / n;
      for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        L.u.push_back(a + h * (1.0 + rule.nodes[k]));
        L.w.push_back(h * rule.weights[k]);
      }
    }
    L.m.resize(L.u.size());
    L.phi.resize(L.u.size());
    for (std::size_t j = 0; j < L.u.size(); ++j) {
      L.m[j] = m_bar(L.u[j]);
      L.phi[j] = thermo.fugacity_Phi(L.m[j]);
    }
  };
  fill(coarse_, panels);
  fill(fine_, 2 * panels);
}

QuadValue LdpGrid::integrate(const NodeProfile& f) const {
  auto sum = [&](const Level& L) {
    double s = 0.0;
    for (std::size_t j = 0; j < L.u.size(); ++j) s += L.w[j] * f(L.u[j], L.m[j], L.phi[j]);
    return s;
  };
  const double c = sum(coarse_), v = sum(fine_);
  return {v, std::abs(v - c)};
}

QuadValue lambda_limit(const LdpGrid& grid, const Profile1D& G) {
  const ThermoTables& th = grid.thermo();
  return grid.integrate([&](double u, double, double phi) {
    const double g = G(u);
    if (g == 0.0) return 0.0;
    return th.log_Z(std::exp(g) * phi) - th.log_Z(phi);
  });
}

QuadValue rate_function(const NodeProfile& pi, const LdpGrid& grid) {
  const ThermoTables& th = grid.thermo();
  return grid.integrate([&](double u, double m, double phi_m) {
    const double p = pi(u, m, phi_m);
    if (!(p >= 0.0 && p < th.m_star()))
      throw DomainError("rate_function: pi(" + std::to_string(u) + ") = " + std::to_string(p) + " outside [0, m*)");
    const double lz_m = th.log_Z(phi_m);
    if (p == 0.0) return lz_m;
    const double phi_p = th.fugacity_Phi(p);
    return p * std::log(phi_p / phi_m) - (th.log_Z(phi_p) - lz_m);
  });
}

QuadValue gateaux_derivative(const LdpGrid& grid, const Profile1D& G, const Profile1D& H) {
  const ThermoTables& th = grid.thermo();
  return grid.integrate([&](double u, double, double phi) {
    const double h = H(u);
    if (h == 0.0) return 0.0;
    return th.mean_R(std::exp(G(u)) * phi) * h;
  });
}

QuadValue lambda_limit(const Profile1D& m_bar, const ThermoTables& thermo, const Profile1D& G) {
  return lambda_limit(LdpGrid(m_bar, thermo), G);
}

QuadValue rate_function(const Profile1D& pi, const Profile1D& m_bar, const ThermoTables& thermo) {
  return rate_function([&](double u, double, double) { return pi(u); }, LdpGrid(m_bar, thermo));
}

QuadValue gateaux_derivative(const Profile1D& m_bar, const ThermoTables& thermo, const Profile1D& G,
                             const Profile1D& H) {
  return gateaux_derivative(LdpGrid(m_bar, thermo), G, H);
}

Profile1D tilted_profile(const Profile1D& m_bar, const ThermoTables& thermo, const Profile1D& G) {
  require_infinite_radius(thermo, "tilted_profile");
  return [m_bar, &thermo, G](double u) { return thermo.mean_R(std::exp(G(u)) * thermo.fugacity_Phi(m_bar(u))); };
}

}  // namespace zrlj
