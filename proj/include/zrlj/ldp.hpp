#pragma once

#include <functional>

#include "zrlj/thermo.hpp"
#include "zrlj/traffic.hpp"

namespace zrlj {

using Profile1D = std::function<double(double)>;
using NodeProfile = std::function<double(double, double, double)>;

/// Lambda_N(G)/N = (1/N) sum_x log[Z(e^{G(x/N)} phi_N(x)) / Z(phi_N(x))].
double log_mgf_scaled(const FugacityProfile& profile, const ThermoTables& thermo, const Profile1D& G);

struct QuadValue {
  double value = 0.0;
  double error = 0.0;  ///< difference against the coarser level
};

/// Composite Gauss-Legendre over panels [i/n, (i+1)/n], evaluated at n and
/// 2n panels; the finer value is returned.
QuadValue integrate_unit(const Profile1D& f, int panels = 256, int order = 8);

/// m_bar and Phi(m_bar) sampled once on the nodes of both quadrature levels.
class LdpGrid {
 public:
  LdpGrid(const Profile1D& m_bar, const ThermoTables& thermo, int panels = 256, int order = 8);

  const ThermoTables& thermo() const { return *thermo_; }
  /// Sum of w_i f(u_i, m_i, phi_i) at both levels.
  QuadValue integrate(const NodeProfile& f) const;

 private:
  struct Level {
    std::vector<double> u, w, m, phi;
  };
  const ThermoTables* thermo_;
  Level coarse_, fine_;
};

QuadValue lambda_limit(const LdpGrid& grid, const Profile1D& G);
/// pi given at the nodes as pi(u, m_bar(u), Phi(m_bar(u))).
QuadValue rate_function(const NodeProfile& pi, const LdpGrid& grid);
QuadValue gateaux_derivative(const LdpGrid& grid, const Profile1D& G, const Profile1D& H);

/// Lambda(G) = int log[Z(e^G Phi(mbar)) / Z(Phi(mbar))] du
QuadValue lambda_limit(const Profile1D& m_bar, const ThermoTables& thermo, const Profile1D& G);

/// Lambda*(pi) = int [pi log(Phi(pi)/Phi(mbar)) - log(Z(Phi(pi))/Z(Phi(mbar)))] du
QuadValue rate_function(const Profile1D& pi, const Profile1D& m_bar, const ThermoTables& thermo);

/// int R(e^G Phi(mbar)) H du
QuadValue gateaux_derivative(const Profile1D& m_bar, const ThermoTables& thermo, const Profile1D& G,
                             const Profile1D& H);

/// The maximizer of <pi, G> - Lambda(G): u -> R(e^{G(u)} Phi(mbar(u))).
Profile1D tilted_profile(const Profile1D& m_bar, const ThermoTables& thermo, const Profile1D& G);

/// Throws DomainError unless phi* = +inf.
void require_infinite_radius(const ThermoTables& thermo, const char* who);

}  // namespace zrlj
