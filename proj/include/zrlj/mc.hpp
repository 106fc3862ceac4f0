#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "zrlj/kernel.hpp"
#include "zrlj/thermo.hpp"
#include "zrlj/traffic.hpp"

namespace zrlj {

/// Occupation numbers xi(x), x = 1..N-1 at index x-1.
struct ZRConfiguration {
  std::vector<std::int64_t> counts;
  std::int64_t total = 0;
};

/// (1/#Lambda_N) sum_x G(x/N) xi(x)
double empirical_pairing(const ZRConfiguration& config, std::int64_t N, const std::function<double(double)>& G);

/// Rates of both generators on Lambda_N = {1..N-1}.
struct EventTables {
  std::int64_t N = 0;
  double boundary_scale = 0.0;
  double phi_alpha = 0.0;
  double phi_beta = 0.0;
  /// Prefix sums of p(k) over offsets k = -(N-2)..N-2; cdf[0] = 0.
  std::vector<double> offset_cdf;
  std::vector<double> bulk;        ///< q_x
  std::vector<double> left;        ///< kappa N^-theta r^-_N(x/N)
  std::vector<double> right;       ///< kappa N^-theta r^+_N(x/N)
  std::vector<double> death_base;  ///< left + right
  std::vector<double> birth;       ///< Phi(b) right + Phi(a) left

  std::size_t sites() const { return bulk.size(); }
  /// Mass of the destination sampler of site x (equals q_x up to rounding).
  double destination_mass(std::int64_t x) const;
  /// p(y - x) as seen by the sampler.
  double destination_weight(std::int64_t x, std::int64_t y) const;
  /// Destination y in Lambda_N \ {x} for a uniform u in [0,1).
  std::int64_t sample_destination(std::int64_t x, double u) const;
};

EventTables build_event_tables(const TrafficSystem& system);
EventTables build_event_tables(const ModelParams& params, const JumpKernel& kernel, const ThermoTables& thermo);

struct SimOptions {
  /// Negative means automatic (running-mean stabilisation of the total count).
  double t_burn = -1.0;
  double t_sample = 1000.0;
  std::uint64_t seed = 1;
  int batches = 40;
  /// If positive, t_sample is raised so the sampling phase sees about this many events.
  std::int64_t min_events = 0;
  /// Record per-site occupation frequencies for k < pmf_bins.
  int pmf_bins = 0;
};

struct SimEstimate {
  std::int64_t N = 0;
  /// Zero-range: xi and g(xi). Exclusion: eta in both.
  std::vector<double> mean_xi, se_xi, mean_g, se_g;
  /// batch_xi[b][x-1]
  std::vector<std::vector<double>> batch_xi, batch_g;
  /// pmf[x-1][k] and its batch standard error (pmf_bins > 0).
  std::vector<std::vector<double>> pmf, pmf_se;
  double t_burn = 0.0;
  double t_sample = 0.0;
  std::int64_t events = 0;       ///< sampling phase
  std::int64_t burn_events = 0;
  std::int64_t min_total = 0;
  std::int64_t max_total = 0;
  std::uint64_t seed = 0;
  ZRConfiguration final_state;
};

/// Batch-means time average of (1/#Lambda_N) sum_x G(x/N) xi(x), with its standard error.
struct PairingEstimate {
  double value = 0.0;
  double se = 0.0;
};
PairingEstimate pairing_estimate(const SimEstimate& est, const std::function<double(double)>& G);

SimEstimate simulate_zrp(const EventTables& tables, const RateFunction& g, const SimOptions& opts);

/// Exclusion with exchange rate p(y-x) and reservoir densities alpha~, beta~
/// taken from the table fugacities.
SimEstimate simulate_exclusion(const EventTables& tables, const SimOptions& opts);

struct MappingReport {
  std::int64_t N = 0;
  std::vector<double> exact_phi;
  SimEstimate zrp;
  SimEstimate exclusion;
  double phi_sum = 0.0;
  std::vector<double> z_zrp;    ///< (E[g(xi)] - phi_N) / se
  std::vector<double> z_excl;   ///< ((Phi(a)+Phi(b)) E[eta] - phi_N) / se
  std::vector<double> z_cross;  ///< between the two simulators
  double frac_zrp = 0.0;        ///< share of sites with |z| <= 3
  double frac_excl = 0.0;
  double frac_cross = 0.0;
  bool pass = false;
};

/// Runs both processes with mapped parameters. `birth_scale` multiplies the
/// zero-range birth rates (1 for the real model).
MappingReport mapping_check(const TrafficSystem& system, const FugacityProfile& exact, const RateFunction& g,
                            SimOptions zrp_opts, SimOptions excl_opts, double birth_scale = 1.0);

/// Exact stationary law of the N = 3 chain on {0..K}^2 by dense linear algebra.
struct BruteForceResult {
  int K = 0;
  std::vector<std::vector<double>> marginals;  ///< [site][k]
  double leakage = 0.0;                        ///< mass on states with a count equal to K
  std::vector<double> tv;                      ///< per-site TV distance to nu_phi
  double max_tv = 0.0;
};
BruteForceResult brute_force_two_site(const EventTables& tables, const RateFunction& g, const ThermoTables& thermo,
                                      std::span<const double> phi, int K = 40);

}  // namespace zrlj
