#include "zrlj/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "zrlj/errors.hpp"
#include "zrlj/parallel_kernels.hpp"
#include "zrlj/toeplitz.hpp"

namespace zrlj {

namespace {

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double a : v) m = std::max(m, std::abs(a));
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

constexpr std::int64_t kDenseResidualCap = 1 << 15;

void refine(const TrafficSystem& system, std::vector<double>& x, int rounds);

}  // namespace

void ModelParams::validate(const ThermoTables& thermo) const {
  if (!(gamma > 0.0 && gamma < 2.0)) throw ConfigError("gamma must lie in (0,2)");
  if (!std::isfinite(theta)) throw ConfigError("theta must be finite");
  if (!(kappa > 0.0 && std::isfinite(kappa))) throw ConfigError("kappa must be positive");
  if (N < 2) throw ConfigError("N must be >= 2");
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (!(alpha <= beta)) throw ConfigError("alpha must not exceed beta");
  if (!(beta < thermo.m_star()))
    throw DomainError("beta = " + std::to_string(beta) + " is not below m* = " + std::to_string(thermo.m_star()) +
                      " (condensation regime)");
}

double ModelParams::boundary_scale() const { return kappa * std::pow(static_cast<double>(N), -theta); }

void TrafficSystem::apply(std::span<const double> x, std::span<double> y) const {
  kernels::omp::toeplitz_matvec(kernel_row, x, y);
  for (std::size_t i = 0; i < diag.size(); ++i) y[i] = diag[i] * x[i] - y[i];
}

TrafficSystem assemble_fugacities(const JumpKernel& kernel, std::int64_t N, double theta, double kappa,
                                  double phi_alpha, double phi_beta) {
  if (N < 2) throw ConfigError("N must be >= 2");
  TrafficSystem s;
  s.N = N;
  s.rates = reservoir_rates(kernel, N);
  s.tails = kernel.tails(N);
  s.boundary_scale = kappa * std::pow(static_cast<double>(N), -theta);
  s.phi_alpha = phi_alpha;
  s.phi_beta = phi_beta;
  const std::size_t n = static_cast<std::size_t>(N - 1);
  s.diag.resize(n);
  s.rhs.resize(n);
  s.margin.resize(n);
  s.kernel_row.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double l = s.rates.left[i];
    const double r = s.rates.right[i];
    s.margin[i] = s.boundary_scale * (l + r);
    s.rhs[i] = s.boundary_scale * (phi_beta * r + phi_alpha * l);
    s.kernel_row[i] = kernel(static_cast<std::int64_t>(i));
  }
  // row sums of the kernel block itself; total - left - right loses the last bits
  std::vector<long double> head(n);
  long double run = 0.0L;
  for (std::size_t k = 1; k < n; ++k) head[k] = run += s.kernel_row[k];
  for (std::size_t i = 0; i < n; ++i) {
    s.diag[i] = static_cast<double>(head[i] + head[n - 1 - i] + static_cast<long double>(s.margin[i]));
  }
  // rebuild the finite part of the tails from kernel_row so differences match the matrix
  long double acc = s.tails[n];
  for (std::size_t k = n; k-- > 1;) {
    acc += s.kernel_row[k];
    s.tails[k] = static_cast<double>(acc);
  }
  return s;
}

TrafficSystem assemble(const ModelParams& params, const ThermoTables& thermo, const JumpKernel& kernel) {
  params.validate(thermo);
  return assemble_fugacities(kernel, params.N, params.theta, params.kappa, thermo.fugacity_Phi(params.alpha),
                             thermo.fugacity_Phi(params.beta));
}

double FugacityProfile::interpolate(double u) const {
  const double pos = u * static_cast<double>(N);
  if (pos <= 0.0) return phi_alpha;
  if (pos >= static_cast<double>(N)) return phi_beta;
  const auto i = static_cast<std::int64_t>(std::floor(pos));
  const double f = pos - static_cast<double>(i);
  auto value = [&](std::int64_t x) { return x <= 0 ? phi_alpha : (x >= N ? phi_beta : at(x)); };
  return f == 0.0 ? value(i) : (1.0 - f) * value(i) + f * value(i + 1);
}

double residual(const TrafficSystem& system, std::span<const double> phi) {
  const std::size_t n = system.size();
  std::vector<double> y(n);
  if (system.N <= kDenseResidualCap) {
    system.apply(phi, y);
  } else {
    SymmetricToeplitz T(system.kernel_row);
    T.apply(phi, y);
    for (std::size_t i = 0; i < n; ++i) y[i] = system.diag[i] * phi[i] - y[i];
  }
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(y[i] - system.rhs[i]));
  return m;
}

FugacityProfile solve_direct(const TrafficSystem& system, std::int64_t cap) {
  if (system.N > cap)
    throw ConfigError("solve_direct: N = " + std::to_string(system.N) + " exceeds the direct-solver cap " +
                      std::to_string(cap) + "; use solve_iterative");
  const std::size_t n = system.size();
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i * n + j] = -system.kernel_row[i > j ? i - j : j - i];
    a[i * n + i] = system.diag[i];
  }
  std::vector<double> b = system.rhs;
  if (!kernels::omp::lu_solve(a, b, n)) throw ConvergenceError("solve_direct: singular pivot");
  FugacityProfile p;
  p.N = system.N;
  p.values = std::move(b);
  p.phi_alpha = system.phi_alpha;
  p.phi_beta = system.phi_beta;
  p.info.method = "direct";
  refine(system, p.values, 3);
  p.info.residual = residual(system, p.values);
  return p;
}

namespace {

FugacityProfile pcg(const TrafficSystem& system, const IterativeOptions& opts) {
  if (!(opts.tol > 0.0)) throw ConfigError("solve_iterative: tol must be positive");
  const std::size_t n = system.size();
  const auto& D = system.diag;
  const auto& R = system.rhs;

  std::unique_ptr<SymmetricToeplitz> fft;
  if (opts.use_fft) fft = std::make_unique<SymmetricToeplitz>(system.kernel_row);
  auto matvec = [&](std::span<const double> x, std::span<double> y) {
    if (fft) {
      fft->apply(x, y);
      for (std::size_t i = 0; i < n; ++i) y[i] = D[i] * x[i] - y[i];
    } else {
      system.apply(x, y);
    }
  };

  std::vector<double> x(n);
  const double N = static_cast<double>(system.N);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = system.phi_alpha + (system.phi_beta - system.phi_alpha) * static_cast<double>(i + 1) / N;

  const double norm_a = 2.0 * max_abs(D);
  const double norm_r = max_abs(R);
  auto scale = [&] { return norm_a * max_abs(x) + norm_r; };

  std::vector<double> r(n), z(n), p(n), ap(n);
  auto true_residual = [&] {
    system.apply(x, ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = R[i] - ap[i];
    return max_abs(r);
  };

  FugacityProfile out;
  out.N = system.N;
  out.phi_alpha = system.phi_alpha;
  out.phi_beta = system.phi_beta;
  out.info.method = opts.use_fft ? "pcg-fft" : "pcg-dense";

  double res = true_residual();
  out.info.residual_history.push_back(res);
  int it = 0;
  while (res > opts.tol * scale()) {
    // (Re)start from the true residual.
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / D[i];
    p = z;
    double rz = dot(r, z);
    bool restart = false;
    while (!restart) {
      if (it >= opts.max_iter) {
        std::ostringstream msg;
        msg << "solve_iterative: no convergence after " << it << " iterations; residual history:";
        const auto& h = out.info.residual_history;
        const std::size_t stride = std::max<std::size_t>(1, h.size() / 10);
        for (std::size_t k = 0; k < h.size(); k += stride) msg << ' ' << h[k];
        msg << ' ' << h.back();
        throw ConvergenceError(msg.str());
      }
      matvec(p, ap);
      const double pap = dot(p, ap);
      if (!(pap > 0.0)) {
        ++it;
        restart = true;
        break;
      }
      const double step = rz / pap;
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += step * p[i];
        r[i] -= step * ap[i];
      }
      ++it;
      const double rec = max_abs(r);
      out.info.residual_history.push_back(rec);
      if (opts.on_iterate) opts.on_iterate(it, x);
      if (rec <= opts.tol * scale()) {
        restart = true;
        break;
      }
      for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / D[i];
      const double rz_new = dot(r, z);
      const double b = rz_new / rz;
      rz = rz_new;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + b * p[i];
    }
    const double prev = res;
    res = true_residual();
    if (res > opts.tol * scale() && res > 0.5 * prev && it > 0 && out.info.residual_history.size() > 2) {
      // Recurrence converged but the true residual did not move: rounding floor.
      if (res <= 100.0 * opts.tol * scale()) break;
    }
  }
  out.values = std::move(x);
  out.info.iterations = it;
  return out;
}

// r = R - (D - P) x accumulated in long double
std::vector<double> extended_residual(const TrafficSystem& system, std::span<const double> x, long double& worst) {
  const std::size_t n = system.size();
  std::vector<double> r(n);
  worst = 0.0L;
#pragma omp parallel for schedule(static) reduction(max : worst)
  for (std::size_t i = 0; i < n; ++i) {
    long double acc = static_cast<long double>(system.rhs[i]) -
                      static_cast<long double>(system.diag[i]) * static_cast<long double>(x[i]);
    for (std::size_t j = 0; j < n; ++j)
      if (j != i)
        acc += static_cast<long double>(system.kernel_row[i > j ? i - j : j - i]) * static_cast<long double>(x[j]);
    r[i] = static_cast<double>(acc);
    worst = std::max(worst, acc < 0 ? -acc : acc);
  }
  return r;
}

constexpr std::int64_t kRefineCap = 1 << 13;

void refine(const TrafficSystem& system, std::vector<double>& x, int rounds) {
  if (system.N > kRefineCap) return;
  long double prev = 0.0L;
  std::vector<double> r = extended_residual(system, x, prev);
  TrafficSystem c = system;
  c.phi_alpha = 0.0;
  c.phi_beta = 0.0;
  IterativeOptions o;
  o.tol = 1e-10;
  for (int k = 0; k < rounds && prev > 0.0L; ++k) {
    c.rhs = r;
    const FugacityProfile d = pcg(c, o);
    std::vector<double> y = x;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += d.values[i];
    long double now = 0.0L;
    std::vector<double> ry = extended_residual(system, y, now);
    if (!(now < prev)) break;
    x = std::move(y);
    r = std::move(ry);
    prev = now;
  }
}

}  // namespace

FugacityProfile solve_iterative(const TrafficSystem& system, const IterativeOptions& opts) {
  FugacityProfile out = pcg(system, opts);
  refine(system, out.values, 3);
  out.info.residual = residual(system, out.values);
  return out;
}

FugacityProfile solve(const TrafficSystem& system, double tol) {
  if (system.N <= 1024) return solve_direct(system);
  IterativeOptions o;
  o.tol = tol;
  return solve_iterative(system, o);
}

std::vector<double> density_profile(const FugacityProfile& profile, const ThermoTables& thermo) {
  std::vector<double> m(profile.values.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = thermo.mean_R(profile.values[i]);
  return m;
}

}  // namespace zrlj
