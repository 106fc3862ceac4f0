#include "zrlj/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "zrlj/errors.hpp"
#include "zrlj/parallel_kernels.hpp"
#include "zrlj/quadrature.hpp"

namespace zrlj {

namespace {

constexpr std::int64_t kDirectHead = 256;

// sum_{k >= M} k^{-s} by Euler-Maclaurin; remainder O(M^{-s-7}).
double euler_maclaurin_tail(double M, double s) {
  const double Ms = std::pow(M, -s);
  const double inv = 1.0 / M;
  const double inv2 = inv * inv;
  double r = M * Ms / (s - 1.0) + 0.5 * Ms;
  r += s * Ms * inv / 12.0;
  r -= s * (s + 1) * (s + 2) * Ms * inv * inv2 / 720.0;
  r += s * (s + 1) * (s + 2) * (s + 3) * (s + 4) * Ms * inv * inv2 * inv2 / 30240.0;
  return r;
}

void require_open_unit(double u, const char* what) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError(std::string(what) + ": u must lie in (0,1)");
}

}  // namespace

double tail_sum(std::int64_t m, double s) {
  if (!(s > 1.0)) throw DomainError("tail_sum: s must exceed 1");
  if (m < 1) throw DomainError("tail_sum: m must be >= 1");
  if (m >= kDirectHead) return euler_maclaurin_tail(static_cast<double>(m), s);
  const std::int64_t M = kDirectHead;
  double acc = euler_maclaurin_tail(static_cast<double>(M), s);
  for (std::int64_t k = M - 1; k >= m; --k) acc += std::pow(static_cast<double>(k), -s);
  return acc;
}

double riemann_zeta(double s) {
  if (!(s > 1.0)) throw DomainError("riemann_zeta: s must exceed 1");
  return tail_sum(1, s);
}

KernelParams KernelParams::make(double gamma, Normalization mode) {
  if (!(gamma > 0.0 && gamma < 2.0)) throw DomainError("kernel: gamma must lie in (0,2)");
  KernelParams p;
  p.gamma = gamma;
  p.mode = mode;
  const double z = riemann_zeta(1.0 + gamma);
  switch (mode) {
    case Normalization::normalized: p.c_gamma = 1.0 / (2.0 * z); break;
    case Normalization::paper_literal: p.c_gamma = 2.0 / z; break;
    case Normalization::custom:
      throw ConfigError("kernel: custom normalization needs an explicit constant");
  }
  return p;
}

KernelParams KernelParams::with_constant(double gamma, double c_gamma) {
  if (!(gamma > 0.0 && gamma < 2.0)) throw DomainError("kernel: gamma must lie in (0,2)");
  if (!(c_gamma > 0.0)) throw DomainError("kernel: c_gamma must be positive");
  return KernelParams{gamma, c_gamma, Normalization::custom};
}

JumpKernel::JumpKernel(KernelParams params) : params_(params) {
  if (!(params_.gamma > 0.0 && params_.gamma < 2.0)) throw DomainError("kernel: gamma must lie in (0,2)");
  if (!(params_.c_gamma > 0.0)) throw DomainError("kernel: c_gamma must be positive");
  zeta_1g_ = riemann_zeta(1.0 + params_.gamma);
}

double JumpKernel::operator()(std::int64_t z) const {
  if (z == 0) return 0.0;
  const double a = static_cast<double>(z < 0 ? -z : z);
  return params_.c_gamma * std::pow(a, -(1.0 + params_.gamma));
}

double JumpKernel::tail(std::int64_t k) const {
  return params_.c_gamma * tail_sum(std::max<std::int64_t>(k, 1), 1.0 + params_.gamma);
}

std::vector<double> JumpKernel::tails(std::int64_t kmax) const {
  const std::int64_t top = std::max<std::int64_t>(kmax, 1);
  std::vector<double> T(static_cast<std::size_t>(top) + 1);
  T[top] = tail(top);
  for (std::int64_t k = top - 1; k >= 1; --k) T[k] = T[k + 1] + (*this)(k);
  T[0] = T[1];
  T.resize(static_cast<std::size_t>(std::max<std::int64_t>(kmax, 0)) + 1);
  return T;
}

double JumpKernel::first_moment_half() const {
  if (!(params_.gamma > 1.0)) throw DomainError("first_moment_half: infinite for gamma <= 1");
  return params_.c_gamma * riemann_zeta(params_.gamma);
}

double JumpKernel::continuum_rate(double u, Side side) const {
  require_open_unit(u, "continuum_rate");
  const double w = side == Side::left ? u : 1.0 - u;
  return params_.c_gamma / params_.gamma * std::pow(w, -params_.gamma);
}

VPotentials JumpKernel::v_potentials(double u, double alpha_t, double beta_t) const {
  const double rl = continuum_rate(u, Side::left);
  const double rr = continuum_rate(u, Side::right);
  return {alpha_t * rl + beta_t * rr, rl + rr};
}

ReservoirRates reservoir_rates(const JumpKernel& kernel, std::int64_t N) {
  if (N < 2) throw DomainError("reservoir_rates: N must be >= 2");
  const auto T = kernel.tails(N - 1);
  ReservoirRates r;
  r.N = N;
  r.left.resize(static_cast<std::size_t>(N - 1));
  r.right.resize(static_cast<std::size_t>(N - 1));
  for (std::int64_t x = 1; x < N; ++x) {
    r.left[x - 1] = T[x];
    r.right[x - 1] = T[N - x];
  }
  return r;
}

std::vector<double> bulk_mass(const JumpKernel& kernel, const ReservoirRates& rates) {
  const double total = kernel.total_mass();
  std::vector<double> q(rates.left.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = total - rates.left[i] - rates.right[i];
  return q;
}

double discrete_frac_laplacian(const JumpKernel& kernel, std::span<const double> samples, std::int64_t x) {
  const auto n = static_cast<std::int64_t>(samples.size());
  if (x < 1 || x > n) throw DomainError("discrete_frac_laplacian: site outside the bulk");
  const double gx = samples[x - 1];
  double acc = 0.0;
  for (std::int64_t y = 1; y <= n; ++y) {
    if (y != x) acc += kernel(y - x) * (samples[y - 1] - gx);
  }
  return acc;
}

std::vector<double> discrete_frac_laplacian_all(const JumpKernel& kernel, std::span<const double> samples) {
  std::vector<double> col(samples.size());
  for (std::size_t k = 0; k < col.size(); ++k) col[k] = kernel(static_cast<std::int64_t>(k));
  std::vector<double> out(samples.size());
  kernels::omp::lattice_laplacian(col, samples, out);
  return out;
}

double regional_frac_laplacian(const JumpKernel& kernel, const SmoothFunction& G, double u) {
  require_open_unit(u, "regional_frac_laplacian");
  const double g = kernel.gamma();
  const double s = std::min(u, 1.0 - u);
  const double L = std::max(u, 1.0 - u);
  const bool long_right = (1.0 - u) >= u;
  const double gu = G.value(u);
  const auto& rule = quad::gauss_legendre(16);

  // t in (0, core): second-order Taylor of the symmetric difference
  const double core = std::min(std::ldexp(1.0, -12), s);
  double acc = G.d2(u) * std::pow(core, 2.0 - g) / (2.0 - g);

  auto sym = [&](double t) { return (G.value(u + t) + G.value(u - t) - 2.0 * gu) * std::pow(t, -1.0 - g); };
  for (double a = core; a < s;) {
    const double b = std::min(2.0 * a, s);
    acc += quad::apply(rule, sym, a, b);
    a = b;
  }

  const double dir = long_right ? 1.0 : -1.0;
  auto one = [&](double t) { return (G.value(u + dir * t) - gu) * std::pow(t, -1.0 - g); };
  if (L > s) {
    for (double a = s; a < L;) {
      const double b = std::min(2.0 * a, L);
      acc += quad::apply(rule, one, a, b);
      a = b;
    }
  }
  return kernel.c_gamma() * acc;
}

double time_scale(double gamma, double theta, std::int64_t N) {
  const double n = static_cast<double>(N);
  return theta >= 0.0 ? std::pow(n, gamma) : std::pow(n, gamma + theta);
}

}  // namespace zrlj
