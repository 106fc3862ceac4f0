#include "zrlj/parallel_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>

namespace zrlj::kernels {

namespace {

inline double toeplitz_row(std::span<const double> col, std::span<const double> x, std::size_t i) {
  const std::size_t n = x.size();
  double acc = 0.0;
  for (std::size_t j = 0; j < i; ++j) acc += col[i - j] * x[j];
  for (std::size_t j = i; j < n; ++j) acc += col[j - i] * x[j];
  return acc;
}

inline double laplacian_row(std::span<const double> col, std::span<const double> g, std::size_t i) {
  const std::size_t n = g.size();
  const double gi = g[i];
  double acc = 0.0;
  for (std::size_t j = 0; j < i; ++j) acc += col[i - j] * (g[j] - gi);
  for (std::size_t j = i + 1; j < n; ++j) acc += col[j - i] * (g[j] - gi);
  return acc;
}

}  // namespace

// W_x with x = 1..N; sites y are 1-based in the formulas and i = y-1 in arrays.
double bond_current(const CurrentInputs& in, std::int64_t x) {
  const std::int64_t N = static_cast<std::int64_t>(in.phi.size()) + 1;
  const auto T = in.tails;
  // the bulk part only sees differences of phi
  const long double ref = in.phi[static_cast<std::size_t>(std::clamp<std::int64_t>(x, 1, N - 1) - 1)];
  auto at = [&](std::int64_t y) { return static_cast<long double>(in.phi[y - 1]) - ref; };
  long double bulk = 0.0L;
  for (std::int64_t y = 1; y < x; ++y) bulk += at(y) * (static_cast<long double>(T[x - y]) - T[N - y]);
  for (std::int64_t z = x; z < N; ++z) bulk -= at(z) * (static_cast<long double>(T[z - x + 1]) - T[z]);
  long double from_left = 0.0L;
  for (std::int64_t z = x; z < N; ++z)
    from_left += static_cast<long double>(in.left[z - 1]) * (static_cast<long double>(in.phi_alpha) - in.phi[z - 1]);
  long double from_right = 0.0L;
  for (std::int64_t y = 1; y < x; ++y)
    from_right += static_cast<long double>(in.right[y - 1]) * (static_cast<long double>(in.phi_beta) - in.phi[y - 1]);
  return static_cast<double>(bulk + in.boundary_scale * (from_left - from_right));
}

namespace {

inline std::size_t pivot_row(const std::vector<double>& a, std::size_t n, std::size_t k) {
  std::size_t p = k;
  double best = std::abs(a[k * n + k]);
  for (std::size_t i = k + 1; i < n; ++i) {
    const double v = std::abs(a[i * n + k]);
    if (v > best) best = v, p = i;
  }
  return p;
}

inline void swap_rows(std::vector<double>& a, std::vector<double>& b, std::size_t n, std::size_t r1,
                      std::size_t r2) {
  if (r1 == r2) return;
  for (std::size_t j = 0; j < n; ++j) std::swap(a[r1 * n + j], a[r2 * n + j]);
  std::swap(b[r1], b[r2]);
}

inline void eliminate_row(std::vector<double>& a, std::vector<double>& b, std::size_t n, std::size_t k,
                          std::size_t i) {
  const double f = a[i * n + k] / a[k * n + k];
  if (f == 0.0) return;
  a[i * n + k] = 0.0;
  double* row = &a[i * n];
  const double* prow = &a[k * n];
  for (std::size_t j = k + 1; j < n; ++j) row[j] -= f * prow[j];
  b[i] -= f * b[k];
}

inline void back_substitute(const std::vector<double>& a, std::vector<double>& b, std::size_t n) {
  for (std::size_t ii = n; ii-- > 0;) {
    double acc = b[ii];
    for (std::size_t j = ii + 1; j < n; ++j) acc -= a[ii * n + j] * b[j];
    b[ii] = acc / a[ii * n + ii];
  }
}

}  // namespace

namespace serial {

void toeplitz_matvec(std::span<const double> col, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = toeplitz_row(col, x, i);
}

void lattice_laplacian(std::span<const double> col, std::span<const double> g, std::span<double> out) {
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = laplacian_row(col, g, i);
}

void bond_currents(const CurrentInputs& in, std::span<double> out) {
  const std::int64_t N = static_cast<std::int64_t>(in.phi.size()) + 1;
  for (std::int64_t x = 1; x <= N; ++x) out[x - 1] = bond_current(in, x);
}

bool lu_solve(std::vector<double>& a, std::vector<double>& b, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t p = pivot_row(a, n, k);
    if (a[p * n + k] == 0.0) return false;
    swap_rows(a, b, n, k, p);
    for (std::size_t i = k + 1; i < n; ++i) eliminate_row(a, b, n, k, i);
  }
  back_substitute(a, b, n);
  return true;
}

}  // namespace serial

namespace omp {

void toeplitz_matvec(std::span<const double> col, std::span<const double> x, std::span<double> y) {
  const auto n = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) y[i] = toeplitz_row(col, x, static_cast<std::size_t>(i));
}

void lattice_laplacian(std::span<const double> col, std::span<const double> g, std::span<double> out) {
  const auto n = static_cast<std::int64_t>(g.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out[i] = laplacian_row(col, g, static_cast<std::size_t>(i));
}

void bond_currents(const CurrentInputs& in, std::span<double> out) {
  const std::int64_t N = static_cast<std::int64_t>(in.phi.size()) + 1;
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t x = 1; x <= N; ++x) out[x - 1] = bond_current(in, x);
}

bool lu_solve(std::vector<double>& a, std::vector<double>& b, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t p = pivot_row(a, n, k);
    if (a[p * n + k] == 0.0) return false;
    swap_rows(a, b, n, k, p);
    const auto lo = static_cast<std::int64_t>(k + 1);
    const auto hi = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static) if (hi - lo > 64)
    for (std::int64_t i = lo; i < hi; ++i) eliminate_row(a, b, n, k, static_cast<std::size_t>(i));
  }
  back_substitute(a, b, n);
  return true;
}

}  // namespace omp

}  // namespace zrlj::kernels
