#pragma once

// Data-parallel inner loops. Every kernel exists twice: a plain serial
// reference and an OpenMP version. Each output entry is accumulated by one
// thread in the same order as the serial loop, so both variants produce
// bit-identical results; tests assert this.

#include <cstdint>
#include <span>
#include <vector>

namespace zrlj::kernels {

/// Inputs for the bond-current sums W_x, x = 1..N. Site arrays are indexed by
/// i = x-1; `tails[k]` = sum_{j>=k} p(j) for k = 0..N.
struct CurrentInputs {
  std::span<const double> phi;
  std::span<const double> tails;
  std::span<const double> left;
  std::span<const double> right;
  double boundary_scale;  ///< kappa N^{-theta}
  double phi_alpha;
  double phi_beta;
};

/// W_x for one bond, same summation order as the batched kernels.
double bond_current(const CurrentInputs& in, std::int64_t x);

namespace serial {

/// y_i = sum_j col[|i-j|] x_j
void toeplitz_matvec(std::span<const double> col, std::span<const double> x, std::span<double> y);

/// out[i] = sum_j col[|i-j|] (g[j] - g[i])
void lattice_laplacian(std::span<const double> col, std::span<const double> g, std::span<double> out);

/// out[x-1] = W_x for x = 1..N (out has N entries).
void bond_currents(const CurrentInputs& in, std::span<double> out);

/// In-place Gaussian elimination with partial pivoting on a row-major n x n
/// matrix, then back substitution. Returns false on an exactly singular pivot.
bool lu_solve(std::vector<double>& a, std::vector<double>& b, std::size_t n);

}  // namespace serial

namespace omp {

void toeplitz_matvec(std::span<const double> col, std::span<const double> x, std::span<double> y);
void lattice_laplacian(std::span<const double> col, std::span<const double> g, std::span<double> out);
void bond_currents(const CurrentInputs& in, std::span<double> out);
bool lu_solve(std::vector<double>& a, std::vector<double>& b, std::size_t n);

}  // namespace omp

}  // namespace zrlj::kernels
