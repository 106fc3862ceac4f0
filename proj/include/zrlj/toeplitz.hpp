#pragma once

#include <memory>
#include <span>
#include <vector>

namespace zrlj {

/// Symmetric Toeplitz operator T_ij = col[|i-j|] of size n, applied through a
/// circulant embedding of size 2n and real FFTs.
///
/// An instance owns FFT work buffers, so a single object must not be applied
/// from several threads at once. Construct one per thread instead.
class SymmetricToeplitz {
 public:
  explicit SymmetricToeplitz(std::vector<double> col);
  ~SymmetricToeplitz();
  SymmetricToeplitz(SymmetricToeplitz&&) noexcept;
  SymmetricToeplitz& operator=(SymmetricToeplitz&&) noexcept;
  SymmetricToeplitz(const SymmetricToeplitz&) = delete;
  SymmetricToeplitz& operator=(const SymmetricToeplitz&) = delete;

  std::size_t size() const { return col_.size(); }
  const std::vector<double>& column() const { return col_; }

  /// y = T x in O(n log n).
  void apply(std::span<const double> x, std::span<double> y) const;

  /// y = T x by the direct O(n^2) loop (OpenMP); reference path.
  void apply_dense(std::span<const double> x, std::span<double> y) const;

 private:
  struct Fft;
  std::vector<double> col_;
  std::unique_ptr<Fft> fft_;
};

}  // namespace zrlj
