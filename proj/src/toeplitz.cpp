#include "zrlj/toeplitz.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

#include "zrlj/parallel_kernels.hpp"

namespace zrlj {

namespace {
// The FFTW planner is not reentrant; execution of an existing plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct SymmetricToeplitz::Fft {
  std::size_t m = 0;  // embedding length 2n
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_complex* symbol = nullptr;  // FFT of the circulant's first column
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  explicit Fft(const std::vector<double>& col) {
    const std::size_t n = col.size();
    m = 2 * n;
    const std::size_t nc = m / 2 + 1;
    real = fftw_alloc_real(m);
    spec = fftw_alloc_complex(nc);
    symbol = fftw_alloc_complex(nc);
    if (!real || !spec || !symbol) throw std::bad_alloc();
    {
      std::lock_guard lock(planner_mutex());
      forward = fftw_plan_dft_r2c_1d(static_cast<int>(m), real, spec, FFTW_ESTIMATE);
      backward = fftw_plan_dft_c2r_1d(static_cast<int>(m), spec, real, FFTW_ESTIMATE);
    }
    // c = [t0, t1, ..., t_{n-1}, 0, t_{n-1}, ..., t1]
    for (std::size_t i = 0; i < n; ++i) real[i] = col[i];
    real[n] = 0.0;
    for (std::size_t i = 1; i < n; ++i) real[m - i] = col[i];
    fftw_execute_dft_r2c(forward, real, symbol);
  }

  ~Fft() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
    fftw_free(real);
    fftw_free(spec);
    fftw_free(symbol);
  }
};

SymmetricToeplitz::SymmetricToeplitz(std::vector<double> col) : col_(std::move(col)) {
  if (col_.empty()) throw std::invalid_argument("SymmetricToeplitz: empty column");
  fft_ = std::make_unique<Fft>(col_);
}

SymmetricToeplitz::~SymmetricToeplitz() = default;
SymmetricToeplitz::SymmetricToeplitz(SymmetricToeplitz&&) noexcept = default;
SymmetricToeplitz& SymmetricToeplitz::operator=(SymmetricToeplitz&&) noexcept = default;

void SymmetricToeplitz::apply(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = col_.size();
  if (x.size() != n || y.size() != n) throw std::invalid_argument("SymmetricToeplitz: size mismatch");
  Fft& f = *fft_;
  for (std::size_t i = 0; i < n; ++i) f.real[i] = x[i];
  for (std::size_t i = n; i < f.m; ++i) f.real[i] = 0.0;
  fftw_execute_dft_r2c(f.forward, f.real, f.spec);
  const std::size_t nc = f.m / 2 + 1;
  for (std::size_t k = 0; k < nc; ++k) {
    const double re = f.spec[k][0] * f.symbol[k][0] - f.spec[k][1] * f.symbol[k][1];
    const double im = f.spec[k][0] * f.symbol[k][1] + f.spec[k][1] * f.symbol[k][0];
    f.spec[k][0] = re;
    f.spec[k][1] = im;
  }
  fftw_execute_dft_c2r(f.backward, f.spec, f.real);
  const double scale = 1.0 / static_cast<double>(f.m);
  for (std::size_t i = 0; i < n; ++i) y[i] = f.real[i] * scale;
}

void SymmetricToeplitz::apply_dense(std::span<const double> x, std::span<double> y) const {
  if (x.size() != col_.size() || y.size() != col_.size())
    throw std::invalid_argument("SymmetricToeplitz: size mismatch");
  kernels::omp::toeplitz_matvec(col_, x, y);
}

}  // namespace zrlj
