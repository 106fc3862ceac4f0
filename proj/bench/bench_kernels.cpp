// Serial reference vs OpenMP vs FFT on the hot loops.
#include <benchmark/benchmark.h>
#include <omp.h>

#include <cmath>
#include <vector>

#include "zrlj/kernel.hpp"
#include "zrlj/parallel_kernels.hpp"
#include "zrlj/toeplitz.hpp"
#include "zrlj/traffic.hpp"

using namespace zrlj;

namespace {

std::vector<double> kernel_column(std::int64_t n, double gamma = 1.5) {
  const JumpKernel k(KernelParams::make(gamma));
  std::vector<double> col(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] = k(i);
  return col;
}

std::vector<double> wave(std::int64_t n) {
  std::vector<double> x(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = 0.5 + 0.3 * std::sin(0.01 * static_cast<double>(i));
  return x;
}

void set_threads(benchmark::State& state) { state.counters["threads"] = omp_get_max_threads(); }

}  // namespace

static void BM_toeplitz_serial(benchmark::State& state) {
  const auto n = state.range(0);
  const auto col = kernel_column(n);
  const auto x = wave(n);
  std::vector<double> y(x.size());
  for (auto _ : state) {
    kernels::serial::toeplitz_matvec(col, x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetComplexityN(n);
}

static void BM_toeplitz_omp(benchmark::State& state) {
  const auto n = state.range(0);
  const auto col = kernel_column(n);
  const auto x = wave(n);
  std::vector<double> y(x.size());
  for (auto _ : state) {
    kernels::omp::toeplitz_matvec(col, x, y);
    benchmark::DoNotOptimize(y.data());
  }
  set_threads(state);
  state.SetComplexityN(n);
}

static void BM_toeplitz_fft(benchmark::State& state) {
  const auto n = state.range(0);
  const SymmetricToeplitz T(kernel_column(n));
  const auto x = wave(n);
  std::vector<double> y(x.size());
  for (auto _ : state) {
    T.apply(x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetComplexityN(n);
}

static void BM_laplacian_serial(benchmark::State& state) {
  const auto n = state.range(0);
  const auto col = kernel_column(n);
  const auto g = wave(n);
  std::vector<double> out(g.size());
  for (auto _ : state) {
    kernels::serial::lattice_laplacian(col, g, out);
    benchmark::DoNotOptimize(out.data());
  }
}

static void BM_laplacian_omp(benchmark::State& state) {
  const auto n = state.range(0);
  const auto col = kernel_column(n);
  const auto g = wave(n);
  std::vector<double> out(g.size());
  for (auto _ : state) {
    kernels::omp::lattice_laplacian(col, g, out);
    benchmark::DoNotOptimize(out.data());
  }
  set_threads(state);
}

namespace {

struct CurrentFixture {
  TrafficSystem system;
  FugacityProfile profile;
  explicit CurrentFixture(std::int64_t N)
      : system(assemble_fugacities(JumpKernel(KernelParams::make(1.5)), N, 0.0, 1.0, 0.2, 0.8)),
        profile(solve(system)) {}
  kernels::CurrentInputs inputs() const {
    return {profile.values, system.tails, system.rates.left, system.rates.right, system.boundary_scale,
            system.phi_alpha, system.phi_beta};
  }
};

}  // namespace

static void BM_currents_serial(benchmark::State& state) {
  const CurrentFixture f(state.range(0));
  std::vector<double> out(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    kernels::serial::bond_currents(f.inputs(), out);
    benchmark::DoNotOptimize(out.data());
  }
}

static void BM_currents_omp(benchmark::State& state) {
  const CurrentFixture f(state.range(0));
  std::vector<double> out(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    kernels::omp::bond_currents(f.inputs(), out);
    benchmark::DoNotOptimize(out.data());
  }
  set_threads(state);
}

namespace {

std::vector<double> dense_system(std::size_t n) {
  const auto col = kernel_column(static_cast<std::int64_t>(n));
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      a[i * n + j] = -col[i > j ? i - j : j - i];
      row += col[i > j ? i - j : j - i];
    }
    a[i * n + i] = row + 0.1;
  }
  return a;
}

}  // namespace

static void BM_lu_serial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a0 = dense_system(n);
  for (auto _ : state) {
    state.PauseTiming();
    auto a = a0;
    std::vector<double> b(n, 1.0);
    state.ResumeTiming();
    benchmark::DoNotOptimize(kernels::serial::lu_solve(a, b, n));
  }
}

static void BM_lu_omp(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a0 = dense_system(n);
  for (auto _ : state) {
    state.PauseTiming();
    auto a = a0;
    std::vector<double> b(n, 1.0);
    state.ResumeTiming();
    benchmark::DoNotOptimize(kernels::omp::lu_solve(a, b, n));
  }
  set_threads(state);
}

static void BM_solve_direct(benchmark::State& state) {
  const TrafficSystem s = assemble_fugacities(JumpKernel(KernelParams::make(1.5)), state.range(0), 0.0, 1.0, 0.2, 0.8);
  for (auto _ : state) benchmark::DoNotOptimize(solve_direct(s).values.data());
}

static void BM_solve_pcg_fft(benchmark::State& state) {
  const TrafficSystem s = assemble_fugacities(JumpKernel(KernelParams::make(1.5)), state.range(0), 0.0, 1.0, 0.2, 0.8);
  for (auto _ : state) benchmark::DoNotOptimize(solve_iterative(s).values.data());
}

BENCHMARK(BM_toeplitz_serial)->RangeMultiplier(4)->Range(256, 16384)->Complexity();
BENCHMARK(BM_toeplitz_omp)->RangeMultiplier(4)->Range(256, 16384)->Complexity();
BENCHMARK(BM_toeplitz_fft)->RangeMultiplier(4)->Range(256, 16384)->Complexity();
BENCHMARK(BM_laplacian_serial)->Arg(1024)->Arg(4096);
BENCHMARK(BM_laplacian_omp)->Arg(1024)->Arg(4096);
BENCHMARK(BM_currents_serial)->Arg(1024)->Arg(4096);
BENCHMARK(BM_currents_omp)->Arg(1024)->Arg(4096);
BENCHMARK(BM_lu_serial)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_lu_omp)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_solve_direct)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_solve_pcg_fft)->Arg(512)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
