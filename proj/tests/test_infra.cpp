#include <doctest.h>

#include <charconv>
#include <cmath>
#include <random>
#include <vector>

#include "zrlj/extrapolation.hpp"
#include "zrlj/io.hpp"
#include "zrlj/kernel.hpp"
#include "zrlj/parallel_kernels.hpp"
#include "zrlj/quadrature.hpp"
#include "zrlj/toeplitz.hpp"

using namespace zrlj;

namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = U(rng);
  return v;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("gauss-legendre integrates polynomials of degree 2n-1 exactly") {
  for (int order : {2, 4, 8, 16, 32}) {
    const auto& rule = quad::gauss_legendre(order);
    double wsum = 0.0;
    for (double w : rule.weights) wsum += w;
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    const int deg = 2 * order - 1;
    // int_0^1 u^deg du = 1/(deg+1)
    const double got = quad::integrate([deg](double u) { return std::pow(u, deg); }, 0.0, 1.0, order);
    CHECK(std::abs(got - 1.0 / (deg + 1)) < 1e-14);
  }
}

TEST_CASE("graded edges cover the interval and refine toward flagged ends") {
  const auto e = quad::graded_edges(0.0, 1.0, 8, true, false, 1e-10);
  CHECK(e.front() == 0.0);
  CHECK(e.back() == 1.0);
  for (std::size_t i = 0; i + 1 < e.size(); ++i) CHECK(e[i + 1] > e[i]);
  CHECK(e[1] - e[0] < 1e-9);
  CHECK(e[e.size() - 1] - e[e.size() - 2] == doctest::Approx(1.0 / 8.0));
  const double v = quad::integrate_panels([](double u) { return std::pow(u, -0.5); }, e, 16);
  CHECK(std::abs(v - 2.0) < 2.0 * std::sqrt(e[1]));
}

TEST_CASE("richardson recovers c0 + c1 N^-p exactly") {
  const std::vector<double> N{256, 512, 1024, 2048};
  for (double p : {0.5, 1.0, 1.7}) {
    std::vector<double> f;
    for (double n : N) f.push_back(0.3 - 2.0 * std::pow(n, -p));
    const Extrapolation e = richardson(N, f);
    CHECK(!e.fallback);
    CHECK(e.value == doctest::Approx(0.3).epsilon(1e-10));
    CHECK(e.rate == doctest::Approx(p).epsilon(1e-8));
  }
}

TEST_CASE("richardson clamps the exponent and flags non-monotone data") {
  const std::vector<double> N{256, 512, 1024};
  std::vector<double> slow;
  for (double n : N) slow.push_back(1.0 + std::pow(n, -0.05));
  const Extrapolation e = richardson(N, slow);
  CHECK(e.rate == doctest::Approx(0.2));
  const std::vector<double> zigzag{1.0, 1.2, 1.1};
  const Extrapolation z = richardson(N, zigzag);
  CHECK(z.fallback);
  CHECK(z.value == 1.1);
}

TEST_CASE("fft toeplitz product matches the dense loop") {
  const JumpKernel k(KernelParams::make(0.7));
  for (std::size_t n : {1u, 2u, 3u, 17u, 64u, 1000u, 4097u}) {
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = k(static_cast<std::int64_t>(i));
    const SymmetricToeplitz T(col);
    const auto x = random_vector(n, n);
    std::vector<double> a(n), b(n);
    T.apply(x, a);
    T.apply_dense(x, b);
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
    CHECK(max_abs(d) <= 1e-14 * std::max(1.0, max_abs(b)) * std::sqrt(static_cast<double>(n)));
  }
}

TEST_CASE("serial and openmp kernels agree") {
  const std::size_t n = 777;
  const JumpKernel k(KernelParams::make(1.3));
  std::vector<double> col(n);
  for (std::size_t i = 0; i < n; ++i) col[i] = k(static_cast<std::int64_t>(i));
  const auto x = random_vector(n, 5);
  std::vector<double> a(n), b(n);
  kernels::serial::toeplitz_matvec(col, x, a);
  kernels::omp::toeplitz_matvec(col, x, b);
  for (std::size_t i = 0; i < n; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-13));
  kernels::serial::lattice_laplacian(col, x, a);
  kernels::omp::lattice_laplacian(col, x, b);
  for (std::size_t i = 0; i < n; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-13));

  const std::size_t m = 60;
  std::vector<double> A(m * m);
  const auto r = random_vector(m * m, 9);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) A[i * m + j] = r[i * m + j] + (i == j ? 4.0 : 0.0);
  auto A1 = A, A2 = A;
  auto rhs = random_vector(m, 11);
  auto b1 = rhs, b2 = rhs;
  REQUIRE(kernels::serial::lu_solve(A1, b1, m));
  REQUIRE(kernels::omp::lu_solve(A2, b2, m));
  for (std::size_t i = 0; i < m; ++i) {
    CHECK(b1[i] == doctest::Approx(b2[i]).epsilon(1e-12));
    double row = 0.0;
    for (std::size_t j = 0; j < m; ++j) row += A[i * m + j] * b1[j];
    CHECK(row == doctest::Approx(rhs[i]).epsilon(1e-11));
  }
}

TEST_CASE("csv numbers survive a text round trip") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double v = U(rng) * std::pow(10.0, i % 40 - 20);
    const std::string s = io::format(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == v);
  }
  CHECK(io::format(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("csv header carries the version and metadata") {
  io::Table t({"a", "b"});
  t.add({std::int64_t{1}, 0.5});
  t.add({std::int64_t{2}, std::string("x")});
  const std::string csv = io::render_csv(t, {{"gamma", "1.5"}});
  CHECK(csv == std::string("# version = ") + io::kVersion + "\n# gamma = 1.5\na,b\n1,0.5\n2,x\n");
  CHECK_THROWS(t.add({1.0}));
}
