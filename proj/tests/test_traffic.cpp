#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "zrlj/errors.hpp"
#include "zrlj/traffic.hpp"

using namespace zrlj;

namespace {

ModelParams params(double gamma, double theta, std::int64_t N, double alpha = 0.2, double beta = 0.8) {
  ModelParams p;
  p.gamma = gamma;
  p.theta = theta;
  p.N = N;
  p.alpha = alpha;
  p.beta = beta;
  return p;
}

FugacityProfile solve_for(const ModelParams& p, const ThermoTables& T, bool direct = true) {
  const JumpKernel k(p.kernel_params());
  const TrafficSystem s = assemble(p, T, k);
  return direct ? solve_direct(s) : solve_iterative(s);
}

double a_norm_error(const TrafficSystem& s, std::span<const double> x, const std::vector<double>& exact) {
  std::vector<double> e(x.size()), ae(x.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = x[i] - exact[i];
  s.apply(e, ae);
  double acc = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) acc += e[i] * ae[i];
  return std::sqrt(std::max(acc, 0.0));
}

double backward_error(const TrafficSystem& s, const FugacityProfile& f) {
  double d = 0.0, x = 0.0, r = 0.0;
  for (double v : s.diag) d = std::max(d, std::abs(v));
  for (double v : f.values) x = std::max(x, std::abs(v));
  for (double v : s.rhs) r = std::max(r, std::abs(v));
  return f.info.residual / (2.0 * d * x + r);
}

}  // namespace

TEST_CASE("three-site system by Cramer's rule") {
  const ThermoTables T(RateFunction::identity());
  for (double g : {0.5, 1.0, 1.5}) {
    for (double theta : {-0.5, 0.0, 0.7}) {
      ModelParams p = params(g, theta, 3);
      p.kappa = 1.7;
      const JumpKernel k(p.kernel_params());
      const double c = k.c_gamma();
      const double s = 1.7 * std::pow(3.0, -theta);
      // sum_{j>=1} p(j) = 1/2, so the far-reservoir rate is 1/2 - p(1)
      const double near = 0.5, far = 0.5 - c;
      const double a = 0.2, b = 0.8;  // Phi = identity
      const double d1 = c + s * (near + far), d2 = d1;
      const double r1 = s * (b * far + a * near), r2 = s * (b * near + a * far);
      const double det = d1 * d2 - c * c;
      const double x1 = (r1 * d2 + c * r2) / det, x2 = (d1 * r2 + c * r1) / det;

      const TrafficSystem sys = assemble(p, T, k);
      CHECK(sys.kernel_row[1] == doctest::Approx(c).epsilon(1e-15));
      CHECK(sys.diag[0] == doctest::Approx(d1).epsilon(1e-14));
      CHECK(sys.rhs[0] == doctest::Approx(r1).epsilon(1e-14));
      CHECK(sys.margin[0] == doctest::Approx(s * (near + far)).epsilon(1e-14));
      for (bool direct : {true, false}) {
        const FugacityProfile f = solve_for(p, T, direct);
        CHECK(f.at(1) == doctest::Approx(x1).epsilon(1e-13));
        CHECK(f.at(2) == doctest::Approx(x2).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("equal boundary densities give a flat profile") {
  const ThermoTables T(RateFunction::indicator());
  for (double g : {0.4, 1.5}) {
    ModelParams p = params(g, 0.3, 500, 0.6, 0.6);
    const JumpKernel k(p.kernel_params());
    const TrafficSystem s = assemble(p, T, k);
    const FugacityProfile f = solve_iterative(s);
    CHECK(f.info.iterations <= 2);
    for (double v : f.values) CHECK(v == doctest::Approx(0.6 / 1.6).epsilon(1e-12));
  }
}

TEST_CASE("profile bounds, reflection and midpoint") {
  const ThermoTables T(RateFunction::identity());
  for (double g : {0.5, 1.0, 1.5}) {
    for (double theta : {-1.0, 0.0, g - 1.0, 1.2}) {
      const std::int64_t N = 300;
      const FugacityProfile f = solve_for(params(g, theta, N), T);
      const FugacityProfile r = solve_for(params(g, theta, N, 0.3, 0.3), T);
      const double mid = 0.5 * (f.phi_alpha + f.phi_beta);
      for (std::int64_t x = 1; x < N; ++x) {
        CHECK(f.at(x) >= 0.2 - 1e-12);
        CHECK(f.at(x) <= 0.8 + 1e-12);
        CHECK(f.at(x) + f.at(N - x) == doctest::Approx(mid * 2.0).epsilon(1e-10));
        if (x > 1) CHECK(f.at(x) >= f.at(x - 1) - 1e-12);
        CHECK(r.at(x) == doctest::Approx(r.phi_alpha).epsilon(1e-10));
      }
      CHECK(f.at(N / 2) == doctest::Approx(mid).epsilon(1e-10));
      CHECK(f.interpolate(0.0) == f.phi_alpha);
      CHECK(f.interpolate(1.0) == f.phi_beta);
      CHECK(f.interpolate(0.5) == doctest::Approx(mid).epsilon(1e-10));
    }
  }
}

TEST_CASE("swapping the reservoirs mirrors the profile") {
  const JumpKernel k(KernelParams::make(1.2));
  const std::int64_t N = 201;
  const FugacityProfile a = solve_direct(assemble_fugacities(k, N, 0.1, 2.0, 0.15, 0.9));
  const FugacityProfile b = solve_direct(assemble_fugacities(k, N, 0.1, 2.0, 0.9, 0.15));
  for (std::int64_t x = 1; x < N; ++x) CHECK(a.at(x) == doctest::Approx(b.at(N - x)).epsilon(1e-12));
}

TEST_CASE("direct and iterative solvers agree") {
  const ThermoTables T(RateFunction::identity());
  for (double g : {0.3, 1.0, 1.8}) {
    for (double theta : {-1.0, 0.0, 1.5}) {
      const ModelParams p = params(g, theta, 1024);
      const JumpKernel k(p.kernel_params());
      const TrafficSystem s = assemble(p, T, k);
      const FugacityProfile d = solve_direct(s);
      const FugacityProfile i = solve_iterative(s);
      IterativeOptions dense;
      dense.use_fft = false;
      const FugacityProfile j = solve_iterative(s, dense);
      double err = 0.0;
      for (std::size_t x = 0; x < d.values.size(); ++x) {
        err = std::max(err, std::abs(d.values[x] - i.values[x]) / d.values[x]);
        err = std::max(err, std::abs(d.values[x] - j.values[x]) / d.values[x]);
      }
      CHECK(err < 1e-9);
      CHECK(d.info.residual < 1e-11);
      CHECK(backward_error(s, i) < 1e-14);
      CHECK(residual(s, i.values) == i.info.residual);
    }
  }
}

TEST_CASE("solver errors") {
  const ThermoTables T(RateFunction::identity());
  const ModelParams p = params(1.5, 0.0, 600);
  const JumpKernel k(p.kernel_params());
  const TrafficSystem s = assemble(p, T, k);
  CHECK_THROWS_AS(solve_direct(s, 500), ConfigError);
  IterativeOptions o;
  o.tol = 0.0;
  CHECK_THROWS_AS(solve_iterative(s, o), ConfigError);
  o.tol = 1e-15;
  o.max_iter = 2;
  CHECK_THROWS_AS(solve_iterative(s, o), ConvergenceError);
  CHECK(solve(s).info.method == "direct");
}

TEST_CASE("parameter validation") {
  const ThermoTables T(RateFunction::identity());
  CHECK_NOTHROW(params(1.5, 0.0, 10).validate(T));
  CHECK_THROWS_AS(params(2.0, 0.0, 10).validate(T), ConfigError);
  CHECK_THROWS_AS(params(1.5, 0.0, 1).validate(T), ConfigError);
  CHECK_THROWS_AS(params(1.5, 0.0, 10, 0.9, 0.8).validate(T), ConfigError);
  CHECK_THROWS_AS(params(1.5, 0.0, 10, 0.0, 0.8).validate(T), ConfigError);
  ModelParams k0 = params(1.5, 0.0, 10);
  k0.kappa = 0.0;
  CHECK_THROWS_AS(k0.validate(T), ConfigError);
  const ThermoTables F(RateFunction::figure3());
  ModelParams f = params(1.5, 0.0, 10);
  f.rate = RateFunction::figure3();
  CHECK_THROWS_AS(f.validate(F), DomainError);
  f.alpha = 0.005;
  f.beta = 0.01;
  CHECK_NOTHROW(f.validate(F));
}

TEST_CASE("conjugate gradient error decreases in the energy norm") {
  const ThermoTables T(RateFunction::identity());
  for (double theta : {0.0, 0.5, 2.0}) {
    const ModelParams p = params(1.5, theta, 1024);
    const JumpKernel k(p.kernel_params());
    const TrafficSystem s = assemble(p, T, k);
    const std::vector<double> exact = solve_direct(s).values;
    std::vector<double> errs;
    IterativeOptions o;
    o.tol = 1e-14;
    o.on_iterate = [&](int, std::span<const double> x) { errs.push_back(a_norm_error(s, x, exact)); };
    const FugacityProfile f = solve_iterative(s, o);
    REQUIRE(errs.size() >= 3);
    const double floor = 1e-12 * errs.front();
    for (std::size_t i = 1; i < errs.size(); ++i) CHECK(errs[i] <= errs[i - 1] * (1.0 + 1e-9) + floor);
    CHECK(f.info.residual < 1e-11);
  }
}

TEST_CASE("residual criterion across regimes") {
  const ThermoTables T(RateFunction::indicator());
  for (double g : {0.5, 1.5}) {
    for (double theta : {-1.0, 0.0, g - 1.0, 2.0}) {
      for (std::int64_t N : {256, 4096}) {
        ModelParams p = params(g, theta, N, 0.3, 3.0);
        const JumpKernel k(p.kernel_params());
        const TrafficSystem s = assemble(p, T, k);
        const FugacityProfile f = solve(s);
        CHECK(backward_error(s, f) < 1e-14);
        if (N <= 1024) CHECK(f.info.residual < 1e-11);
        const auto m = density_profile(f, T);
        for (std::int64_t x = 1; x < N; ++x) {
          CHECK(m[static_cast<std::size_t>(x - 1)] == doctest::Approx(T.mean_R(f.at(x))).epsilon(1e-14));
          CHECK(m[static_cast<std::size_t>(x - 1)] >= 0.3 - 1e-10);
          CHECK(m[static_cast<std::size_t>(x - 1)] <= 3.0 + 1e-10);
        }
      }
    }
  }
}
