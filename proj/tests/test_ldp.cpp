#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "zrlj/errors.hpp"
#include "zrlj/hydrostatic.hpp"
#include "zrlj/ldp.hpp"

using namespace zrlj;

namespace {

constexpr double kPi = std::numbers::pi;

ModelParams params(double gamma, double theta, double alpha = 0.2, double beta = 0.8) {
  ModelParams p;
  p.gamma = gamma;
  p.theta = theta;
  p.alpha = alpha;
  p.beta = beta;
  return p;
}

// composite Simpson, 2n intervals
template <class F>
double simpson(F f, int n = 20000) {
  const double h = 1.0 / (2 * n);
  double s = f(0.0) + f(1.0);
  for (int i = 1; i < 2 * n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return s * h / 3.0;
}

const std::vector<Profile1D>& five() {
  static const std::vector<Profile1D> G{
      [](double u) { return u; },
      [](double u) { return std::sin(kPi * u); },
      [](double u) { return 0.5 - u * u; },
      [](double) { return 1.0; },
      [](double u) { return std::cos(2.0 * kPi * u) - 0.3 * u; },
  };
  return G;
}

}  // namespace

TEST_CASE("finite-N cumulant against the Poisson closed form") {
  const ThermoTables T(RateFunction::identity());
  const ModelParams p = [] {
    ModelParams q = params(1.5, 0.0);
    q.N = 300;
    return q;
  }();
  const JumpKernel k(p.kernel_params());
  const FugacityProfile f = solve(assemble(p, T, k));
  for (const Profile1D& G : five()) {
    double want = 0.0;
    for (std::int64_t x = 1; x < p.N; ++x) want += f.at(x) * (std::exp(G(static_cast<double>(x) / 300.0)) - 1.0);
    CHECK(log_mgf_scaled(f, T, G) == doctest::Approx(want / 300.0).epsilon(1e-13));
  }
  CHECK(log_mgf_scaled(f, T, [](double) { return 0.0; }) == 0.0);
}

TEST_CASE("finite phi* is rejected") {
  const ThermoTables T(RateFunction::indicator());
  FugacityProfile f;
  f.N = 4;
  f.values = {0.2, 0.3, 0.4};
  CHECK_THROWS_AS(log_mgf_scaled(f, T, [](double u) { return u; }), DomainError);
  CHECK_THROWS_AS(LdpGrid([](double) { return 0.5; }, T), DomainError);
  const ThermoTables F(RateFunction::figure3());
  CHECK_THROWS_AS(tilted_profile([](double) { return 0.01; }, F, [](double u) { return u; }), DomainError);
}

TEST_CASE("unit-interval quadrature") {
  const QuadValue q = integrate_unit([](double u) { return std::exp(u) * std::sin(3.0 * u); });
  const double want = (std::exp(1.0) * (std::sin(3.0) - 3.0 * std::cos(3.0)) + 3.0) / 10.0;
  CHECK(q.value == doctest::Approx(want).epsilon(1e-14));
  CHECK(q.error < 1e-13);
}

TEST_CASE("Lambda for a flat profile") {
  const ThermoTables T(RateFunction::identity());
  const Profile1D flat = [](double) { return 0.7; };
  CHECK(lambda_limit(flat, T, [](double) { return 0.0; }).value == 0.0);
  CHECK(lambda_limit(flat, T, [](double u) { return u; }).value ==
        doctest::Approx(0.7 * (std::numbers::e - 2.0)).epsilon(1e-13));
  const double s = simpson([](double u) { return std::exp(std::sin(kPi * u)) - 1.0; });
  CHECK(lambda_limit(flat, T, [](double u) { return std::sin(kPi * u); }).value == doctest::Approx(0.7 * s).epsilon(1e-10));
}

TEST_CASE("Lambda is monotone in G") {
  const ThermoTables T(RateFunction::identity());
  const Profile1D m = [](double u) { return 0.2 + 0.6 * u; };
  double prev = -1e300;
  for (double shift : {-1.0, -0.5, 0.0, 0.2, 0.9}) {
    const double v = lambda_limit(m, T, [shift](double u) { return shift + std::sin(kPi * u); }).value;
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("rate function: zero at the typical profile, positive elsewhere") {
  const ThermoTables T(RateFunction::identity());
  const Profile1D m = [](double u) { return 0.2 + 0.6 * u * u; };
  const QuadValue zero = rate_function(m, m, T);
  CHECK(std::abs(zero.value) < 1e-14);
  CHECK(zero.error < 1e-8);
  for (int j = 1; j <= 10; ++j) {
    const double a = 0.04 * j;
    const Profile1D pi = [&, a, j](double u) { return m(u) * (1.0 + a * std::sin(j * kPi * u)); };
    CHECK(rate_function(pi, m, T).value > 0.0);
  }
  // Poisson: pi log(pi/m) - (pi - m), flat case in closed form
  const Profile1D half = [](double) { return 0.5; };
  CHECK(rate_function([](double) { return 0.6; }, half, T).value ==
        doctest::Approx(0.6 * std::log(1.2) - 0.1).epsilon(1e-13));
  const double shifted = rate_function([&](double u) { return m(u) + 0.1; }, m, T).value;
  const double want = simpson([&](double u) { return (m(u) + 0.1) * std::log((m(u) + 0.1) / m(u)) - 0.1; });
  CHECK(shifted == doctest::Approx(want).epsilon(1e-10));
  CHECK_THROWS_AS(rate_function([](double) { return -0.1; }, m, T), DomainError);
}

TEST_CASE("Fenchel-Young and its equality case") {
  const ThermoTables T(RateFunction::identity());
  const Profile1D m = [](double u) { return 0.3 + 0.4 * u; };
  const LdpGrid grid(m, T);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    const double g0 = U(rng), g1 = U(rng), g2 = U(rng), a = 0.4 * U(rng);
    const Profile1D G = [=](double u) { return g0 + u * (g1 + u * g2); };
    const NodeProfile pi = [=](double u, double mm, double) { return mm * (1.0 + a * std::cos(kPi * u)); };
    const double pairing = grid.integrate([&](double u, double mm, double ph) { return pi(u, mm, ph) * G(u); }).value;
    CHECK(rate_function(pi, grid).value + lambda_limit(grid, G).value >= pairing - 1e-13);

    const Profile1D tilt = tilted_profile(m, T, G);
    const double at_tilt = rate_function([&](double u, double, double) { return tilt(u); }, grid).value;
    const double pt = grid.integrate([&](double u, double, double) { return tilt(u) * G(u); }).value;
    CHECK(at_tilt + lambda_limit(grid, G).value == doctest::Approx(pt).epsilon(1e-12));
  }
}

TEST_CASE("Gateaux derivative against a central difference") {
  std::istringstream table("1 2\n2 2.5\n3 3.5\ntail: identity\n");
  for (const RateFunction& g : {RateFunction::identity(), RateFunction::parse_table(table)}) {
    const ThermoTables T(g);
    const Profile1D m = [](double u) { return 0.2 + 0.6 * u; };
    const LdpGrid grid(m, T);
    const Profile1D G = [](double u) { return std::sin(kPi * u); };
    const Profile1D H = [](double u) { return u * u; };
    const double t = 1e-5;
    const double fd = (lambda_limit(grid, [&](double u) { return G(u) + t * H(u); }).value -
                       lambda_limit(grid, [&](double u) { return G(u) - t * H(u); }).value) /
                      (2.0 * t);
    CHECK(gateaux_derivative(grid, G, H).value == doctest::Approx(fd).epsilon(1e-6));
    CHECK(gateaux_derivative(grid, G, [](double) { return 0.0; }).value == 0.0);
    // at G = 0 the derivative is <m, H>
    CHECK(gateaux_derivative(grid, [](double) { return 0.0; }, H).value ==
          doctest::Approx(0.2 / 3.0 + 0.6 / 4.0).epsilon(1e-11));
  }
}

TEST_CASE("Lambda_N / N approaches Lambda") {
  const ThermoTables T(RateFunction::identity());
  SUBCASE("explicit-ratio profile") {
    const ModelParams p = params(1.5, -1.0);
    const JumpKernel k(p.kernel_params());
    const ProfileSequence seq = solve_sequence(p, T, k, {512, 1024, 2048, 4096});
    const Tildes t = seq.tilde();
    const Regime r = classify_regime(k, p.theta, p.kappa);
    const Profile1D m = [&](double u) { return t.phi_sum * rho_explicit(k, r, t, u); };
    const LdpGrid grid(m, T);
    for (const Profile1D& G : five()) {
      const double lim = lambda_limit(grid, G).value;
      double prev = 1e300;
      for (const FugacityProfile& f : seq.profiles()) {
        const double gap = std::abs(log_mgf_scaled(f, T, G) - lim);
        CHECK(gap < prev);
        prev = gap;
      }
    }
  }
  SUBCASE("reaction-diffusion, G(u) = u") {
    const ModelParams p = params(1.5, 0.0);
    const JumpKernel k(p.kernel_params());
    const ProfileSequence seq = solve_sequence(p, T, k, {512, 1024, 2048, 4096, 8192});
    const auto rho = seq.continuum_rho(1.5);
    const Tildes t = seq.tilde();
    const LdpGrid grid([&](double u) { return t.phi_sum * rho(u); }, T);
    const Profile1D G = [](double u) { return u; };
    const double lim = lambda_limit(grid, G).value;
    double prev = 1e300;
    for (std::size_t i = 0; i + 1 < seq.profiles().size(); ++i) {
      const double gap = std::abs(log_mgf_scaled(seq.profiles()[i], T, G) - lim);
      CHECK(gap < prev);
      prev = gap;
    }
  }
}

TEST_CASE("Lambda of the constant one is finite") {
  const ThermoTables T(RateFunction::identity());
  const double v = lambda_limit([](double u) { return 0.2 + 0.6 * u; }, T, [](double) { return 1.0; }).value;
  CHECK(std::isfinite(v));
  CHECK(v == doctest::Approx(0.5 * (std::numbers::e - 1.0)).epsilon(1e-13));
}
