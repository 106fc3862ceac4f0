#pragma once

#include <functional>
#include <string>
#include <vector>

namespace zrlj {

/// A C^2 test function on [0,1] carried together with its first two
/// derivatives. The regional fractional Laplacian needs G' and G'' for its
/// Taylor-subtracted principal value.
struct SmoothFunction {
  std::function<double(double)> value;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
  std::string label;

  double operator()(double u) const { return value(u); }
};

namespace fn {

SmoothFunction constant(double c);
/// sum_k coeffs[k] u^k
SmoothFunction polynomial(std::vector<double> coeffs, std::string label = "poly");
SmoothFunction monomial(int k);
/// sin(freq * pi * u + phase)
SmoothFunction sine(double freq, double phase = 0.0);
/// ((u-a)(b-u))^power on (a,b), zero elsewhere; C^{power-1} on [0,1].
SmoothFunction bump(double a, double b, int power = 4);

SmoothFunction scaled(const SmoothFunction& f, double s);
SmoothFunction product(const SmoothFunction& f, const SmoothFunction& g);
SmoothFunction sum(const SmoothFunction& f, const SmoothFunction& g);

/// Five compactly supported test functions inside (0,1).
std::vector<SmoothFunction> compact_basis();
/// Five smooth test functions on [0,1] that do not vanish at the boundary.
std::vector<SmoothFunction> boundary_basis();

}  // namespace fn

}  // namespace zrlj
