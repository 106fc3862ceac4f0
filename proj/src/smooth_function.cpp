#include "zrlj/smooth_function.hpp"

#include <cmath>
#include <numbers>
#include <utility>

namespace zrlj::fn {

SmoothFunction constant(double c) {
  return {[c](double) { return c; }, [](double) { return 0.0; }, [](double) { return 0.0; },
          "const(" + std::to_string(c) + ")"};
}

SmoothFunction polynomial(std::vector<double> coeffs, std::string label) {
  auto eval = [](const std::vector<double>& c, double u) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * u + *it;
    return acc;
  };
  std::vector<double> d1c, d2c;
  for (std::size_t k = 1; k < coeffs.size(); ++k) d1c.push_back(k * coeffs[k]);
  for (std::size_t k = 1; k < d1c.size(); ++k) d2c.push_back(k * d1c[k]);
  return {[eval, coeffs](double u) { return eval(coeffs, u); },
          [eval, d1c](double u) { return eval(d1c, u); },
          [eval, d2c](double u) { return eval(d2c, u); }, std::move(label)};
}

SmoothFunction monomial(int k) {
  std::vector<double> c(k + 1, 0.0);
  c[k] = 1.0;
  return polynomial(std::move(c), "u^" + std::to_string(k));
}

SmoothFunction sine(double freq, double phase) {
  const double w = freq * std::numbers::pi;
  return {[w, phase](double u) { return std::sin(w * u + phase); },
          [w, phase](double u) { return w * std::cos(w * u + phase); },
          [w, phase](double u) { return -w * w * std::sin(w * u + phase); },
          "sin(" + std::to_string(freq) + "pi u+" + std::to_string(phase) + ")"};
}

SmoothFunction bump(double a, double b, int power) {
  const int k = power;
  auto inside = [a, b](double u) { return u > a && u < b; };
  return {[=](double u) { return inside(u) ? std::pow((u - a) * (b - u), k) : 0.0; },
          [=](double u) {
            if (!inside(u)) return 0.0;
            const double w = (u - a) * (b - u);
            return k * std::pow(w, k - 1) * (a + b - 2.0 * u);
          },
          [=](double u) {
            if (!inside(u)) return 0.0;
            const double w = (u - a) * (b - u);
            const double dw = a + b - 2.0 * u;
            return k * (k - 1) * std::pow(w, k - 2) * dw * dw - 2.0 * k * std::pow(w, k - 1);
          },
          "bump(" + std::to_string(a) + "," + std::to_string(b) + ")"};
}

SmoothFunction scaled(const SmoothFunction& f, double s) {
  return {[f, s](double u) { return s * f.value(u); }, [f, s](double u) { return s * f.d1(u); },
          [f, s](double u) { return s * f.d2(u); }, f.label};
}

SmoothFunction product(const SmoothFunction& f, const SmoothFunction& g) {
  return {[f, g](double u) { return f.value(u) * g.value(u); },
          [f, g](double u) { return f.d1(u) * g.value(u) + f.value(u) * g.d1(u); },
          [f, g](double u) {
            return f.d2(u) * g.value(u) + 2.0 * f.d1(u) * g.d1(u) + f.value(u) * g.d2(u);
          },
          f.label + "*" + g.label};
}

SmoothFunction sum(const SmoothFunction& f, const SmoothFunction& g) {
  return {[f, g](double u) { return f.value(u) + g.value(u); },
          [f, g](double u) { return f.d1(u) + g.d1(u); },
          [f, g](double u) { return f.d2(u) + g.d2(u); }, f.label + "+" + g.label};
}

std::vector<SmoothFunction> compact_basis() {
  // scaled so that each bump peaks at O(1)
  auto unit_bump = [](double a, double b) {
    const double peak = std::pow(0.25 * (b - a) * (b - a), 4);
    return scaled(bump(a, b, 4), 1.0 / peak);
  };
  return {unit_bump(0.1, 0.9), unit_bump(0.2, 0.6), unit_bump(0.4, 0.8), unit_bump(0.05, 0.5),
          product(unit_bump(0.1, 0.9), polynomial({-0.3, 1.0}, "(u-0.3)"))};
}

std::vector<SmoothFunction> boundary_basis() {
  return {monomial(1), monomial(2), monomial(3), sine(1.0, 0.5 * std::numbers::pi), sine(1.0)};
}

}  // namespace zrlj::fn
