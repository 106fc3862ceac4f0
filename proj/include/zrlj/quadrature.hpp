#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace zrlj::quad {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Rules are computed once per order and cached; the returned reference stays
/// valid for the lifetime of the program.
const GaussRule& gauss_legendre(int order);

/// Inlined single panel for hot loops.
template <class F>
double apply(const GaussRule& rule, F&& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return sum * half;
}

/// Panel between a and a + h (h < 0 for a right endpoint) through x = a + h s^q.
/// With q = 1/(1+p) an endpoint behaviour |x-a|^p becomes polynomial in s.
template <class F>
double apply_endpoint(const GaussRule& rule, F&& f, double a, double h, double q) {
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double s = 0.5 * (rule.nodes[i] + 1.0);
    sum += rule.weights[i] * q * std::pow(s, q - 1.0) * f(a + h * std::pow(s, q));
  }
  return 0.5 * std::abs(h) * sum;
}

/// Single-panel Gauss-Legendre on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b, int order = 16);

/// Composite rule over the panels [edges[i], edges[i+1]].
double integrate_panels(const std::function<double(double)>& f, std::span<const double> edges,
                        int order = 16);

/// Panel edges on [a, b] that are uniform in the interior and dyadically
/// refined toward whichever endpoints are flagged singular. The refinement
/// stops at a width of `min_width`.
std::vector<double> graded_edges(double a, double b, int uniform_panels, bool singular_left,
                                 bool singular_right, double min_width = 1e-12);

}  // namespace zrlj::quad
