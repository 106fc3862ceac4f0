#include "zrlj/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace zrlj::quad {

namespace {

GaussRule build_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  // Newton iteration on P_n from the Chebyshev-like initial guess.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0, p1 = x;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  constexpr int kMaxOrder = 64;
  if (order < 2 || order > kMaxOrder) throw std::invalid_argument("gauss_legendre: order must be in [2, 64]");
  static const std::vector<GaussRule> table = [] {
    std::vector<GaussRule> t(kMaxOrder + 1);
    for (int n = 2; n <= kMaxOrder; ++n) t[n] = build_rule(n);
    return t;
  }();
  return table[order];
}

double integrate(const std::function<double(double)>& f, double a, double b, int order) {
  const GaussRule& rule = gauss_legendre(order);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return sum * half;
}

double integrate_panels(const std::function<double(double)>& f, std::span<const double> edges,
                        int order) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (edges[i + 1] > edges[i]) sum += integrate(f, edges[i], edges[i + 1], order);
  }
  return sum;
}

std::vector<double> graded_edges(double a, double b, int uniform_panels, bool singular_left,
                                 bool singular_right, double min_width) {
  if (!(b > a) || uniform_panels < 1) throw std::invalid_argument("graded_edges: empty interval");
  const double h = (b - a) / uniform_panels;
  std::vector<double> edges;
  if (singular_left) {
    // a, a + h 2^-k, ..., a + h/2
    std::vector<double> left;
    for (double w = 0.5 * h; w > min_width; w *= 0.5) left.push_back(a + w);
    edges.push_back(a);
    for (auto it = left.rbegin(); it != left.rend(); ++it) edges.push_back(*it);
  } else {
    edges.push_back(a);
  }
  for (int i = 1; i < uniform_panels; ++i) edges.push_back(a + i * h);
  if (singular_right) {
    edges.push_back(b - h);
    if (uniform_panels == 1) edges.pop_back();
    for (double w = 0.5 * h; w > min_width; w *= 0.5) edges.push_back(b - w);
  }
  edges.push_back(b);
  // drop duplicates created when uniform_panels == 1
  std::vector<double> out;
  for (double e : edges) {
    if (out.empty() || e > out.back()) out.push_back(e);
  }
  return out;
}

}  // namespace zrlj::quad
