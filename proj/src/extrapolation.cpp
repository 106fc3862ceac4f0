#include "zrlj/extrapolation.hpp"

#include <algorithm>
#include <cmath>

#include "zrlj/errors.hpp"

namespace zrlj {

namespace {

struct Fit {
  double value;
  double rate;
  bool fallback;
};

Fit fit_triple(const double* N, const double* f, double p_min, double p_max) {
  const double d1 = f[1] - f[0];
  const double d2 = f[2] - f[1];
  if (d1 == 0.0 && d2 == 0.0) return {f[2], p_max, false};
  if (d1 * d2 <= 0.0 || std::abs(d2) >= std::abs(d1)) return {f[2], 0.0, true};
  const double target = d1 / d2;
  auto ratio = [&](double p) {
    const double a = std::pow(N[0], -p), b = std::pow(N[1], -p), c = std::pow(N[2], -p);
    return (a - b) / (b - c);
  };
  double lo = 1e-3, hi = 20.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (ratio(mid) < target ? lo : hi) = mid;
  }
  const double p = std::clamp(0.5 * (lo + hi), p_min, p_max);
  const double b = std::pow(N[1], -p), c = std::pow(N[2], -p);
  const double c1 = d2 / (c - b);
  return {f[2] - c1 * c, p, false};
}

}  // namespace

Extrapolation richardson(std::span<const double> N, std::span<const double> f, double p_min, double p_max) {
  const std::size_t n = N.size();
  if (n != f.size() || n < 3) throw ConfigError("richardson: need at least three samples");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(N[i] > N[i - 1])) throw ConfigError("richardson: N must increase");
  }
  const Fit last = fit_triple(&N[n - 3], &f[n - 3], p_min, p_max);
  Extrapolation e;
  e.value = last.value;
  e.rate = last.rate;
  e.fallback = last.fallback;
  if (last.fallback) {
    e.error = std::abs(f[n - 1] - f[n - 2]);
  } else if (n >= 4) {
    const Fit prev = fit_triple(&N[n - 4], &f[n - 4], p_min, p_max);
    e.error = std::abs(last.value - prev.value);
  } else {
    e.error = std::abs(last.value - f[n - 1]);
  }
  return e;
}

}  // namespace zrlj
