#pragma once

#include <span>

namespace zrlj {

struct Extrapolation {
  double value = 0.0;
  double error = 0.0;   ///< spread against the previous triple, or |value - last sample|
  double rate = 0.0;    ///< fitted exponent p
  bool fallback = false;  ///< samples not monotonically convergent; value is the last sample
};

/// Fits f(N) = c0 + c1 N^{-p} through the last three samples (N increasing)
/// with p free, clamped to [p_min, p_max].
Extrapolation richardson(std::span<const double> N, std::span<const double> f, double p_min = 0.2,
                         double p_max = 2.0);

}  // namespace zrlj
