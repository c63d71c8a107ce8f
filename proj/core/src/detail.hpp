#pragma once

// Internal helpers shared by the write and read optimizers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <utility>

#include "halfcav/core.hpp"

namespace halfcav::detail {

/// First and last index with w > threshold * max(w).
inline std::pair<std::size_t, std::size_t> support_window(const RealSeries& w,
                                                          double threshold) {
  const double peak = *std::max_element(w.begin(), w.end());
  if (!(peak > 0.0)) throw Error("support_window: envelope vanishes");
  const double floor = threshold * peak;
  std::size_t first = 0;
  while (!(w[first] > floor)) ++first;
  std::size_t last = w.size() - 1;
  while (!(w[last] > floor)) --last;
  if (last == first) {
    last = std::min(first + 1, w.size() - 1);
    if (last == first) first = last - 1;
  }
  return {first, last};
}

inline Complex unit_phase(Complex z) {
  const double mag = std::abs(z);
  if (!(mag > 0.0) || !std::isfinite(mag)) return {1.0, 0.0};
  return z / mag;
}

struct SearchOutcome {
  double u = 0.0;
  double value = 0.0;
  int iterations = 0;
};

/// Maximises objective(u) for u = -log10(1 - x) in [0, u_max]: a coarse scan
/// with step 0.25 followed by golden-section refinement of the best bracket.
template <class Objective>
SearchOutcome maximize_over_deficit(Objective&& objective, double u_max, int max_iterations) {
  constexpr double kStep = 0.25;
  constexpr double kTolerance = 1e-4;
  const int coarse = static_cast<int>(std::floor(u_max / kStep)) + 1;

  SearchOutcome best;
  best.value = -1.0;
  int iterations = 0;
  int best_index = 0;
  for (int j = 0; j < coarse; ++j) {
    const double u = std::min(u_max, j * kStep);
    const double v = objective(u);
    ++iterations;
    if (v > best.value) {
      best = {u, v, 0};
      best_index = j;
    }
  }
  if (u_max - (coarse - 1) * kStep > 1e-12) {
    const double v = objective(u_max);
    ++iterations;
    if (v > best.value) {
      best = {u_max, v, 0};
      best_index = coarse;
    }
  }

  double lo = std::max(0.0, (best_index - 1) * kStep);
  double hi = std::min(u_max, (best_index + 1) * kStep);
  constexpr double kInvPhi = 0.6180339887498949;
  double a = hi - kInvPhi * (hi - lo);
  double b = lo + kInvPhi * (hi - lo);
  double fa = objective(a);
  double fb = objective(b);
  iterations += 2;
  while (hi - lo > kTolerance) {
    if (iterations >= max_iterations) {
      std::ostringstream msg;
      msg << "efficiency search did not converge in " << max_iterations
          << " iterations; bracket u in [" << lo << ", " << hi << "], x in ["
          << 1.0 - std::pow(10.0, -lo) << ", " << 1.0 - std::pow(10.0, -hi) << "]";
      throw Error(msg.str());
    }
    if (fa >= fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - kInvPhi * (hi - lo);
      fa = objective(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + kInvPhi * (hi - lo);
      fb = objective(b);
    }
    ++iterations;
  }
  if (fa > best.value) best = {a, fa, 0};
  if (fb > best.value) best = {b, fb, 0};
  best.iterations = iterations;
  return best;
}

}  // namespace halfcav::detail
