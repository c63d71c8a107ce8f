#pragma once

#include "halfcav/core.hpp"

namespace halfcav {

/// Two-bin Gaussian single-photon envelope
///   alpha * G(t - t1) + beta * e^{i phi} * G(t - t2),  G(s) = exp(-s^2 sigma^2 / 2).
struct TimeBinSpec {
  double alpha = std::numbers::sqrt2 / 2.0;
  double beta = std::numbers::sqrt2 / 2.0;
  double phi = 0.0;
  double t1 = 0.0;
  double t2 = 20.0;
  double sigma = 0.2;

  /// Throws Error naming the offending field.
  void validate() const;
};

/// Sampled, numerically normalized time-bin envelope. The grid must cover
/// [t1 - 6/sigma, t2 + 6/sigma].
ComplexEnvelope make_time_bin(const TimeBinSpec& spec, const TimeGrid& grid);

/// Single normalized Gaussian of bandwidth sigma centred at `center`.
ComplexEnvelope make_gaussian(double center, double sigma, const TimeGrid& grid);

/// Intensity full width at half maximum, 2 sqrt(2 ln 2) sigma.
double fwhm(const TimeBinSpec& spec);

/// Integral of conj(a) * b.
Complex overlap(const ComplexEnvelope& a, const ComplexEnvelope& b);

/// |<a|b>|^2 / (<a|a><b|b>), in [0, 1]. Throws on a zero-norm argument.
double fidelity(const ComplexEnvelope& a, const ComplexEnvelope& b);

/// Translates env by T (result(t) = env(t - T)). Whole-sample shifts copy
/// samples; otherwise linear interpolation rescaled to the original norm.
/// Throws if more than 1e-12 of the squared norm would leave the grid.
ComplexEnvelope shift(const ComplexEnvelope& env, double T);

}  // namespace halfcav
