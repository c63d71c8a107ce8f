#pragma once

#include "halfcav/core.hpp"

namespace halfcav {

/// Sampled decay rates for one mirror program together with their running
/// integrals. gamma is the complex rate whose imaginary part is the dynamical
/// level shift; gamma_z = 2 Re gamma is the population decay rate and
/// g = sqrt(gamma_z - gamma') the effective coupling to the pulse mode.
class DecayProfile {
 public:
  DecayProfile(TimeGrid grid, ComplexSeries gamma, double gamma_prime = 0.0);

  const TimeGrid& grid() const { return grid_; }
  const ComplexSeries& gamma() const { return gamma_; }
  const RealSeries& gamma_z() const { return gamma_z_; }
  const ComplexSeries& Gamma() const { return Gamma_; }
  const RealSeries& Gamma_z() const { return Gamma_z_; }
  const RealSeries& g() const { return g_; }
  double gamma_prime() const { return gamma_prime_; }
  std::size_t size() const { return gamma_.size(); }
  double max_gamma_z() const;

 private:
  TimeGrid grid_;
  ComplexSeries gamma_;
  RealSeries gamma_z_;
  ComplexSeries Gamma_;
  RealSeries Gamma_z_;
  RealSeries g_;
  double gamma_prime_;
};

/// Excited-state probability and the matching c-number amplitude.
struct ExcitationTrace {
  TimeGrid grid;
  RealSeries P;
  ComplexSeries amplitude;

  double at(double t) const { return P[grid.nearest_index(t)]; }
};

/// gamma(t) = gamma'/2 + (gamma_p/2)(1 - exp(i omega_a (tau - 2 l(t)/c))).
DecayProfile decay_from_mirror(const MirrorTrajectory& trajectory, const MemoryConfig& cfg);

/// Complex profile for prescribed population decay rates, using the mirror
/// branch l in [0, lambda/4] (phase omega_a(tau - 2l/c) in [-pi, 0] mod 2 pi).
/// Throws if any rate lies outside [gamma', gamma' + 2 gamma_p] by more than 1e-9.
DecayProfile decay_from_rates(const TimeGrid& grid, const RealSeries& gamma_z,
                              const MemoryConfig& cfg);

/// Closed-form absorption amplitude
///   a(t) = e^{-Gamma(t)} int_{t_start}^{t} e^{Gamma(t')} g(t') xi(t') dt'
/// evaluated as a recursive trapezoid in which every exponential has a
/// non-positive real exponent.
ExcitationTrace absorption_probability(const DecayProfile& profile,
                                       const ComplexEnvelope& xi_in);

/// Independent check of absorption_probability: integrates the three-component
/// Bloch system (<sigma_z>, <sigma_+>, <sigma_->) with fixed-step RK4 on the
/// sampling grid. Mid-step coefficients use 4-point cubic interpolation.
/// Throws if |<sigma_z>| exceeds 1 + 1e-6 (grid too coarse).
ExcitationTrace bloch_ode_oracle(const DecayProfile& profile, const ComplexEnvelope& xi_in);

/// True iff gamma_z < 1e-12 on every sample in [t_a, t_b].
bool hold(const DecayProfile& profile, double t_a, double t_b);

}  // namespace halfcav
