#pragma once

#include <cstddef>

#include "halfcav/core.hpp"
#include "halfcav/dynamics.hpp"

namespace halfcav {

struct WriteOptions {
  /// Imprint arg xi_in(t) = -Im Gamma_w(t) on the absorbed envelope.
  bool phase_compensation = true;
  /// 1 - eta used for the uncapped branch; keeps gamma_z finite at t_w.
  double min_deficit = 1e-9;
  /// Samples with |xi|^2 <= support_threshold * max|xi|^2 lie outside the write window.
  double support_threshold = 1e-12;
  int max_iterations = 200;
};

struct WriteResult {
  DecayProfile profile;
  /// Envelope fed to the atom (phase-compensated copy of the input when enabled).
  ComplexEnvelope input;
  ExcitationTrace trace;
  double eta_w = 0.0;
  /// Candidate efficiency x that parameterises the returned profile.
  double target = 0.0;
  bool capped = false;
  int iterations = 0;
  std::size_t window_begin = 0;
  std::size_t window_end = 0;
  double t_w = 0.0;
  double t_w0 = 0.0;
};

/// Optimal write decay rate for a normalized input envelope,
///
///   gamma_z(t) = min( x |xi(t)|^2 / ((1 - x) + x int_{t_w}^{t} |xi|^2), 2 gamma0 ).
///
/// When the uncapped profile at x = 1 - min_deficit stays below the cap it is
/// returned directly. Otherwise x is chosen to maximise the achieved
/// absorption P(t_w0): a coarse scan over u = -log10(1 - x) in [0, 9] followed
/// by golden-section refinement. eta_w is always the achieved P(t_w0).
WriteResult optimal_write_profile(const ComplexEnvelope& xi_in, const MemoryConfig& cfg,
                                  const WriteOptions& options = {});

/// 1 - exp(-Gamma_z) accumulated over the profile.
double write_efficiency(const DecayProfile& profile);

/// Input envelope that the given profile absorbs optimally:
///   |xi(t)| = g(t) exp(-(Gamma_z(t_end) - Gamma_z(t)) / 2) / sqrt(eta_w),
/// phase -Im Gamma(t), renormalized to unit norm on the grid.
ComplexEnvelope optimal_input_for_profile(const DecayProfile& profile, double eta_w);

/// Gamma_z profile of the write formula for a candidate x, before any capping
/// decision is applied. Exposed for tests and diagnostics.
RealSeries write_rate_formula(const ComplexEnvelope& xi_in, double deficit, double cap,
                              double support_threshold = 1e-12);

}  // namespace halfcav
