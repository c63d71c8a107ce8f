#pragma once

#include <cstddef>
#include <optional>

#include "halfcav/core.hpp"
#include "halfcav/dynamics.hpp"
#include "halfcav/write_optimizer.hpp"

namespace halfcav {

struct ReadOptions {
  /// Remove the deterministic read-side phase (carrier-free chirp
  /// pi/2 + arg gamma_r - Im Gamma_r) and re-apply the target's phase reference.
  bool phase_compensation = true;
  double min_deficit = 1e-9;
  double support_threshold = 1e-12;
  int max_iterations = 200;
  /// D/c for the observation point; defaults to tau/2 (D = L).
  std::optional<double> observation_delay;
};

struct ReadResult {
  DecayProfile profile;
  ComplexEnvelope xi_out;
  /// Emitted envelope as produced by the atom, carrier removed, chirp kept.
  ComplexEnvelope xi_out_raw;
  double eta_r = 0.0;
  double fidelity_vs_target = 0.0;
  bool capped = false;
  int iterations = 0;
  double target = 0.0;
  double P0 = 0.0;
  /// Constant part of the dropped carrier, omega_a (D/c - tau/2).
  double carrier_phase = 0.0;
  std::size_t window_begin = 0;
  std::size_t window_end = 0;
  double t_r0 = 0.0;
  double t_r = 0.0;
};

/// Read decay rate that re-emits a stored excitation P0 into the shape of
/// `target`:
///
///   gamma_z(t) = min( x |xi_tgt(t)|^2 / (1 - x int_{t_r0}^{t} |xi_tgt|^2), 2 gamma0 ),
///
/// with xi_tgt the unit-normalized target. If capping is required, x maximises
/// the mode-matched read efficiency eta_r * F. The profile is zero before the
/// target support, so Gamma_r accumulates from t_r0.
ReadResult read_profile_for_target(const ComplexEnvelope& target, double P0,
                                   const MemoryConfig& cfg, const ReadOptions& options = {});

/// xi_out(t) = i sqrt(2 P0 / gamma0) gamma_r(t) exp(-Gamma_r(t)), carrier dropped.
ComplexEnvelope output_envelope(const DecayProfile& profile, double P0,
                                const MemoryConfig& cfg);

/// omega_a (D/c - tau/2): constant phase of the dropped carrier.
double carrier_phase(const MemoryConfig& cfg, double observation_delay);

/// 1 - exp(-Gamma_z) accumulated over the profile.
double read_efficiency(const DecayProfile& profile);

/// eta_w * eta_r; throws unless r was built with P0 = w.eta_w.
double total_efficiency(const WriteResult& w, const ReadResult& r);

RealSeries read_rate_formula(const ComplexEnvelope& target, double deficit, double cap,
                             double support_threshold = 1e-12);

}  // namespace halfcav
