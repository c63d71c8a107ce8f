#pragma once

#include "halfcav/core.hpp"
#include "halfcav/dynamics.hpp"

namespace halfcav {

/// l / lambda = arccos(1 - gamma_z / gamma0) / (4 pi), the principal branch
/// with l in [0, lambda/4]. Requires gamma' = 0 and gamma_z in [0, 2 gamma0]
/// (1e-9 slack).
MirrorTrajectory trajectory_from_decay(const DecayProfile& profile, const MemoryConfig& cfg);

/// Inverse of trajectory_from_decay; same as decay_from_mirror.
DecayProfile decay_from_trajectory(const MirrorTrajectory& trajectory, const MemoryConfig& cfg);

struct FeasibilityReport {
  double v_max = 0.0;          // lambda * gamma0
  double v_max_si = 0.0;       // m/s
  double lambda_si = 0.0;      // m
  double gamma0_si = 0.0;      // 1/s
  double l_min = 0.0;          // lambda
  double l_max = 0.0;          // lambda
  bool demanding = false;      // more than lambda/4 per 1/gamma0
};

/// Kinematic diagnostics. Defaults: Ba+ 493 nm line with gamma0 = 15e6 1/s.
FeasibilityReport feasibility_report(const MirrorTrajectory& trajectory,
                                     const MemoryConfig& cfg, double lambda_si = 493e-9,
                                     double gamma0_si = 15e6);

}  // namespace halfcav
