#include "halfcav/mirror.hpp"

#include <algorithm>
#include <cmath>

namespace halfcav {

MirrorTrajectory trajectory_from_decay(const DecayProfile& profile, const MemoryConfig& cfg) {
  if (cfg.gamma_prime() != 0.0) {
    throw Error("trajectory_from_decay: only gamma_prime = 0 is supported");
  }
  const double gamma0 = cfg.gamma0();
  RealSeries l(profile.size());
  for (std::size_t k = 0; k < l.size(); ++k) {
    const double gz = profile.gamma_z()[k];
    if (gz < -1e-9 || gz > 2.0 * gamma0 + 1e-9 || !std::isfinite(gz)) {
      throw Error("trajectory_from_decay: gamma_z outside [0, 2 gamma0]");
    }
    const double c = std::clamp(1.0 - gz / gamma0, -1.0, 1.0);
    l[k] = std::acos(c) / (4.0 * std::numbers::pi);
  }
  return {profile.grid(), std::move(l)};
}

DecayProfile decay_from_trajectory(const MirrorTrajectory& trajectory, const MemoryConfig& cfg) {
  return decay_from_mirror(trajectory, cfg);
}

FeasibilityReport feasibility_report(const MirrorTrajectory& trajectory,
                                     const MemoryConfig& /*cfg*/, double lambda_si,
                                     double gamma0_si) {
  FeasibilityReport r;
  r.v_max = trajectory.v_max;
  r.lambda_si = lambda_si;
  r.gamma0_si = gamma0_si;
  r.v_max_si = trajectory.v_max * lambda_si * gamma0_si;
  const auto [lo, hi] =
      std::minmax_element(trajectory.l_over_lambda.begin(), trajectory.l_over_lambda.end());
  r.l_min = *lo;
  r.l_max = *hi;
  r.demanding = trajectory.v_max > 0.25 * (1.0 + 1e-9);
  return r;
}

}  // namespace halfcav
