#include "halfcav/read_shaper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "detail.hpp"
#include "halfcav/pulses.hpp"

namespace halfcav {

RealSeries read_rate_formula(const ComplexEnvelope& target, double deficit, double cap,
                             double support_threshold) {
  const TimeGrid& grid = target.grid();
  const RealSeries w = target.intensity();
  const auto [first, last] = detail::support_window(w, support_threshold);

  const TimeGrid window = TimeGrid::with_spacing(grid.at(first), grid.dt(), last - first + 1);
  const std::span<const double> inside(w.data() + first, last - first + 1);
  // 1 - x * head = (1 - x) + x * tail; the tail form avoids cancellation near the end.
  const RealSeries tail = cumtrapz_tail(inside, window);
  const double total = tail.front();

  const double x = 1.0 - deficit;
  RealSeries rate(w.size(), 0.0);
  for (std::size_t k = first; k <= last; ++k) {
    const double num = x * w[k] / total;
    const double den = deficit + x * tail[k - first] / total;
    rate[k] = std::min(num / den, cap);
  }
  return rate;
}

ComplexEnvelope output_envelope(const DecayProfile& profile, double P0,
                                const MemoryConfig& cfg) {
  if (!(P0 >= 0.0 && P0 <= 1.0)) throw Error("output_envelope: P0 must lie in [0, 1]");
  const Complex prefactor = Complex{0.0, 1.0} * std::sqrt(2.0 * P0 / cfg.gamma0());
  ComplexSeries s(profile.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    s[k] = prefactor * profile.gamma()[k] * std::exp(-profile.Gamma()[k]);
  }
  return {profile.grid(), std::move(s)};
}

double carrier_phase(const MemoryConfig& cfg, double observation_delay) {
  return cfg.omega_a() * (observation_delay - 0.5 * cfg.tau());
}

double read_efficiency(const DecayProfile& profile) {
  return 1.0 - std::exp(-profile.Gamma_z().back());
}

double total_efficiency(const WriteResult& w, const ReadResult& r) {
  if (std::abs(r.P0 - w.eta_w) > 1e-12) {
    throw Error("total_efficiency: read stage was not seeded with the write efficiency");
  }
  return w.eta_w * r.eta_r;
}

namespace {

struct Candidate {
  DecayProfile profile;
  ComplexEnvelope raw;
  ComplexEnvelope out;
  double eta_r;
  double fidelity;
};

Candidate evaluate(const ComplexEnvelope& target, double P0, const MemoryConfig& cfg,
                   double deficit, const ReadOptions& opt) {
  DecayProfile profile = decay_from_rates(
      target.grid(), read_rate_formula(target, deficit, cfg.cap(), opt.support_threshold), cfg);
  ComplexEnvelope raw = output_envelope(profile, P0, cfg);
  ComplexEnvelope out = raw;
  if (opt.phase_compensation) {
    ComplexSeries s(raw.size());
    for (std::size_t k = 0; k < s.size(); ++k) {
      s[k] = std::abs(raw[k]) * detail::unit_phase(target[k]);
    }
    out = ComplexEnvelope(raw.grid(), std::move(s));
  }
  const double emitted = squared_norm(out);
  const double eta_r = P0 > 0.0 ? emitted / P0 : 0.0;
  const double f = emitted > 0.0 ? fidelity(out, target) : 0.0;
  return {std::move(profile), std::move(raw), std::move(out), eta_r, f};
}

}  // namespace

ReadResult read_profile_for_target(const ComplexEnvelope& target, double P0,
                                   const MemoryConfig& cfg, const ReadOptions& opt) {
  if (!(P0 > 0.0) || P0 > 1.0) {
    throw Error("read_profile_for_target: P0 must lie in (0, 1]");
  }
  if (cfg.gamma_prime() != 0.0) {
    throw Error("read_profile_for_target: the memory protocol requires gamma_prime = 0");
  }
  if (!(opt.min_deficit > 0.0 && opt.min_deficit < 1.0)) {
    throw Error("read_profile_for_target: min_deficit must lie in (0, 1)");
  }
  if (!(squared_norm(target) > 0.0)) {
    throw Error("read_profile_for_target: target envelope vanishes");
  }

  const auto [first, last] = detail::support_window(target.intensity(), opt.support_threshold);
  const double u_max = -std::log10(opt.min_deficit);

  const RealSeries uncapped = read_rate_formula(
      target, opt.min_deficit, std::numeric_limits<double>::infinity(), opt.support_threshold);
  const bool needs_cap = *std::max_element(uncapped.begin(), uncapped.end()) > cfg.cap();

  double deficit = opt.min_deficit;
  int iterations = 1;
  if (needs_cap) {
    auto objective = [&](double u) {
      const Candidate c = evaluate(target, P0, cfg, std::pow(10.0, -u), opt);
      return c.eta_r * c.fidelity;
    };
    const auto best = detail::maximize_over_deficit(objective, u_max, opt.max_iterations);
    deficit = std::pow(10.0, -best.u);
    iterations = best.iterations;
  }

  Candidate c = evaluate(target, P0, cfg, deficit, opt);
  ReadResult r{std::move(c.profile), std::move(c.out), std::move(c.raw)};
  r.eta_r = c.eta_r;
  r.fidelity_vs_target = c.fidelity;
  r.capped = std::abs(r.profile.max_gamma_z() - cfg.cap()) <= 1e-12;
  r.iterations = iterations;
  r.target = 1.0 - deficit;
  r.P0 = P0;
  r.carrier_phase = carrier_phase(cfg, opt.observation_delay.value_or(0.5 * cfg.tau()));
  r.window_begin = first;
  r.window_end = last;
  r.t_r0 = target.grid().at(first);
  r.t_r = target.grid().at(last);
  return r;
}

}  // namespace halfcav
