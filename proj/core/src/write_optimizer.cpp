#include "halfcav/write_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "detail.hpp"

namespace halfcav {

RealSeries write_rate_formula(const ComplexEnvelope& xi_in, double deficit, double cap,
                              double support_threshold) {
  const TimeGrid& grid = xi_in.grid();
  const RealSeries w = xi_in.intensity();
  const auto [first, last] = detail::support_window(w, support_threshold);

  const TimeGrid window = TimeGrid::with_spacing(grid.at(first), grid.dt(), last - first + 1);
  const std::span<const double> inside(w.data() + first, last - first + 1);
  const RealSeries running = cumtrapz(inside, window);
  const double total = running.back();

  const double x = 1.0 - deficit;
  RealSeries rate(w.size(), 0.0);
  for (std::size_t k = first; k <= last; ++k) {
    const double num = x * w[k] / total;
    const double den = deficit + x * running[k - first] / total;
    rate[k] = std::min(num / den, cap);
  }
  return rate;
}

namespace {

struct Candidate {
  DecayProfile profile;
  ComplexEnvelope input;
  ExcitationTrace trace;
};

Candidate evaluate(const ComplexEnvelope& xi_in, const MemoryConfig& cfg, double deficit,
                   double cap, const WriteOptions& opt) {
  DecayProfile profile = decay_from_rates(
      xi_in.grid(), write_rate_formula(xi_in, deficit, cap, opt.support_threshold), cfg);
  ComplexEnvelope input = xi_in;
  if (opt.phase_compensation) {
    ComplexSeries s(xi_in.size());
    for (std::size_t k = 0; k < s.size(); ++k) {
      s[k] = std::polar(std::abs(xi_in[k]), -profile.Gamma()[k].imag());
    }
    input = ComplexEnvelope(xi_in.grid(), std::move(s));
  }
  ExcitationTrace trace = absorption_probability(profile, input);
  return {std::move(profile), std::move(input), std::move(trace)};
}

}  // namespace

WriteResult optimal_write_profile(const ComplexEnvelope& xi_in, const MemoryConfig& cfg,
                                  const WriteOptions& opt) {
  if (!xi_in.is_normalized(1e-9)) {
    throw Error("optimal_write_profile: input envelope must have unit squared norm");
  }
  if (cfg.gamma_prime() != 0.0) {
    throw Error("optimal_write_profile: the memory protocol requires gamma_prime = 0");
  }
  if (!(opt.min_deficit > 0.0 && opt.min_deficit < 1.0)) {
    throw Error("optimal_write_profile: min_deficit must lie in (0, 1)");
  }

  const double cap = cfg.cap();
  const auto [first, last] = detail::support_window(xi_in.intensity(), opt.support_threshold);
  const double u_max = -std::log10(opt.min_deficit);

  const RealSeries uncapped = write_rate_formula(xi_in, opt.min_deficit,
                                                 std::numeric_limits<double>::infinity(),
                                                 opt.support_threshold);
  const bool needs_cap =
      *std::max_element(uncapped.begin(), uncapped.end()) > cap;

  double deficit = opt.min_deficit;
  int iterations = 1;
  if (needs_cap) {
    auto objective = [&](double u) {
      const Candidate c = evaluate(xi_in, cfg, std::pow(10.0, -u), cap, opt);
      return c.trace.P[last];
    };
    const auto best = detail::maximize_over_deficit(objective, u_max, opt.max_iterations);
    deficit = std::pow(10.0, -best.u);
    iterations = best.iterations;
  }

  Candidate c = evaluate(xi_in, cfg, deficit, cap, opt);
  WriteResult r{std::move(c.profile), std::move(c.input), std::move(c.trace)};
  r.eta_w = r.trace.P[last];
  r.target = 1.0 - deficit;
  r.capped = std::abs(r.profile.max_gamma_z() - cap) <= 1e-12;
  r.iterations = iterations;
  r.window_begin = first;
  r.window_end = last;
  r.t_w = xi_in.grid().at(first);
  r.t_w0 = xi_in.grid().at(last);
  return r;
}

double write_efficiency(const DecayProfile& profile) {
  return 1.0 - std::exp(-profile.Gamma_z().back());
}

ComplexEnvelope optimal_input_for_profile(const DecayProfile& profile, double eta_w) {
  const double total = profile.Gamma_z().back();
  const double ceiling = 1.0 - std::exp(-total);
  if (!(eta_w > 0.0) || eta_w > ceiling + 1e-12) {
    throw Error("optimal_input_for_profile: eta_w must lie in (0, 1 - exp(-Gamma_z)]");
  }
  const double scale = 1.0 / std::sqrt(eta_w);
  ComplexSeries s(profile.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double mag =
        scale * profile.g()[k] * std::exp(-0.5 * (total - profile.Gamma_z()[k]));
    s[k] = std::polar(mag, -profile.Gamma()[k].imag());
  }
  ComplexEnvelope env(profile.grid(), std::move(s));
  return env.scaled(1.0 / std::sqrt(squared_norm(env)));
}

}  // namespace halfcav
