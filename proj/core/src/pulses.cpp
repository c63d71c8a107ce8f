#include "halfcav/pulses.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace halfcav {

void TimeBinSpec::validate() const {
  if (!std::isfinite(alpha) || !std::isfinite(beta)) {
    throw Error("pulse.alpha/beta: must be finite");
  }
  if (std::abs(alpha * alpha + beta * beta - 1.0) > 1e-6) {
    throw Error("pulse.alpha/beta: alpha^2 + beta^2 must equal 1");
  }
  if (!(t2 > t1)) throw Error("pulse.t2: must be greater than pulse.t1");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error("pulse.sigma: must be positive and finite");
  }
  if (!std::isfinite(phi)) throw Error("pulse.phi: must be finite");
}

namespace {

ComplexEnvelope normalized(ComplexEnvelope env) {
  const double norm = squared_norm(env);
  if (!(norm > 0.0)) throw Error("pulse: envelope vanishes on the grid");
  return env.scaled(1.0 / std::sqrt(norm));
}

}  // namespace

ComplexEnvelope make_time_bin(const TimeBinSpec& spec, const TimeGrid& grid) {
  spec.validate();
  const double lo = spec.t1 - 6.0 / spec.sigma;
  const double hi = spec.t2 + 6.0 / spec.sigma;
  if (grid.t_start() > lo || grid.t_end() < hi) {
    std::ostringstream msg;
    msg << "make_time_bin: grid [" << grid.t_start() << ", " << grid.t_end()
        << "] too narrow, need at least [" << lo << ", " << hi << "]";
    throw Error(msg.str());
  }
  const double s2 = spec.sigma * spec.sigma;
  const Complex second = spec.beta * std::polar(1.0, spec.phi);
  auto env = ComplexEnvelope::sample(grid, [&](double t) {
    const double d1 = t - spec.t1;
    const double d2 = t - spec.t2;
    return spec.alpha * std::exp(-0.5 * d1 * d1 * s2) +
           second * std::exp(-0.5 * d2 * d2 * s2);
  });
  return normalized(std::move(env));
}

ComplexEnvelope make_gaussian(double center, double sigma, const TimeGrid& grid) {
  if (!(sigma > 0.0)) throw Error("make_gaussian: sigma must be positive");
  const double s2 = sigma * sigma;
  auto env = ComplexEnvelope::sample(grid, [&](double t) {
    const double d = t - center;
    return Complex{std::exp(-0.5 * d * d * s2), 0.0};
  });
  return normalized(std::move(env));
}

double fwhm(const TimeBinSpec& spec) {
  return 2.0 * std::sqrt(2.0 * std::numbers::ln2) * spec.sigma;
}

Complex overlap(const ComplexEnvelope& a, const ComplexEnvelope& b) {
  require_same_grid(a.grid(), b.grid(), "overlap");
  ComplexSeries prod(a.size());
  for (std::size_t k = 0; k < prod.size(); ++k) prod[k] = std::conj(a[k]) * b[k];
  return trapz(std::span<const Complex>(prod), a.grid());
}

double fidelity(const ComplexEnvelope& a, const ComplexEnvelope& b) {
  require_same_grid(a.grid(), b.grid(), "fidelity");
  const double na = squared_norm(a);
  const double nb = squared_norm(b);
  if (!(na > 0.0) || !(nb > 0.0)) {
    throw Error("fidelity: undefined for a zero-norm envelope");
  }
  const double f = std::norm(overlap(a, b)) / (na * nb);
  return std::clamp(f, 0.0, 1.0);
}

ComplexEnvelope shift(const ComplexEnvelope& env, double T) {
  const TimeGrid& grid = env.grid();
  const std::size_t n = grid.size();
  const double dt = grid.dt();

  double lost = 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double w = std::norm(env[k]);
    total += w;
    const double moved = grid.at(k) + T;
    if (moved < grid.t_start() - 1e-9 * dt || moved > grid.t_end() + 1e-9 * dt) lost += w;
  }
  if (lost > 1e-12 * total) {
    throw Error("shift: translated support leaves the grid");
  }

  // result(t_k) = env(t_k - T); source position in fractional samples.
  const double offset = T / dt;
  const double whole = std::round(offset);
  const bool integral = std::abs(offset - whole) < 1e-9;

  ComplexSeries out(n, Complex{});
  for (std::size_t k = 0; k < n; ++k) {
    const double pos = static_cast<double>(k) - (integral ? whole : offset);
    if (pos < -1e-9 || pos > static_cast<double>(n - 1) + 1e-9) continue;
    if (integral) {
      out[k] = env[static_cast<std::size_t>(std::llround(pos))];
      continue;
    }
    const double clamped = std::clamp(pos, 0.0, static_cast<double>(n - 1));
    const auto i0 = std::min(static_cast<std::size_t>(clamped), n - 2);
    const double frac = clamped - static_cast<double>(i0);
    out[k] = (1.0 - frac) * env[i0] + frac * env[i0 + 1];
  }
  ComplexEnvelope moved(grid, std::move(out));
  if (integral) return moved;
  // Interpolation smooths away O(dt^2) of the norm; restore it.
  const double before = squared_norm(env);
  const double after = squared_norm(moved);
  return after > 0.0 ? moved.scaled(std::sqrt(before / after)) : moved;
}

}  // namespace halfcav
