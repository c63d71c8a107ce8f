#include "halfcav/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace halfcav {

DecayProfile::DecayProfile(TimeGrid grid, ComplexSeries gamma, double gamma_prime)
    : grid_(grid), gamma_(std::move(gamma)), gamma_prime_(gamma_prime) {
  if (gamma_.size() != grid_.size()) {
    throw Error("DecayProfile: sample count does not match grid");
  }
  gamma_z_.resize(gamma_.size());
  g_.resize(gamma_.size());
  for (std::size_t k = 0; k < gamma_.size(); ++k) {
    if (!std::isfinite(gamma_[k].real()) || !std::isfinite(gamma_[k].imag())) {
      throw Error("DecayProfile: non-finite rate");
    }
    gamma_z_[k] = 2.0 * gamma_[k].real();
    g_[k] = std::sqrt(std::max(0.0, gamma_z_[k] - gamma_prime_));
  }
  Gamma_ = cumtrapz(std::span<const Complex>(gamma_), grid_);
  Gamma_z_ = cumtrapz(std::span<const double>(gamma_z_), grid_);
}

double DecayProfile::max_gamma_z() const {
  return *std::max_element(gamma_z_.begin(), gamma_z_.end());
}

namespace {

Complex rate_for_phase(double phase, const MemoryConfig& cfg) {
  const Complex i{0.0, 1.0};
  return 0.5 * cfg.gamma_prime() + 0.5 * cfg.gamma_p() * (1.0 - std::exp(i * phase));
}

}  // namespace

DecayProfile decay_from_mirror(const MirrorTrajectory& trajectory, const MemoryConfig& cfg) {
  // omega_a * 2 l / c = 4 pi l / lambda; omega_a tau is a whole number of turns.
  ComplexSeries gamma(trajectory.l_over_lambda.size());
  for (std::size_t k = 0; k < gamma.size(); ++k) {
    const double phase = cfg.node_phase_residual() -
                         4.0 * std::numbers::pi * trajectory.l_over_lambda[k];
    gamma[k] = rate_for_phase(phase, cfg);
  }
  return {trajectory.grid, std::move(gamma), cfg.gamma_prime()};
}

DecayProfile decay_from_rates(const TimeGrid& grid, const RealSeries& gamma_z,
                              const MemoryConfig& cfg) {
  if (gamma_z.size() != grid.size()) throw Error("decay_from_rates: length mismatch");
  const double lo = cfg.gamma_prime();
  const double hi = cfg.gamma_prime() + 2.0 * cfg.gamma_p();
  ComplexSeries gamma(gamma_z.size());
  for (std::size_t k = 0; k < gamma.size(); ++k) {
    const double gz = gamma_z[k];
    if (!(gz >= lo - 1e-9) || !(gz <= hi + 1e-9)) {
      throw Error("decay_from_rates: gamma_z outside the reachable range");
    }
    const double c = std::clamp(1.0 - (gz - lo) / cfg.gamma_p(), -1.0, 1.0);
    const double phase = -std::acos(c);
    // Keep gamma_z bit-exact: 2 Re gamma reproduces the input rate.
    gamma[k] = Complex{0.5 * std::clamp(gz, lo, hi), rate_for_phase(phase, cfg).imag()};
  }
  return {grid, std::move(gamma), cfg.gamma_prime()};
}

ExcitationTrace absorption_probability(const DecayProfile& profile,
                                       const ComplexEnvelope& xi_in) {
  require_same_grid(profile.grid(), xi_in.grid(), "absorption_probability");
  const std::size_t n = profile.size();
  const double half = 0.5 * profile.grid().dt();
  const auto& G = profile.Gamma();
  const auto& g = profile.g();

  ComplexSeries amp(n, Complex{});
  RealSeries P(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) {
    // e^{-(Gamma_k - Gamma_{k-1})}: real part of the exponent is <= 0.
    const Complex decay = std::exp(-(G[k] - G[k - 1]));
    amp[k] = decay * (amp[k - 1] + half * g[k - 1] * xi_in[k - 1]) + half * g[k] * xi_in[k];
    P[k] = std::norm(amp[k]);
  }
  return {profile.grid(), std::move(P), std::move(amp)};
}

namespace {

template <class T>
T midpoint(const std::vector<T>& f, std::size_t k) {
  const std::size_t n = f.size();
  if (n >= 4) {
    if (k >= 1 && k + 2 < n) {
      return (-f[k - 1] + 9.0 * f[k] + 9.0 * f[k + 1] - f[k + 2]) / 16.0;
    }
    if (k == 0) return (5.0 * f[0] + 15.0 * f[1] - 5.0 * f[2] + f[3]) / 16.0;
    return (5.0 * f[k + 1] + 15.0 * f[k] - 5.0 * f[k - 1] + f[k - 2]) / 16.0;
  }
  return 0.5 * (f[k] + f[k + 1]);
}

struct Coefficients {
  double gamma_z;
  Complex gamma;
  double g;
  Complex xi;
};

using State = std::array<Complex, 3>;

State bloch_rhs(const State& s, const Coefficients& c) {
  const Complex drive = c.g * c.xi;
  const Complex drive_conj = c.g * std::conj(c.xi);
  return {
      -c.gamma_z * (s[0] + 1.0) - 2.0 * drive * s[1] - 2.0 * drive_conj * s[2],
      -std::conj(c.gamma) * s[1] - drive_conj,
      -c.gamma * s[2] - drive,
  };
}

State axpy(const State& s, double h, const State& k) {
  return {s[0] + h * k[0], s[1] + h * k[1], s[2] + h * k[2]};
}

}  // namespace

ExcitationTrace bloch_ode_oracle(const DecayProfile& profile, const ComplexEnvelope& xi_in) {
  require_same_grid(profile.grid(), xi_in.grid(), "bloch_ode_oracle");
  const std::size_t n = profile.size();
  const double dt = profile.grid().dt();
  const auto& gz = profile.gamma_z();
  const auto& gam = profile.gamma();
  const auto& g = profile.g();
  const auto& xi = xi_in.samples();

  State s{Complex{-1.0, 0.0}, Complex{}, Complex{}};
  RealSeries P(n, 0.0);
  ComplexSeries amp(n, Complex{});

  for (std::size_t k = 0; k + 1 < n; ++k) {
    const Coefficients a{gz[k], gam[k], g[k], xi[k]};
    const Coefficients m{midpoint(gz, k), midpoint(gam, k), midpoint(g, k), midpoint(xi, k)};
    const Coefficients b{gz[k + 1], gam[k + 1], g[k + 1], xi[k + 1]};

    const State k1 = bloch_rhs(s, a);
    const State k2 = bloch_rhs(axpy(s, 0.5 * dt, k1), m);
    const State k3 = bloch_rhs(axpy(s, 0.5 * dt, k2), m);
    const State k4 = bloch_rhs(axpy(s, dt, k3), b);
    for (std::size_t i = 0; i < 3; ++i) {
      s[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    if (std::abs(s[0]) > 1.0 + 1e-6 || !std::isfinite(s[0].real())) {
      throw Error("bloch_ode_oracle: integration unstable at t = " +
                  std::to_string(profile.grid().at(k + 1)) + "; use a finer grid");
    }
    P[k + 1] = 0.5 * (1.0 + s[0].real());
    amp[k + 1] = -s[2];
  }
  return {profile.grid(), std::move(P), std::move(amp)};
}

bool hold(const DecayProfile& profile, double t_a, double t_b) {
  const TimeGrid& grid = profile.grid();
  const double slack = 1e-9 * grid.dt();
  if (!(t_a < t_b) || t_a < grid.t_start() - slack || t_b > grid.t_end() + slack) {
    throw Error("hold: require t_a < t_b inside the grid");
  }
  for (std::size_t k = 0; k < profile.size(); ++k) {
    const double t = grid.at(k);
    if (t < t_a - slack || t > t_b + slack) continue;
    if (!(profile.gamma_z()[k] < 1e-12)) return false;
  }
  return true;
}

}  // namespace halfcav
