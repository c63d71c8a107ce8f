#include "halfcav/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace halfcav {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

MemoryConfig::MemoryConfig() : MemoryConfig(MemoryParams{}) {}

MemoryConfig::MemoryConfig(const MemoryParams& p)
    : gamma0_(p.gamma0),
      gamma_prime_(p.gamma_prime),
      gamma_p_(p.gamma0 - p.gamma_prime),
      omega_a_(p.omega_a),
      tau_(p.tau),
      tau_requested_(p.tau),
      cycles_(1),
      node_residual_(0.0) {
  if (!(gamma0_ > 0.0) || !std::isfinite(gamma0_)) {
    throw Error("memory.gamma0: must be positive and finite");
  }
  if (!(gamma_prime_ >= 0.0) || gamma_prime_ > gamma0_) {
    throw Error("memory.gamma_prime: must lie in [0, gamma0]");
  }
  if (!(omega_a_ > 0.0) || !std::isfinite(omega_a_)) {
    throw Error("memory.omega_a: must be positive and finite");
  }
  if (!(tau_requested_ > 0.0) || !std::isfinite(tau_requested_)) {
    throw Error("memory.tau: must be positive and finite");
  }
  if (!(p.max_markov > 0.0)) {
    throw Error("memory.max_markov: must be positive");
  }

  // Snap to a node-commensurate round trip, omega_a * tau = 2 pi m, m >= 1.
  const double cycles = std::round(omega_a_ * tau_requested_ / kTwoPi);
  cycles_ = std::max(1L, static_cast<long>(cycles));
  tau_ = static_cast<double>(cycles_) * kTwoPi / omega_a_;
  node_residual_ = omega_a_ * tau_ - static_cast<double>(cycles_) * kTwoPi;

  if (gamma0_ * tau_ > p.max_markov) {
    std::ostringstream msg;
    msg << "memory.tau: gamma0*tau = " << gamma0_ * tau_
        << " (after snapping to a node) exceeds the Markov bound " << p.max_markov;
    throw Error(msg.str());
  }
}

TimeGrid::TimeGrid(double t_start, double t_end, std::size_t n)
    : t_start_(t_start), t_end_(t_end), n_(n), dt_(0.0) {
  if (n < 2) throw Error("TimeGrid: need at least 2 samples");
  if (!std::isfinite(t_start) || !std::isfinite(t_end) || !(t_end > t_start)) {
    throw Error("TimeGrid: require finite t_end > t_start");
  }
  dt_ = (t_end - t_start) / static_cast<double>(n - 1);
}

TimeGrid TimeGrid::with_spacing(double t_start, double dt, std::size_t n) {
  if (!(dt > 0.0)) throw Error("TimeGrid: spacing must be positive");
  if (n < 2) throw Error("TimeGrid: need at least 2 samples");
  TimeGrid grid(t_start, t_start + dt * static_cast<double>(n - 1), n);
  grid.dt_ = dt;
  return grid;
}

std::size_t TimeGrid::nearest_index(double t) const {
  const double k = std::round((t - t_start_) / dt_);
  if (k <= 0.0) return 0;
  return std::min(n_ - 1, static_cast<std::size_t>(k));
}

bool TimeGrid::same_as(const TimeGrid& other) const {
  const double tol = 1e-9 * dt_;
  return n_ == other.n_ && std::abs(t_start_ - other.t_start_) <= tol &&
         std::abs(dt_ - other.dt_) <= 1e-12 * dt_;
}

void require_same_grid(const TimeGrid& a, const TimeGrid& b, const std::string& what) {
  if (!a.same_as(b)) throw Error(what + ": grid mismatch");
}

ComplexEnvelope::ComplexEnvelope(TimeGrid grid, ComplexSeries samples)
    : grid_(grid), samples_(std::move(samples)) {
  if (samples_.size() != grid_.size()) {
    throw Error("ComplexEnvelope: sample count does not match grid");
  }
  for (const auto& s : samples_) {
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
      throw Error("ComplexEnvelope: non-finite sample");
    }
  }
}

ComplexEnvelope ComplexEnvelope::zeros(const TimeGrid& grid) {
  return {grid, ComplexSeries(grid.size(), Complex{})};
}

ComplexEnvelope ComplexEnvelope::sample(const TimeGrid& grid,
                                        const std::function<Complex(double)>& fn) {
  ComplexSeries s(grid.size());
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = fn(grid.at(k));
  return {grid, std::move(s)};
}

ComplexEnvelope ComplexEnvelope::scaled(Complex factor) const {
  ComplexSeries s(samples_);
  for (auto& v : s) v *= factor;
  return {grid_, std::move(s)};
}

RealSeries ComplexEnvelope::intensity() const {
  RealSeries out(samples_.size());
  std::transform(samples_.begin(), samples_.end(), out.begin(),
                 [](const Complex& v) { return std::norm(v); });
  return out;
}

bool ComplexEnvelope::is_normalized(double tol) const {
  return std::abs(squared_norm(*this) - 1.0) < tol;
}

MirrorTrajectory::MirrorTrajectory(TimeGrid g, RealSeries l)
    : grid(g), l_over_lambda(std::move(l)) {
  if (l_over_lambda.size() != grid.size()) {
    throw Error("MirrorTrajectory: sample count does not match grid");
  }
  for (double v : l_over_lambda) {
    if (!std::isfinite(v)) throw Error("MirrorTrajectory: non-finite displacement");
  }
  velocity = finite_difference(l_over_lambda, grid);
  for (double v : velocity) v_max = std::max(v_max, std::abs(v));
}

template <class T>
std::vector<T> cumtrapz(std::span<const T> values, const TimeGrid& grid) {
  if (values.size() != grid.size()) throw Error("cumtrapz: length mismatch");
  std::vector<T> out(values.size(), T{});
  const double half = 0.5 * grid.dt();
  for (std::size_t k = 1; k < values.size(); ++k) {
    out[k] = out[k - 1] + half * (values[k - 1] + values[k]);
  }
  return out;
}

template <class T>
std::vector<T> cumtrapz_tail(std::span<const T> values, const TimeGrid& grid) {
  if (values.size() != grid.size()) throw Error("cumtrapz_tail: length mismatch");
  std::vector<T> out(values.size(), T{});
  const double half = 0.5 * grid.dt();
  for (std::size_t k = values.size() - 1; k-- > 0;) {
    out[k] = out[k + 1] + half * (values[k] + values[k + 1]);
  }
  return out;
}

template std::vector<double> cumtrapz(std::span<const double>, const TimeGrid&);
template std::vector<Complex> cumtrapz(std::span<const Complex>, const TimeGrid&);
template std::vector<double> cumtrapz_tail(std::span<const double>, const TimeGrid&);
template std::vector<Complex> cumtrapz_tail(std::span<const Complex>, const TimeGrid&);

namespace {
template <class T>
T trapz_impl(std::span<const T> values, const TimeGrid& grid) {
  if (values.size() != grid.size()) throw Error("trapz: length mismatch");
  T sum{};
  for (std::size_t k = 1; k + 1 < values.size(); ++k) sum += values[k];
  sum += 0.5 * (values.front() + values.back());
  return sum * grid.dt();
}
}  // namespace

double trapz(std::span<const double> values, const TimeGrid& grid) {
  return trapz_impl(values, grid);
}

Complex trapz(std::span<const Complex> values, const TimeGrid& grid) {
  return trapz_impl(values, grid);
}

double squared_norm(const ComplexEnvelope& env) {
  const RealSeries w = env.intensity();
  return trapz(std::span<const double>(w), env.grid());
}

RealSeries finite_difference(std::span<const double> values, const TimeGrid& grid) {
  if (values.size() != grid.size()) throw Error("finite_difference: length mismatch");
  const std::size_t n = values.size();
  RealSeries d(n, 0.0);
  const double dt = grid.dt();
  d[0] = (values[1] - values[0]) / dt;
  d[n - 1] = (values[n - 1] - values[n - 2]) / dt;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    d[k] = (values[k + 1] - values[k - 1]) / (2.0 * dt);
  }
  return d;
}

}  // namespace halfcav
