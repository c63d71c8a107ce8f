#pragma once

// Shared value types and quadrature primitives. Time is measured in units of
// 1/gamma0 and rates in units of gamma0 throughout the library.

#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace halfcav {

using Complex = std::complex<double>;
using RealSeries = std::vector<double>;
using ComplexSeries = std::vector<Complex>;

/// Raised on violated preconditions and invalid configuration.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MemoryParams {
  double gamma0 = 1.0;
  double gamma_prime = 0.0;
  double omega_a = 500.0;
  double tau = 0.01;
  /// Largest accepted gamma0 * tau (Markov regime).
  double max_markov = 0.1;
};

/// Physical constants of the atom-mirror system.
///
/// The round-trip time is snapped to the nearest non-zero multiple of
/// 2*pi/omega_a so that the rest position l = 0 is a node of the standing
/// wave. The requested value is kept for reporting.
class MemoryConfig {
 public:
  MemoryConfig();
  explicit MemoryConfig(const MemoryParams& params);

  double gamma0() const { return gamma0_; }
  double gamma_prime() const { return gamma_prime_; }
  double gamma_p() const { return gamma_p_; }
  double omega_a() const { return omega_a_; }
  double tau() const { return tau_; }
  double tau_requested() const { return tau_requested_; }
  bool tau_adjusted() const { return tau_ != tau_requested_; }
  /// omega_a * tau / (2 pi) after snapping.
  long round_trip_cycles() const { return cycles_; }
  /// omega_a * tau - 2 pi m; zero up to rounding.
  double node_phase_residual() const { return node_residual_; }
  /// Maximum decay rate reachable by moving the mirror.
  double cap() const { return 2.0 * gamma0_; }

 private:
  double gamma0_;
  double gamma_prime_;
  double gamma_p_;
  double omega_a_;
  double tau_;
  double tau_requested_;
  long cycles_;
  double node_residual_;
};

/// Uniform sampling of [t_start, t_end] with n points.
class TimeGrid {
 public:
  TimeGrid(double t_start, double t_end, std::size_t n);

  /// Grid of n points starting at t_start with spacing dt.
  static TimeGrid with_spacing(double t_start, double dt, std::size_t n);

  double t_start() const { return t_start_; }
  double t_end() const { return t_end_; }
  std::size_t size() const { return n_; }
  double dt() const { return dt_; }
  double at(std::size_t k) const { return t_start_ + static_cast<double>(k) * dt_; }
  /// Nearest sample index, clamped to the grid.
  std::size_t nearest_index(double t) const;
  bool same_as(const TimeGrid& other) const;

 private:
  double t_start_;
  double t_end_;
  std::size_t n_;
  double dt_;
};

/// Sampled complex temporal envelope (units of gamma0^{1/2}).
class ComplexEnvelope {
 public:
  ComplexEnvelope(TimeGrid grid, ComplexSeries samples);

  static ComplexEnvelope zeros(const TimeGrid& grid);
  static ComplexEnvelope sample(const TimeGrid& grid,
                                const std::function<Complex(double)>& fn);

  const TimeGrid& grid() const { return grid_; }
  const ComplexSeries& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  const Complex& operator[](std::size_t k) const { return samples_[k]; }

  ComplexEnvelope scaled(Complex factor) const;
  RealSeries intensity() const;
  bool is_normalized(double tol = 1e-9) const;

 private:
  TimeGrid grid_;
  ComplexSeries samples_;
};

/// Kinematic mirror program, displacement stored as l / lambda.
struct MirrorTrajectory {
  TimeGrid grid;
  RealSeries l_over_lambda;
  RealSeries velocity;  // d(l/lambda)/dt, units lambda * gamma0
  double v_max = 0.0;

  MirrorTrajectory(TimeGrid grid, RealSeries l_over_lambda);
};

/// Running trapezoidal integral; entry 0 is exactly zero.
template <class T>
std::vector<T> cumtrapz(std::span<const T> values, const TimeGrid& grid);

/// Trapezoidal integral accumulated from the right: entry k is the integral
/// over [t_k, t_end], last entry exactly zero.
template <class T>
std::vector<T> cumtrapz_tail(std::span<const T> values, const TimeGrid& grid);

double trapz(std::span<const double> values, const TimeGrid& grid);
Complex trapz(std::span<const Complex> values, const TimeGrid& grid);

/// Integral of |xi|^2 by the trapezoid rule.
double squared_norm(const ComplexEnvelope& env);

/// Finite-difference derivative: central in the interior, one-sided at ends.
RealSeries finite_difference(std::span<const double> values, const TimeGrid& grid);

void require_same_grid(const TimeGrid& a, const TimeGrid& b, const std::string& what);

}  // namespace halfcav
