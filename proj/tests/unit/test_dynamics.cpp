#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "halfcav/dynamics.hpp"
#include "halfcav/pulses.hpp"

using namespace halfcav;

namespace {

const MemoryConfig kCfg;

MirrorTrajectory constant_mirror(const TimeGrid& g, double l) {
  return {g, RealSeries(g.size(), l)};
}

double max_gap(const RealSeries& a, const RealSeries& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

// Smooth analytic test case on [0, 10] sampled with n points.
std::pair<DecayProfile, ComplexEnvelope> smooth_case(std::size_t n) {
  const TimeGrid g(0.0, 10.0, n);
  RealSeries gz(n);
  for (std::size_t k = 0; k < n; ++k) gz[k] = 1.0 + 0.8 * std::sin(0.7 * g.at(k));
  auto xi = ComplexEnvelope::sample(g, [](double t) {
    const double d = (t - 5.0) / 1.5;
    return std::exp(-0.5 * d * d) * std::polar(0.6, 0.3 * t);
  });
  return {decay_from_rates(g, gz, kCfg), xi};
}

}  // namespace

TEST(DecayFromMirror, NodeGivesZeroRate) {
  const TimeGrid g(0.0, 1.0, 11);
  const auto p = decay_from_mirror(constant_mirror(g, 0.0), kCfg);
  for (std::size_t k = 0; k < g.size(); ++k) {
    EXPECT_NEAR(std::abs(p.gamma()[k]), 0.0, 1e-12);
    EXPECT_NEAR(p.gamma_z()[k], 0.0, 1e-12);
  }
}

TEST(DecayFromMirror, AntinodeGivesCap) {
  const TimeGrid g(0.0, 1.0, 11);
  const auto p = decay_from_mirror(constant_mirror(g, 0.25), kCfg);
  for (double gz : p.gamma_z()) EXPECT_NEAR(gz, 2.0, 1e-12);
}

TEST(DecayFromMirror, EighthWavelength) {
  const TimeGrid g(0.0, 1.0, 11);
  const auto p = decay_from_mirror(constant_mirror(g, 0.125), kCfg);
  for (std::size_t k = 0; k < g.size(); ++k) {
    EXPECT_NEAR(p.gamma_z()[k], 1.0, 1e-12);
    // Branch l in [0, lambda/4]: the level shift is positive.
    EXPECT_NEAR(p.gamma()[k].imag(), 0.5, 1e-12);
  }
}

TEST(DecayFromMirror, EnvironmentDecayOffsetsRate) {
  MemoryParams mp;
  mp.gamma_prime = 0.2;
  const MemoryConfig cfg(mp);
  const TimeGrid g(0.0, 1.0, 5);
  const auto node = decay_from_mirror(constant_mirror(g, 0.0), cfg);
  const auto anti = decay_from_mirror(constant_mirror(g, 0.25), cfg);
  EXPECT_NEAR(node.gamma_z()[2], 0.2, 1e-12);
  EXPECT_NEAR(anti.gamma_z()[2], 0.2 + 2.0 * 0.8, 1e-12);
  EXPECT_NEAR(anti.g()[2] * anti.g()[2], 1.6, 1e-12);
}

TEST(DecayProfile, InvariantsOnRandomProfiles) {
  testgen::Gen gen(31);
  const TimeGrid g(0.0, 20.0, 2001);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = decay_from_rates(g, gen.smooth(g, 0.0, 2.0), kCfg);
    for (std::size_t k = 0; k < g.size(); ++k) {
      EXPECT_GE(p.gamma_z()[k], 0.0);
      EXPECT_LE(p.gamma_z()[k], kCfg.cap());
      EXPECT_EQ(p.gamma_z()[k], 2.0 * p.gamma()[k].real());
      EXPECT_NEAR(p.g()[k] * p.g()[k], p.gamma_z()[k], 1e-12);
      EXPECT_GE(p.gamma()[k].imag(), 0.0);
      if (k > 0) EXPECT_GE(p.Gamma_z()[k], p.Gamma_z()[k - 1]);
    }
    EXPECT_EQ(p.Gamma_z().front(), 0.0);
  }
}

TEST(DecayProfile, RejectsBadInput) {
  const TimeGrid g(0.0, 1.0, 3);
  EXPECT_THROW(DecayProfile(g, ComplexSeries(2)), Error);
  EXPECT_THROW(DecayProfile(g, ComplexSeries{{0, 0}, {NAN, 0}, {0, 0}}), Error);
  EXPECT_THROW(decay_from_rates(g, RealSeries{0.0, 2.1, 0.0}, kCfg), Error);
  EXPECT_THROW(decay_from_rates(g, RealSeries{0.0, -0.1, 0.0}, kCfg), Error);
  EXPECT_THROW(decay_from_rates(g, RealSeries{0.0, 1.0}, kCfg), Error);
}

TEST(Absorption, NoDriveNoExcitation) {
  testgen::Gen gen(32);
  const TimeGrid g(0.0, 10.0, 1001);
  const auto p = decay_from_rates(g, gen.smooth(g, 0.0, 2.0), kCfg);
  const auto zero = ComplexEnvelope::zeros(g);
  for (double v : absorption_probability(p, zero).P) EXPECT_EQ(v, 0.0);
  for (double v : bloch_ode_oracle(p, zero).P) EXPECT_EQ(v, 0.0);
}

TEST(Absorption, TimeReversedExponentialIsAbsorbed) {
  const double t0 = 0.0;
  const TimeGrid g(t0 - 10.0, t0, 20001);
  const auto p = decay_from_rates(g, RealSeries(g.size(), 2.0), kCfg);
  const auto xi = ComplexEnvelope::sample(
      g, [&](double t) { return Complex{std::sqrt(2.0) * std::exp(t - t0), 0.0}; });
  EXPECT_NEAR(absorption_probability(p, xi).P.back(), 1.0 - std::exp(-20.0), 1e-6);
  EXPECT_NEAR(bloch_ode_oracle(p, xi).P.back(), 1.0 - std::exp(-20.0), 1e-6);
}

TEST(Absorption, GridMismatch) {
  const TimeGrid a(0.0, 1.0, 11), b(0.0, 1.0, 12);
  const auto p = decay_from_rates(a, RealSeries(11, 1.0), kCfg);
  EXPECT_THROW(absorption_probability(p, ComplexEnvelope::zeros(b)), Error);
  EXPECT_THROW(bloch_ode_oracle(p, ComplexEnvelope::zeros(b)), Error);
}

TEST(Absorption, OracleAgreementProperty) {
  testgen::Gen gen(33);
  const TimeGrid g(0.0, 20.0, 8001);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = decay_from_rates(g, gen.smooth(g, 0.0, 2.0), kCfg);
    const auto xi = gen.pulse(g);
    const auto quad = absorption_probability(p, xi);
    const auto ode = bloch_ode_oracle(p, xi);
    EXPECT_LE(max_gap(quad.P, ode.P), 1e-6) << "trial " << trial;
    for (std::size_t k = 0; k < g.size(); ++k) {
      EXPECT_GE(quad.P[k], 0.0);
      EXPECT_LE(quad.P[k], 1.0);
      EXPECT_NEAR(quad.P[k], std::norm(quad.amplitude[k]), 1e-10);
      EXPECT_NEAR(std::abs(quad.amplitude[k] - ode.amplitude[k]), 0.0, 1e-5);
    }
  }
}

TEST(Absorption, GlobalPhaseProperty) {
  testgen::Gen gen(34);
  const TimeGrid g(0.0, 20.0, 4001);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = decay_from_rates(g, gen.smooth(g, 0.0, 2.0), kCfg);
    const auto xi = gen.pulse(g);
    const Complex c = gen.phase();
    const auto a = absorption_probability(p, xi);
    const auto b = absorption_probability(p, xi.scaled(c));
    for (std::size_t k = 0; k < g.size(); ++k) {
      EXPECT_NEAR(a.P[k], b.P[k], 1e-14);
      EXPECT_NEAR(std::abs(a.amplitude[k] * c - b.amplitude[k]), 0.0, 1e-14);
    }
  }
}

TEST(Absorption, StorageIsMonotoneAndHoldIsConstant) {
  const TimeGrid g(0.0, 20.0, 4001);
  RealSeries gz(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) gz[k] = g.at(k) < 10.0 ? 1.2 : 0.3;
  auto drive = [](double t) { return t < 8.0 ? Complex{0.4 * std::sin(0.4 * t), 0.1} : Complex{}; };
  const auto xi = ComplexEnvelope::sample(g, drive);

  const auto decaying = absorption_probability(decay_from_rates(g, gz, kCfg), xi);
  const auto ode_decaying = bloch_ode_oracle(decay_from_rates(g, gz, kCfg), xi);
  for (std::size_t k = g.nearest_index(8.5); k < g.size(); ++k) {
    EXPECT_LE(decaying.P[k], decaying.P[k - 1]);
    EXPECT_LE(ode_decaying.P[k], ode_decaying.P[k - 1] + 1e-15);
  }

  for (std::size_t k = 0; k < g.size(); ++k) gz[k] = g.at(k) < 8.5 ? 1.2 : 0.0;
  const auto held = absorption_probability(decay_from_rates(g, gz, kCfg), xi);
  const auto ode_held = bloch_ode_oracle(decay_from_rates(g, gz, kCfg), xi);
  const std::size_t k0 = g.nearest_index(9.0);
  EXPECT_GT(held.P[k0], 0.01);
  for (std::size_t k = k0; k < g.size(); ++k) {
    EXPECT_EQ(held.P[k], held.P[k0]);
    EXPECT_NEAR(ode_held.P[k], ode_held.P[k0], 1e-14);
  }
}

TEST(Absorption, QuadratureConvergesAtSecondOrder) {
  auto end_value = [](std::size_t n) {
    const auto [p, xi] = smooth_case(n);
    return absorption_probability(p, xi).P.back();
  };
  const double p1 = end_value(201), p2 = end_value(401), p4 = end_value(801);
  EXPECT_NEAR((p1 - p2) / (p2 - p4), 4.0, 0.2);
}

TEST(BlochOracle, ConvergesAtFourthOrder) {
  auto end_value = [](std::size_t n) {
    const auto [p, xi] = smooth_case(n);
    return bloch_ode_oracle(p, xi).P.back();
  };
  const double p1 = end_value(101), p2 = end_value(201), p4 = end_value(401);
  EXPECT_NEAR((p1 - p2) / (p2 - p4), 16.0, 2.0);
}

TEST(BlochOracle, CoarseGridIsDetected) {
  const TimeGrid g(0.0, 50.0, 11);
  const auto p = decay_from_rates(g, RealSeries(g.size(), 2.0), kCfg);
  const auto xi = ComplexEnvelope::sample(g, [](double) { return Complex{0.3, 0.0}; });
  EXPECT_THROW(bloch_ode_oracle(p, xi), Error);
}

TEST(Hold, NodeAndAntinode) {
  const TimeGrid g(0.0, 10.0, 101);
  EXPECT_TRUE(hold(decay_from_mirror(constant_mirror(g, 0.0), kCfg), 2.0, 8.0));

  RealSeries l(g.size(), 0.0);
  l[50] = 0.25;
  const auto p = decay_from_mirror({g, l}, kCfg);
  EXPECT_FALSE(hold(p, 2.0, 8.0));
  EXPECT_TRUE(hold(p, 0.0, 4.9));
  EXPECT_TRUE(hold(p, 5.1, 10.0));
}

TEST(Hold, RejectsBadWindow) {
  const TimeGrid g(0.0, 10.0, 101);
  const auto p = decay_from_mirror(constant_mirror(g, 0.0), kCfg);
  EXPECT_THROW(hold(p, 5.0, 5.0), Error);
  EXPECT_THROW(hold(p, 6.0, 5.0), Error);
  EXPECT_THROW(hold(p, -1.0, 5.0), Error);
  EXPECT_THROW(hold(p, 1.0, 11.0), Error);
}
