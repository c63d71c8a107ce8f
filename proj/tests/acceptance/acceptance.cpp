// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Usage: halfcav_acceptance [criterion numbers...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "brute_force.hpp"
#include "generators.hpp"
#include "halfcav/scenario.hpp"

using namespace halfcav;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double time_limit;  // seconds, 0 = none
  std::function<Outcome()> run;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void check(Outcome& o, bool ok, const std::string& what) {
  if (!ok) o.pass = false;
  o.detail += (o.detail.empty() ? "" : "; ") + what + (ok ? "" : " [X]");
}

ScenarioConfig with_sigma(double sigma) {
  ScenarioConfig c;
  c.pulse.sigma = sigma;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double peak_between(const DecayProfile& p, double a, double b) {
  double m = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double t = p.grid().at(k);
    if (t >= a && t < b) m = std::max(m, p.gamma_z()[k]);
  }
  return m;
}

Outcome oracle_equivalence() {
  const auto rep = oracle_check(ScenarioConfig{});
  Outcome o;
  check(o, rep.scenario_max_dP <= 1e-6, "scenario max|dP| = " + num(rep.scenario_max_dP));
  const double random = *std::max_element(rep.random_max_dP.begin(), rep.random_max_dP.end());
  check(o, rep.random_max_dP.size() == 20 && random <= 1e-6,
        std::to_string(rep.random_max_dP.size()) + " random pairs max|dP| = " + num(random));
  return o;
}

Outcome narrow_band_regime() {
  const auto c = with_sigma(0.2);
  const auto r = evaluate_scenario(c);
  Outcome o;
  check(o, r.write.eta_w >= 0.999, "eta_w = " + num(r.write.eta_w));
  check(o, r.eta >= 0.998, "eta = " + num(r.eta));
  check(o, r.read.fidelity_vs_target >= 0.999, "F = " + num(r.read.fidelity_vs_target));
  check(o, !r.write.capped && !r.read.capped, "no capping");
  const double split = 0.5 * (c.pulse.t1 + c.pulse.t2);
  const double hump1 = peak_between(r.write.profile, r.timeline.t_w, split);
  const double hump2 = peak_between(r.write.profile, split, r.timeline.t_w0 + 1e-9);
  check(o, hump2 > hump1,
        "write hump2 max > hump1 max (hump1 = " + num(hump1) + ", hump2 = " + num(hump2) + ")");
  return o;
}

Outcome broad_band_regime() {
  const auto r = evaluate_scenario(with_sigma(5.0));
  Outcome o;
  check(o, r.write.capped && r.read.capped, "capped_w and capped_r");
  check(o, r.eta <= 0.95, "eta = " + num(r.eta));
  check(o, r.write.profile.max_gamma_z() == 2.0 && r.read.profile.max_gamma_z() == 2.0,
        "max gamma_z (write, read) = " + num(r.write.profile.max_gamma_z()) + ", " +
            num(r.read.profile.max_gamma_z()));
  return o;
}

Outcome knee() {
  ScenarioConfig c;
  c.sweep = SweepSpec{0.05, 5.0, 40, false};
  const auto rows = sweep_bandwidth(c);
  Outcome o;
  bool flat = true;
  double worst_flat = 1.0;
  double knee_sigma = 0.0;
  bool decreasing = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].sigma <= 0.5) {
      flat = flat && rows[i].eta >= 1.0 - 1e-3;
      worst_flat = std::min(worst_flat, rows[i].eta);
    }
    if (rows[i].eta > 1.0 - 1e-3) knee_sigma = std::max(knee_sigma, rows[i].sigma);
    if (i > 0 && rows[i - 1].sigma >= 1.0 && !(rows[i].eta < rows[i - 1].eta)) decreasing = false;
  }
  check(o, rows.size() == 40, "40 points");
  check(o, flat, "(a) min eta for sigma <= 0.5 = " + num(worst_flat));
  check(o, knee_sigma >= 0.7 && knee_sigma <= 1.0, "(b) knee at sigma = " + num(knee_sigma));
  check(o, decreasing, "(c) strictly decreasing for sigma >= 1");
  return o;
}

Outcome efficiency_identity() {
  // The identity holds for uncapped optima; every uncapped bandwidth in the scan is checked.
  Outcome o;
  int checked = 0;
  double worst_w = 0.0, worst_r = 0.0;
  for (double sigma : {0.05, 0.1, 0.15, 0.2, 0.3, 0.5}) {
    const auto r = evaluate_scenario(with_sigma(sigma));
    if (r.write.capped || r.read.capped) continue;
    ++checked;
    worst_w = std::max(worst_w, std::abs(r.write.eta_w - write_efficiency(r.write.profile)));
    worst_r = std::max(worst_r, std::abs(squared_norm(r.read.xi_out) / r.read.P0 -
                                         read_efficiency(r.read.profile)));
  }
  check(o, checked >= 2, std::to_string(checked) + " uncapped bandwidths");
  check(o, worst_w <= 1e-6, "max |dW| = " + num(worst_w));
  check(o, worst_r <= 1e-6, "max |dR| = " + num(worst_r));
  return o;
}

Outcome shape_matching() {
  const auto r = evaluate_scenario(with_sigma(0.2));
  const auto target = shift(r.write.input, r.timeline.shift);
  const Complex ov = overlap(target, r.read.xi_out);
  const Complex phase = ov / std::abs(ov);
  ComplexSeries d(target.size());
  for (std::size_t k = 0; k < d.size(); ++k) {
    d[k] = r.read.xi_out[k] - std::sqrt(r.eta) * phase * target[k];
  }
  const double l2 = std::sqrt(squared_norm(ComplexEnvelope(target.grid(), d)));
  Outcome o;
  check(o, !r.read.capped, "uncapped");
  check(o, l2 <= 1e-4, "L2 error = " + num(l2));
  check(o, r.read.fidelity_vs_target >= 1.0 - 1e-6, "1 - F = " + num(1.0 - r.read.fidelity_vs_target));
  return o;
}

Outcome conservation() {
  Outcome o;
  for (double sigma : {0.2, 5.0}) {
    const auto r = evaluate_scenario(with_sigma(sigma));
    const auto trace = absorption_probability(composite_profile(r), r.write.input);
    const TimeGrid& g = r.timeline.grid;
    const std::size_t k0 = g.nearest_index(r.timeline.t_r0);
    const RealSeries out = r.read.xi_out.intensity();
    double emitted = 0.0, worst = 0.0;
    for (std::size_t k = k0; k < g.size(); ++k) {
      if (k > k0) emitted += 0.5 * g.dt() * (out[k] + out[k - 1]);
      worst = std::max(worst, std::abs(trace.P[k0] - trace.P[k] - emitted));
    }
    check(o, worst <= 1e-6, "sigma " + num(sigma) + ": max deviation = " + num(worst));
  }
  return o;
}

Outcome mirror_roundtrip() {
  const MemoryConfig cfg;
  const TimeGrid g(0.0, 20.0, 4001);
  testgen::Gen gen(8);
  double worst = 0.0;
  auto roundtrip = [&](const DecayProfile& p) {
    const auto back = decay_from_trajectory(trajectory_from_decay(p, cfg), cfg);
    for (std::size_t k = 0; k < p.size(); ++k) {
      worst = std::max(worst, std::abs(back.gamma_z()[k] - p.gamma_z()[k]));
    }
  };
  for (int i = 0; i < 20; ++i) roundtrip(decay_from_rates(g, gen.smooth(g, 0.0, 2.0, 6), cfg));
  for (double sigma : {0.2, 5.0}) roundtrip(composite_profile(evaluate_scenario(with_sigma(sigma))));

  const auto zero = decay_from_rates(g, RealSeries(g.size(), 0.0), cfg);
  const auto full = decay_from_rates(g, RealSeries(g.size(), 2.0), cfg);
  const auto lz = trajectory_from_decay(zero, cfg).l_over_lambda;
  const auto lf = trajectory_from_decay(full, cfg).l_over_lambda;
  const bool ends = std::all_of(lz.begin(), lz.end(), [](double v) { return v == 0.0; }) &&
                    std::all_of(lf.begin(), lf.end(), [](double v) { return v == 0.25; }) &&
                    decay_from_trajectory({g, RealSeries(g.size(), 0.0)}, cfg).gamma_z()[0] == 0.0 &&
                    decay_from_trajectory({g, RealSeries(g.size(), 0.25)}, cfg).gamma_z()[0] == 2.0;
  Outcome o;
  check(o, worst <= 1e-9, "max roundtrip error = " + num(worst));
  check(o, ends, "0 <-> node, 2 gamma0 <-> lambda/4 exact");
  return o;
}

Outcome brute_force_optimality() {
  const double T_p = 10.0;
  const double dt = 1.0 / 200.0;
  const TimeGrid g = TimeGrid::with_spacing(-1.0, dt, static_cast<std::size_t>((T_p + 2.0) / dt) + 1);
  auto xi = ComplexEnvelope::sample(g, [&](double t) {
    return (t > -1e-9 && t < T_p + 1e-9) ? Complex{1.0 / std::sqrt(T_p), 0.0} : Complex{};
  });
  xi = xi.scaled(1.0 / std::sqrt(squared_norm(xi)));
  const auto w = optimal_write_profile(xi, MemoryConfig{});
  const auto brute = testgen::brute_force_rectangular(T_p, 2.0, 8, 17, 64, 20240917);
  Outcome o;
  check(o, brute.P - w.eta_w <= 1e-4,
        "analytic P(t_w0) = " + num(w.eta_w) + ", brute force = " + num(brute.P) + " (" +
            std::to_string(brute.evaluations) + " evaluations)");
  return o;
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "halfcav_acceptance";
  fs::remove_all(root);
  ScenarioConfig c = with_sigma(0.7);
  c.sweep = SweepSpec{0.3, 3.0, 4, false};
  std::vector<std::string> files[2];
  for (int i = 0; i < 2; ++i) {
    const fs::path dir = root / std::to_string(i);
    const auto rec = run_store(c, dir);
    export_mirror(c, dir);
    write_sweep_csv(sweep_bandwidth(c, i == 0 ? 1 : 4), dir / "sweep.csv");
    for (const char* f : {"timeseries.csv", "run.json", "mirror.csv", "feasibility.json", "sweep.csv"}) {
      files[i].push_back(slurp(dir / f));
    }
    files[i].push_back(oracle_check(c).to_json());
  }
  Outcome o;
  check(o, files[0] == files[1], "store, mirror, sweep (1 vs 4 threads) and oracle outputs byte-identical");
  fs::remove_all(root);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "oracle equivalence", 10.0, oracle_equivalence},
      {2, "narrow-band regime (sigma = 0.2)", 5.0, narrow_band_regime},
      {3, "broad-band regime (sigma = 5)", 0.0, broad_band_regime},
      {4, "efficiency knee", 60.0, knee},
      {5, "efficiency identity", 0.0, efficiency_identity},
      {6, "shape matching", 0.0, shape_matching},
      {7, "conservation during read", 0.0, conservation},
      {8, "mirror roundtrip", 0.0, mirror_roundtrip},
      {9, "brute-force optimality", 120.0, brute_force_optimality},
      {10, "determinism", 0.0, determinism},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : all) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string timing = num(secs) + " s";
    if (c.time_limit > 0.0) {
      const bool in_time = secs <= c.time_limit;
      timing += in_time ? " <= " : " > ";
      timing += num(c.time_limit) + " s";
      if (!in_time) o.pass = false;
    }
    std::printf("%s criterion %d (%s): %s [%s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), timing.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
