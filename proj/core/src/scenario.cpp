#include "halfcav/scenario.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>
#include <type_traits>

#include "halfcav/csv.hpp"
#include "json.hpp"

namespace halfcav {

using json = nlohmann::json;

namespace {

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& prefix) {
  for (const auto& [key, value] : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* a) { return key == a; });
    if (!known) throw Error(prefix + key + ": unknown field");
  }
}

template <class T>
void read_field(const json& obj, const char* key, const std::string& prefix, T& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) throw Error(prefix + key + ": expected a boolean");
    out = v.get<bool>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer() && !v.is_number_unsigned()) {
      throw Error(prefix + key + ": expected an integer");
    }
    out = v.get<T>();
  } else {
    if (!v.is_number()) throw Error(prefix + key + ": expected a number");
    out = v.get<double>();
  }
}

const json& section(const json& root, const char* key) {
  const json& s = root.at(key);
  if (!s.is_object()) throw Error(std::string(key) + ": expected an object");
  return s;
}

}  // namespace

void ScenarioConfig::validate() const {
  (void)MemoryConfig(memory);
  pulse.validate();
  if (!(storage_T >= 0.0) || !std::isfinite(storage_T)) {
    throw Error("storage_T: must be a non-negative finite time");
  }
  if (!(grid.resolution >= 50.0) || !std::isfinite(grid.resolution)) {
    throw Error("grid.resolution: must be at least 50 samples per time scale");
  }
  if (!(grid.padding >= 6.0) || !std::isfinite(grid.padding)) {
    throw Error("grid.padding: must be at least 6 (units of 1/sigma)");
  }
  if (sweep) {
    if (!(sweep->sigma_min > 0.0)) throw Error("sweep.sigma_min: must be positive");
    if (!(sweep->sigma_max >= sweep->sigma_min)) {
      throw Error("sweep.sigma_max: must be >= sweep.sigma_min");
    }
    if (sweep->n_points < 1) throw Error("sweep.n_points: must be at least 1");
  }
  if (observation_delay && !(*observation_delay >= 0.0)) {
    throw Error("observation_delay: must be non-negative");
  }
  if (!(feasibility.lambda_si > 0.0)) throw Error("feasibility.lambda_si: must be positive");
  if (!(feasibility.gamma0_si > 0.0)) throw Error("feasibility.gamma0_si: must be positive");
}

ScenarioConfig parse_scenario(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("config: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw Error("config: top level must be an object");
  reject_unknown(root,
                 {"memory", "pulse", "storage_T", "grid", "phase_compensation", "sweep",
                  "seed", "observation_delay", "feasibility"},
                 "");

  ScenarioConfig c;
  if (root.contains("memory")) {
    const json& m = section(root, "memory");
    reject_unknown(m, {"gamma0", "gamma_prime", "omega_a", "tau", "max_markov"}, "memory.");
    read_field(m, "gamma0", "memory.", c.memory.gamma0);
    read_field(m, "gamma_prime", "memory.", c.memory.gamma_prime);
    read_field(m, "omega_a", "memory.", c.memory.omega_a);
    read_field(m, "tau", "memory.", c.memory.tau);
    read_field(m, "max_markov", "memory.", c.memory.max_markov);
  }
  if (root.contains("pulse")) {
    const json& p = section(root, "pulse");
    reject_unknown(p, {"alpha", "beta", "phi", "t1", "t2", "sigma"}, "pulse.");
    read_field(p, "alpha", "pulse.", c.pulse.alpha);
    read_field(p, "beta", "pulse.", c.pulse.beta);
    read_field(p, "phi", "pulse.", c.pulse.phi);
    read_field(p, "t1", "pulse.", c.pulse.t1);
    read_field(p, "t2", "pulse.", c.pulse.t2);
    read_field(p, "sigma", "pulse.", c.pulse.sigma);
  }
  read_field(root, "storage_T", "", c.storage_T);
  if (root.contains("grid")) {
    const json& g = section(root, "grid");
    reject_unknown(g, {"resolution", "padding"}, "grid.");
    read_field(g, "resolution", "grid.", c.grid.resolution);
    read_field(g, "padding", "grid.", c.grid.padding);
  }
  read_field(root, "phase_compensation", "", c.phase_compensation);
  if (root.contains("sweep") && !root.at("sweep").is_null()) {
    const json& s = section(root, "sweep");
    reject_unknown(s, {"sigma_min", "sigma_max", "n_points", "log_spacing"}, "sweep.");
    SweepSpec spec;
    read_field(s, "sigma_min", "sweep.", spec.sigma_min);
    read_field(s, "sigma_max", "sweep.", spec.sigma_max);
    read_field(s, "n_points", "sweep.", spec.n_points);
    read_field(s, "log_spacing", "sweep.", spec.log_spacing);
    c.sweep = spec;
  }
  read_field(root, "seed", "", c.seed);
  if (root.contains("observation_delay") && !root.at("observation_delay").is_null()) {
    double d = 0.0;
    read_field(root, "observation_delay", "", d);
    c.observation_delay = d;
  }
  if (root.contains("feasibility")) {
    const json& f = section(root, "feasibility");
    reject_unknown(f, {"lambda_si", "gamma0_si"}, "feasibility.");
    read_field(f, "lambda_si", "feasibility.", c.feasibility.lambda_si);
    read_field(f, "gamma0_si", "feasibility.", c.feasibility.gamma0_si);
  }
  c.validate();
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("config: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

namespace {

json config_json(const ScenarioConfig& c) {
  json j;
  j["memory"] = {{"gamma0", c.memory.gamma0},   {"gamma_prime", c.memory.gamma_prime},
                 {"omega_a", c.memory.omega_a}, {"tau", c.memory.tau},
                 {"max_markov", c.memory.max_markov}};
  j["pulse"] = {{"alpha", c.pulse.alpha}, {"beta", c.pulse.beta}, {"phi", c.pulse.phi},
                {"t1", c.pulse.t1},       {"t2", c.pulse.t2},     {"sigma", c.pulse.sigma}};
  j["storage_T"] = c.storage_T;
  j["grid"] = {{"resolution", c.grid.resolution}, {"padding", c.grid.padding}};
  j["phase_compensation"] = c.phase_compensation;
  if (c.sweep) {
    j["sweep"] = {{"sigma_min", c.sweep->sigma_min},
                  {"sigma_max", c.sweep->sigma_max},
                  {"n_points", c.sweep->n_points},
                  {"log_spacing", c.sweep->log_spacing}};
  } else {
    j["sweep"] = nullptr;
  }
  j["seed"] = c.seed;
  j["observation_delay"] = c.observation_delay ? json(*c.observation_delay) : json(nullptr);
  j["feasibility"] = {{"lambda_si", c.feasibility.lambda_si},
                      {"gamma0_si", c.feasibility.gamma0_si}};
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace

std::string scenario_to_json(const ScenarioConfig& config) {
  return config_json(config).dump(2);
}

Timeline build_timeline(const ScenarioConfig& config) {
  const double gamma0 = config.memory.gamma0;
  const double sigma = config.pulse.sigma;
  const double scale = std::min(1.0 / gamma0, 1.0 / sigma);
  const double dt = scale / config.grid.resolution;
  const double pad = config.grid.padding / sigma;

  const double t_w = config.pulse.t1 - pad;
  const double write_len = (config.pulse.t2 + pad) - t_w;
  const auto n_write = static_cast<std::size_t>(std::ceil(write_len / dt - 1e-9));
  const auto n_store = static_cast<std::size_t>(std::llround(config.storage_T / dt));
  const double read_len = std::max(write_len, 12.0 / std::min(sigma, gamma0));
  const auto n_read =
      std::max(n_write, static_cast<std::size_t>(std::ceil(read_len / dt - 1e-9)));

  const TimeGrid grid = TimeGrid::with_spacing(t_w, dt, n_write + n_store + n_read + 1);
  Timeline tl{grid, t_w, 0, 0, 0, 0, 0, 0};
  tl.t_w0 = grid.at(n_write);
  tl.t_r0 = grid.at(n_write + n_store);
  tl.t_r = grid.at(n_write + n_store + n_read);
  tl.shift = static_cast<double>(n_write + n_store) * dt;
  tl.midpoint = 0.5 * (tl.t_w0 + tl.t_r0);
  tl.storage_T = static_cast<double>(n_store) * dt;
  return tl;
}

ScenarioResult evaluate_scenario(const ScenarioConfig& config) {
  config.validate();
  const MemoryConfig memory(config.memory);
  const Timeline tl = build_timeline(config);
  ComplexEnvelope pulse = make_time_bin(config.pulse, tl.grid);

  WriteOptions wopt;
  wopt.phase_compensation = config.phase_compensation;
  WriteResult write = optimal_write_profile(pulse, memory, wopt);

  const ComplexEnvelope target = shift(write.input, tl.shift);
  ReadOptions ropt;
  ropt.phase_compensation = config.phase_compensation;
  ropt.observation_delay = config.observation_delay;
  ReadResult read = read_profile_for_target(target, write.eta_w, memory, ropt);

  ScenarioResult result{tl, memory, std::move(pulse), std::move(write), std::move(read)};
  result.eta = total_efficiency(result.write, result.read);

  if (tl.t_r0 > tl.t_w0 && !hold(composite_profile(result), tl.t_w0, tl.t_r0)) {
    throw Error("scenario: mirror does not hold the atom at a node during storage");
  }
  return result;
}

DecayProfile composite_profile(const ScenarioResult& result) {
  const auto& gw = result.write.profile.gamma();
  const auto& gr = result.read.profile.gamma();
  ComplexSeries gamma(gw.size());
  for (std::size_t k = 0; k < gamma.size(); ++k) gamma[k] = gw[k] + gr[k];
  return {result.timeline.grid, std::move(gamma), result.memory.gamma_prime()};
}

RunRecord run_store(const ScenarioConfig& config, const std::filesystem::path& out_dir) {
  const ScenarioResult res = evaluate_scenario(config);
  const DecayProfile composite = composite_profile(res);
  const ExcitationTrace trace = absorption_probability(composite, res.write.input);
  const MirrorTrajectory mirror = trajectory_from_decay(composite, res.memory);

  std::filesystem::create_directories(out_dir);
  RunRecord rec;
  rec.timeseries = out_dir / "timeseries.csv";
  rec.run_json = out_dir / "run.json";

  {
    CsvWriter csv(rec.timeseries, {"t", "xi_in_re", "xi_in_im", "xi_out_re", "xi_out_im",
                                   "gamma_z_w", "gamma_z_r", "l_over_lambda", "P"});
    const TimeGrid& grid = res.timeline.grid;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const Complex in = res.write.input[k];
      const Complex out = res.read.xi_out[k];
      csv.row({grid.at(k) - res.timeline.midpoint, in.real(), in.imag(), out.real(),
               out.imag(), res.write.profile.gamma_z()[k], res.read.profile.gamma_z()[k],
               mirror.l_over_lambda[k], trace.P[k]});
    }
  }

  rec.config_json = scenario_to_json(config);
  rec.eta_w = res.write.eta_w;
  rec.eta_r = res.read.eta_r;
  rec.eta = res.eta;
  rec.F = res.read.fidelity_vs_target;
  rec.capped_w = res.write.capped;
  rec.capped_r = res.read.capped;

  const Timeline& tl = res.timeline;
  json j;
  j["config"] = config_json(config);
  j["eta_w"] = rec.eta_w;
  j["eta_r"] = rec.eta_r;
  j["eta"] = rec.eta;
  j["F"] = rec.F;
  j["capped_w"] = rec.capped_w;
  j["capped_r"] = rec.capped_r;
  j["files"] = {{"timeseries", "timeseries.csv"}};
  j["write"] = {{"target", res.write.target},
                {"iterations", res.write.iterations},
                {"max_gamma_z", res.write.profile.max_gamma_z()},
                {"efficiency_formula", write_efficiency(res.write.profile)}};
  j["read"] = {{"target", res.read.target},
               {"iterations", res.read.iterations},
               {"max_gamma_z", res.read.profile.max_gamma_z()},
               {"efficiency_formula", read_efficiency(res.read.profile)},
               {"carrier_phase", res.read.carrier_phase}};
  j["timeline"] = {{"time_origin", tl.midpoint},
                   {"t_w", tl.t_w - tl.midpoint},
                   {"t_w0", tl.t_w0 - tl.midpoint},
                   {"t_r0", tl.t_r0 - tl.midpoint},
                   {"t_r", tl.t_r - tl.midpoint},
                   {"storage_T", tl.storage_T},
                   {"dt", tl.grid.dt()},
                   {"n", tl.grid.size()}};
  j["memory"] = {{"tau", res.memory.tau()},
                 {"tau_requested", res.memory.tau_requested()},
                 {"tau_adjusted", res.memory.tau_adjusted()},
                 {"round_trip_cycles", res.memory.round_trip_cycles()}};
  write_text(rec.run_json, j.dump(2) + "\n");
  return rec;
}

std::vector<double> sweep_sigmas(const SweepSpec& spec) {
  std::vector<double> out(static_cast<std::size_t>(spec.n_points));
  if (spec.n_points == 1) {
    out[0] = spec.sigma_min;
    return out;
  }
  const double steps = static_cast<double>(spec.n_points - 1);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double f = static_cast<double>(i) / steps;
    out[i] = spec.log_spacing
                 ? spec.sigma_min * std::pow(spec.sigma_max / spec.sigma_min, f)
                 : spec.sigma_min + f * (spec.sigma_max - spec.sigma_min);
  }
  return out;
}

namespace {

unsigned thread_budget(unsigned requested, std::size_t work) {
  unsigned n = requested;
  if (n == 0) {
    if (const char* env = std::getenv("HALFCAV_THREADS"); env && *env) {
      n = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
    }
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(work, 1)));
}

}  // namespace

std::vector<SweepRow> sweep_bandwidth(const ScenarioConfig& config, unsigned threads) {
  if (!config.sweep) throw Error("sweep: configuration has no sweep block");
  config.validate();
  const std::vector<double> sigmas = sweep_sigmas(*config.sweep);
  std::vector<SweepRow> rows(sigmas.size());
  std::vector<std::exception_ptr> errors(sigmas.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < sigmas.size(); i = next++) {
      try {
        ScenarioConfig point = config;
        point.pulse.sigma = sigmas[i];
        point.sweep.reset();
        const ScenarioResult r = evaluate_scenario(point);
        rows[i] = {sigmas[i], r.write.eta_w, r.read.eta_r, r.eta, r.read.fidelity_vs_target};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const unsigned n = thread_budget(threads, sigmas.size());
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n);
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path) {
  CsvWriter csv(path, {"sigma_over_gamma0", "eta_w", "eta_r", "eta", "F"});
  for (const auto& r : rows) csv.row({r.sigma, r.eta_w, r.eta_r, r.eta, r.F});
}

std::pair<DecayProfile, ComplexEnvelope> random_oracle_case(const TimeGrid& grid,
                                                            const MemoryConfig& cfg,
                                                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double span = grid.t_end() - grid.t_start();
  constexpr double kTwoPi = 2.0 * std::numbers::pi;

  // Band-limited random rate: tanh-squashed sum of a few low harmonics.
  std::array<double, 4> amp{}, phase{};
  for (std::size_t j = 0; j < amp.size(); ++j) {
    amp[j] = 2.0 * unit(rng) - 1.0;
    phase[j] = kTwoPi * unit(rng);
  }
  const double offset = 2.0 * unit(rng) - 1.0;
  RealSeries gz(grid.size());
  for (std::size_t k = 0; k < gz.size(); ++k) {
    const double s = (grid.at(k) - grid.t_start()) / span;
    double v = offset;
    for (std::size_t j = 0; j < amp.size(); ++j) {
      v += amp[j] * std::sin(kTwoPi * static_cast<double>(j + 1) * s + phase[j]);
    }
    gz[k] = cfg.cap() * 0.5 * (1.0 + std::tanh(v));
  }

  // One to three Gaussians with random complex weights and a common chirp;
  // widths stay >= 1/gamma0 so the grid obeys the dt rule.
  const int lobes = 1 + static_cast<int>(unit(rng) * 3.0);
  std::vector<double> centre(lobes), width(lobes);
  std::vector<Complex> weight(lobes);
  for (int j = 0; j < lobes; ++j) {
    centre[j] = grid.t_start() + span * (0.3 + 0.4 * unit(rng));
    width[j] = 1.0 + 2.0 * unit(rng);
    weight[j] = std::polar(0.2 + unit(rng), kTwoPi * unit(rng));
  }
  const double chirp = 0.5 * (2.0 * unit(rng) - 1.0);
  ComplexEnvelope xi = ComplexEnvelope::sample(grid, [&](double t) {
    Complex v{};
    for (int j = 0; j < lobes; ++j) {
      const double d = (t - centre[j]) / width[j];
      v += weight[j] * std::exp(-0.5 * d * d);
    }
    return v * std::polar(1.0, chirp * (t - grid.t_start()));
  });
  xi = xi.scaled(1.0 / std::sqrt(squared_norm(xi)));
  return {decay_from_rates(grid, gz, cfg), std::move(xi)};
}

namespace {

double max_abs_diff(const RealSeries& a, const RealSeries& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

double write_phase_gap(const ScenarioConfig& config, const MemoryConfig& memory,
                       double resolution) {
  ScenarioConfig c = config;
  c.grid.resolution = resolution;
  const Timeline tl = build_timeline(c);
  const ComplexEnvelope pulse = make_time_bin(c.pulse, tl.grid);
  WriteOptions opt;
  opt.phase_compensation = c.phase_compensation;
  const WriteResult w = optimal_write_profile(pulse, memory, opt);
  return max_abs_diff(w.trace.P, bloch_ode_oracle(w.profile, w.input).P);
}

}  // namespace

OracleReport oracle_check(const ScenarioConfig& config) {
  config.validate();
  const MemoryConfig memory(config.memory);
  OracleReport rep;
  rep.scenario_max_dP = write_phase_gap(config, memory, config.grid.resolution);
  rep.max_dP = rep.scenario_max_dP;

  // Random rates run up to the cap, so their fastest scale is 1/(2 gamma0).
  const double dt = 1.0 / (memory.cap() * config.grid.resolution);
  const double span = 20.0 / memory.gamma0();
  const auto n = static_cast<std::size_t>(std::llround(span / dt)) + 1;
  const TimeGrid grid = TimeGrid::with_spacing(0.0, dt, n);
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto [profile, xi] = random_oracle_case(grid, memory, config.seed * 1000003ULL + i);
    const double gap =
        max_abs_diff(absorption_probability(profile, xi).P, bloch_ode_oracle(profile, xi).P);
    rep.random_max_dP.push_back(gap);
    rep.max_dP = std::max(rep.max_dP, gap);
  }
  rep.pass = rep.max_dP <= rep.tolerance;

  // The dt rule's lower bound is 50 samples per scale; the coarse runs go
  // below it on purpose and are reported only.
  rep.coarse16_max_dP = write_phase_gap(config, memory, config.grid.resolution / 16.0);
  rep.coarse8_max_dP = write_phase_gap(config, memory, config.grid.resolution / 8.0);
  if (rep.coarse8_max_dP > 0.0 && rep.coarse16_max_dP > 0.0) {
    rep.coarse_order = std::log2(rep.coarse16_max_dP / rep.coarse8_max_dP);
  }
  rep.warning = "coarse-grid runs (resolution/16, resolution/8) are below the dt rule; "
                "reported for convergence order only, not checked";
  return rep;
}

std::string OracleReport::to_json() const {
  json j;
  j["scenario_max_dP"] = scenario_max_dP;
  j["random_max_dP"] = random_max_dP;
  j["max_dP"] = max_dP;
  j["tolerance"] = tolerance;
  j["pass"] = pass;
  j["coarse"] = {{"checked", false},
                 {"resolution_div16_max_dP", coarse16_max_dP},
                 {"resolution_div8_max_dP", coarse8_max_dP},
                 {"observed_order", coarse_order},
                 {"warning", warning}};
  return j.dump(2);
}

void write_mirror_csv(const DecayProfile& profile, const MirrorTrajectory& trajectory,
                      double time_origin, const std::filesystem::path& path) {
  require_same_grid(profile.grid(), trajectory.grid, "write_mirror_csv");
  CsvWriter csv(path, {"t", "gamma_z", "l_over_lambda", "velocity"});
  for (std::size_t k = 0; k < profile.size(); ++k) {
    csv.row({profile.grid().at(k) - time_origin, profile.gamma_z()[k],
             trajectory.l_over_lambda[k], trajectory.velocity[k]});
  }
}

MirrorTrajectory read_mirror_csv(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  const auto t = table.column("t");
  if (t.size() < 2) throw Error("mirror csv: need at least two rows");
  const TimeGrid grid(t.front(), t.back(), t.size());
  return {grid, table.column("l_over_lambda")};
}

FeasibilityReport export_mirror(const ScenarioConfig& config,
                                const std::filesystem::path& out_dir) {
  const ScenarioResult res = evaluate_scenario(config);
  const DecayProfile composite = composite_profile(res);
  const MirrorTrajectory traj = trajectory_from_decay(composite, res.memory);

  std::filesystem::create_directories(out_dir);
  write_mirror_csv(composite, traj, res.timeline.midpoint, out_dir / "mirror.csv");

  const FeasibilityReport rep = feasibility_report(traj, res.memory, config.feasibility.lambda_si,
                                                   config.feasibility.gamma0_si);
  const bool node_during_hold =
      res.timeline.t_r0 <= res.timeline.t_w0 ||
      hold(composite, res.timeline.t_w0, res.timeline.t_r0);
  json j;
  j["v_max_lambda_gamma0"] = rep.v_max;
  j["v_max_m_per_s"] = rep.v_max_si;
  j["lambda_m"] = rep.lambda_si;
  j["gamma0_per_s"] = rep.gamma0_si;
  j["l_over_lambda_min"] = rep.l_min;
  j["l_over_lambda_max"] = rep.l_max;
  j["mechanically_demanding"] = rep.demanding;
  j["node_during_hold"] = node_during_hold;
  write_text(out_dir / "feasibility.json", j.dump(2) + "\n");
  return rep;
}

}  // namespace halfcav
