#pragma once

// End-to-end store/retrieve scenarios, bandwidth sweeps, oracle cross-checks
// and mirror export. These back the `halfcav` subcommands.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "halfcav/core.hpp"
#include "halfcav/dynamics.hpp"
#include "halfcav/mirror.hpp"
#include "halfcav/pulses.hpp"
#include "halfcav/read_shaper.hpp"
#include "halfcav/write_optimizer.hpp"

namespace halfcav {

struct GridSpec {
  /// Samples per min(1/gamma0, 1/sigma); at least 50.
  double resolution = 200.0;
  /// Write window padding on each side, in units of 1/sigma; at least 6.
  double padding = 8.0;
};

struct SweepSpec {
  double sigma_min = 0.05;
  double sigma_max = 5.0;
  int n_points = 40;
  bool log_spacing = false;
};

struct FeasibilitySpec {
  double lambda_si = 493e-9;
  double gamma0_si = 15e6;
};

struct ScenarioConfig {
  MemoryParams memory;
  TimeBinSpec pulse;
  double storage_T = 30.0;
  GridSpec grid;
  bool phase_compensation = true;
  std::optional<SweepSpec> sweep;
  std::uint64_t seed = 1;
  /// D/c; unset means D = L.
  std::optional<double> observation_delay;
  FeasibilitySpec feasibility;

  /// Field-level validation; throws Error("<field>: <reason>").
  void validate() const;
};

ScenarioConfig parse_scenario(const std::string& json_text);
ScenarioConfig load_scenario(const std::filesystem::path& path);
std::string scenario_to_json(const ScenarioConfig& config);

/// Landmarks of the write / hold / read program on one uniform grid.
struct Timeline {
  TimeGrid grid;
  double t_w;
  double t_w0;
  double t_r0;
  double t_r;
  /// t_r0 - t_w: the read target is the input translated by this amount.
  double shift;
  /// (t_w0 + t_r0) / 2; exported time axes are relative to this point.
  double midpoint;
  double storage_T;
};

Timeline build_timeline(const ScenarioConfig& config);

struct ScenarioResult {
  Timeline timeline;
  MemoryConfig memory;
  ComplexEnvelope pulse;
  WriteResult write;
  ReadResult read;
  double eta = 0.0;
};

/// make_time_bin -> optimal_write_profile -> hold -> read_profile_for_target.
ScenarioResult evaluate_scenario(const ScenarioConfig& config);

/// Write and read profiles merged on the shared grid.
DecayProfile composite_profile(const ScenarioResult& result);

struct RunRecord {
  std::string config_json;
  double eta_w = 0.0;
  double eta_r = 0.0;
  double eta = 0.0;
  double F = 0.0;
  bool capped_w = false;
  bool capped_r = false;
  std::filesystem::path timeseries;
  std::filesystem::path run_json;
};

/// Emits <out>/timeseries.csv and <out>/run.json.
RunRecord run_store(const ScenarioConfig& config, const std::filesystem::path& out_dir);

struct SweepRow {
  double sigma = 0.0;
  double eta_w = 0.0;
  double eta_r = 0.0;
  double eta = 0.0;
  double F = 0.0;
};

std::vector<double> sweep_sigmas(const SweepSpec& spec);

/// Runs the full pipeline for every sigma of config.sweep. Rows come back in
/// sweep order regardless of scheduling. threads = 0 reads HALFCAV_THREADS,
/// falling back to the hardware concurrency.
std::vector<SweepRow> sweep_bandwidth(const ScenarioConfig& config, unsigned threads = 0);

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path);

struct OracleReport {
  double scenario_max_dP = 0.0;
  std::vector<double> random_max_dP;
  double max_dP = 0.0;
  double tolerance = 1e-6;
  bool pass = false;
  /// Convergence measurement on coarsened grids (x16, x8); not part of pass/fail.
  double coarse16_max_dP = 0.0;
  double coarse8_max_dP = 0.0;
  double coarse_order = 0.0;
  std::string warning;

  std::string to_json() const;
};

/// Quadrature vs RK4 on the scenario write phase plus 20 seeded random
/// (profile, pulse) pairs.
OracleReport oracle_check(const ScenarioConfig& config);

/// Smooth random rate profile in (0, 2 gamma0) and random normalized pulse on
/// `grid`, drawn from `seed`.
std::pair<DecayProfile, ComplexEnvelope> random_oracle_case(const TimeGrid& grid,
                                                            const MemoryConfig& cfg,
                                                            std::uint64_t seed);

/// Writes t, gamma_z, l_over_lambda, velocity; t is shifted by -time_origin.
void write_mirror_csv(const DecayProfile& profile, const MirrorTrajectory& trajectory,
                      double time_origin, const std::filesystem::path& path);

/// Re-imports a mirror.csv as a trajectory on the grid implied by its t column.
MirrorTrajectory read_mirror_csv(const std::filesystem::path& path);

/// Emits <out>/mirror.csv and <out>/feasibility.json.
FeasibilityReport export_mirror(const ScenarioConfig& config,
                                const std::filesystem::path& out_dir);

}  // namespace halfcav
