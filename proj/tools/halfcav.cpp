#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "halfcav/csv.hpp"
#include "halfcav/scenario.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonArgs {
  std::string config;
  std::string out = "results";
  std::optional<std::uint64_t> seed;
  bool no_phase_compensation = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_out) {
  cmd->add_option("--config", args.config, "scenario JSON file (defaults if omitted)");
  if (with_out) cmd->add_option("--out", args.out, "output directory");
  cmd->add_option("--seed", args.seed, "override the config seed");
  cmd->add_flag("--no-phase-compensation", args.no_phase_compensation,
                "keep the raw write/read chirp");
}

halfcav::ScenarioConfig resolve(const CommonArgs& args) {
  halfcav::ScenarioConfig c =
      args.config.empty() ? halfcav::ScenarioConfig{} : halfcav::load_scenario(args.config);
  if (args.seed) c.seed = *args.seed;
  if (args.no_phase_compensation) c.phase_compensation = false;
  c.validate();
  return c;
}

std::string fmt(double v) { return halfcav::format_double(v); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Half-cavity quantum memory: storage, retrieval and mirror programs"};
  app.require_subcommand(1);

  CommonArgs store_args, sweep_args, oracle_args, mirror_args;
  auto* store = app.add_subcommand("store", "write, hold and read one time-bin photon");
  add_common(store, store_args, true);
  auto* sweep = app.add_subcommand("sweep", "total efficiency versus bandwidth");
  add_common(sweep, sweep_args, true);
  auto* oracle = app.add_subcommand("oracle", "quadrature versus Bloch-equation cross-check");
  add_common(oracle, oracle_args, false);
  auto* mirror = app.add_subcommand("mirror", "export the mirror trajectory");
  add_common(mirror, mirror_args, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (store->parsed()) {
      const auto rec = halfcav::run_store(resolve(store_args), store_args.out);
      std::cerr << "eta_w=" << fmt(rec.eta_w) << " eta_r=" << fmt(rec.eta_r)
                << " eta=" << fmt(rec.eta) << " F=" << fmt(rec.F) << '\n';
      return 0;
    }
    if (sweep->parsed()) {
      const auto config = resolve(sweep_args);
      const auto rows = halfcav::sweep_bandwidth(config);
      fs::create_directories(sweep_args.out);
      halfcav::write_sweep_csv(rows, fs::path(sweep_args.out) / "sweep.csv");
      std::cerr << rows.size() << " sweep points written\n";
      return 0;
    }
    if (oracle->parsed()) {
      const auto rep = halfcav::oracle_check(resolve(oracle_args));
      std::cout << rep.to_json() << '\n';
      return rep.pass ? 0 : 1;
    }
    if (mirror->parsed()) {
      const auto rep = halfcav::export_mirror(resolve(mirror_args), mirror_args.out);
      std::cerr << "v_max=" << fmt(rep.v_max) << " lambda*gamma0 (" << fmt(rep.v_max_si)
                << " m/s)" << (rep.demanding ? ", mechanically demanding" : "") << '\n';
      return 0;
    }
  } catch (const halfcav::Error& e) {
    std::cerr << "halfcav: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "halfcav: unexpected failure: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
