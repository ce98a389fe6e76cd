// pairsim: pair-creation simulator command line.
//
//   pairsim run (--config <path> | --preset <name> [--scale desk|full]) --out <dir>
//               [--workers N] [--dump-amplitudes]
//   pairsim presets
//   pairsim analyze --amplitudes <dump> [--config <path> | --preset <name>]
//                   [--ces EMIN,EMAX,NE,WINDOW] --out <dir>
//
// Exit status: 0 ok, 2 configuration error, 3 runtime error.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>
#include <thread>

#include "pairsim/config.hpp"
#include "pairsim/presets.hpp"
#include "pairsim/runner.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

pairsim::RunConfig resolve(const std::string& config_path, const std::string& preset, const std::string& scale) {
  if (!config_path.empty() && !preset.empty()) throw pairsim::ConfigError("use either --config or --preset, not both");
  if (!config_path.empty()) return pairsim::load_config(config_path);
  if (!preset.empty()) return pairsim::preset_config(preset, pairsim::parse_scale(scale));
  throw pairsim::ConfigError("one of --config or --preset is required");
}

void apply_ces_override(pairsim::RunConfig& config, const std::string& text) {
  if (text.empty()) return;
  std::istringstream in(text);
  double e_min = 0, e_max = 0, window = 0;
  std::size_t points = 0;
  char c1 = 0, c2 = 0, c3 = 0;
  if (!(in >> e_min >> c1 >> e_max >> c2 >> points >> c3 >> window) || c1 != ',' || c2 != ',' || c3 != ',')
    throw pairsim::ConfigError("--ces: expected EMIN,EMAX,NE,WINDOW in units of c^2");
  const double unit = config.constants.c2();
  config.ces = {e_min * unit, e_max * unit, points, window * unit};
  config.validate();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Electron-positron pair creation in a 1+1D Sauter well, resolved by conversion energy"};
  app.require_subcommand(1);

  std::string config_path, preset, scale = "desk", out_dir, dump_path, ces_text;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  bool dump = false;
  bool quiet = false;

  CLI::App* run_cmd = app.add_subcommand("run", "simulate a preset or config file and write the analysis");
  run_cmd->add_option("--config", config_path, "JSON run configuration");
  run_cmd->add_option("--preset", preset, "preset name (see `pairsim presets`)");
  run_cmd->add_option("--scale", scale, "desk or full")->check(CLI::IsMember({"desk", "full"}));
  run_cmd->add_option("--out", out_dir, "output directory")->required();
  run_cmd->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--dump-amplitudes", dump, "also write amplitudes.bin");
  run_cmd->add_flag("--quiet", quiet, "no progress output");

  CLI::App* presets_cmd = app.add_subcommand("presets", "list scenario presets");

  CLI::App* analyze_cmd = app.add_subcommand("analyze", "re-analyze an amplitude dump without re-simulating");
  analyze_cmd->add_option("--amplitudes", dump_path, "amplitudes.bin from a previous run")->required();
  analyze_cmd->add_option("--config", config_path, "config supplying c, CES and channel settings");
  analyze_cmd->add_option("--preset", preset, "preset supplying c, CES and channel settings");
  analyze_cmd->add_option("--scale", scale, "desk or full")->check(CLI::IsMember({"desk", "full"}));
  analyze_cmd->add_option("--ces", ces_text, "EMIN,EMAX,NE,WINDOW in units of c^2");
  analyze_cmd->add_option("--out", out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*presets_cmd) {
      for (const auto& p : pairsim::list_presets())
        std::cout << p.name << " → " << p.figure << "  " << p.description << '\n';
      return 0;
    }
    if (*run_cmd) {
      pairsim::RunConfig config = resolve(config_path, preset, scale);
      config.output_dir = out_dir;
      if (run_cmd->count("--workers") > 0 || config_path.empty()) config.workers = workers;
      config.dump_amplitudes = config.dump_amplitudes || dump;
      const auto result = pairsim::run(config, quiet ? nullptr : &std::cerr);
      if (!quiet)
        std::cerr << "done in " << result.wall_seconds << " s, N(t0) = " << result.analysis.totals.back()
                  << ", outputs in " << out_dir << '\n';
      return 0;
    }
    if (*analyze_cmd) {
      pairsim::RunConfig config = (config_path.empty() && preset.empty()) ? pairsim::default_run_config()
                                                                          : resolve(config_path, preset, scale);
      apply_ces_override(config, ces_text);
      pairsim::analyze_dump(dump_path, config, out_dir);
      return 0;
    }
  } catch (const pairsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
