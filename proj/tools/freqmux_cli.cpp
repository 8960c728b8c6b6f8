// Command-line scenario runner.
#include <CLI11.hpp>
#include <iostream>

#include "freqmux/errors.hpp"
#include "freqmux/harness/config.hpp"
#include "freqmux/harness/scenarios.hpp"
#include "freqmux/kernels.hpp"
#include "freqmux/version.hpp"

int main(int argc, char** argv) {
  using namespace freqmux;
  CLI::App app{"Frequency-multiplexed heralded single-photon source simulator"};
  app.set_version_flag("--version", kVersion);

  std::string scenario, config_path, manifest_path, output_dir, simd = "auto";
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  double grid_scale = 0.0;
  int verbosity = -1;
  unsigned workers = 0;
  bool print_config = false;

  app.add_option("scenario", scenario, "scenario name")
      ->check(CLI::IsMember(harness::scenario_names()));
  app.add_option("-c,--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--from-manifest", manifest_path, "rerun the configuration recorded in a manifest")
      ->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("-s,--seed", seed, "RNG seed override");
  app.add_option("-o,--output", output_dir, "output directory");
  app.add_option("-g,--grid-scale", grid_scale, "quadrature node multiplier")->check(CLI::PositiveNumber);
  app.add_option("-v,--verbosity", verbosity, "0 quiet, 1 summary, 2 progress")->check(CLI::Range(0, 2));
  app.add_option("-j,--workers", workers, "worker threads (0 = all cores)");
  app.add_option("--set", overrides, "override section.key=value (repeatable)");
  app.add_option("--simd", simd, "kernel backend")->check(CLI::IsMember({"auto", "scalar", "avx2"}));
  app.add_flag("--print-config", print_config, "print the resolved configuration as INI and exit");
  CLI11_PARSE(app, argc, argv);

  try {
    harness::ScenarioConfig cfg;
    if (!manifest_path.empty()) cfg = harness::config_from_manifest(manifest_path);
    if (!config_path.empty()) cfg = harness::load_config_file(config_path, cfg);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError(kv + ": expected section.key=value");
      harness::set_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!scenario.empty()) cfg.scenario = scenario;
    if (*seed_opt) cfg.seed = seed;
    if (!output_dir.empty()) cfg.output_dir = output_dir;
    if (grid_scale > 0.0) cfg.grid_scale = grid_scale;
    if (verbosity >= 0) cfg.verbosity = verbosity;
    if (workers > 0) cfg.workers = workers;
    if (simd == "scalar") simd::set_backend(simd::Backend::kScalar);
    if (simd == "avx2") simd::set_backend(simd::Backend::kAvx2);

    if (print_config) {
      harness::write_ini(std::cout, cfg);
      return 0;
    }
    const auto summary = harness::run_scenario(cfg, &std::cout);
    return summary.all_passed() ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
