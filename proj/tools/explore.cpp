#include "frontex/exploration.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

namespace {

void apply_overrides(frontex::ExplorationConfig& config, const std::vector<std::string>& items) {
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value: " + item);
    frontex::set_config_value(config, item.substr(0, eq), item.substr(eq + 1));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frontier-driven exploration of a box-world scenario"};
  std::string scenario_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::string preset;
  double timeout = 0.0;
  bool dump_images = false;
  bool verbose = false;
  std::vector<std::string> overrides;

  app.add_option("--scenario", scenario_path, "Scenario file")->required();
  app.add_option("--seed", seed, "Random seed (overrides the scenario)");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--preset", preset, "Parameter preset")
      ->check(CLI::IsMember({"apartment", "maze", "powerplant"}));
  app.add_option("--timeout", timeout, "Wall-clock limit in seconds (0 = none)")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--dump-entropy-images", dump_images, "Write entropy/depth graymaps per candidate");
  app.add_option("--set", overrides, "Override a scenario key (key=value)");
  app.add_flag("-v,--verbose", verbose, "Print one line per planning iteration");
  CLI11_PARSE(app, argc, argv);

  try {
    frontex::Scenario scenario = frontex::load_scenario(scenario_path);
    if (!preset.empty()) frontex::apply_preset(scenario.config, preset);
    apply_overrides(scenario.config, overrides);
    if (seed) scenario.config.seed = *seed;
    scenario.config.validate();

    std::filesystem::create_directories(out_dir);
    frontex::RunOptions options;
    options.wall_timeout_s = timeout;
    options.dump_entropy_images = dump_images;
    if (dump_images) {
      options.dump_dir = (std::filesystem::path(out_dir) / "entropy").string();
      std::filesystem::create_directories(options.dump_dir);
    }
    if (verbose) {
      options.on_iteration = [](int iteration, const frontex::IterationResult& it) {
        std::fprintf(stderr, "iteration %d: %zu filtered blocks, %zu candidates scored%s\n",
                     iteration, it.filtered_blocks, it.evaluated.size(),
                     it.complete ? ", complete" : "");
      };
    }

    frontex::Explorer explorer(std::move(scenario));
    const frontex::RunResult result = explorer.run(options);

    const auto dir = std::filesystem::path(out_dir);
    frontex::export_metrics(result.metrics, (dir / "metrics.csv").string());
    frontex::export_map(explorer.map(), (dir / "map.txt").string());

    if (result.retry_guard_fired) {
      std::cerr << "warning: frontiers remain but none was reachable; stopping\n";
    }
    std::cout << frontex::format_plan_time_summary(frontex::plan_time_stats(result.metrics))
              << '\n';
    std::printf("explored %.3f m^3 in %.1f s simulated, %d iterations\n",
                frontex::explored_volume(explorer.map()), result.sim_time, result.iterations);
    switch (result.status) {
      case frontex::RunStatus::kComplete:
        return 0;
      case frontex::RunStatus::kTimeout:
        std::cerr << "stopped: wall-clock timeout\n";
        return 2;
      case frontex::RunStatus::kSimTimeLimit:
        std::cerr << "stopped: simulated-time limit\n";
        return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
