// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any
// failure.
#include "frontex/exploration.hpp"
#include "frontex/morton.hpp"
#include "test_support.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

using namespace frontex;
using namespace frontex::testing;

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Scenario scenario_with(const std::string& name, const std::string& preset, double resolution) {
  Scenario s = load_scenario(std::string(FRONTEX_SCENARIO_DIR) + "/" + name + ".scn");
  apply_preset(s.config, preset);
  s.config.resolution = resolution;
  s.config.validate();
  return s;
}

// Runs the CLI, returning its exit code and stdout.
std::pair<int, std::string> run_cli(const std::string& args) {
  const std::string cmd = std::string(FRONTEX_EXPLORE_BIN) + " " + args;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return {-1, ""};
  std::string out;
  char buf[256];
  while (std::fgets(buf, sizeof(buf), pipe) != nullptr) out += buf;
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

// True when every row's explored_volume_m3 is at least the previous one.
bool csv_volume_monotone(const std::string& text, std::size_t& rows) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  if (line != kMetricsHeader) return false;
  double prev = -1.0;
  rows = 0;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string t, v;
    std::getline(fields, t, ',');
    std::getline(fields, v, ',');
    const double vol = std::stod(v);
    if (vol < prev) return false;
    prev = vol;
    ++rows;
  }
  return rows > 0;
}

// Drops the last CSV column from every line.
std::string without_last_column(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

// 1 ------------------------------------------------------------------------

Outcome frontier_oracle() {
  const auto t0 = Clock::now();
  Rng rng(1001);
  const Aabb bounds({0, 0, 0}, {8, 8, 3});
  MavConfig mav;
  int integrations = 0, mismatches = 0;
  for (int w = 0; w < 10; ++w) {
    const Vec3 start(4, 4, 1.5);
    const auto world = random_box_world(rng, bounds, 6, start, 1.0);
    auto map = OccupancyOctree::covering(bounds, 0.2);
    FrontierList frontiers;
    for (int f = 0; f < 10; ++f) {
      Vec3 p;
      do {
        p = Vec3(rng.uniform(0.5, 7.5), rng.uniform(0.5, 7.5), rng.uniform(0.5, 2.5));
      } while (world.clearance(p) < 0.3);
      const CameraPose pose{p, rng.uniform(0, kTwoPi), mav.mount_pitch};
      const auto updated = integrate_depth(map, pose, render_depth(world, pose, mav), SensorModel{});
      update_frontiers(map, frontiers, updated);
      ++integrations;
      const auto scan = scan_frontiers(map);
      if (flagged_frontiers(map) != scan || frontiers.codes() != blocks_of(scan)) ++mismatches;
    }
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 60.0,
          fmt("%d integrations in 10 worlds, %d mismatches, %.1f s", integrations, mismatches,
              secs)};
}

// 2 ------------------------------------------------------------------------

bool zorder_before(const std::array<std::uint32_t, 3>& a, const std::array<std::uint32_t, 3>& b,
                   int level) {
  if (level < 0) return false;
  auto octant = [level](const std::array<std::uint32_t, 3>& p) {
    return ((p[0] >> level) & 1u) + 2 * ((p[1] >> level) & 1u) + 4 * ((p[2] >> level) & 1u);
  };
  if (octant(a) != octant(b)) return octant(a) < octant(b);
  return zorder_before(a, b, level - 1);
}

Outcome morton_properties() {
  Rng rng(1002);
  int bad_trips = 0;
  for (int i = 0; i < 100000; ++i) {
    const auto x = static_cast<std::uint32_t>(rng.index(kMortonAxisLimit));
    const auto y = static_cast<std::uint32_t>(rng.index(kMortonAxisLimit));
    const auto z = static_cast<std::uint32_t>(rng.index(kMortonAxisLimit));
    if (morton_decode(morton_encode(x, y, z)) != MortonCoords{x, y, z}) ++bad_trips;
  }
  std::vector<std::array<std::uint32_t, 3>> blocks(1000);
  for (auto& b : blocks) {
    for (auto& c : b) c = static_cast<std::uint32_t>(rng.index(1024));
  }
  auto by_code = blocks;
  std::stable_sort(by_code.begin(), by_code.end(), [](const auto& a, const auto& b) {
    return morton_encode(a[0], a[1], a[2]) < morton_encode(b[0], b[1], b[2]);
  });
  auto by_octant = blocks;
  std::stable_sort(by_octant.begin(), by_octant.end(),
                   [](const auto& a, const auto& b) { return zorder_before(a, b, 9); });
  const bool order_ok = by_code == by_octant;
  return {bad_trips == 0 && order_ok,
          fmt("100000 round trips, %d wrong; 1000-block z-order %s", bad_trips,
              order_ok ? "matches" : "differs")};
}

// 3 ------------------------------------------------------------------------

// First node whose cached max differs from the max recomputed bottom-up, or
// an empty string.
std::string audit_maxima(const OccupancyOctree& map) {
  std::vector<float> level(map.nodes_at_level(0), 0.0f);
  for (MortonCode code = 0; code < level.size(); ++code) {
    const VoxelBlock* b = map.find_block(code);
    if (b == nullptr) continue;
    float m = b->propagated_log_odds(0);
    for (int i = 1; i < VoxelBlock::kVolume; ++i) m = std::max(m, b->propagated_log_odds(i));
    level[code] = m;
  }
  for (int lv = 0; lv <= map.levels(); ++lv) {
    if (lv > 0) {
      std::vector<float> up(level.size() / 8);
      for (MortonCode c = 0; c < up.size(); ++c) {
        up[c] = *std::max_element(level.begin() + 8 * c, level.begin() + 8 * c + 8);
      }
      level.swap(up);
    }
    for (MortonCode c = 0; c < level.size(); ++c) {
      if (map.node_max_log_odds(lv, c) != level[c]) return fmt("level %d node %llu", lv,
                                                               static_cast<unsigned long long>(c));
    }
  }
  return "";
}

Outcome up_propagation_audit() {
  Rng rng(1003);
  OccupancyOctree map(0.1, 64, Vec3::Zero());
  std::vector<MortonCode> dirty;
  for (int i = 0; i < 10000; ++i) {
    const VoxelCoord v(static_cast<int>(rng.index(64)), static_cast<int>(rng.index(64)),
                       static_cast<int>(rng.index(64)));
    map.apply_log_odds(v, static_cast<float>(rng.uniform(-3, 3)));
    dirty.push_back(OccupancyOctree::block_code_of(v));
    if (dirty.size() == 100) {
      std::sort(dirty.begin(), dirty.end());
      dirty.erase(std::unique(dirty.begin(), dirty.end()), dirty.end());
      map.up_propagate(dirty);
      dirty.clear();
    }
  }
  const std::string bad = audit_maxima(map);
  return {bad.empty(), bad.empty() ? "10000 updates, every cached max matches"
                                   : "10000 updates, mismatch at " + bad};
}

// 4 ------------------------------------------------------------------------

int brute_force_best_column(const EntropyImage& img, double fov_h) {
  const int n = img.columns;
  const int w = std::clamp(static_cast<int>(std::ceil(fov_h * n / kTwoPi - 1e-9)), 1, n);
  int best = 0;
  double best_gain = -1.0;
  for (int j = 0; j < n; ++j) {
    double gain = 0.0;
    for (int c = 0; c < n; ++c) {
      if (((c - j + w / 2) % n + n) % n < w) {
        for (int r = 0; r < img.rows; ++r) gain += img.at(c, r);
      }
    }
    if (gain > best_gain) {
      best_gain = gain;
      best = j;
    }
  }
  return best;
}

Outcome entropy_oracle() {
  Rng rng(1004);
  auto map = OccupancyOctree::covering(Aabb({0, 0, 0}, {8, 8, 3}), 0.1);
  for (int i = 0; i < 60000; ++i) {
    const VoxelCoord v(static_cast<int>(rng.index(82)), static_cast<int>(rng.index(82)),
                       static_cast<int>(rng.index(32)));
    map.apply_log_odds(v, static_cast<float>(rng.uniform(-2.5, 0.6)));
  }
  map.up_propagate();
  int ray_misses = 0;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 o(rng.uniform(0.3, 7.7), rng.uniform(0.3, 7.7), rng.uniform(0.3, 2.7));
    const Vec3 d = random_unit(rng);
    const double got = ray_entropy(map, o, d, 5.0).entropy;
    const double want = ray_entropy_oracle(map, o, d, 5.0).entropy;
    const double rel = std::abs(got - want) / std::max(std::abs(want), 1e-12);
    worst = std::max(worst, want == 0.0 ? std::abs(got) : rel);
    if (want == 0.0 ? got != 0.0 : rel > 1e-6) ++ray_misses;
  }
  int yaw_misses = 0;
  for (int i = 0; i < 100; ++i) {
    EntropyImage img;
    img.columns = 96;
    img.rows = 1 + static_cast<int>(rng.index(24));
    img.values.resize(static_cast<std::size_t>(img.columns * img.rows));
    for (auto& v : img.values) v = static_cast<double>(rng.index(40)) / 8.0;
    const double fov = rng.uniform(5, 179) * std::numbers::pi / 180.0;
    if (optimal_yaw(img, fov).column != brute_force_best_column(img, fov)) ++yaw_misses;
  }
  return {ray_misses == 0 && yaw_misses == 0,
          fmt("1000 rays, %d outside 1e-6 (worst %.2e); 100 images, %d yaw mismatches", ray_misses,
              worst, yaw_misses)};
}

// 5 and 6 ------------------------------------------------------------------

struct CoverageRun {
  RunResult result;
  double wall_s = 0.0;
  double observed_fraction = 0.0;  // observable cells the map has observed
  double volume_ratio = 0.0;       // explored volume over observable volume
  std::size_t path_checks = 0;
  std::size_t map_violations = 0;
  std::size_t world_violations = 0;
};

CoverageRun coverage_run(const Scenario& scenario, bool check_paths) {
  CoverageRun out;
  Explorer explorer(scenario);
  const double r = scenario.config.resolution;
  const double radius = scenario.config.mav.safety_radius;
  RunOptions options;
  options.wall_timeout_s = 600.0;
  if (check_paths) {
    options.on_iteration = [&](int, const IterationResult& it) {
      if (!it.chosen) return;
      const auto& w = it.chosen->path.waypoints;
      auto check = [&](const Vec3& p) {
        ++out.path_checks;
        if (!collision_free_point(explorer.map(), p, radius)) ++out.map_violations;
        if (scenario.world.clearance(p) < radius) ++out.world_violations;
      };
      check(w.front());
      for (std::size_t i = 1; i < w.size(); ++i) {
        const double len = (w[i] - w[i - 1]).norm();
        const int steps = std::max(1, static_cast<int>(std::ceil(len / (r / 4))));
        for (int k = 1; k <= steps; ++k) check(w[i - 1] + (w[i] - w[i - 1]) * (double(k) / steps));
      }
    };
  }
  const auto t0 = Clock::now();
  out.result = explorer.run(options);
  out.wall_s = seconds_since(t0);
  const auto obs = observable_volume(scenario.world, scenario.start.position, r);
  out.observed_fraction = observed_fraction(explorer.map(), obs);
  out.volume_ratio = explored_volume(explorer.map()) / obs.total_m3();
  return out;
}

bool coverage_ok(const CoverageRun& c) {
  return c.result.status == RunStatus::kComplete && c.observed_fraction >= 0.95 &&
         c.volume_ratio >= 0.95;
}

bool within_budget(const CoverageRun& c) { return c.result.sim_time <= 600.0 && c.wall_s <= 600.0; }

std::string coverage_detail(const char* label, const CoverageRun& c) {
  static const char* status[] = {"complete", "wall timeout", "sim-time limit"};
  return fmt("%s: %s, observed %.4f, volume ratio %.4f, sim %.1f s, wall %.1f s, %d iterations",
             label, status[static_cast<int>(c.result.status)], c.observed_fraction, c.volume_ratio,
             c.result.sim_time, c.wall_s, c.result.iterations);
}

// 10 -----------------------------------------------------------------------

Outcome utility_checks() {
  const double h = voxel_entropy(0.5);
  const bool ln2_ok = std::abs(h - std::numbers::ln2) <= 1e-12;
  Rng rng(1010);
  int flips = 0;
  for (int i = 0; i < 1000; ++i) {
    const int n = 1 + static_cast<int>(rng.index(25));
    std::vector<double> gain(n), time(n);
    for (int k = 0; k < n; ++k) {
      gain[k] = rng.uniform(0, 100);
      time[k] = rng.uniform(kMinTravelTime, 30);
    }
    auto argmax = [&](double scale) {
      int best = 0;
      for (int k = 1; k < n; ++k) {
        if (utility(scale * gain[k], time[k]) > utility(scale * gain[best], time[best])) best = k;
      }
      return best;
    };
    const double c = std::pow(10.0, rng.uniform(-3, 3));
    if (argmax(c) != argmax(1.0)) ++flips;
  }
  return {ln2_ok && flips == 0,
          fmt("H(0.5) - ln2 = %.1e; 1000 candidate sets, %d argmax changes", h - std::numbers::ln2,
              flips)};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const Outcome& o) {
    std::printf("[%s] %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  };
  auto guarded = [](const std::function<Outcome()>& f) {
    try {
      return f();
    } catch (const std::exception& e) {
      return Outcome{false, std::string("exception: ") + e.what()};
    }
  };

  report(1, "frontier oracle", guarded(frontier_oracle));
  report(2, "morton properties", guarded(morton_properties));
  report(3, "up-propagation audit", guarded(up_propagation_audit));
  report(4, "entropy and yaw oracles", guarded(entropy_oracle));

  std::vector<std::string> csvs;
  CoverageRun apt_fine, apt_coarse;
  Outcome safety = guarded([&] {
    apt_fine = coverage_run(scenario_with("apartment", "apartment", 0.1), true);
    const bool ok = apt_fine.path_checks > 0 && apt_fine.map_violations == 0 &&
                    apt_fine.world_violations == 0 && apt_fine.result.safety_violations == 0;
    return Outcome{ok, fmt("apartment r=0.1: %zu samples over %zu paths, %zu unknown-or-occupied, "
                           "%zu within R of a surface, %zu control-step violations",
                           apt_fine.path_checks, apt_fine.result.executed_paths.size(),
                           apt_fine.map_violations, apt_fine.world_violations,
                           apt_fine.result.safety_violations)};
  });
  report(5, "path safety", safety);

  report(6, "apartment coverage", guarded([&] {
           apt_coarse = coverage_run(scenario_with("apartment", "apartment", 0.4), false);
           return Outcome{coverage_ok(apt_coarse) && coverage_ok(apt_fine) &&
                              within_budget(apt_coarse) && within_budget(apt_fine),
                          coverage_detail("r=0.4", apt_coarse) + "; " +
                              coverage_detail("r=0.1", apt_fine)};
         }));

  report(7, "maze coverage", guarded([&] {
           const auto maze = coverage_run(scenario_with("maze", "maze", 0.2), false);
           const bool ok = coverage_ok(maze) && !maze.result.retry_guard_fired;
           return Outcome{ok, coverage_detail("r=0.2", maze) +
                                  (maze.result.retry_guard_fired ? ", retry guard fired"
                                                                 : ", retry guard idle")};
         }));

  const fs::path work = fs::temp_directory_path() / "frontex_acceptance";
  fs::remove_all(work);
  const std::string maze_scn = std::string(FRONTEX_SCENARIO_DIR) + "/maze.scn";
  const std::string apt_scn = std::string(FRONTEX_SCENARIO_DIR) + "/apartment.scn";

  report(8, "plan time", guarded([&] {
           const auto [code, out] = run_cli("--scenario " + maze_scn +
                                            " --preset maze --set resolution=0.1 --out " +
                                            (work / "maze_fine").string());
           std::smatch m;
           if (!std::regex_search(out, m,
                                  std::regex(R"(plan time: ([0-9.]+) \+- ([0-9.]+) ms over (\d+))"))) {
             return Outcome{false, fmt("exit %d, no summary line", code)};
           }
           const double mean = std::stod(m[1]);
           csvs.push_back(read_file(work / "maze_fine" / "metrics.csv"));
           return Outcome{code == 0 && mean < 2000.0,
                          fmt("maze r=0.1 exit %d: %s +- %s ms over %s iterations", code,
                              m[1].str().c_str(), m[2].str().c_str(), m[3].str().c_str())};
         }));

  report(9, "monotone and deterministic", guarded([&] {
           std::string files[2], maps[2];
           for (int k = 0; k < 2; ++k) {
             const fs::path dir = work / ("replay" + std::to_string(k));
             run_cli("--scenario " + apt_scn + " --preset apartment --set resolution=0.4 --seed 5 "
                     "--out " + dir.string());
             files[k] = read_file(dir / "metrics.csv");
             maps[k] = read_file(dir / "map.txt");
             csvs.push_back(files[k]);
           }
           for (const auto* run : {&apt_fine, &apt_coarse}) {
             std::ostringstream s;
             write_metrics(run->result.metrics, s);
             csvs.push_back(s.str());
           }
           std::size_t monotone = 0, rows = 0, total_rows = 0;
           for (const auto& c : csvs) {
             if (csv_volume_monotone(c, rows)) ++monotone;
             total_rows += rows;
           }
           const bool csv_same = !files[0].empty() && files[0] == files[1];
           const bool sim_same = without_last_column(files[0]) == without_last_column(files[1]);
           const bool map_same = !maps[0].empty() && maps[0] == maps[1];
           return Outcome{monotone == csvs.size() && csv_same && map_same,
                          fmt("%zu/%zu CSVs monotone (%zu rows); replay CSV %s, without "
                              "plan_time_ms %s; map export %s",
                              monotone, csvs.size(), total_rows,
                              csv_same ? "byte-identical" : "differs",
                              sim_same ? "identical" : "differs",
                              map_same ? "byte-identical" : "differs")};
         }));

  report(10, "entropy and utility", guarded(utility_checks));

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
