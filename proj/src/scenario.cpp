#include "frontex/scenario.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace frontex {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

double parse_double(std::string_view key, std::string_view text) {
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(value)) {
    throw std::invalid_argument("malformed number '" + std::string(text) + "' for " +
                                std::string(key));
  }
  return value;
}

long long parse_integer(std::string_view key, std::string_view text) {
  long long value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw std::invalid_argument("malformed integer '" + std::string(text) + "' for " +
                                std::string(key));
  }
  return value;
}

int parse_int(std::string_view key, std::string_view text) {
  const long long v = parse_integer(key, text);
  if (v < -2147483647LL || v > 2147483647LL) {
    throw std::invalid_argument("integer out of range for " + std::string(key));
  }
  return static_cast<int>(v);
}

using Setter = std::function<void(ExplorationConfig&, std::string_view key, std::string_view)>;

struct KeyTable {
  std::vector<std::string> order;
  std::map<std::string, Setter, std::less<>> setters;

  void add(const std::string& key, Setter s) {
    order.push_back(key);
    setters.emplace(key, std::move(s));
  }
};

Setter real(double ExplorationConfig::*field) {
  return [field](ExplorationConfig& c, std::string_view k, std::string_view v) {
    c.*field = parse_double(k, v);
  };
}

Setter mav_real(double MavConfig::*field, double scale = 1.0) {
  return [field, scale](ExplorationConfig& c, std::string_view k, std::string_view v) {
    c.mav.*field = parse_double(k, v) * scale;
  };
}

Setter integer(int ExplorationConfig::*field) {
  return [field](ExplorationConfig& c, std::string_view k, std::string_view v) {
    c.*field = parse_int(k, v);
  };
}

const KeyTable& key_table() {
  static const KeyTable table = [] {
    KeyTable t;
    t.add("resolution", real(&ExplorationConfig::resolution));
    t.add("safety_radius", mav_real(&MavConfig::safety_radius));
    t.add("v_max", mav_real(&MavConfig::v_max));
    t.add("w_max", mav_real(&MavConfig::w_max));
    t.add("d_max", mav_real(&MavConfig::max_range));
    t.add("fov_h_deg", mav_real(&MavConfig::fov_h, kDegToRad));
    t.add("fov_v_deg", mav_real(&MavConfig::fov_v, kDegToRad));
    t.add("n_candidates", integer(&ExplorationConfig::n_candidates));
    t.add("seed", [](ExplorationConfig& c, std::string_view k, std::string_view v) {
      const long long s = parse_integer(k, v);
      if (s < 0) throw std::invalid_argument("seed must be non-negative");
      c.seed = static_cast<std::uint64_t>(s);
    });
    t.add("sensor_rate_hz", real(&ExplorationConfig::sensor_rate_hz));
    t.add("control_dt", real(&ExplorationConfig::control_dt));
    t.add("min_frontier_voxels", integer(&ExplorationConfig::min_frontier_voxels));
    t.add("l_hit", [](ExplorationConfig& c, std::string_view k, std::string_view v) {
      c.sensor.l_hit = static_cast<float>(parse_double(k, v));
    });
    t.add("l_miss", [](ExplorationConfig& c, std::string_view k, std::string_view v) {
      c.sensor.l_miss = static_cast<float>(parse_double(k, v));
    });
    t.add("mount_pitch_deg", mav_real(&MavConfig::mount_pitch, kDegToRad));
    t.add("image_width", [](ExplorationConfig& c, std::string_view k, std::string_view v) {
      c.mav.image_width = parse_int(k, v);
    });
    t.add("image_height", [](ExplorationConfig& c, std::string_view k, std::string_view v) {
      c.mav.image_height = parse_int(k, v);
    });
    t.add("depth_noise_sigma", mav_real(&MavConfig::depth_noise_sigma));
    t.add("planner_step", [](ExplorationConfig& c, std::string_view k, std::string_view v) {
      c.planner.step = parse_double(k, v);
    });
    t.add("planner_iterations", [](ExplorationConfig& c, std::string_view k, std::string_view v) {
      c.planner.max_iterations = parse_int(k, v);
    });
    t.add("planner_early_exit", [](ExplorationConfig& c, std::string_view k, std::string_view v) {
      c.planner.iterations_after_solution = parse_int(k, v);
    });
    t.add("rewire_radius", [](ExplorationConfig& c, std::string_view k, std::string_view v) {
      c.planner.rewire_radius = parse_double(k, v);
    });
    t.add("simplify_passes", [](ExplorationConfig& c, std::string_view k, std::string_view v) {
      c.planner.simplify_passes = parse_int(k, v);
    });
    t.add("raycast_cols", integer(&ExplorationConfig::raycast_columns));
    t.add("raycast_rows", integer(&ExplorationConfig::raycast_rows));
    t.add("min_travel_time", real(&ExplorationConfig::min_travel_time));
    t.add("max_sim_time", real(&ExplorationConfig::max_sim_time));
    t.add("start_clear_radius", [](ExplorationConfig& c, std::string_view k, std::string_view v) {
      c.start_clear_radius = parse_double(k, v);
    });
    t.add("max_retries", integer(&ExplorationConfig::max_retries));
    t.add("block_strikes", integer(&ExplorationConfig::block_strikes));
    return t;
  }();
  return table;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

void ExplorationConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("invalid configuration: " + what);
  };
  require(resolution > 0.0, "resolution must be positive");
  require(n_candidates >= 1, "n_candidates must be at least 1");
  require(sensor_rate_hz > 0.0, "sensor_rate_hz must be positive");
  require(control_dt > 0.0, "control_dt must be positive");
  require(min_frontier_voxels >= 1, "min_frontier_voxels must be at least 1");
  require(raycast_columns >= 1 && raycast_rows >= 1, "raycast grid must be non-empty");
  require(min_travel_time > 0.0, "min_travel_time must be positive");
  require(max_sim_time > 0.0, "max_sim_time must be positive");
  require(!start_clear_radius || *start_clear_radius >= 0.0, "start_clear_radius");
  require(max_retries >= 0, "max_retries must be non-negative");
  require(block_strikes >= 1, "block_strikes must be at least 1");
  mav.validate();
  planner.validate();
  sensor.validate();
}

RaycastParams ExplorationConfig::raycast_params() const {
  RaycastParams p;
  p.columns = raycast_columns;
  p.rows = raycast_rows;
  p.fov_v = mav.fov_v;
  p.mount_pitch = mav.mount_pitch;
  p.max_range = mav.max_range;
  return p;
}

void apply_preset(ExplorationConfig& config, std::string_view name) {
  if (name != "apartment" && name != "maze" && name != "powerplant") {
    throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
  }
  config.mav.safety_radius = 0.5;
  config.mav.w_max = 0.75;
  config.mav.v_max = 1.5;
  config.mav.fov_v = 60.0 * kDegToRad;
  config.n_candidates = 20;
  if (name == "apartment") {
    config.resolution = 0.1;
    config.mav.max_range = 5.0;
    config.mav.fov_h = 90.0 * kDegToRad;
  } else if (name == "maze") {
    config.resolution = 0.2;
    config.mav.max_range = 5.0;
    config.mav.fov_h = 115.0 * kDegToRad;
  } else {
    config.resolution = 0.2;
    config.mav.max_range = 7.0;
    config.mav.fov_h = 115.0 * kDegToRad;
  }
}

void set_config_value(ExplorationConfig& config, std::string_view key, std::string_view value) {
  const auto& setters = key_table().setters;
  const auto it = setters.find(key);
  if (it == setters.end()) throw std::invalid_argument("unknown key '" + std::string(key) + "'");
  it->second(config, key, value);
}

const std::vector<std::string>& config_keys() { return key_table().order; }

ScenarioError::ScenarioError(const std::string& source, int line, const std::string& message)
    : std::runtime_error(line > 0 ? source + ":" + std::to_string(line) + ": " + message
                                  : source + ": " + message),
      line_(line) {}

Scenario parse_scenario(std::istream& in, const std::string& source) {
  Scenario scenario;
  bool have_bounds = false;
  bool have_start = false;
  std::vector<int> box_lines;
  int start_line = 0;
  std::string raw;
  int line_no = 0;

  auto numbers = [&](std::string_view keyword, const std::vector<std::string_view>& tok,
                     std::size_t count) {
    if (tok.size() != count + 1) {
      throw ScenarioError(source, line_no,
                          std::string(keyword) + " expects " + std::to_string(count) + " numbers");
    }
    std::vector<double> v;
    for (std::size_t i = 1; i < tok.size(); ++i) {
      try {
        v.push_back(parse_double(keyword, tok[i]));
      } catch (const std::invalid_argument& e) {
        throw ScenarioError(source, line_no, e.what());
      }
    }
    return v;
  };

  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    const auto tok = split(line);
    if (tok.empty()) continue;
    const std::string_view head = tok[0];
    if (head == "bounds") {
      if (have_bounds) throw ScenarioError(source, line_no, "duplicate bounds");
      const auto v = numbers(head, tok, 6);
      scenario.world.bounds = {Vec3(v[0], v[1], v[2]), Vec3(v[3], v[4], v[5])};
      if (!scenario.world.bounds.valid()) {
        throw ScenarioError(source, line_no, "bounds must have positive extent");
      }
      have_bounds = true;
    } else if (head == "box") {
      const auto v = numbers(head, tok, 6);
      const Aabb box(Vec3(v[0], v[1], v[2]), Vec3(v[3], v[4], v[5]));
      if (!box.valid()) throw ScenarioError(source, line_no, "box must have positive extent");
      scenario.world.obstacles.push_back(box);
      box_lines.push_back(line_no);
    } else if (head == "start") {
      if (have_start) throw ScenarioError(source, line_no, "duplicate start");
      const auto v = numbers(head, tok, 4);
      scenario.start = {Vec3(v[0], v[1], v[2]), wrap_2pi(v[3])};
      have_start = true;
      start_line = line_no;
    } else {
      if (tok.size() != 2) {
        throw ScenarioError(source, line_no, "expected 'key value' for " + std::string(head));
      }
      try {
        set_config_value(scenario.config, head, tok[1]);
      } catch (const std::invalid_argument& e) {
        throw ScenarioError(source, line_no, e.what());
      }
    }
  }
  if (!have_bounds) throw ScenarioError(source, 0, "missing required key 'bounds'");
  if (!have_start) throw ScenarioError(source, 0, "missing required key 'start'");
  for (std::size_t i = 0; i < scenario.world.obstacles.size(); ++i) {
    if (!scenario.world.obstacles[i].overlaps_open(scenario.world.bounds)) {
      throw ScenarioError(source, box_lines[i], "box lies outside the bounds");
    }
  }
  try {
    scenario.config.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(source, 0, e.what());
  }
  if (!scenario.world.bounds.contains_strict(scenario.start.position)) {
    throw ScenarioError(source, start_line, "start lies outside the bounds");
  }
  return scenario;
}

Scenario parse_scenario_string(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in);
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path, 0, "cannot open file");
  return parse_scenario(in, path);
}

}  // namespace frontex
