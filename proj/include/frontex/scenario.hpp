#pragma once

#include "frontex/evaluation.hpp"
#include "frontex/integration.hpp"
#include "frontex/planning.hpp"
#include "frontex/world.hpp"

#include <cstdint>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace frontex {

struct ExplorationConfig {
  double resolution = 0.1;  // m
  MavConfig mav;
  PlannerConfig planner;
  SensorModel sensor;
  int n_candidates = 20;
  std::uint64_t seed = 1;
  double sensor_rate_hz = 10.0;
  double control_dt = 0.05;  // s
  int min_frontier_voxels = 8;
  int raycast_columns = 96;
  int raycast_rows = 8;
  double min_travel_time = kMinTravelTime;  // s
  double max_sim_time = 1800.0;             // s, run stops past this
  std::optional<double> start_clear_radius;  // m, defaults to twice the safety radius
  int max_retries = 3;
  int block_strikes = 2;

  void validate() const;
  RaycastParams raycast_params() const;
  double clear_radius() const { return start_clear_radius.value_or(2.0 * mav.safety_radius); }
};

/// Presets for the parameter sets of the three reference environments.
/// Throws std::invalid_argument for an unknown name.
void apply_preset(ExplorationConfig& config, std::string_view name);

/// Sets one `key value` field. Throws std::invalid_argument with a message
/// naming the key on an unknown key or a malformed value.
void set_config_value(ExplorationConfig& config, std::string_view key, std::string_view value);

/// Keys accepted by set_config_value, in documentation order.
const std::vector<std::string>& config_keys();

struct Scenario {
  WorldModel world;
  MavState start;
  ExplorationConfig config;
};

/// Parse failure carrying the 1-based line number (0 when not tied to a line).
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(const std::string& source, int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

Scenario parse_scenario(std::istream& in, const std::string& source = "<scenario>");
Scenario parse_scenario_string(const std::string& text);
Scenario load_scenario(const std::string& path);

}  // namespace frontex
