#pragma once

#include "frontex/evaluation.hpp"
#include "frontex/integration.hpp"
#include "frontex/sampling.hpp"
#include "frontex/scenario.hpp"

#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace frontex {

struct MetricsSample {
  double t_s = 0.0;
  double explored_volume_m3 = 0.0;
  std::size_t frontier_blocks = 0;
  int iteration = 0;
  double plan_time_ms = 0.0;
};

struct MetricsLog {
  std::vector<MetricsSample> samples;
};

inline constexpr const char* kMetricsHeader =
    "t_s,explored_volume_m3,frontier_blocks,iteration,plan_time_ms";

void write_metrics(const MetricsLog& log, std::ostream& out);
/// Throws std::runtime_error when the file cannot be written.
void export_metrics(const MetricsLog& log, const std::string& path);

/// One "x y z p" line per observed voxel (centre coordinates), blocks in
/// Morton order and voxels in block-local order.
void write_map(const OccupancyOctree& map, std::ostream& out);
void export_map(const OccupancyOctree& map, const std::string& path);

struct PlanTimeStats {
  double mean_ms = 0.0;
  double stddev_ms = 0.0;  // population standard deviation
  std::size_t count = 0;
};
PlanTimeStats plan_time_stats(const MetricsLog& log);
/// "plan time: <mean> +- <std> ms over <n> iterations"
std::string format_plan_time_summary(const PlanTimeStats& stats);

/// A candidate that survived planning, with its view and score.
struct CandidateView {
  Candidate candidate;
  Path path;
  double yaw = 0.0;
  double gain = 0.0;  // nats
  double travel_time = 0.0;
  double utility = 0.0;
  std::optional<Raycast360> sweep;  // kept only on request
};

struct IterationResult {
  bool complete = false;
  /// Set when frontiers remained but no candidate survived planning after
  /// all retries.
  bool retry_guard_fired = false;
  int retries = 0;
  std::optional<CandidateView> chosen;  // path carries yaws
  std::vector<CandidateView> evaluated;
  std::size_t filtered_blocks = 0;
};

/// Driver state that narrows a planning step.
struct PlanGuards {
  /// Blocks dropped from the filtered list, ascending.
  std::vector<MortonCode> excluded_blocks;
  /// False right after an in-place rotation, so the vehicle cannot spin
  /// through consecutive iterations.
  bool allow_current_pose = true;
};

/// One planning step: sample candidates from the filtered frontier list,
/// plan to each, score the reachable ones and pick the best. Reports
/// completion when no frontier block passes the filter.
IterationResult plan_iteration(const OccupancyOctree& map, const FrontierList& frontiers,
                               const MavState& state, const Aabb& bounds,
                               const ExplorationConfig& config, Rng& rng,
                               const PlanGuards& guards = {}, bool keep_sweeps = false);

enum class RunStatus { kComplete, kTimeout, kSimTimeLimit };

struct RunOptions {
  double wall_timeout_s = 0.0;  // 0 disables
  /// Called after each planning iteration with the iteration result.
  std::function<void(int iteration, const IterationResult&)> on_iteration;
  /// Writes entropy and depth graymaps for every evaluated candidate.
  bool dump_entropy_images = false;
  std::string dump_dir = ".";
};

struct RunResult {
  RunStatus status = RunStatus::kComplete;
  MetricsLog metrics;
  int iterations = 0;
  bool retry_guard_fired = false;
  /// Frontier blocks given up on after repeated visits without progress.
  std::size_t excluded_blocks = 0;
  double sim_time = 0.0;
  std::vector<Path> executed_paths;
  /// Control steps at which the safety sphere was not known free.
  std::size_t safety_violations = 0;
};

/// Deterministic closed loop over a scenario: owns the map, frontier list,
/// vehicle state and simulated clock.
class Explorer {
 public:
  /// Clears the ground-truth free voxels around the start, integrates one
  /// frame there. Throws std::invalid_argument if the start pose collides.
  explicit Explorer(Scenario scenario);

  const Scenario& scenario() const { return scenario_; }
  const ExplorationConfig& config() const { return scenario_.config; }
  const OccupancyOctree& map() const { return map_; }
  const FrontierList& frontiers() const { return frontiers_; }
  const MavState& state() const { return state_; }
  double sim_time() const { return static_cast<double>(steps_) * scenario_.config.control_dt; }
  std::size_t frames_integrated() const { return frames_; }

  /// Renders and fuses one frame at the current pose.
  void integrate_frame();
  IterationResult plan(bool keep_sweeps = false);
  /// Flies the path waypoint by waypoint at the control rate, integrating at
  /// the sensor rate, then hovers until one frame is taken at the final
  /// pose. Returns false if the simulated-time limit was hit.
  bool execute(const Path& path);

  RunResult run(const RunOptions& options = {});

  std::size_t safety_violations() const { return safety_violations_; }
  const PlanGuards& guards() const { return guards_; }

  /// Books the outcome of an executed choice: a frontier target that
  /// revealed fewer than min_frontier_voxels new voxels earns a strike, and
  /// a block with block_strikes strikes is excluded from later sampling.
  void record_outcome(const CandidateView& chosen, std::size_t newly_observed);

 private:
  Scenario scenario_;
  OccupancyOctree map_;
  FrontierList frontiers_;
  MavState state_;
  Rng rng_;
  Rng noise_rng_;
  std::uint64_t steps_ = 0;
  std::size_t frames_ = 0;
  std::size_t safety_violations_ = 0;
  PlanGuards guards_;
  std::map<MortonCode, int> strikes_;
};

}  // namespace frontex
