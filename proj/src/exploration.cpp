#include "frontex/exploration.hpp"

#include <algorithm>
#include <chrono>
#include <iterator>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace frontex {

namespace {

std::string format_row(const MetricsSample& s) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%.3f,%.6f,%zu,%d,%.3f", s.t_s, s.explored_volume_m3,
                s.frontier_blocks, s.iteration, s.plan_time_ms);
  return buf;
}

std::ofstream open_for_writing(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  return f;
}

}  // namespace

void write_metrics(const MetricsLog& log, std::ostream& out) {
  out << kMetricsHeader << '\n';
  for (const auto& s : log.samples) out << format_row(s) << '\n';
}

void export_metrics(const MetricsLog& log, const std::string& path) {
  auto f = open_for_writing(path);
  write_metrics(log, f);
  if (!f) throw std::runtime_error("write failed: " + path);
}

void write_map(const OccupancyOctree& map, std::ostream& out) {
  char buf[128];
  map.for_each_block([&](const VoxelBlock& block) {
    for (int idx = 0; idx < VoxelBlock::kVolume; ++idx) {
      if (!block.observed[idx]) continue;
      const Vec3 c = map.voxel_center(block.coords * VoxelBlock::kSide + VoxelBlock::local(idx));
      std::snprintf(buf, sizeof(buf), "%.6f %.6f %.6f %.6f\n", c.x(), c.y(), c.z(),
                    block.occupancy(idx));
      out << buf;
    }
  });
}

void export_map(const OccupancyOctree& map, const std::string& path) {
  auto f = open_for_writing(path);
  write_map(map, f);
  if (!f) throw std::runtime_error("write failed: " + path);
}

PlanTimeStats plan_time_stats(const MetricsLog& log) {
  PlanTimeStats s;
  s.count = log.samples.size();
  if (s.count == 0) return s;
  for (const auto& m : log.samples) s.mean_ms += m.plan_time_ms;
  s.mean_ms /= static_cast<double>(s.count);
  double var = 0.0;
  for (const auto& m : log.samples) var += (m.plan_time_ms - s.mean_ms) * (m.plan_time_ms - s.mean_ms);
  s.stddev_ms = std::sqrt(var / static_cast<double>(s.count));
  return s;
}

std::string format_plan_time_summary(const PlanTimeStats& stats) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "plan time: %.1f +- %.1f ms over %zu iterations",
                stats.mean_ms, stats.stddev_ms, stats.count);
  return buf;
}

IterationResult plan_iteration(const OccupancyOctree& map, const FrontierList& frontiers,
                               const MavState& state, const Aabb& bounds,
                               const ExplorationConfig& config, Rng& rng,
                               const PlanGuards& guards, bool keep_sweeps) {
  IterationResult result;
  std::vector<MortonCode> filtered;
  {
    const auto passing = filter_frontier_blocks(frontiers, map, config.min_frontier_voxels);
    std::set_difference(passing.begin(), passing.end(), guards.excluded_blocks.begin(),
                        guards.excluded_blocks.end(), std::back_inserter(filtered));
  }
  result.filtered_blocks = filtered.size();
  if (filtered.empty()) {
    result.complete = true;
    return result;
  }
  const RaycastParams params = config.raycast_params();
  const double radius = config.mav.safety_radius;

  for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
    result.retries = attempt;
    result.evaluated.clear();
    const CandidateSet candidates = sample_candidates(
        filtered, map, config.n_candidates, state, rng, SamplingOptions{attempt > 0});
    for (const Candidate& candidate : candidates) {
      CandidateView view{candidate, {}, 0.0, 0.0, 0.0, 0.0, std::nullopt};
      if (candidate.is_current_pose()) {
        if (!guards.allow_current_pose) continue;
        view.path.waypoints = {state.position};
      } else {
        if (!bounds.contains(candidate.position)) continue;
        Rng planner_rng = rng.fork();
        PlanResult planned = plan_path(map, state.position, candidate.position, radius,
                                       config.planner, planner_rng, bounds);
        if (!planned.ok() || !bounds.contains(planned.path->end())) continue;
        view.path = std::move(*planned.path);
      }
      Raycast360 sweep = raycast_entropy_360(map, view.path.end(), params);
      const YawChoice choice = optimal_yaw(sweep.entropy, config.mav.fov_h);
      // Staying put without turning repeats the previous view exactly.
      if (candidate.is_current_pose() &&
          std::abs(shortest_angle(state.yaw, choice.yaw)) < 0.5 * params.yaw_step()) {
        continue;
      }
      view.yaw = choice.yaw;
      view.gain = choice.gain;
      view.travel_time = travel_time(view.path, state.yaw, choice.yaw, config.mav.v_max,
                                     config.mav.w_max, config.min_travel_time);
      view.utility = utility(view.gain, view.travel_time);
      if (keep_sweeps) view.sweep = std::move(sweep);
      result.evaluated.push_back(std::move(view));
    }
    if (result.evaluated.empty()) continue;

    std::size_t best = 0;
    for (std::size_t i = 1; i < result.evaluated.size(); ++i) {
      if (result.evaluated[i].utility > result.evaluated[best].utility) best = i;
    }
    CandidateView chosen = result.evaluated[best];
    chosen.path = assign_intermediate_yaws(map, chosen.path, state.yaw, chosen.yaw, params,
                                           config.mav.fov_h);
    result.chosen = std::move(chosen);
    return result;
  }
  result.retry_guard_fired = true;
  result.complete = true;
  return result;
}

Explorer::Explorer(Scenario scenario)
    : scenario_(std::move(scenario)),
      map_(OccupancyOctree::covering(scenario_.world.bounds, scenario_.config.resolution)),
      state_(scenario_.start),
      rng_(scenario_.config.seed),
      noise_rng_(scenario_.config.seed ^ 0x5deece66dULL) {
  const ExplorationConfig& config = scenario_.config;
  config.validate();
  const WorldModel& world = scenario_.world;
  if (!world.point_free(state_.position) ||
      world.clearance(state_.position) < config.mav.safety_radius) {
    throw std::invalid_argument("start pose is in collision");
  }
  state_.yaw = wrap_2pi(state_.yaw);

  // The camera cannot see the space it starts in, so the ground-truth free
  // voxels around the start are marked free before the first frame.
  const double clear = config.clear_radius();
  if (clear > 0.0) {
    const std::uint32_t frame = map_.begin_frame();
    std::vector<VoxelCoord> cleared;
    const VoxelCoord lo = map_.voxel_of(state_.position.array() - clear);
    const VoxelCoord hi = map_.voxel_of(state_.position.array() + clear);
    for (int z = lo.z(); z <= hi.z(); ++z) {
      for (int y = lo.y(); y <= hi.y(); ++y) {
        for (int x = lo.x(); x <= hi.x(); ++x) {
          const VoxelCoord v(x, y, z);
          if (!map_.in_bounds(v)) continue;
          const Aabb box(map_.voxel_min_corner(v), map_.voxel_min_corner(v.array() + 1));
          const Vec3 q = state_.position.cwiseMax(box.min).cwiseMin(box.max);
          if ((q - state_.position).squaredNorm() > clear * clear) continue;
          if (!world.box_free(box)) continue;
          map_.apply_log_odds(v, map_.clamp().min, frame);
          cleared.push_back(v);
        }
      }
    }
    map_.up_propagate();
    update_frontiers(map_, frontiers_, cleared);
  }
  integrate_frame();
}

void Explorer::integrate_frame() {
  const ExplorationConfig& config = scenario_.config;
  const CameraPose pose{state_.position, state_.yaw, config.mav.mount_pitch};
  Rng* noise = config.mav.depth_noise_sigma > 0.0 ? &noise_rng_ : nullptr;
  const DepthImage image = render_depth(scenario_.world, pose, config.mav, noise);
  const auto updated = integrate_depth(map_, pose, image, config.sensor);
  update_frontiers(map_, frontiers_, updated);
  ++frames_;
}

IterationResult Explorer::plan(bool keep_sweeps) {
  return plan_iteration(map_, frontiers_, state_, scenario_.world.bounds, scenario_.config, rng_,
                        guards_, keep_sweeps);
}

void Explorer::record_outcome(const CandidateView& chosen, std::size_t newly_observed) {
  guards_.allow_current_pose = !chosen.candidate.is_current_pose();
  if (chosen.candidate.is_current_pose()) return;
  if (newly_observed >= static_cast<std::size_t>(scenario_.config.min_frontier_voxels)) return;
  const MortonCode code = *chosen.candidate.source_block;
  if (++strikes_[code] < scenario_.config.block_strikes) return;
  auto& excluded = guards_.excluded_blocks;
  const auto at = std::lower_bound(excluded.begin(), excluded.end(), code);
  if (at == excluded.end() || *at != code) excluded.insert(at, code);
}

bool Explorer::execute(const Path& path) {
  const ExplorationConfig& config = scenario_.config;
  if (path.waypoints.empty()) throw std::invalid_argument("execute: empty path");
  const std::size_t n = path.waypoints.size();
  const double period = 1.0 / config.sensor_rate_hz;
  auto yaw_at = [&](std::size_t i) { return path.has_yaws() ? wrap_2pi(path.yaws[i]) : state_.yaw; };

  std::size_t target = n == 1 ? 0 : 1;
  bool arrived = false;
  auto advance = [&] {
    while (!arrived && state_.position == path.waypoints[target] && state_.yaw == yaw_at(target)) {
      if (++target == n) arrived = true;
    }
  };

  while (true) {
    advance();
    if (!arrived) {
      state_ = step_mav(state_, path.waypoints[target], yaw_at(target), config.control_dt,
                        config.mav);
    }
    ++steps_;
    if (!collision_free_point(map_, state_.position, config.mav.safety_radius)) {
      ++safety_violations_;
    }
    advance();
    if (sim_time() + 1e-9 >= static_cast<double>(frames_) * period) {
      integrate_frame();
      if (arrived) return true;
    }
    if (sim_time() > config.max_sim_time) return false;
  }
}

RunResult Explorer::run(const RunOptions& options) {
  using Clock = std::chrono::steady_clock;
  const auto started = Clock::now();
  auto elapsed_s = [&] { return std::chrono::duration<double>(Clock::now() - started).count(); };

  RunResult out;
  int iteration = 0;
  while (true) {
    if (options.wall_timeout_s > 0.0 && elapsed_s() > options.wall_timeout_s) {
      out.status = RunStatus::kTimeout;
      break;
    }
    const auto plan_start = Clock::now();
    IterationResult it = plan(options.dump_entropy_images);
    const double plan_ms =
        std::chrono::duration<double, std::milli>(Clock::now() - plan_start).count();
    out.metrics.samples.push_back(
        {sim_time(), explored_volume(map_), frontiers_.size(), iteration, plan_ms});
    if (options.dump_entropy_images) {
      for (std::size_t c = 0; c < it.evaluated.size(); ++c) {
        const auto& sweep = it.evaluated[c].sweep;
        if (!sweep) continue;
        char stem[64];
        std::snprintf(stem, sizeof(stem), "/iter%04d_cand%02zu", iteration, c);
        write_entropy_pgm(sweep->entropy, options.dump_dir + stem + "_entropy.pgm");
        write_depth_pgm(sweep->depth, config().mav.max_range, options.dump_dir + stem + "_depth.pgm");
      }
    }
    if (options.on_iteration) options.on_iteration(iteration, it);
    ++iteration;
    if (it.complete) {
      out.status = RunStatus::kComplete;
      out.retry_guard_fired = it.retry_guard_fired;
      break;
    }
    out.executed_paths.push_back(it.chosen->path);
    const std::size_t observed_before = map_.observed_count();
    const bool within_limit = execute(it.chosen->path);
    record_outcome(*it.chosen, map_.observed_count() - observed_before);
    if (!within_limit) {
      out.status = RunStatus::kSimTimeLimit;
      break;
    }
  }
  out.iterations = iteration;
  out.sim_time = sim_time();
  out.safety_violations = safety_violations_;
  out.excluded_blocks = guards_.excluded_blocks.size();
  return out;
}

}  // namespace frontex
