#pragma once

#include "frontex/octree.hpp"
#include "frontex/rng.hpp"

#include <optional>
#include <vector>

namespace frontex {

/// Waypoint sequence; yaws are either empty or one per waypoint. A single
/// waypoint means "stay here" (in-place rotation).
struct Path {
  std::vector<Vec3> waypoints;
  std::vector<double> yaws;

  double length() const;
  bool has_yaws() const { return !yaws.empty() && yaws.size() == waypoints.size(); }
  const Vec3& start() const { return waypoints.front(); }
  const Vec3& end() const { return waypoints.back(); }
};

struct PlannerConfig {
  double step = 0.5;                    // m, steering extension
  std::optional<double> goal_tolerance;  // m, defaults to the map resolution
  std::optional<double> near_tolerance;  // m, defaults to 2 * safety radius
  int max_iterations = 2000;
  int iterations_after_solution = 200;
  double rewire_radius = 1.5;  // m, cap on the shrinking RRT* radius
  int simplify_passes = 30;
  double goal_bias = 0.1;

  void validate() const;
};

/// Squared distance between segment [a, b] and the box [lo, hi].
double segment_box_distance_sq(const Vec3& a, const Vec3& b, const Vec3& lo, const Vec3& hi);

/// Every voxel touching the ball (p, radius) is known free (p < 0.5).
bool collision_free_point(const OccupancyOctree& map, const Vec3& p, double radius);

/// Every voxel touching the capsule swept by a ball of `radius` along
/// [a, b] is known free. The capsule contains the ball at every point of the
/// segment.
bool collision_free_segment(const OccupancyOctree& map, const Vec3& a, const Vec3& b,
                            double radius);

enum class PlanStatus { kReached, kTruncated, kStartInCollision, kUnreachable };

struct PlanResult {
  std::optional<Path> path;
  PlanStatus status = PlanStatus::kUnreachable;
  int iterations = 0;
  std::size_t tree_size = 0;
  bool ok() const { return path.has_value(); }
};

/// Informed RRT* from `start` toward `goal` through known free space,
/// sampling inside `limits` intersected with the map's free-space bounding box
/// (inflated by `radius`). If the goal itself cannot be reached, the path ends
/// at the tree node closest to it when that node lies within the near
/// tolerance. The result is simplified and re-verified.
PlanResult plan_path(const OccupancyOctree& map, const Vec3& start, const Vec3& goal,
                     double radius, const PlannerConfig& config, Rng& rng, const Aabb& limits);

/// Shortcut-based simplification: never lengthens the path and keeps every
/// segment collision free.
Path simplify_path(const OccupancyOctree& map, const Path& path, double radius, Rng& rng,
                   int passes = 30);

}  // namespace frontex
