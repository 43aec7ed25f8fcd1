#pragma once

#include "frontex/camera.hpp"
#include "frontex/rng.hpp"
#include "frontex/types.hpp"

#include <optional>
#include <vector>

namespace frontex {

/// Ground-truth environment: everything outside `bounds` is solid, plus a
/// list of solid axis-aligned boxes.
struct WorldModel {
  Aabb bounds;
  std::vector<Aabb> obstacles;

  /// True if p is strictly inside the bounds and not inside any obstacle.
  bool point_free(const Vec3& p) const;
  /// True if the open box (lo, hi) touches no solid.
  bool box_free(const Aabb& box) const;
  /// Euclidean distance from p to the nearest solid (0 inside solids).
  double clearance(const Vec3& p) const;
};

struct MavConfig {
  double v_max = 1.5;          // m/s
  double w_max = 0.75;         // rad/s
  double safety_radius = 0.5;  // m
  double mount_pitch = -15.0 * std::numbers::pi / 180.0;  // rad, negative looks down
  double fov_h = 90.0 * std::numbers::pi / 180.0;
  double fov_v = 60.0 * std::numbers::pi / 180.0;
  double max_range = 5.0;  // m
  int image_width = 64;
  int image_height = 48;
  double depth_noise_sigma = 0.0;  // m

  /// Throws std::invalid_argument naming the first bad field.
  void validate() const;
};

/// Nearest positive intersection of the ray with any obstacle or bounds
/// face, or nullopt if there is none within max_range. A ray starting inside
/// an obstacle (or outside the bounds) hits at distance 0.
std::optional<double> ray_intersect(const WorldModel& world, const Vec3& origin, const Vec3& dir,
                                    double max_range);

/// Pinhole range image from `pose`. When `noise` is given and the config has
/// a positive sigma, valid ranges get zero-mean Gaussian noise.
DepthImage render_depth(const WorldModel& world, const CameraPose& pose, const MavConfig& config,
                        Rng* noise = nullptr);

/// First-order kinematic step: moves at most v_max*dt toward the target and
/// rotates at most w_max*dt along the shorter arc, clamping at the target.
MavState step_mav(const MavState& state, const Vec3& target, double target_yaw, double dt,
                  const MavConfig& config);

/// Observable portion of the world on a grid of resolution r anchored one
/// cell below bounds.min (the same grid the map uses): free cells reached by
/// 6-connected flood fill from the start cell, plus the solid shell cells
/// face-adjacent to them.
struct ObservableVolume {
  double free_m3 = 0.0;
  double shell_m3 = 0.0;
  std::size_t free_cells = 0;
  std::size_t shell_cells = 0;
  /// Cell coordinates; cell (i, j, k) is voxel (i, j, k) of a map built
  /// with OccupancyOctree::covering(bounds, resolution).
  std::vector<VoxelCoord> free_list;
  std::vector<VoxelCoord> shell_list;
  double total_m3() const { return free_m3 + shell_m3; }
};

/// Throws std::invalid_argument when the start cell is not free.
ObservableVolume observable_volume(const WorldModel& world, const Vec3& start, double resolution);

}  // namespace frontex
