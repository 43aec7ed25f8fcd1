#pragma once

#include "frontex/camera.hpp"
#include "frontex/octree.hpp"
#include "frontex/planning.hpp"

#include <optional>
#include <string>
#include <vector>

namespace frontex {

/// Binary Shannon entropy in nats, with 0 ln 0 = 0.
double voxel_entropy(double p);

struct RayEntropy {
  double entropy = 0.0;         // nats
  std::optional<double> hit;    // entry distance of the first occupied voxel
};

/// Sums voxel entropy along the ray until the first voxel with p > 0.5 (not
/// included) or until max_range. Stops at the map edge. Returns zero entropy
/// when the origin lies outside the map.
RayEntropy ray_entropy(const OccupancyOctree& map, const Vec3& origin, const Vec3& dir,
                       double max_range);

/// Angular grid for the 360 degree sweep. Column j looks along yaw
/// j * 2pi / columns; rows sample pitch over fov_v centred on mount_pitch.
struct RaycastParams {
  int columns = 96;
  int rows = 8;
  double fov_v = 60.0 * std::numbers::pi / 180.0;
  double mount_pitch = 0.0;
  double max_range = 5.0;

  double yaw_step() const { return kTwoPi / columns; }
  double pitch_of_row(int row) const {
    const double step = fov_v / rows;
    return mount_pitch + 0.5 * fov_v - (row + 0.5) * step;
  }
  void validate() const;
};

/// Per-ray values on the columns x rows grid, row-major.
struct EntropyImage {
  int columns = 0;
  int rows = 0;
  std::vector<double> values;

  double at(int col, int row) const { return values[static_cast<std::size_t>(row) * columns + col]; }
  double& at(int col, int row) { return values[static_cast<std::size_t>(row) * columns + col]; }
  double column_sum(int col) const;
  double yaw_step() const { return kTwoPi / columns; }
};

/// Hit distances on the same grid; nullopt where the ray found nothing.
struct DepthImage360 {
  int columns = 0;
  int rows = 0;
  std::vector<std::optional<double>> depths;

  const std::optional<double>& at(int col, int row) const {
    return depths[static_cast<std::size_t>(row) * columns + col];
  }
};

struct Raycast360 {
  EntropyImage entropy;
  DepthImage360 depth;
};

Raycast360 raycast_entropy_360(const OccupancyOctree& map, const Vec3& position,
                               const RaycastParams& params);

/// Number of columns covered by a horizontal field of view.
int window_columns(double fov_h, int columns);

struct YawChoice {
  double yaw = 0.0;
  double gain = 0.0;  // nats
  int column = 0;
};

/// Circular sliding window of window_columns(fov_h) column sums; the window
/// for column j spans offsets -w/2 .. w-1-w/2. Ties go to the smallest j.
YawChoice optimal_yaw(const EntropyImage& image, double fov_h);

inline constexpr double kMinTravelTime = 0.1;  // s

/// max(length / v_max, |yaw change| / w_max), floored at `min_time`.
double travel_time(const Path& path, double yaw_start, double yaw_end, double v_max,
                   double w_max, double min_time = kMinTravelTime);

/// Entropy gain per second. Throws std::invalid_argument when time <= 0.
double utility(double gain, double time);

/// Sets the first and last yaw and runs a sweep at every interior waypoint
/// to pick its yaw.
Path assign_intermediate_yaws(const OccupancyOctree& map, const Path& path, double yaw_start,
                              double yaw_end, const RaycastParams& params, double fov_h);

/// Writes the entropy and depth images as 8-bit ASCII graymaps (P2), scaled
/// to [0, 255]. Invalid depths are black.
void write_entropy_pgm(const EntropyImage& image, const std::string& path);
void write_depth_pgm(const DepthImage360& image, double max_range, const std::string& path);

}  // namespace frontex
