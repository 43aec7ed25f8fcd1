#include "frontex/evaluation.hpp"

#include "frontex/voxel_traversal.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace frontex {

double voxel_entropy(double p) {
  auto term = [](double x) { return x > 0.0 ? -x * std::log(x) : 0.0; };
  return term(p) + term(1.0 - p);
}

RayEntropy ray_entropy(const OccupancyOctree& map, const Vec3& origin, const Vec3& dir,
                       double max_range) {
  RayEntropy out;
  if (!map.in_bounds(map.voxel_of(origin))) return out;
  traverse_voxels(map.origin(), map.resolution(), origin, dir, max_range,
                  [&](const VoxelCoord& v, double t_enter, double) {
                    if (!map.in_bounds(v)) return false;
                    const double p = map.occupancy(v);
                    if (p > 0.5) {
                      out.hit = t_enter;
                      return false;
                    }
                    out.entropy += voxel_entropy(p);
                    return true;
                  });
  return out;
}

void RaycastParams::validate() const {
  if (columns < 1 || rows < 1) throw std::invalid_argument("raycast grid must be non-empty");
  if (!(fov_v > 0.0 && fov_v < std::numbers::pi)) throw std::invalid_argument("raycast fov_v");
  if (!(max_range > 0.0)) throw std::invalid_argument("raycast max_range");
}

double EntropyImage::column_sum(int col) const {
  double s = 0.0;
  for (int row = 0; row < rows; ++row) s += at(col, row);
  return s;
}

Raycast360 raycast_entropy_360(const OccupancyOctree& map, const Vec3& position,
                               const RaycastParams& params) {
  params.validate();
  Raycast360 out;
  const auto cells = static_cast<std::size_t>(params.columns) * params.rows;
  out.entropy = {params.columns, params.rows, std::vector<double>(cells, 0.0)};
  out.depth = {params.columns, params.rows, std::vector<std::optional<double>>(cells)};
  for (int row = 0; row < params.rows; ++row) {
    const double pitch = params.pitch_of_row(row);
    for (int col = 0; col < params.columns; ++col) {
      const Vec3 dir = direction_from_angles(col * params.yaw_step(), pitch);
      const RayEntropy ray = ray_entropy(map, position, dir, params.max_range);
      const std::size_t i = static_cast<std::size_t>(row) * params.columns + col;
      out.entropy.values[i] = ray.entropy;
      out.depth.depths[i] = ray.hit;
    }
  }
  return out;
}

int window_columns(double fov_h, int columns) {
  const int w = static_cast<int>(std::ceil(fov_h / (kTwoPi / columns) - 1e-9));
  return std::clamp(w, 1, columns);
}

YawChoice optimal_yaw(const EntropyImage& image, double fov_h) {
  if (!(fov_h > 0.0 && fov_h < kTwoPi)) throw std::invalid_argument("optimal_yaw: fov_h");
  const int n = image.columns;
  if (n < 1) throw std::invalid_argument("optimal_yaw: empty image");
  std::vector<double> sums(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) sums[j] = image.column_sum(j);
  const int w = window_columns(fov_h, n);
  const int half = w / 2;
  YawChoice best{0.0, -1.0, 0};
  for (int j = 0; j < n; ++j) {
    double gain = 0.0;
    for (int k = -half; k < w - half; ++k) gain += sums[((j + k) % n + n) % n];
    if (gain > best.gain) best = {j * image.yaw_step(), gain, j};
  }
  return best;
}

double travel_time(const Path& path, double yaw_start, double yaw_end, double v_max,
                   double w_max, double min_time) {
  if (!(v_max > 0.0 && w_max > 0.0)) throw std::invalid_argument("travel_time: rates");
  const double move = path.length() / v_max;
  const double turn = std::abs(shortest_angle(yaw_start, yaw_end)) / w_max;
  return std::max({move, turn, min_time});
}

double utility(double gain, double time) {
  if (!(time > 0.0)) throw std::invalid_argument("utility: time must be positive");
  return gain / time;
}

Path assign_intermediate_yaws(const OccupancyOctree& map, const Path& path, double yaw_start,
                              double yaw_end, const RaycastParams& params, double fov_h) {
  Path out = path;
  const std::size_t n = out.waypoints.size();
  out.yaws.assign(n, 0.0);
  if (n == 0) return out;
  out.yaws.front() = wrap_2pi(yaw_start);
  out.yaws.back() = wrap_2pi(yaw_end);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const Raycast360 sweep = raycast_entropy_360(map, out.waypoints[i], params);
    out.yaws[i] = optimal_yaw(sweep.entropy, fov_h).yaw;
  }
  return out;
}

namespace {

void write_pgm(const std::string& path, int width, int height, const std::vector<int>& pixels) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "P2\n" << width << ' ' << height << "\n255\n";
  for (int row = 0; row < height; ++row) {
    for (int col = 0; col < width; ++col) {
      f << pixels[static_cast<std::size_t>(row) * width + col] << (col + 1 < width ? ' ' : '\n');
    }
  }
  if (!f) throw std::runtime_error("write failed: " + path);
}

int to_gray(double value, double scale) {
  if (!(scale > 0.0)) return 0;
  return static_cast<int>(std::lround(std::clamp(value / scale, 0.0, 1.0) * 255.0));
}

}  // namespace

void write_entropy_pgm(const EntropyImage& image, const std::string& path) {
  const double peak = image.values.empty()
                          ? 0.0
                          : *std::max_element(image.values.begin(), image.values.end());
  std::vector<int> pixels;
  pixels.reserve(image.values.size());
  for (const double v : image.values) pixels.push_back(to_gray(v, peak));
  write_pgm(path, image.columns, image.rows, pixels);
}

void write_depth_pgm(const DepthImage360& image, double max_range, const std::string& path) {
  std::vector<int> pixels;
  pixels.reserve(image.depths.size());
  for (const auto& d : image.depths) pixels.push_back(d ? to_gray(*d, max_range) : 0);
  write_pgm(path, image.columns, image.rows, pixels);
}

}  // namespace frontex
