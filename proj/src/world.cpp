#include "frontex/world.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>
#include <string>

namespace frontex {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Slab test; returns entry distance along the ray, or +inf on a miss.
double ray_box_entry(const Vec3& o, const Vec3& d, const Aabb& box) {
  double t_near = -kInf;
  double t_far = kInf;
  for (int a = 0; a < 3; ++a) {
    if (d[a] == 0.0) {
      if (o[a] < box.min[a] || o[a] > box.max[a]) return kInf;
      continue;
    }
    double t0 = (box.min[a] - o[a]) / d[a];
    double t1 = (box.max[a] - o[a]) / d[a];
    if (t0 > t1) std::swap(t0, t1);
    t_near = std::max(t_near, t0);
    t_far = std::min(t_far, t1);
    if (t_near > t_far) return kInf;
  }
  if (t_far < 0.0) return kInf;
  return std::max(t_near, 0.0);
}

}  // namespace

bool WorldModel::point_free(const Vec3& p) const {
  if (!bounds.contains_strict(p)) return false;
  for (const auto& box : obstacles) {
    if (box.contains(p)) return false;
  }
  return true;
}

bool WorldModel::box_free(const Aabb& box) const {
  constexpr double kEps = 1e-9;
  if ((box.min.array() < bounds.min.array() - kEps).any() ||
      (box.max.array() > bounds.max.array() + kEps).any()) {
    return false;
  }
  for (const auto& o : obstacles) {
    if (box.overlaps_open(o)) return false;
  }
  return true;
}

double WorldModel::clearance(const Vec3& p) const {
  if (!bounds.contains(p)) return 0.0;
  double best = std::min((p - bounds.min).minCoeff(), (bounds.max - p).minCoeff());
  for (const auto& o : obstacles) {
    const Vec3 q = p.cwiseMax(o.min).cwiseMin(o.max);
    best = std::min(best, (p - q).norm());
  }
  return best;
}

void MavConfig::validate() const {
  auto require = [](bool ok, const char* field) {
    if (!ok) throw std::invalid_argument(std::string("invalid MAV config: ") + field);
  };
  require(v_max > 0.0, "v_max");
  require(w_max > 0.0, "w_max");
  require(safety_radius > 0.0, "safety_radius");
  require(fov_h > 0.0 && fov_h < std::numbers::pi, "fov_h");
  require(fov_v > 0.0 && fov_v < std::numbers::pi, "fov_v");
  require(max_range > 0.0, "d_max");
  require(image_width > 0, "image_width");
  require(image_height > 0, "image_height");
  require(depth_noise_sigma >= 0.0, "depth_noise_sigma");
}

std::optional<double> ray_intersect(const WorldModel& world, const Vec3& origin, const Vec3& dir,
                                    double max_range) {
  if (!world.bounds.contains_strict(origin)) return 0.0;
  double best = kInf;
  for (int a = 0; a < 3; ++a) {
    if (dir[a] > 0.0) {
      best = std::min(best, (world.bounds.max[a] - origin[a]) / dir[a]);
    } else if (dir[a] < 0.0) {
      best = std::min(best, (world.bounds.min[a] - origin[a]) / dir[a]);
    }
  }
  for (const auto& box : world.obstacles) {
    if (box.contains_strict(origin)) return 0.0;
    best = std::min(best, ray_box_entry(origin, dir, box));
  }
  if (best > max_range) return std::nullopt;
  return best;
}

DepthImage render_depth(const WorldModel& world, const CameraPose& pose, const MavConfig& config,
                        Rng* noise) {
  DepthImage img(config.image_width, config.image_height, config.fov_h, config.fov_v,
                 config.max_range);
  const bool noisy = noise != nullptr && config.depth_noise_sigma > 0.0;
  for (int v = 0; v < img.height; ++v) {
    for (int u = 0; u < img.width; ++u) {
      const Vec3 dir = pixel_direction(img, u, v, pose);
      const auto hit = ray_intersect(world, pose.position, dir, config.max_range);
      if (!hit || *hit <= 0.0) continue;
      double range = *hit;
      if (noisy) range += config.depth_noise_sigma * noise->normal();
      if (range > 0.0 && range <= config.max_range) img.at(u, v) = static_cast<float>(range);
    }
  }
  return img;
}

MavState step_mav(const MavState& state, const Vec3& target, double target_yaw, double dt,
                  const MavConfig& config) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_mav: dt must be positive");
  MavState next = state;
  const Vec3 delta = target - state.position;
  const double dist = delta.norm();
  const double max_move = config.v_max * dt;
  next.position = dist <= max_move ? target : Vec3(state.position + delta * (max_move / dist));

  const double turn = shortest_angle(state.yaw, target_yaw);
  const double max_turn = config.w_max * dt;
  next.yaw = std::abs(turn) <= max_turn ? wrap_2pi(target_yaw)
                                        : wrap_2pi(state.yaw + std::copysign(max_turn, turn));
  return next;
}

ObservableVolume observable_volume(const WorldModel& world, const Vec3& start, double resolution) {
  if (!(resolution > 0.0)) throw std::invalid_argument("observable_volume: bad resolution");
  const Vec3 anchor = world.bounds.min - Vec3::Constant(resolution);
  Eigen::Vector3i dims;
  for (int a = 0; a < 3; ++a) {
    dims[a] = static_cast<int>(std::ceil(world.bounds.extent()[a] / resolution - 1e-9)) + 2;
  }
  const auto total = static_cast<std::size_t>(dims.x()) * dims.y() * dims.z();
  auto linear = [&](const VoxelCoord& c) {
    return (static_cast<std::size_t>(c.z()) * dims.y() + c.y()) * dims.x() + c.x();
  };
  auto cell_box = [&](const VoxelCoord& c) {
    const Vec3 lo = anchor + c.cast<double>() * resolution;
    return Aabb(lo, lo + Vec3::Constant(resolution));
  };

  // 0 = untested, 1 = free, 2 = solid
  std::vector<std::uint8_t> kind(total, 0);
  auto classify = [&](const VoxelCoord& c) {
    auto& k = kind[linear(c)];
    if (k == 0) k = world.box_free(cell_box(c)) ? 1 : 2;
    return k;
  };

  const Vec3 g = (start - anchor) / resolution;
  const VoxelCoord s(static_cast<int>(std::floor(g.x())), static_cast<int>(std::floor(g.y())),
                     static_cast<int>(std::floor(g.z())));
  if ((s.array() < 0).any() || (s.array() >= dims.array()).any() || classify(s) != 1) {
    throw std::invalid_argument("observable_volume: start cell is not free");
  }

  std::vector<std::uint8_t> seen(total, 0);
  std::deque<VoxelCoord> queue{s};
  seen[linear(s)] = 1;
  ObservableVolume out;
  static const VoxelCoord kFaces[6] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0},
                                       {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  while (!queue.empty()) {
    const VoxelCoord c = queue.front();
    queue.pop_front();
    ++out.free_cells;
    out.free_list.push_back(c);
    for (const auto& f : kFaces) {
      const VoxelCoord n = c + f;
      if ((n.array() < 0).any() || (n.array() >= dims.array()).any()) continue;
      auto& mark = seen[linear(n)];
      if (mark) continue;
      mark = 1;
      if (classify(n) == 1) {
        queue.push_back(n);
      } else {
        ++out.shell_cells;
        out.shell_list.push_back(n);
      }
    }
  }
  const double cell = resolution * resolution * resolution;
  out.free_m3 = out.free_cells * cell;
  out.shell_m3 = out.shell_cells * cell;
  return out;
}

}  // namespace frontex
