#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <numbers>

namespace frontex {

using Vec3 = Eigen::Vector3d;
using VoxelCoord = Eigen::Vector3i;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Axis-aligned box in world coordinates (meters).
struct Aabb {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  Aabb() = default;
  Aabb(const Vec3& lo, const Vec3& hi) : min(lo), max(hi) {}

  Vec3 extent() const { return max - min; }
  Vec3 center() const { return 0.5 * (min + max); }
  double volume() const {
    const Vec3 e = extent();
    return e.x() * e.y() * e.z();
  }
  bool valid() const { return (max.array() > min.array()).all(); }

  bool contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
  // Strict interior test; touching faces does not count.
  bool contains_strict(const Vec3& p) const {
    return (p.array() > min.array()).all() && (p.array() < max.array()).all();
  }
  bool overlaps_open(const Aabb& o) const {
    return (min.array() < o.max.array()).all() && (o.min.array() < max.array()).all();
  }
  Aabb inflated(double d) const { return {min.array() - d, max.array() + d}; }
};

/// Position and yaw of the vehicle. Yaw is kept in [0, 2pi).
struct MavState {
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;
};

/// Wraps an angle into [0, 2pi).
inline double wrap_2pi(double a) {
  double w = std::fmod(a, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

/// Signed shortest rotation from `from` to `to`, in [-pi, pi).
inline double shortest_angle(double from, double to) {
  double d = std::fmod(to - from, kTwoPi);
  if (d < -std::numbers::pi) d += kTwoPi;
  if (d >= std::numbers::pi) d -= kTwoPi;
  return d;
}

}  // namespace frontex
