#pragma once

#include "frontex/types.hpp"

#include <cmath>
#include <vector>

namespace frontex {

/// Range image from a pinhole depth camera. Depths are ranges along each
/// pixel ray in meters; kInvalidDepth marks "no return within max_range".
struct DepthImage {
  static constexpr float kInvalidDepth = 0.0f;

  int width = 0;
  int height = 0;
  double fov_h = 0.0;  // rad
  double fov_v = 0.0;  // rad
  double max_range = 0.0;
  std::vector<float> depths;  // row-major, width * height

  DepthImage() = default;
  DepthImage(int w, int h, double fh, double fv, double range)
      : width(w), height(h), fov_h(fh), fov_v(fv), max_range(range),
        depths(static_cast<std::size_t>(w) * h, kInvalidDepth) {}

  float& at(int u, int v) { return depths[static_cast<std::size_t>(v) * width + u]; }
  float at(int u, int v) const { return depths[static_cast<std::size_t>(v) * width + u]; }
  static bool valid(float d) { return d > 0.0f && std::isfinite(d); }
};

/// Camera placement: vehicle position and yaw plus the fixed mount pitch
/// (positive pitches the optical axis upward).
struct CameraPose {
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;
  double pitch = 0.0;
};

/// Unit direction of a (yaw, pitch) pair in the world frame, z up.
inline Vec3 direction_from_angles(double yaw, double pitch) {
  const double cp = std::cos(pitch);
  return {cp * std::cos(yaw), cp * std::sin(yaw), std::sin(pitch)};
}

/// World-frame unit ray through the centre of pixel (u, v). Column 0 is the
/// camera's left edge, row 0 the top edge.
inline Vec3 pixel_direction(int width, int height, double fov_h, double fov_v, int u, int v,
                            const CameraPose& pose) {
  const double fx = 0.5 * width / std::tan(0.5 * fov_h);
  const double fy = 0.5 * height / std::tan(0.5 * fov_v);
  // Camera body frame: x forward, y left, z up.
  const double left = (0.5 * width - (u + 0.5)) / fx;
  const double up = (0.5 * height - (v + 0.5)) / fy;
  Vec3 d(1.0, left, up);
  d.normalize();
  // Pitch about the body y axis (positive = nose up), then yaw about z.
  const double cp = std::cos(pose.pitch), sp = std::sin(pose.pitch);
  const Vec3 pitched(cp * d.x() - sp * d.z(), d.y(), sp * d.x() + cp * d.z());
  const double cy = std::cos(pose.yaw), sy = std::sin(pose.yaw);
  return {cy * pitched.x() - sy * pitched.y(), sy * pitched.x() + cy * pitched.y(), pitched.z()};
}

inline Vec3 pixel_direction(const DepthImage& img, int u, int v, const CameraPose& pose) {
  return pixel_direction(img.width, img.height, img.fov_h, img.fov_v, u, v, pose);
}

}  // namespace frontex
