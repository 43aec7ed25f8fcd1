#pragma once

#include "frontex/types.hpp"

#include <cmath>
#include <limits>

namespace frontex {

/// Exact voxel stepping (Amanatides & Woo) along origin + t * dir for
/// t in [0, t_max), t in meters. `dir` must be unit length. The grid is
/// anchored at `grid_origin` with cubic cells of side `resolution`.
///
/// Calls visit(voxel, t_enter, t_exit) for each voxel the ray passes through
/// with positive length (above 1e-9 * resolution), in order; visiting stops early when the visitor
/// returns false. Returns false iff the visitor stopped the walk.
template <class Visitor>
bool traverse_voxels(const Vec3& grid_origin, double resolution, const Vec3& origin,
                     const Vec3& dir, double t_max, Visitor&& visit) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const Vec3 g = (origin - grid_origin) / resolution;
  VoxelCoord voxel(static_cast<int>(std::floor(g.x())), static_cast<int>(std::floor(g.y())),
                   static_cast<int>(std::floor(g.z())));
  int step[3];
  double t_next[3];
  double t_delta[3];
  for (int a = 0; a < 3; ++a) {
    if (dir[a] > 0.0) {
      step[a] = 1;
      t_delta[a] = resolution / dir[a];
      t_next[a] = (voxel[a] + 1 - g[a]) * resolution / dir[a];
    } else if (dir[a] < 0.0) {
      step[a] = -1;
      t_delta[a] = -resolution / dir[a];
      t_next[a] = (g[a] - voxel[a]) * resolution / -dir[a];
    } else {
      step[a] = 0;
      t_delta[a] = kInf;
      t_next[a] = kInf;
    }
  }
  // Crossings shorter than this are rounding artefacts of the accumulated
  // boundary distances, e.g. a ray ending exactly on a voxel face.
  const double eps = 1e-9 * resolution;
  double t_enter = 0.0;
  while (t_enter < t_max - eps) {
    int axis = 0;
    if (t_next[1] < t_next[axis]) axis = 1;
    if (t_next[2] < t_next[axis]) axis = 2;
    const double t_exit = std::min(t_next[axis], t_max);
    if (t_exit > t_enter + eps && !visit(static_cast<const VoxelCoord&>(voxel), t_enter, t_exit)) {
      return false;
    }
    if (t_next[axis] == kInf) break;
    voxel[axis] += step[axis];
    t_enter = std::max(t_enter, t_next[axis]);
    t_next[axis] += t_delta[axis];
  }
  return true;
}

}  // namespace frontex
