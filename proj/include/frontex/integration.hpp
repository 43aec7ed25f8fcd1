#pragma once

#include "frontex/camera.hpp"
#include "frontex/octree.hpp"

#include <span>
#include <vector>

namespace frontex {

/// Log-odds increments applied per ray.
struct SensorModel {
  float l_hit = 0.85f;
  float l_miss = -0.4f;

  void validate() const;
};

/// Fuses one posed range image into the map. Every voxel a pixel ray passes
/// through before its return gets `l_miss`; the voxel holding the return
/// gets `l_hit`. Invalid pixels clear free space out to the image's max
/// range. Runs up-propagation once at the end.
///
/// Returns each updated voxel once, in first-touch order.
std::vector<VoxelCoord> integrate_depth(OccupancyOctree& map, const CameraPose& pose,
                                        const DepthImage& image, const SensorModel& model);

/// A free voxel (p < 0.5) with at least one unobserved face neighbour.
/// Neighbours outside the map count as unobserved.
bool is_frontier(const OccupancyOctree& map, const VoxelCoord& v);

/// Morton codes of blocks holding at least one frontier voxel, ascending.
class FrontierList {
 public:
  const std::vector<MortonCode>& codes() const { return codes_; }
  std::size_t size() const { return codes_.size(); }
  bool empty() const { return codes_.empty(); }
  bool contains(MortonCode code) const;
  auto begin() const { return codes_.begin(); }
  auto end() const { return codes_.end(); }

  /// Applies membership changes; both inputs may be unsorted.
  void apply(std::vector<MortonCode> added, std::vector<MortonCode> removed);

 private:
  std::vector<MortonCode> codes_;
};

/// Re-evaluates frontier flags of the updated voxels and their face
/// neighbours, then fixes block counts and list membership.
void update_frontiers(OccupancyOctree& map, FrontierList& frontiers,
                      std::span<const VoxelCoord> updated);

/// Observed voxel count times r^3.
double explored_volume(const OccupancyOctree& map);

}  // namespace frontex
