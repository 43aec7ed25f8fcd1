#include "frontex/integration.hpp"

#include "frontex/voxel_traversal.hpp"

#include <algorithm>
#include <iterator>
#include <stdexcept>

namespace frontex {

namespace {

const VoxelCoord kFaceOffsets[6] = {{1, 0, 0},  {-1, 0, 0}, {0, 1, 0},
                                    {0, -1, 0}, {0, 0, 1},  {0, 0, -1}};

// Returns are pushed this far (in voxels) past the measured range so the hit
// voxel is the one behind the surface even when the surface lies exactly on
// a voxel face.
constexpr double kHitNudgeVoxels = 1e-3;

}  // namespace

void SensorModel::validate() const {
  if (!(l_hit > 0.0f)) throw std::invalid_argument("sensor model: l_hit must be positive");
  if (!(l_miss < 0.0f)) throw std::invalid_argument("sensor model: l_miss must be negative");
}

std::vector<VoxelCoord> integrate_depth(OccupancyOctree& map, const CameraPose& pose,
                                        const DepthImage& image, const SensorModel& model) {
  std::vector<VoxelCoord> updated;
  if (image.width <= 0 || image.height <= 0) return updated;
  const std::uint32_t frame = map.begin_frame();
  const double nudge = kHitNudgeVoxels * map.resolution();

  auto update = [&](const VoxelCoord& v, float delta) {
    if (map.last_update(v) != frame) updated.push_back(v);
    map.apply_log_odds(v, delta, frame);
  };

  for (int row = 0; row < image.height; ++row) {
    for (int col = 0; col < image.width; ++col) {
      const float depth = image.at(col, row);
      const bool hit = DepthImage::valid(depth);
      const double t_end = hit ? std::min<double>(depth, image.max_range) + nudge : image.max_range;
      const Vec3 dir = pixel_direction(image, col, row, pose);
      traverse_voxels(map.origin(), map.resolution(), pose.position, dir, t_end,
                      [&](const VoxelCoord& v, double, double t_exit) {
                        if (!map.in_bounds(v)) return false;
                        update(v, hit && t_exit >= t_end ? model.l_hit : model.l_miss);
                        return true;
                      });
    }
  }
  map.up_propagate();
  return updated;
}

bool is_frontier(const OccupancyOctree& map, const VoxelCoord& v) {
  const VoxelBlock* block = map.find_block_of(v);
  if (block == nullptr) return false;
  const int idx = OccupancyOctree::voxel_index_of(v);
  if (!block->observed[idx] || !(block->log_odds[idx] < 0.0f)) return false;
  for (const auto& f : kFaceOffsets) {
    const VoxelCoord n = v + f;
    // Neighbours inside the same block skip the map lookup.
    const VoxelCoord local = n - block->coords * VoxelBlock::kSide;
    if ((local.array() >= 0).all() && (local.array() < VoxelBlock::kSide).all()) {
      if (!block->observed[VoxelBlock::index(local.x(), local.y(), local.z())]) return true;
    } else if (!map.is_observed(n)) {
      return true;
    }
  }
  return false;
}

bool FrontierList::contains(MortonCode code) const {
  return std::binary_search(codes_.begin(), codes_.end(), code);
}

void FrontierList::apply(std::vector<MortonCode> added, std::vector<MortonCode> removed) {
  if (added.empty() && removed.empty()) return;
  std::sort(added.begin(), added.end());
  added.erase(std::unique(added.begin(), added.end()), added.end());
  std::sort(removed.begin(), removed.end());
  std::vector<MortonCode> kept;
  kept.reserve(codes_.size());
  std::set_difference(codes_.begin(), codes_.end(), removed.begin(), removed.end(),
                      std::back_inserter(kept));
  codes_.clear();
  std::set_union(kept.begin(), kept.end(), added.begin(), added.end(), std::back_inserter(codes_));
}

void update_frontiers(OccupancyOctree& map, FrontierList& frontiers,
                      std::span<const VoxelCoord> updated) {
  std::vector<MortonCode> changed;
  auto reevaluate = [&](const VoxelCoord& v) {
    VoxelBlock* block = map.find_block_of(v);
    if (block == nullptr) return;  // unallocated voxels are unobserved, never frontiers
    if (block->set_frontier(OccupancyOctree::voxel_index_of(v), is_frontier(map, v))) {
      changed.push_back(block->code);
    }
  };
  for (const auto& v : updated) {
    reevaluate(v);
    for (const auto& f : kFaceOffsets) reevaluate(v + f);
  }

  std::sort(changed.begin(), changed.end());
  changed.erase(std::unique(changed.begin(), changed.end()), changed.end());
  std::vector<MortonCode> added;
  std::vector<MortonCode> removed;
  for (const MortonCode code : changed) {
    VoxelBlock* block = map.find_block(code);
    const bool want = block->frontier_count > 0;
    if (want == block->in_frontier_list) continue;
    block->in_frontier_list = want;
    (want ? added : removed).push_back(code);
  }
  frontiers.apply(std::move(added), std::move(removed));
}

double explored_volume(const OccupancyOctree& map) {
  const double r = map.resolution();
  return static_cast<double>(map.observed_count()) * r * r * r;
}

}  // namespace frontex
