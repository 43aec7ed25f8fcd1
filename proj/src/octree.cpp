#include "frontex/octree.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace frontex {

namespace {

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

// Axis-aligned box as an all_below shape.
struct BoxShape {
  Aabb box;
  Aabb bounds() const { return box; }
  bool intersects(const Vec3& lo, const Vec3& hi) const {
    return (lo.array() <= box.max.array()).all() && (box.min.array() <= hi.array()).all();
  }
};

}  // namespace

OccupancyOctree::OccupancyOctree(double resolution, int map_dim, const Vec3& origin,
                                 LogOddsClamp clamp)
    : resolution_(resolution), map_dim_(map_dim), origin_(origin), clamp_(clamp) {
  if (!(resolution > 0.0)) throw std::invalid_argument("map resolution must be positive");
  if (!is_power_of_two(map_dim) || map_dim < VoxelBlock::kSide || map_dim > kMaxMapDim) {
    throw std::invalid_argument("map_dim must be a power of two in [8, " +
                                std::to_string(kMaxMapDim) + "], got " +
                                std::to_string(map_dim));
  }
  if (!(clamp.min < 0.0f && clamp.max > 0.0f)) {
    throw std::invalid_argument("log-odds clamp must straddle zero");
  }
  blocks_per_side_ = map_dim / VoxelBlock::kSide;
  levels_ = 0;
  while ((1 << levels_) < blocks_per_side_) ++levels_;
  const auto block_total = static_cast<std::size_t>(blocks_per_side_) * blocks_per_side_ *
                           blocks_per_side_;
  block_slot_.assign(block_total, -1);
  node_max_.resize(levels_ + 1);
  for (int level = 0; level <= levels_; ++level) {
    node_max_[level].assign(block_total >> (3 * level), 0.0f);
  }
}

OccupancyOctree OccupancyOctree::covering(const Aabb& bounds, double resolution,
                                          int pad_voxels, LogOddsClamp clamp) {
  if (!bounds.valid()) throw std::invalid_argument("covering: degenerate bounds");
  const Vec3 extent = bounds.extent();
  const double longest = extent.maxCoeff();
  const int needed = static_cast<int>(std::ceil(longest / resolution - 1e-9)) + 2 * pad_voxels;
  int dim = VoxelBlock::kSide;
  while (dim < needed) dim *= 2;
  const Vec3 origin = bounds.min - Vec3::Constant(pad_voxels * resolution);
  return OccupancyOctree(resolution, dim, origin, clamp);
}

const VoxelBlock* OccupancyOctree::find_block_of(const VoxelCoord& v) const {
  if (!in_bounds(v)) return nullptr;
  return find_block(block_code_of(v));
}

VoxelBlock* OccupancyOctree::find_block_of(const VoxelCoord& v) {
  if (!in_bounds(v)) return nullptr;
  return find_block(block_code_of(v));
}

VoxelBlock& OccupancyOctree::ensure_block(const VoxelCoord& block_coords) {
  const MortonCode code = morton_encode_unchecked(static_cast<std::uint32_t>(block_coords.x()),
                                                  static_cast<std::uint32_t>(block_coords.y()),
                                                  static_cast<std::uint32_t>(block_coords.z()));
  auto& slot = block_slot_[code];
  if (slot < 0) {
    slot = static_cast<std::int32_t>(blocks_.size());
    VoxelBlock& b = blocks_.emplace_back();
    b.coords = block_coords;
    b.code = code;
  }
  return blocks_[slot];
}

double OccupancyOctree::occupancy(const VoxelCoord& v) const {
  const VoxelBlock* b = find_block_of(v);
  return b == nullptr ? 0.5 : b->occupancy(voxel_index_of(v));
}

bool OccupancyOctree::is_observed(const VoxelCoord& v) const {
  const VoxelBlock* b = find_block_of(v);
  return b != nullptr && b->observed[voxel_index_of(v)];
}

float OccupancyOctree::log_odds(const VoxelCoord& v) const {
  const VoxelBlock* b = find_block_of(v);
  return b == nullptr ? 0.0f : b->propagated_log_odds(voxel_index_of(v));
}

std::uint32_t OccupancyOctree::last_update(const VoxelCoord& v) const {
  const VoxelBlock* b = find_block_of(v);
  return b == nullptr ? 0u : b->last_update[voxel_index_of(v)];
}

double OccupancyOctree::apply_log_odds(const VoxelCoord& v, float delta, std::uint32_t frame) {
  if (!in_bounds(v)) {
    throw std::out_of_range("apply_log_odds: voxel outside map");
  }
  VoxelBlock& b = ensure_block({v.x() >> 3, v.y() >> 3, v.z() >> 3});
  const int idx = voxel_index_of(v);
  if (!b.observed[idx]) {
    b.observed[idx] = true;
    b.log_odds[idx] = 0.0f;
    ++observed_count_;
  }
  const float l = std::clamp(b.log_odds[idx] + delta, clamp_.min, clamp_.max);
  b.log_odds[idx] = l;
  b.last_update[idx] = frame;
  if (!b.dirty) {
    b.dirty = true;
    dirty_.push_back(b.code);
  }
  if (l < 0.0f) {
    if (!has_free_) {
      free_min_ = free_max_ = v;
      has_free_ = true;
    } else {
      free_min_ = free_min_.cwiseMin(v);
      free_max_ = free_max_.cwiseMax(v);
    }
  }
  return logodds_to_probability(l);
}

void OccupancyOctree::recompute_block_max(VoxelBlock& block) {
  float m = block.observed.all() ? clamp_.min : 0.0f;
  for (int i = 0; i < VoxelBlock::kVolume; ++i) {
    if (block.observed[i]) m = std::max(m, block.log_odds[i]);
  }
  node_max_[0][block.code] = m;
  block.dirty = false;
}

void OccupancyOctree::up_propagate() {
  std::vector<MortonCode> dirty;
  dirty.swap(dirty_);
  up_propagate(dirty);
}

void OccupancyOctree::up_propagate(std::span<const MortonCode> dirty_blocks) {
  std::vector<MortonCode> current;
  current.reserve(dirty_blocks.size());
  for (const MortonCode code : dirty_blocks) {
    VoxelBlock* b = find_block(code);
    if (b == nullptr) continue;
    recompute_block_max(*b);
    current.push_back(code >> 3);
  }
  // Blocks passed explicitly may still sit in the pending list.
  std::erase_if(dirty_, [this](MortonCode c) { return !blocks_[block_slot_[c]].dirty; });

  for (int level = 1; level <= levels_; ++level) {
    std::sort(current.begin(), current.end());
    current.erase(std::unique(current.begin(), current.end()), current.end());
    auto& parents = node_max_[level];
    const auto& children = node_max_[level - 1];
    for (MortonCode& code : current) {
      const MortonCode first = code << 3;
      float m = children[first];
      for (MortonCode i = 1; i < 8; ++i) m = std::max(m, children[first + i]);
      parents[code] = m;
      code >>= 3;
    }
  }
}

bool OccupancyOctree::query_free(const Aabb& region, double threshold) const {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw std::invalid_argument("query_free: threshold must be in (0, 1)");
  }
  return all_below(BoxShape{region}, static_cast<float>(probability_to_logodds(threshold)));
}

}  // namespace frontex
