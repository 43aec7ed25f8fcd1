#pragma once

#include "frontex/morton.hpp"
#include "frontex/types.hpp"

#include <array>
#include <bitset>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace frontex {

inline double logodds_to_probability(double l) { return 1.0 / (1.0 + std::exp(-l)); }
inline double probability_to_logodds(double p) { return std::log(p / (1.0 - p)); }

/// Leaf of the map: 8x8x8 voxels with log-odds occupancy and per-voxel
/// observed / frontier flags. Unobserved voxels read as probability 0.5.
struct VoxelBlock {
  static constexpr int kSide = 8;
  static constexpr int kVolume = kSide * kSide * kSide;

  VoxelCoord coords = VoxelCoord::Zero();  // in block units
  MortonCode code = 0;

  std::array<float, kVolume> log_odds{};
  std::bitset<kVolume> observed;
  std::bitset<kVolume> frontier;
  // Frame id of the most recent update of each voxel.
  std::array<std::uint32_t, kVolume> last_update{};
  int frontier_count = 0;
  bool dirty = false;
  bool in_frontier_list = false;

  static constexpr int index(int x, int y, int z) { return x + kSide * (y + kSide * z); }
  static VoxelCoord local(int idx) {
    return {idx % kSide, (idx / kSide) % kSide, idx / (kSide * kSide)};
  }

  double occupancy(int idx) const {
    return observed[idx] ? logodds_to_probability(log_odds[idx]) : 0.5;
  }
  // Value used for max propagation: unknown counts as log-odds 0.
  float propagated_log_odds(int idx) const { return observed[idx] ? log_odds[idx] : 0.0f; }

  /// Returns true when the flag changed.
  bool set_frontier(int idx, bool value) {
    if (frontier[idx] == value) return false;
    frontier[idx] = value;
    frontier_count += value ? 1 : -1;
    return true;
  }
};

struct LogOddsClamp {
  float min = -5.0f;
  float max = 5.0f;
};

/// Morton-indexed octree occupancy map. Leaves are voxel blocks allocated on
/// demand; inner nodes cache the maximum occupancy (as log-odds) of their
/// subtree, with unobserved space counted as 0.5.
///
/// Inner nodes are stored as one dense array per level indexed by the node's
/// Morton code, so the children of node c at level L are 8c..8c+7 at L-1.
/// Level 0 holds one entry per block; the root is level `levels()`.
class OccupancyOctree {
 public:
  static constexpr int kMaxMapDim = 1024;

  OccupancyOctree(double resolution, int map_dim, const Vec3& origin, LogOddsClamp clamp = {});

  /// Smallest power-of-two map covering `bounds` grown by `pad_voxels` on each
  /// side, with the grid anchored `pad_voxels` below bounds.min.
  static OccupancyOctree covering(const Aabb& bounds, double resolution, int pad_voxels = 1,
                                  LogOddsClamp clamp = {});

  double resolution() const { return resolution_; }
  int map_dim() const { return map_dim_; }
  int blocks_per_side() const { return blocks_per_side_; }
  const Vec3& origin() const { return origin_; }
  const LogOddsClamp& clamp() const { return clamp_; }
  int levels() const { return levels_; }
  Aabb world_bounds() const {
    return {origin_, origin_ + Vec3::Constant(map_dim_ * resolution_)};
  }

  bool in_bounds(const VoxelCoord& v) const {
    return (v.array() >= 0).all() && (v.array() < map_dim_).all();
  }
  VoxelCoord voxel_of(const Vec3& p) const {
    const Vec3 g = (p - origin_) / resolution_;
    return {static_cast<int>(std::floor(g.x())), static_cast<int>(std::floor(g.y())),
            static_cast<int>(std::floor(g.z()))};
  }
  Vec3 voxel_center(const VoxelCoord& v) const {
    return origin_ + (v.cast<double>().array() + 0.5).matrix() * resolution_;
  }
  Vec3 voxel_min_corner(const VoxelCoord& v) const {
    return origin_ + v.cast<double>() * resolution_;
  }

  /// Probability of occupancy; exactly 0.5 when unobserved or out of bounds.
  double occupancy(const VoxelCoord& v) const;
  bool is_observed(const VoxelCoord& v) const;
  /// Stored log-odds, or 0 when unobserved.
  float log_odds(const VoxelCoord& v) const;

  /// Fuses `delta` into the voxel, clamping to the configured bounds, marks
  /// it observed and its block dirty. `frame` is recorded as the voxel's last
  /// update. Returns the new probability. Throws std::out_of_range outside
  /// the map.
  double apply_log_odds(const VoxelCoord& v, float delta, std::uint32_t frame = 0);

  /// Frame id of the voxel's most recent update (0 if never or unallocated).
  std::uint32_t last_update(const VoxelCoord& v) const;

  /// Recomputes cached maxima for the blocks modified since the last call.
  void up_propagate();
  /// Recomputes cached maxima above the given blocks.
  void up_propagate(std::span<const MortonCode> dirty_blocks);
  const std::vector<MortonCode>& dirty_blocks() const { return dirty_; }

  /// Cached max occupancy of the node at `level` with Morton `code`.
  double node_max_occupancy(int level, MortonCode code) const {
    return logodds_to_probability(node_max_[level][code]);
  }
  float node_max_log_odds(int level, MortonCode code) const { return node_max_[level][code]; }
  std::size_t nodes_at_level(int level) const { return node_max_[level].size(); }

  /// True iff every voxel overlapping `region` has probability < threshold.
  /// Unobserved space reads 0.5; any part of the region outside the map
  /// makes the answer false.
  bool query_free(const Aabb& region, double threshold) const;

  /// Hierarchical test that every voxel intersecting `shape` has log-odds
  /// strictly below `threshold`. Shape exposes `Aabb bounds() const` and
  /// `bool intersects(const Vec3& lo, const Vec3& hi) const`.
  template <class Shape>
  bool all_below(const Shape& shape, float threshold) const;

  /// Number of nodes visited by the last all_below call (diagnostics).
  std::size_t last_query_visits() const { return last_query_visits_; }

  const VoxelBlock* find_block(MortonCode code) const {
    const auto slot = block_slot_[code];
    return slot < 0 ? nullptr : &blocks_[slot];
  }
  VoxelBlock* find_block(MortonCode code) {
    const auto slot = block_slot_[code];
    return slot < 0 ? nullptr : &blocks_[slot];
  }
  const VoxelBlock* find_block_of(const VoxelCoord& v) const;
  VoxelBlock* find_block_of(const VoxelCoord& v);
  VoxelBlock& ensure_block(const VoxelCoord& block_coords);
  std::size_t block_count() const { return blocks_.size(); }

  static MortonCode block_code_of(const VoxelCoord& v) {
    return morton_encode_unchecked(static_cast<std::uint32_t>(v.x() >> 3),
                                   static_cast<std::uint32_t>(v.y() >> 3),
                                   static_cast<std::uint32_t>(v.z() >> 3));
  }
  static int voxel_index_of(const VoxelCoord& v) {
    return VoxelBlock::index(v.x() & 7, v.y() & 7, v.z() & 7);
  }

  /// Visits allocated blocks in ascending Morton order.
  template <class F>
  void for_each_block(F&& fn) const {
    for (std::size_t code = 0; code < block_slot_.size(); ++code) {
      if (block_slot_[code] >= 0) fn(blocks_[block_slot_[code]]);
    }
  }

  std::size_t observed_count() const { return observed_count_; }

  /// Starts a new integration frame and returns its id (ids start at 1).
  std::uint32_t begin_frame() { return ++frame_counter_; }
  std::uint32_t current_frame() const { return frame_counter_; }

  /// Bounding box (voxel coords, inclusive) of voxels that were free after
  /// some update. Empty before the first free update.
  std::optional<std::pair<VoxelCoord, VoxelCoord>> free_voxel_bounds() const {
    if (!has_free_) return std::nullopt;
    return std::make_pair(free_min_, free_max_);
  }

 private:
  template <class Shape>
  bool all_below_node(const Shape& shape, float threshold, int level, MortonCode code,
                      const VoxelCoord& lo, const VoxelCoord& hi) const;
  void recompute_block_max(VoxelBlock& block);

  double resolution_;
  int map_dim_;
  int blocks_per_side_;
  int levels_;
  Vec3 origin_;
  LogOddsClamp clamp_;
  std::vector<std::int32_t> block_slot_;
  std::vector<VoxelBlock> blocks_;
  std::vector<MortonCode> dirty_;
  std::vector<std::vector<float>> node_max_;
  std::size_t observed_count_ = 0;
  std::uint32_t frame_counter_ = 0;
  bool has_free_ = false;
  VoxelCoord free_min_ = VoxelCoord::Zero();
  VoxelCoord free_max_ = VoxelCoord::Zero();
  mutable std::size_t last_query_visits_ = 0;
};

// ---------------------------------------------------------------------------

template <class Shape>
bool OccupancyOctree::all_below(const Shape& shape, float threshold) const {
  last_query_visits_ = 0;
  const Aabb b = shape.bounds();
  const VoxelCoord lo = voxel_of(b.min);
  const VoxelCoord hi = voxel_of(b.max);
  if (!in_bounds(lo) || !in_bounds(hi)) return false;
  return all_below_node(shape, threshold, levels_, 0, lo, hi);
}

template <class Shape>
bool OccupancyOctree::all_below_node(const Shape& shape, float threshold, int level,
                                     MortonCode code, const VoxelCoord& lo,
                                     const VoxelCoord& hi) const {
  ++last_query_visits_;
  const int side = VoxelBlock::kSide << level;
  const MortonCoords c = morton_decode(code);
  const VoxelCoord node_lo(static_cast<int>(c.x) * side, static_cast<int>(c.y) * side,
                           static_cast<int>(c.z) * side);
  const VoxelCoord node_hi = node_lo.array() + (side - 1);
  if ((node_hi.array() < lo.array()).any() || (node_lo.array() > hi.array()).any()) return true;
  if (node_max_[level][code] < threshold) return true;
  if (!shape.intersects(voxel_min_corner(node_lo), voxel_min_corner(node_hi.array() + 1))) {
    return true;
  }
  if (level > 0) {
    for (MortonCode child = 0; child < 8; ++child) {
      if (!all_below_node(shape, threshold, level - 1, (code << 3) | child, lo, hi)) return false;
    }
    return true;
  }
  const VoxelBlock* block = find_block(code);
  if (block == nullptr) return false;  // fully unknown block already above threshold
  const VoxelCoord a = lo.cwiseMax(node_lo);
  const VoxelCoord z = hi.cwiseMin(node_hi);
  for (int k = a.z(); k <= z.z(); ++k) {
    for (int j = a.y(); j <= z.y(); ++j) {
      for (int i = a.x(); i <= z.x(); ++i) {
        const int idx = VoxelBlock::index(i & 7, j & 7, k & 7);
        if (block->propagated_log_odds(idx) < threshold) continue;
        const VoxelCoord v(i, j, k);
        if (shape.intersects(voxel_min_corner(v), voxel_min_corner(v.array() + 1))) return false;
      }
    }
  }
  return true;
}

}  // namespace frontex
