#pragma once

#include "frontex/integration.hpp"
#include "frontex/octree.hpp"
#include "frontex/rng.hpp"

#include <optional>
#include <vector>

namespace frontex {

struct Candidate {
  Vec3 position = Vec3::Zero();
  /// Source block, or nullopt for the current vehicle position.
  std::optional<MortonCode> source_block;
  bool is_current_pose() const { return !source_block.has_value(); }
};

/// Candidate goal positions; the current pose is always the last entry.
using CandidateSet = std::vector<Candidate>;

/// Frontier blocks with at least `min_count` frontier voxels, in Morton order.
std::vector<MortonCode> filter_frontier_blocks(const FrontierList& frontiers,
                                               const OccupancyOctree& map, int min_count);

struct SamplingOptions {
  /// Start the stride at a random index in [0, stride) instead of 0.
  bool random_phase = false;
};

/// Takes every ceil(N_rem / n_candidates)-th block of `filtered`, picks one of
/// its frontier voxels uniformly at random and uses the voxel centre as a
/// candidate. The current position is appended last.
CandidateSet sample_candidates(std::span<const MortonCode> filtered, const OccupancyOctree& map,
                               int n_candidates, const MavState& current, Rng& rng,
                               SamplingOptions options = {});

}  // namespace frontex
