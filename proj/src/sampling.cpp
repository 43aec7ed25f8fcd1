#include "frontex/sampling.hpp"

#include <stdexcept>

namespace frontex {

std::vector<MortonCode> filter_frontier_blocks(const FrontierList& frontiers,
                                               const OccupancyOctree& map, int min_count) {
  if (min_count < 1) throw std::invalid_argument("filter_frontier_blocks: min_count < 1");
  std::vector<MortonCode> out;
  for (const MortonCode code : frontiers) {
    const VoxelBlock* block = map.find_block(code);
    if (block != nullptr && block->frontier_count >= min_count) out.push_back(code);
  }
  return out;
}

CandidateSet sample_candidates(std::span<const MortonCode> filtered, const OccupancyOctree& map,
                               int n_candidates, const MavState& current, Rng& rng,
                               SamplingOptions options) {
  if (n_candidates < 1) throw std::invalid_argument("sample_candidates: n_candidates < 1");
  CandidateSet out;
  const std::size_t n_rem = filtered.size();
  if (n_rem > 0) {
    const std::size_t n_c = static_cast<std::size_t>(n_candidates);
    const std::size_t stride = (n_rem + n_c - 1) / n_c;
    const std::size_t first = options.random_phase ? rng.index(stride) : 0;
    std::vector<int> frontier_voxels;
    for (std::size_t i = first; i < n_rem; i += stride) {
      const VoxelBlock* block = map.find_block(filtered[i]);
      if (block == nullptr || block->frontier_count == 0) continue;
      frontier_voxels.clear();
      for (int idx = 0; idx < VoxelBlock::kVolume; ++idx) {
        if (block->frontier[idx]) frontier_voxels.push_back(idx);
      }
      const int pick = frontier_voxels[rng.index(frontier_voxels.size())];
      const VoxelCoord v = block->coords * VoxelBlock::kSide + VoxelBlock::local(pick);
      out.push_back({map.voxel_center(v), block->code});
    }
  }
  out.push_back({current.position, std::nullopt});
  return out;
}

}  // namespace frontex
