#include "frontex/octree.hpp"
#include "frontex/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace frontex;

namespace {

OccupancyOctree small_map(int dim = 16, double r = 0.1) {
  return OccupancyOctree(r, dim, Vec3::Zero());
}

void fill(OccupancyOctree& map, const VoxelCoord& lo, const VoxelCoord& hi, float l) {
  for (int z = lo.z(); z <= hi.z(); ++z) {
    for (int y = lo.y(); y <= hi.y(); ++y) {
      for (int x = lo.x(); x <= hi.x(); ++x) map.apply_log_odds({x, y, z}, l);
    }
  }
}

// Rebuilds every cached maximum from the voxels and compares exactly.
::testing::AssertionResult audit_maxima(const OccupancyOctree& map) {
  std::vector<float> level(map.nodes_at_level(0), 0.0f);
  for (MortonCode code = 0; code < level.size(); ++code) {
    const VoxelBlock* b = map.find_block(code);
    if (b == nullptr) continue;
    float m = b->propagated_log_odds(0);
    for (int i = 1; i < VoxelBlock::kVolume; ++i) m = std::max(m, b->propagated_log_odds(i));
    level[code] = m;
  }
  for (int lv = 0; lv <= map.levels(); ++lv) {
    if (lv > 0) {
      std::vector<float> up(level.size() / 8);
      for (MortonCode c = 0; c < up.size(); ++c) {
        up[c] = *std::max_element(level.begin() + 8 * c, level.begin() + 8 * c + 8);
      }
      level.swap(up);
    }
    for (MortonCode c = 0; c < level.size(); ++c) {
      if (map.node_max_log_odds(lv, c) != level[c]) {
        return ::testing::AssertionFailure()
               << "level " << lv << " node " << c << ": cached " << map.node_max_log_odds(lv, c)
               << " expected " << level[c];
      }
    }
  }
  return ::testing::AssertionSuccess();
}

}  // namespace

TEST(Octree, FreshMapReadsHalf) {
  const auto map = small_map();
  EXPECT_EQ(map.occupancy({0, 0, 0}), 0.5);
  EXPECT_EQ(map.occupancy({15, 7, 3}), 0.5);
  EXPECT_EQ(map.occupancy({-1, 0, 0}), 0.5);
  EXPECT_FALSE(map.is_observed({3, 3, 3}));
  EXPECT_EQ(map.block_count(), 0u);
}

TEST(Octree, LogOddsToProbability) {
  auto map = small_map();
  map.apply_log_odds({1, 2, 3}, 1.386f);
  map.apply_log_odds({4, 5, 6}, -1.386f);
  EXPECT_NEAR(map.occupancy({1, 2, 3}), std::exp(1.386) / (1.0 + std::exp(1.386)), 1e-6);
  EXPECT_NEAR(map.occupancy({1, 2, 3}), 0.8, 1e-3);
  EXPECT_NEAR(map.occupancy({4, 5, 6}), 0.2, 1e-3);
}

TEST(Octree, ZeroDeltaMarksObserved) {
  auto map = small_map();
  EXPECT_EQ(map.apply_log_odds({2, 2, 2}, 0.0f), 0.5);
  EXPECT_TRUE(map.is_observed({2, 2, 2}));
  EXPECT_EQ(map.occupancy({2, 2, 2}), 0.5);
  EXPECT_EQ(map.observed_count(), 1u);
}

TEST(Octree, RepeatedHitsSaturateAtClamp) {
  auto map = small_map();
  double p = 0.0;
  for (int i = 0; i < 50; ++i) p = map.apply_log_odds({0, 0, 0}, 0.85f);
  EXPECT_DOUBLE_EQ(p, logodds_to_probability(map.clamp().max));
  EXPECT_EQ(map.log_odds({0, 0, 0}), map.clamp().max);
  for (int i = 0; i < 50; ++i) p = map.apply_log_odds({0, 0, 0}, -0.4f);
  EXPECT_DOUBLE_EQ(p, logodds_to_probability(map.clamp().min));
}

TEST(Octree, OppositeDeltasCancel) {
  auto map = small_map();
  map.apply_log_odds({5, 5, 5}, 0.85f);
  map.apply_log_odds({5, 5, 5}, -0.85f);
  EXPECT_EQ(map.occupancy({5, 5, 5}), 0.5);
  EXPECT_TRUE(map.is_observed({5, 5, 5}));
}

TEST(Octree, ApplyOutsideMapThrows) {
  auto map = small_map();
  EXPECT_THROW(map.apply_log_odds({16, 0, 0}, 1.0f), std::out_of_range);
  EXPECT_THROW(map.apply_log_odds({0, -1, 0}, 1.0f), std::out_of_range);
}

TEST(Octree, ConstructorValidates) {
  EXPECT_THROW(OccupancyOctree(0.0, 16, Vec3::Zero()), std::invalid_argument);
  EXPECT_THROW(OccupancyOctree(0.1, 12, Vec3::Zero()), std::invalid_argument);
  EXPECT_THROW(OccupancyOctree(0.1, 4, Vec3::Zero()), std::invalid_argument);
  EXPECT_THROW(OccupancyOctree(0.1, 2048, Vec3::Zero()), std::invalid_argument);
  EXPECT_THROW(OccupancyOctree(0.1, 16, Vec3::Zero(), {1.0f, 5.0f}), std::invalid_argument);
}

TEST(Octree, CoveringSizesToPowerOfTwoWithPad) {
  const auto map = OccupancyOctree::covering(Aabb({0, 0, 0}, {10, 20, 3}), 0.1);
  EXPECT_EQ(map.map_dim(), 256);
  EXPECT_TRUE(map.origin().isApprox(Vec3::Constant(-0.1)));
  const auto exact = OccupancyOctree::covering(Aabb({0, 0, 0}, {3.0, 3.0, 3.0}), 0.5, 1);
  EXPECT_EQ(exact.map_dim(), 8);
  EXPECT_THROW(OccupancyOctree::covering(Aabb({0, 0, 0}, {1, 0, 1}), 0.1), std::invalid_argument);
}

TEST(Octree, BlockCountMatchesFrontierMask) {
  VoxelBlock b;
  EXPECT_TRUE(b.set_frontier(3, true));
  EXPECT_FALSE(b.set_frontier(3, true));
  EXPECT_TRUE(b.set_frontier(100, true));
  EXPECT_TRUE(b.set_frontier(3, false));
  EXPECT_EQ(b.frontier_count, static_cast<int>(b.frontier.count()));
  EXPECT_EQ(VoxelBlock::kSide, 8);
}

TEST(Octree, ParentOfUniformChildren) {
  auto map = small_map();
  const auto l = static_cast<float>(probability_to_logodds(0.2));
  fill(map, {0, 0, 0}, {15, 15, 15}, l);
  map.up_propagate();
  EXPECT_NEAR(map.node_max_occupancy(map.levels(), 0), 0.2, 1e-6);
  EXPECT_TRUE(audit_maxima(map));
}

TEST(Octree, ParentTakesMaxOfChildren) {
  auto map = small_map();
  fill(map, {0, 0, 0}, {15, 15, 15}, static_cast<float>(probability_to_logodds(0.2)));
  map.apply_log_odds({9, 1, 1}, static_cast<float>(probability_to_logodds(0.9) -
                                                   probability_to_logodds(0.2)));
  map.up_propagate();
  EXPECT_NEAR(map.node_max_occupancy(map.levels(), 0), 0.9, 1e-6);
  EXPECT_NEAR(map.node_max_occupancy(0, 0), 0.2, 1e-6);
  EXPECT_TRUE(audit_maxima(map));
}

TEST(Octree, UnknownChildrenCountAsHalf) {
  auto map = small_map();
  fill(map, {0, 0, 0}, {7, 7, 7}, static_cast<float>(probability_to_logodds(0.3)));
  map.up_propagate();
  EXPECT_NEAR(map.node_max_occupancy(0, 0), 0.3, 1e-6);
  EXPECT_EQ(map.node_max_occupancy(map.levels(), 0), 0.5);
  // A partly observed block also reads 0.5.
  map.apply_log_odds({8, 0, 0}, -2.0f);
  map.up_propagate();
  EXPECT_EQ(map.node_max_occupancy(0, OccupancyOctree::block_code_of({8, 0, 0})), 0.5);
  EXPECT_TRUE(audit_maxima(map));
}

TEST(Octree, UpPropagateWithExplicitBlocks) {
  auto map = small_map();
  fill(map, {0, 0, 0}, {7, 7, 7}, -3.0f);
  const std::vector<MortonCode> blocks{0};
  map.up_propagate(blocks);
  EXPECT_TRUE(map.dirty_blocks().empty());
  EXPECT_FLOAT_EQ(map.node_max_log_odds(0, 0), -3.0f);
}

TEST(Octree, QueryFreeShortCircuitsOnFreeNode) {
  auto map = small_map();
  fill(map, {0, 0, 0}, {15, 15, 15}, static_cast<float>(probability_to_logodds(0.2)));
  map.up_propagate();
  EXPECT_TRUE(map.query_free(Aabb({0.35, 0.35, 0.35}, {1.05, 1.05, 1.05}), 0.5));
  EXPECT_EQ(map.last_query_visits(), 1u);
}

TEST(Octree, QueryFreeSeesOccupiedVoxel) {
  auto map = small_map();
  fill(map, {0, 0, 0}, {15, 15, 15}, static_cast<float>(probability_to_logodds(0.2)));
  map.apply_log_odds({5, 5, 5}, 4.0f);
  map.up_propagate();
  EXPECT_FALSE(map.query_free(Aabb({0.41, 0.41, 0.41}, {0.69, 0.69, 0.69}), 0.5));
  EXPECT_TRUE(map.query_free(Aabb({0.05, 0.05, 0.05}, {0.45, 0.45, 0.45}), 0.5));
}

TEST(Octree, QueryFreeFailsOnUnknown) {
  auto map = small_map();
  fill(map, {0, 0, 0}, {7, 7, 7}, -3.0f);
  map.up_propagate();
  EXPECT_TRUE(map.query_free(Aabb({0.1, 0.1, 0.1}, {0.7, 0.7, 0.7}), 0.5));
  EXPECT_FALSE(map.query_free(Aabb({0.1, 0.1, 0.1}, {0.85, 0.7, 0.7}), 0.5));
  EXPECT_FALSE(map.query_free(Aabb({-0.5, 0.1, 0.1}, {0.5, 0.5, 0.5}), 0.5));
  EXPECT_THROW(map.query_free(Aabb({0.1, 0.1, 0.1}, {0.2, 0.2, 0.2}), 1.0), std::invalid_argument);
}

TEST(Octree, RandomUpdatesPassAudit) {
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    auto map = small_map(64);
    for (int i = 0; i < 3000; ++i) {
      const VoxelCoord v(static_cast<int>(rng.index(64)), static_cast<int>(rng.index(64)),
                         static_cast<int>(rng.index(64)));
      map.apply_log_odds(v, static_cast<float>(rng.uniform(-2.0, 2.0)));
      if (rng.index(200) == 0) map.up_propagate();
    }
    map.up_propagate();
    ASSERT_TRUE(audit_maxima(map));
  }
}

TEST(Octree, FreeNodeImpliesFreeDescendants) {
  Rng rng(22);
  auto map = small_map(32);
  fill(map, {0, 0, 0}, {31, 31, 15}, -1.0f);
  for (int i = 0; i < 200; ++i) {
    const VoxelCoord v(static_cast<int>(rng.index(32)), static_cast<int>(rng.index(32)),
                       static_cast<int>(rng.index(32)));
    map.apply_log_odds(v, static_cast<float>(rng.uniform(-1.0, 3.0)));
  }
  map.up_propagate();
  int checked = 0;
  for (int level = 0; level <= map.levels(); ++level) {
    for (MortonCode code = 0; code < map.nodes_at_level(level); ++code) {
      if (!(map.node_max_occupancy(level, code) < 0.5)) continue;
      const int side = VoxelBlock::kSide << level;
      const MortonCoords c = morton_decode(code);
      for (int z = 0; z < side; ++z) {
        for (int y = 0; y < side; ++y) {
          for (int x = 0; x < side; ++x) {
            const VoxelCoord v(static_cast<int>(c.x) * side + x, static_cast<int>(c.y) * side + y,
                               static_cast<int>(c.z) * side + z);
            ASSERT_LT(map.occupancy(v), 0.5);
          }
        }
      }
      ++checked;
    }
  }
  EXPECT_GT(checked, 0);
}

TEST(Octree, BlocksVisitedInMortonOrder) {
  auto map = small_map(64);
  map.apply_log_odds({60, 0, 0}, 1.0f);
  map.apply_log_odds({0, 60, 0}, 1.0f);
  map.apply_log_odds({9, 9, 9}, 1.0f);
  map.apply_log_odds({0, 0, 0}, 1.0f);
  std::vector<MortonCode> seen;
  map.for_each_block([&](const VoxelBlock& b) { seen.push_back(b.code); });
  EXPECT_TRUE(std::is_sorted(seen.begin(), seen.end()));
  EXPECT_EQ(seen.size(), 4u);
}
