#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "stereoscan/core/types.hpp"
#include "stereoscan/stereo/image.hpp"

namespace stereoscan::features {

struct Descriptor256 {
  std::array<uint64_t, 4> bits{};

  int hamming(const Descriptor256& other) const;
  bool operator==(const Descriptor256& other) const { return bits == other.bits; }
};

struct Feature {
  Vec2 position{0.0, 0.0};       // pixels
  Descriptor256 descriptor;
  double depth_mm = -1.0;        // < 0 when the stereo sample was invalid
  Vec3 world_point{0.0, 0.0, 0.0};
  bool has_world_point = false;

  bool has_depth() const { return depth_mm > 0.0; }
};

struct Corner {
  int u = 0;
  int v = 0;
  int score = 0;
};

struct Match {
  int index_a = -1;
  int index_b = -1;
  int hamming = 0;
  double weight = 1.0;
  int rank = -1;                 // assigned by histogram_vote
  Vec2 displacement{0.0, 0.0};   // position_b - position_a
};

using MatchSet = std::vector<Match>;

// Segment-test corners: a contiguous arc of >= 9 of the 16 Bresenham-circle
// pixels all brighter or all darker than the center by `threshold`. The
// score is the largest margin over qualifying arcs; corners are 3x3
// non-maximum-suppressed and returned sorted by score descending (ties by
// raster order), truncated to max_count.
std::vector<Corner> detect_corners(const GrayImage& img, int max_count, int threshold);

// 256 seeded pairwise comparisons of 5x5 box-smoothed samples in a 31x31
// patch. Corners too close to the border for the patch are dropped. No
// rotation normalization: inter-frame roll is assumed minimal.
std::vector<Feature> describe(const GrayImage& img, const std::vector<Corner>& corners);

// Mutual nearest neighbors under Hamming distance, gated at max_hamming.
MatchSet match_features(const std::vector<Feature>& a, const std::vector<Feature>& b,
                        int max_hamming);

// Ranks matches by the popularity of their displacement: 2D histogram with
// bin_size-pixel bins, each match keyed by the count of its bin plus the 8
// neighboring bins. Output is a permutation of the input sorted by priority
// descending (ties: smaller Hamming distance, then lower input index), with
// rank fields assigned.
MatchSet histogram_vote(const MatchSet& matches, double bin_size);

// Test hook: "u1 v1 u2 v2" per line; returns paired pixel coordinates.
std::vector<std::pair<Vec2, Vec2>> read_match_file(const std::string& path);

}  // namespace stereoscan::features
