#pragma once

#include "stereoscan/core/types.hpp"

namespace stereoscan {

struct StereoParams {
  int window = 11;                       // ZNCC window, odd
  int d_min = -20;                       // candidate disparity range
  int d_max = 80;
  double neighbor_jump_threshold = 2.5;  // max disparity step between ray neighbors
  int outlier_radius_start = 10;
  int outlier_radius_step = 10;
  int cleanup_iterations = 3;
  int fill_radius_radial = 50;
  int fill_radius_disc = 20;
  int smoothing_radius = 15;
  double alpha = 0.1;                    // anti-shrink blend
  double eta_smooth = 0.01;              // smoothing cost coefficient
  int refine_iterations = 10;
  double min_zncc = 0.5;                 // acceptance threshold for the initial match

  void validate() const;
};

// Hole-filling support thresholds. The radial search requires hits on at
// least this many of the 8 rays; the disc search requires this fraction of
// the disc's pixels to be valid.
inline constexpr int kRadialFillMinSupport = 4;
inline constexpr double kDiscFillSupportFraction = 0.25;

// Clamp floor for the reciprocal ZNCC cost: scores <= kZnccCostEpsilon are
// treated as kZnccCostEpsilon so the cost stays finite.
inline constexpr double kZnccCostEpsilon = 1e-3;

// Half-width of the integer search window around the smoothed disparity in
// the refinement update.
inline constexpr int kRefineSearchRadius = 5;

}  // namespace stereoscan
