#pragma once

#include "stereoscan/stereo/image.hpp"
#include "stereoscan/stereo/params.hpp"

// Serial, deliberately naive counterparts of the parallel stereo kernels.
// They share only the image types with the optimized code and recompute
// everything from first principles per pixel; tests and the benchmark target
// compare the two paths. Not used by the pipeline.
namespace stereoscan::reference {

// Exhaustive per-pixel, per-candidate ZNCC search with chessboard sampling.
// Statistics are exact 64-bit integers, matching the scoring contract of the
// optimized matcher, so the outputs must agree pixel-for-pixel.
DisparityMap compute_disparity(const GrayImage& left, const GrayImage& right,
                               const StereoParams& params);

// Exhaustive 8-ray smoothness test for outlier removal.
DisparityMap remove_outliers(const DisparityMap& map, int radius, double threshold);

}  // namespace stereoscan::reference
