#pragma once

#include "stereoscan/stereo/image.hpp"
#include "stereoscan/stereo/params.hpp"

namespace stereoscan {

// Per-iteration snapshots of the discrete (o) and continuous (d) fields,
// recorded after the iteration's discrete re-pick.
struct RefineTrace {
  std::vector<std::vector<double>> discrete;
  std::vector<std::vector<double>> smooth;
};

// Anti-shrink Laplacian refinement of a discrete disparity map. Each
// iteration smooths the discrete values over a disc neighborhood, subtracts
// the averaged shrink-correction term, then re-picks the discrete disparity
// as the integer minimizer of reciprocal-ZNCC plus a quadratic pull toward
// the smoothed value, searched within +/- kRefineSearchRadius. The validity
// mask is fixed; only valid pixels participate. Output disparities are the
// continuous smoothed values, clamped to [d_min - 5, d_max + 5].
DisparityMap refine_disparities(const DisparityMap& map, const GrayImage& left,
                                const GrayImage& right, const StereoParams& params,
                                RefineTrace* trace = nullptr);

}  // namespace stereoscan
