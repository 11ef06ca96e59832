#pragma once

#include "stereoscan/stereo/image.hpp"
#include "stereoscan/stereo/params.hpp"

namespace stereoscan {

// Keeps a valid pixel iff at least one of the 8 radial directions is fully
// valid out to `radius` steps and every consecutive disparity pair along
// that ray (starting at the pixel itself) differs by <= threshold. Rays
// leaving the image do not qualify.
DisparityMap remove_outliers(const DisparityMap& map, int radius, double threshold);

enum class FillMode { Radial, Disc };

// Fills invalid pixels by inverse-distance-weighted interpolation of valid
// neighbors found by the mode's search pattern (nearest valid hit per ray for
// Radial, every valid pixel in the disc for Disc). Pixels with fewer than
// min_support neighbors stay invalid; valid pixels are never modified.
// All reads come from the input map, so fills do not cascade within a call.
DisparityMap fill_holes(const DisparityMap& map, FillMode mode, int radius,
                        int min_support);

// Number of in-disc neighbor offsets (excluding the center) for a radius.
int disc_neighbor_count(int radius);

// Support threshold used by cleanup_pass for disc-mode filling.
int disc_fill_min_support(int radius);

// cleanup_iterations rounds of outlier removal with growing radius
// (start + k*step at round k) each followed by radial then disc hole filling.
DisparityMap cleanup_pass(const DisparityMap& map, const StereoParams& params);

}  // namespace stereoscan
