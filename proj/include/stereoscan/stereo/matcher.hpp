#pragma once

#include <optional>

#include "stereoscan/stereo/image.hpp"
#include "stereoscan/stereo/params.hpp"

namespace stereoscan {

// ZNCC over the chessboard subsample of a window: only offsets with
// (du + dv) even participate. Statistics are accumulated as exact 64-bit
// integers, so the score is a pure function of the sampled pixel values
// and does not depend on summation order; parallel and serial evaluations
// agree bit-for-bit. Returns nullopt when either sampled patch has zero
// variance.
std::optional<double> zncc_chessboard(const GrayImage& left, int lu, int lv,
                                      const GrayImage& right, int ru, int rv,
                                      int window);

// Patch-level ZNCC. Both patches must be square window x window images of
// equal size (std::invalid_argument otherwise).
std::optional<double> zncc_score(const GrayImage& left_patch,
                                 const GrayImage& right_patch);

// Best integer disparity for a single left pixel: argmax of the chessboard
// ZNCC over d in [d_min, d_max], first maximum wins. Requires the left
// window to fit; candidates whose right window leaves the image are
// skipped. Returns nullopt when no candidate reaches min_zncc.
std::optional<int> match_pixel(const GrayImage& left, const GrayImage& right,
                               int u, int v, const StereoParams& params);

// Dense integer disparity search (data-parallel over rows). A pixel is
// invalid when the left window leaves the image, every candidate is
// undefined, or the best score is below min_zncc.
DisparityMap compute_disparity(const GrayImage& left, const GrayImage& right,
                               const StereoParams& params);

}  // namespace stereoscan
