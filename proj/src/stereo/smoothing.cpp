#include "stereoscan/stereo/smoothing.hpp"

#include <algorithm>
#include <cmath>

#include "stereoscan/stereo/matcher.hpp"

namespace stereoscan {

namespace {

// Disc-neighborhood average of `value` over valid pixels (center included),
// computed with per-row prefix sums. Pixels outside the mask contribute
// nothing; the result is only meaningful where the mask is set (the center
// pixel guarantees count >= 1 there).
void disc_average(const std::vector<double>& value, const std::vector<uint8_t>& mask,
                  int width, int height, int radius, std::vector<double>* out) {
  std::vector<int> span(radius + 1);
  for (int dy = 0; dy <= radius; ++dy) {
    span[dy] = static_cast<int>(std::floor(std::sqrt(
        static_cast<double>(radius) * radius - static_cast<double>(dy) * dy)));
  }

  // Row prefix sums of masked values and mask counts.
  std::vector<double> psum(static_cast<size_t>(width + 1) * height, 0.0);
  std::vector<int> pcnt(static_cast<size_t>(width + 1) * height, 0);
#pragma omp parallel for schedule(static)
  for (int v = 0; v < height; ++v) {
    double s = 0.0;
    int c = 0;
    const size_t row = static_cast<size_t>(v) * (width + 1);
    for (int u = 0; u < width; ++u) {
      const size_t i = static_cast<size_t>(v) * width + u;
      if (mask[i]) {
        s += value[i];
        c += 1;
      }
      psum[row + u + 1] = s;
      pcnt[row + u + 1] = c;
    }
  }

  out->assign(static_cast<size_t>(width) * height, 0.0);
#pragma omp parallel for schedule(static)
  for (int v = 0; v < height; ++v) {
    for (int u = 0; u < width; ++u) {
      const size_t i = static_cast<size_t>(v) * width + u;
      if (!mask[i]) continue;
      double s = 0.0;
      int c = 0;
      const int dy_lo = std::max(-radius, -v);
      const int dy_hi = std::min(radius, height - 1 - v);
      for (int dy = dy_lo; dy <= dy_hi; ++dy) {
        const int sx = span[std::abs(dy)];
        const int u0 = std::max(0, u - sx);
        const int u1 = std::min(width - 1, u + sx);
        const size_t row = static_cast<size_t>(v + dy) * (width + 1);
        s += psum[row + u1 + 1] - psum[row + u0];
        c += pcnt[row + u1 + 1] - pcnt[row + u0];
      }
      (*out)[i] = s / c;
    }
  }
}

}  // namespace

DisparityMap refine_disparities(const DisparityMap& map, const GrayImage& left,
                                const GrayImage& right, const StereoParams& params,
                                RefineTrace* trace) {
  const int width = map.width;
  const int height = map.height;
  const size_t n = static_cast<size_t>(width) * height;
  const double lo = params.d_min - kRefineSearchRadius;
  const double hi = params.d_max + kRefineSearchRadius;

  std::vector<double> discrete(n, 0.0);  // o_i
  std::vector<double> smooth(n, 0.0);    // d_i
  for (size_t i = 0; i < n; ++i) {
    if (map.valid[i]) discrete[i] = smooth[i] = map.disparity[i];
  }

  std::vector<double> averaged;
  std::vector<double> correction(n, 0.0);
  std::vector<double> correction_avg;

  const int half = params.window / 2;
  for (int iter = 0; iter < params.refine_iterations; ++iter) {
    disc_average(discrete, map.valid, width, height, params.smoothing_radius, &averaged);

#pragma omp parallel for schedule(static)
    for (int v = 0; v < height; ++v) {
      for (int u = 0; u < width; ++u) {
        const size_t i = static_cast<size_t>(v) * width + u;
        if (!map.valid[i]) continue;
        correction[i] = averaged[i] - params.alpha * discrete[i] -
                        (1.0 - params.alpha) * smooth[i];
      }
    }

    disc_average(correction, map.valid, width, height, params.smoothing_radius,
                 &correction_avg);

#pragma omp parallel for schedule(static)
    for (int v = 0; v < height; ++v) {
      for (int u = 0; u < width; ++u) {
        const size_t i = static_cast<size_t>(v) * width + u;
        if (!map.valid[i]) continue;
        smooth[i] = std::clamp(averaged[i] - correction_avg[i], lo, hi);
      }
    }

    // Re-pick the discrete disparity near the smoothed value.
#pragma omp parallel for schedule(static)
    for (int v = 0; v < height; ++v) {
      for (int u = 0; u < width; ++u) {
        const size_t i = static_cast<size_t>(v) * width + u;
        if (!map.valid[i]) continue;
        const double d = smooth[i];
        const int cand_lo = std::max(static_cast<int>(std::ceil(d - kRefineSearchRadius)),
                                     static_cast<int>(std::ceil(lo)));
        const int cand_hi = std::min(static_cast<int>(std::floor(d + kRefineSearchRadius)),
                                     static_cast<int>(std::floor(hi)));
        const bool window_fits =
            u >= half && u < width - half && v >= half && v < height - half;
        double best_cost = 0.0;
        int best = 0;
        bool found = false;
        for (int cand = cand_lo; cand <= cand_hi; ++cand) {
          double match_cost = 1.0 / kZnccCostEpsilon;
          const int ru = u - cand;
          if (window_fits && ru >= half && ru < width - half) {
            const auto score = zncc_chessboard(left, u, v, right, ru, v, params.window);
            if (score) match_cost = 1.0 / std::max(*score, kZnccCostEpsilon);
          }
          const double diff = cand - d;
          const double cost = match_cost + params.eta_smooth * diff * diff;
          if (!found || cost < best_cost) {
            found = true;
            best_cost = cost;
            best = cand;
          }
        }
        if (found) discrete[i] = best;
      }
    }

    if (trace) {
      trace->discrete.push_back(discrete);
      trace->smooth.push_back(smooth);
    }
  }

  DisparityMap out = map;
  for (size_t i = 0; i < n; ++i) {
    if (map.valid[i]) out.disparity[i] = static_cast<float>(smooth[i]);
  }
  return out;
}

}  // namespace stereoscan
