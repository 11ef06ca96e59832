#include "stereoscan/stereo/matcher.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace stereoscan {

void StereoParams::validate() const {
  if (window < 3 || window % 2 == 0) throw Error("stereo: window must be odd and >= 3");
  if (d_min >= d_max) throw Error("stereo: d_min must be < d_max");
  if (outlier_radius_start <= 0 || outlier_radius_step <= 0 ||
      fill_radius_radial <= 0 || fill_radius_disc <= 0 || smoothing_radius <= 0) {
    throw Error("stereo: radii must be > 0");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error("stereo: alpha must be in [0,1]");
  if (cleanup_iterations < 0) throw Error("stereo: cleanup_iterations must be >= 0");
  if (refine_iterations < 0) throw Error("stereo: refine_iterations must be >= 0");
}

GrayImage to_gray(const ColorImage& color) {
  GrayImage gray(color.width, color.height);
  const size_t n = static_cast<size_t>(color.width) * color.height;
  for (size_t i = 0; i < n; ++i) {
    const uint8_t* rgb = &color.pixels[i * 3];
    const double luma = 0.299 * rgb[0] + 0.587 * rgb[1] + 0.114 * rgb[2];
    gray.pixels[i] = static_cast<uint8_t>(std::lround(luma));
  }
  return gray;
}

size_t DisparityMap::valid_count() const {
  size_t n = 0;
  for (uint8_t v : valid) n += v;
  return n;
}

std::optional<double> zncc_chessboard(const GrayImage& left, int lu, int lv,
                                      const GrayImage& right, int ru, int rv,
                                      int window) {
  const int h = window / 2;
  int64_t n = 0, sl = 0, sr = 0, sll = 0, srr = 0, slr = 0;
  for (int dv = -h; dv <= h; ++dv) {
    const uint8_t* lrow = &left.pixels[static_cast<size_t>(lv + dv) * left.width + lu];
    const uint8_t* rrow = &right.pixels[static_cast<size_t>(rv + dv) * right.width + ru];
    // chessboard: (du + dv) even
    const int start = -h + ((-h + dv) % 2 == 0 ? 0 : 1);
    for (int du = start; du <= h; du += 2) {
      const int64_t a = lrow[du];
      const int64_t b = rrow[du];
      n += 1;
      sl += a;
      sr += b;
      sll += a * a;
      srr += b * b;
      slr += a * b;
    }
  }
  const int64_t var_l = n * sll - sl * sl;
  const int64_t var_r = n * srr - sr * sr;
  if (var_l == 0 || var_r == 0) return std::nullopt;
  const int64_t num = n * slr - sl * sr;
  return static_cast<double>(num) / std::sqrt(static_cast<double>(var_l * var_r));
}

std::optional<double> zncc_score(const GrayImage& left_patch,
                                 const GrayImage& right_patch) {
  if (left_patch.width != left_patch.height ||
      left_patch.width != right_patch.width ||
      left_patch.height != right_patch.height) {
    throw std::invalid_argument("zncc_score: patches must be square and equal-sized");
  }
  const int w = left_patch.width;
  const int h = w / 2;
  return zncc_chessboard(left_patch, h, h, right_patch, h, h, w);
}

std::optional<int> match_pixel(const GrayImage& left, const GrayImage& right,
                               int u, int v, const StereoParams& params) {
  const int h = params.window / 2;
  if (u < h || u >= left.width - h || v < h || v >= left.height - h) {
    return std::nullopt;
  }
  bool found = false;
  double best_score = 0.0;
  int best_d = 0;
  for (int d = params.d_min; d <= params.d_max; ++d) {
    const int ru = u - d;
    if (ru < h || ru >= right.width - h) continue;
    const auto score = zncc_chessboard(left, u, v, right, ru, v, params.window);
    if (!score) continue;
    if (!found || *score > best_score) {
      found = true;
      best_score = *score;
      best_d = d;
    }
  }
  if (!found || best_score < params.min_zncc) return std::nullopt;
  return best_d;
}

namespace {

struct PatchStats {
  std::vector<int32_t> sum;  // chessboard sum per pixel (window centered there)
  std::vector<int32_t> var;  // n * sum_sq - sum^2, exact
};

// Per-pixel chessboard sums for every pixel whose window fits. The integer
// statistics are identical to the ones zncc_chessboard accumulates inline,
// so precomputing them does not perturb any score.
PatchStats patch_stats(const GrayImage& img, int window) {
  const int h = window / 2;
  PatchStats s;
  s.sum.assign(img.pixels.size(), 0);
  s.var.assign(img.pixels.size(), 0);
#pragma omp parallel for schedule(static)
  for (int v = h; v < img.height - h; ++v) {
    for (int u = h; u < img.width - h; ++u) {
      int64_t n = 0, sl = 0, sll = 0;
      for (int dv = -h; dv <= h; ++dv) {
        const uint8_t* row = &img.pixels[static_cast<size_t>(v + dv) * img.width + u];
        const int start = -h + ((-h + dv) % 2 == 0 ? 0 : 1);
        for (int du = start; du <= h; du += 2) {
          const int64_t a = row[du];
          n += 1;
          sl += a;
          sll += a * a;
        }
      }
      const size_t i = static_cast<size_t>(v) * img.width + u;
      s.sum[i] = static_cast<int32_t>(sl);
      s.var[i] = static_cast<int32_t>(n * sll - sl * sl);
    }
  }
  return s;
}

int64_t cross_sum_chessboard(const GrayImage& left, int lu, int lv,
                             const GrayImage& right, int ru, int rv, int h) {
  int64_t slr = 0;
  for (int dv = -h; dv <= h; ++dv) {
    const uint8_t* lrow = &left.pixels[static_cast<size_t>(lv + dv) * left.width + lu];
    const uint8_t* rrow = &right.pixels[static_cast<size_t>(rv + dv) * right.width + ru];
    const int start = -h + ((-h + dv) % 2 == 0 ? 0 : 1);
    for (int du = start; du <= h; du += 2) {
      slr += static_cast<int64_t>(lrow[du]) * rrow[du];
    }
  }
  return slr;
}

int64_t chessboard_count(int window) {
  const int h = window / 2;
  int64_t n = 0;
  for (int dv = -h; dv <= h; ++dv) {
    for (int du = -h; du <= h; ++du) {
      if ((du + dv) % 2 == 0) n += 1;
    }
  }
  return n;
}

}  // namespace

DisparityMap compute_disparity(const GrayImage& left, const GrayImage& right,
                               const StereoParams& params) {
  if (left.width != right.width || left.height != right.height) {
    throw std::invalid_argument("compute_disparity: image sizes differ");
  }
  params.validate();
  DisparityMap map(left.width, left.height);
  const int h = params.window / 2;
  const int64_t n = chessboard_count(params.window);

  const PatchStats ls = patch_stats(left, params.window);
  const PatchStats rs = patch_stats(right, params.window);

#pragma omp parallel for schedule(static)
  for (int v = h; v < left.height - h; ++v) {
    for (int u = h; u < left.width - h; ++u) {
      const size_t li = static_cast<size_t>(v) * left.width + u;
      const int64_t var_l = ls.var[li];
      if (var_l == 0) continue;  // every candidate undefined
      bool found = false;
      double best_score = 0.0;
      int best_d = 0;
      for (int d = params.d_min; d <= params.d_max; ++d) {
        const int ru = u - d;
        if (ru < h || ru >= right.width - h) continue;
        const size_t ri = static_cast<size_t>(v) * right.width + ru;
        const int64_t var_r = rs.var[ri];
        if (var_r == 0) continue;
        const int64_t slr = cross_sum_chessboard(left, u, v, right, ru, v, h);
        const int64_t num = n * slr - static_cast<int64_t>(ls.sum[li]) * rs.sum[ri];
        const double score =
            static_cast<double>(num) / std::sqrt(static_cast<double>(var_l * var_r));
        if (!found || score > best_score) {
          found = true;
          best_score = score;
          best_d = d;
        }
      }
      if (found && best_score >= params.min_zncc) {
        map.disparity[li] = static_cast<float>(best_d);
        map.valid[li] = 1;
      }
    }
  }
  return map;
}

}  // namespace stereoscan
