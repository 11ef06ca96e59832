#include "stereoscan/stereo/reference.hpp"

#include <cmath>

namespace stereoscan::reference {

DisparityMap compute_disparity(const GrayImage& left, const GrayImage& right,
                               const StereoParams& params) {
  DisparityMap map(left.width, left.height);
  const int h = params.window / 2;
  for (int v = 0; v < left.height; ++v) {
    for (int u = 0; u < left.width; ++u) {
      if (u < h || u >= left.width - h || v < h || v >= left.height - h) continue;
      bool found = false;
      double best_score = 0.0;
      int best_d = 0;
      for (int d = params.d_min; d <= params.d_max; ++d) {
        const int ru = u - d;
        if (ru < h || ru >= right.width - h) continue;
        int64_t n = 0, sl = 0, sr = 0, sll = 0, srr = 0, slr = 0;
        for (int dv = -h; dv <= h; ++dv) {
          for (int du = -h; du <= h; ++du) {
            if ((du + dv) % 2 != 0) continue;  // chessboard subsample
            const int64_t a = left.at(u + du, v + dv);
            const int64_t b = right.at(ru + du, v + dv);
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
        if (var_l == 0 || var_r == 0) continue;
        const int64_t num = n * slr - sl * sr;
        const double score =
            static_cast<double>(num) / std::sqrt(static_cast<double>(var_l * var_r));
        if (!found || score > best_score) {
          found = true;
          best_score = score;
          best_d = d;
        }
      }
      if (found && best_score >= params.min_zncc) {
        map.disparity[map.idx(u, v)] = static_cast<float>(best_d);
        map.valid[map.idx(u, v)] = 1;
      }
    }
  }
  return map;
}

DisparityMap remove_outliers(const DisparityMap& map, int radius, double threshold) {
  static const int dirs[8][2] = {{1, 0},  {-1, 0}, {0, 1},  {0, -1},
                                 {1, 1},  {1, -1}, {-1, 1}, {-1, -1}};
  DisparityMap out = map;
  for (int v = 0; v < map.height; ++v) {
    for (int u = 0; u < map.width; ++u) {
      if (!map.is_valid(u, v)) continue;
      bool keep = false;
      for (const auto& dir : dirs) {
        bool smooth = true;
        double prev = map.at(u, v);
        for (int step = 1; step <= radius; ++step) {
          const int nu = u + dir[0] * step;
          const int nv = v + dir[1] * step;
          if (!map.in_bounds(nu, nv) || !map.is_valid(nu, nv) ||
              std::abs(map.at(nu, nv) - prev) > threshold) {
            smooth = false;
            break;
          }
          prev = map.at(nu, nv);
        }
        if (smooth) {
          keep = true;
          break;
        }
      }
      if (!keep) out.valid[out.idx(u, v)] = 0;
    }
  }
  return out;
}

}  // namespace stereoscan::reference
