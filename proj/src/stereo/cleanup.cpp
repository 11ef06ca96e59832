#include "stereoscan/stereo/cleanup.hpp"

#include <cmath>

namespace stereoscan {

namespace {
constexpr int kDirU[8] = {1, -1, 0, 0, 1, 1, -1, -1};
constexpr int kDirV[8] = {0, 0, 1, -1, 1, -1, 1, -1};
}  // namespace

DisparityMap remove_outliers(const DisparityMap& map, int radius, double threshold) {
  DisparityMap out = map;
#pragma omp parallel for schedule(static)
  for (int v = 0; v < map.height; ++v) {
    for (int u = 0; u < map.width; ++u) {
      if (!map.is_valid(u, v)) continue;
      bool smooth_ray = false;
      for (int dir = 0; dir < 8 && !smooth_ray; ++dir) {
        double prev = map.at(u, v);
        bool ok = true;
        for (int step = 1; step <= radius; ++step) {
          const int nu = u + kDirU[dir] * step;
          const int nv = v + kDirV[dir] * step;
          if (!map.in_bounds(nu, nv) || !map.is_valid(nu, nv)) {
            ok = false;
            break;
          }
          const double cur = map.at(nu, nv);
          if (std::abs(cur - prev) > threshold) {
            ok = false;
            break;
          }
          prev = cur;
        }
        smooth_ray = ok;
      }
      if (!smooth_ray) out.valid[out.idx(u, v)] = 0;
    }
  }
  return out;
}

DisparityMap fill_holes(const DisparityMap& map, FillMode mode, int radius,
                        int min_support) {
  DisparityMap out = map;
#pragma omp parallel for schedule(static)
  for (int v = 0; v < map.height; ++v) {
    for (int u = 0; u < map.width; ++u) {
      if (map.is_valid(u, v)) continue;
      double weight_sum = 0.0;
      double value_sum = 0.0;
      int support = 0;
      if (mode == FillMode::Radial) {
        for (int dir = 0; dir < 8; ++dir) {
          const double step_len = (dir < 4) ? 1.0 : M_SQRT2;
          for (int step = 1; step <= radius; ++step) {
            const int nu = u + kDirU[dir] * step;
            const int nv = v + kDirV[dir] * step;
            if (!map.in_bounds(nu, nv)) break;
            if (!map.is_valid(nu, nv)) continue;
            const double w = 1.0 / (step * step_len);
            weight_sum += w;
            value_sum += w * map.at(nu, nv);
            ++support;
            break;  // nearest valid hit per ray
          }
        }
      } else {
        const int r2 = radius * radius;
        for (int dv = -radius; dv <= radius; ++dv) {
          for (int du = -radius; du <= radius; ++du) {
            const int dd = du * du + dv * dv;
            if (dd == 0 || dd > r2) continue;
            const int nu = u + du;
            const int nv = v + dv;
            if (!map.in_bounds(nu, nv) || !map.is_valid(nu, nv)) continue;
            const double w = 1.0 / std::sqrt(static_cast<double>(dd));
            weight_sum += w;
            value_sum += w * map.at(nu, nv);
            ++support;
          }
        }
      }
      if (support >= min_support && weight_sum > 0.0) {
        out.disparity[out.idx(u, v)] = static_cast<float>(value_sum / weight_sum);
        out.valid[out.idx(u, v)] = 1;
      }
    }
  }
  return out;
}

int disc_neighbor_count(int radius) {
  int n = 0;
  const int r2 = radius * radius;
  for (int dv = -radius; dv <= radius; ++dv) {
    for (int du = -radius; du <= radius; ++du) {
      const int dd = du * du + dv * dv;
      if (dd != 0 && dd <= r2) ++n;
    }
  }
  return n;
}

int disc_fill_min_support(int radius) {
  return static_cast<int>(
      std::ceil(kDiscFillSupportFraction * disc_neighbor_count(radius)));
}

DisparityMap cleanup_pass(const DisparityMap& map, const StereoParams& params) {
  DisparityMap current = map;
  const int disc_support = disc_fill_min_support(params.fill_radius_disc);
  for (int k = 0; k < params.cleanup_iterations; ++k) {
    const int radius = params.outlier_radius_start + k * params.outlier_radius_step;
    current = remove_outliers(current, radius, params.neighbor_jump_threshold);
    current = fill_holes(current, FillMode::Radial, params.fill_radius_radial,
                         kRadialFillMinSupport);
    current = fill_holes(current, FillMode::Disc, params.fill_radius_disc,
                         disc_support);
  }
  return current;
}

}  // namespace stereoscan
