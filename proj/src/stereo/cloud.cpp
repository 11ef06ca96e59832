#include "stereoscan/stereo/cloud.hpp"

#include <Eigen/Eigenvalues>

#include "stereoscan/core/geometry.hpp"

namespace stereoscan {

namespace {
constexpr int kNormalWindowHalf = 3;  // 7x7 plane-fit neighborhood
constexpr double kMinDisparity = 1e-6;
}  // namespace

StereoCloud disparity_to_cloud(const DisparityMap& map, const ColorImage& color,
                               const StereoRig& rig) {
  rig.validate();
  const CameraIntrinsics& k = rig.intrinsics;
  StereoCloud cloud;
  cloud.width = map.width;
  cloud.height = map.height;
  cloud.index.assign(static_cast<size_t>(map.width) * map.height, -1);

  for (int v = 0; v < map.height; ++v) {
    for (int u = 0; u < map.width; ++u) {
      if (!map.is_valid(u, v)) continue;
      const double d = map.at(u, v);
      if (!(d > kMinDisparity)) continue;  // z = f*b/d undefined otherwise
      const double z = k.fx * rig.baseline_mm / d;
      cloud.index[map.idx(u, v)] = static_cast<int32_t>(cloud.points.size());
      cloud.points.emplace_back(z * (u - k.cx) / k.fx, z * (v - k.cy) / k.fy, z);
      if (color.in_bounds(u, v)) {
        const uint8_t* rgb = color.rgb(u, v);
        cloud.colors.push_back({rgb[0], rgb[1], rgb[2]});
      } else {
        cloud.colors.push_back({0, 0, 0});
      }
      cloud.pixels.push_back({u, v});
    }
  }

  cloud.normals.assign(cloud.points.size(), Vec3(0.0, 0.0, -1.0));
#pragma omp parallel for schedule(static)
  for (int v = 0; v < map.height; ++v) {
    for (int u = 0; u < map.width; ++u) {
      const int32_t pi = cloud.index[map.idx(u, v)];
      if (pi < 0) continue;
      const Vec3& p = cloud.points[pi];

      Vec3 mean = Vec3::Zero();
      int count = 0;
      for (int dv = -kNormalWindowHalf; dv <= kNormalWindowHalf; ++dv) {
        for (int du = -kNormalWindowHalf; du <= kNormalWindowHalf; ++du) {
          const int nu = u + du;
          const int nv = v + dv;
          if (!map.in_bounds(nu, nv)) continue;
          const int32_t ni = cloud.index[map.idx(nu, nv)];
          if (ni < 0) continue;
          mean += cloud.points[ni];
          ++count;
        }
      }
      Vec3 normal(0.0, 0.0, -1.0);
      bool fitted = false;
      if (count >= 3) {
        mean /= count;
        Mat3 cov = Mat3::Zero();
        for (int dv = -kNormalWindowHalf; dv <= kNormalWindowHalf; ++dv) {
          for (int du = -kNormalWindowHalf; du <= kNormalWindowHalf; ++du) {
            const int nu = u + du;
            const int nv = v + dv;
            if (!map.in_bounds(nu, nv)) continue;
            const int32_t ni = cloud.index[map.idx(nu, nv)];
            if (ni < 0) continue;
            const Vec3 q = cloud.points[ni] - mean;
            cov += q * q.transpose();
          }
        }
        Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
        // Eigenvalues ascending; plane fit needs the neighborhood to span
        // two directions, otherwise the smallest eigenvector is arbitrary.
        if (eig.eigenvalues()(1) > 1e-9 * std::max(1.0, eig.eigenvalues()(2))) {
          normal = eig.eigenvectors().col(0);
          fitted = true;
        }
      }
      if (!fitted) {
        normal = -p.normalized();  // fall back to the sight-ray direction
      }
      if (normal.dot(p) > 0.0) normal = -normal;
      cloud.normals[pi] = normal;
    }
  }
  return cloud;
}

}  // namespace stereoscan
