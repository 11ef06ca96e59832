#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "stereoscan/core/types.hpp"
#include "stereoscan/stereo/image.hpp"

namespace stereoscan {

// Camera-frame oriented point cloud with a per-pixel index into the point
// arrays (-1 where no point was produced).
struct StereoCloud {
  int width = 0;
  int height = 0;
  std::vector<int32_t> index;           // per pixel
  std::vector<Vec3> points;             // mm, camera frame
  std::vector<Vec3> normals;            // unit, oriented toward the camera
  std::vector<std::array<uint8_t, 3>> colors;
  std::vector<std::array<int, 2>> pixels;  // source pixel per point

  bool has_point(int u, int v) const {
    return index[static_cast<size_t>(v) * width + u] >= 0;
  }
  int point_at(int u, int v) const {
    return index[static_cast<size_t>(v) * width + u];
  }
};

// Back-projects every valid pixel with positive disparity and estimates a
// unit normal per point from a least-squares plane fit over the valid
// neighbors in a 7x7 window (camera-facing orientation, n . p < 0).
StereoCloud disparity_to_cloud(const DisparityMap& map, const ColorImage& color,
                               const StereoRig& rig);

}  // namespace stereoscan
