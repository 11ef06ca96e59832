#pragma once

#include <cstdint>
#include <vector>

namespace stereoscan {

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> pixels;  // row-major

  GrayImage() = default;
  GrayImage(int w, int h, uint8_t fill = 0)
      : width(w), height(h), pixels(static_cast<size_t>(w) * h, fill) {}

  bool in_bounds(int u, int v) const {
    return u >= 0 && u < width && v >= 0 && v < height;
  }
  uint8_t at(int u, int v) const { return pixels[static_cast<size_t>(v) * width + u]; }
  uint8_t& at(int u, int v) { return pixels[static_cast<size_t>(v) * width + u]; }
};

struct ColorImage {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> pixels;  // row-major, interleaved RGB

  ColorImage() = default;
  ColorImage(int w, int h) : width(w), height(h), pixels(static_cast<size_t>(w) * h * 3, 0) {}

  bool in_bounds(int u, int v) const {
    return u >= 0 && u < width && v >= 0 && v < height;
  }
  const uint8_t* rgb(int u, int v) const {
    return &pixels[(static_cast<size_t>(v) * width + u) * 3];
  }
  uint8_t* rgb(int u, int v) {
    return &pixels[(static_cast<size_t>(v) * width + u) * 3];
  }
};

// Luma conversion: round(0.299 R + 0.587 G + 0.114 B), nearest integer.
GrayImage to_gray(const ColorImage& color);

struct DisparityMap {
  int width = 0;
  int height = 0;
  std::vector<float> disparity;   // pixels; continuous after refinement
  std::vector<uint8_t> valid;     // 0 or 1

  DisparityMap() = default;
  DisparityMap(int w, int h)
      : width(w),
        height(h),
        disparity(static_cast<size_t>(w) * h, 0.0f),
        valid(static_cast<size_t>(w) * h, 0) {}

  bool in_bounds(int u, int v) const {
    return u >= 0 && u < width && v >= 0 && v < height;
  }
  size_t idx(int u, int v) const { return static_cast<size_t>(v) * width + u; }
  bool is_valid(int u, int v) const { return valid[idx(u, v)] != 0; }
  float at(int u, int v) const { return disparity[idx(u, v)]; }

  size_t valid_count() const;
};

}  // namespace stereoscan
