#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace scratchkit {

// RGB raster with values in [0, 1], stored row-major as (row, col, channel).
struct Image {
  int height = 0;
  int width = 0;
  int channels = 3;
  std::vector<double> data;

  static Image filled(int height, int width, double value,
                      int channels = 3) {
    Image img;
    img.height = height;
    img.width = width;
    img.channels = channels;
    img.data.assign(static_cast<std::size_t>(height) * width * channels,
                    value);
    return img;
  }

  double at(int row, int col, int channel) const {
    return data[(static_cast<std::size_t>(row) * width + col) * channels +
                channel];
  }
  double& at(int row, int col, int channel) {
    return data[(static_cast<std::size_t>(row) * width + col) * channels +
                channel];
  }

  bool shape_matches(const Image& other) const {
    return height == other.height && width == other.width &&
           channels == other.channels;
  }

  std::size_t pixel_count() const {
    return static_cast<std::size_t>(height) * width;
  }

  friend bool operator==(const Image&, const Image&) = default;
};

// Binary mask of perturbable pixels, same spatial shape as the image it
// constrains. 1 = the attack may repaint this pixel.
struct TargetRegion {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> mask;

  static TargetRegion all_ones(int height, int width) {
    TargetRegion r;
    r.height = height;
    r.width = width;
    r.mask.assign(static_cast<std::size_t>(height) * width, 1);
    return r;
  }

  static TargetRegion all_zeros(int height, int width) {
    TargetRegion r = all_ones(height, width);
    std::fill(r.mask.begin(), r.mask.end(), 0);
    return r;
  }

  bool contains(int row, int col) const {
    if (row < 0 || row >= height || col < 0 || col >= width) return false;
    return mask[static_cast<std::size_t>(row) * width + col] != 0;
  }

  void set(int row, int col, bool value) {
    mask[static_cast<std::size_t>(row) * width + col] = value ? 1 : 0;
  }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto v : mask) n += (v != 0);
    return n;
  }
};

// 8-bit quantization used at every file-format boundary (PNG, JPEG).
inline std::uint8_t quantize8(double v) {
  const double clamped = std::clamp(v, 0.0, 1.0);
  return static_cast<std::uint8_t>(std::lround(clamped * 255.0));
}

inline double dequantize8(std::uint8_t v) {
  return static_cast<double>(v) / 255.0;
}

}  // namespace scratchkit
