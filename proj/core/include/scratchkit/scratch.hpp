#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "scratchkit/geometry.hpp"
#include "scratchkit/image.hpp"

namespace scratchkit {

// How the three color parameters of each scratch are interpreted.
enum class ColorMode {
  PolychromeSaturated,   // per scratch, each channel thresholded to {0, 1}
  MonochromeSaturated,   // all scratches share scratch 0's saturated color
  PolychromeGrayscale,   // first parameter is a shared luminance in [0, 1]
  PolychromeImageColor,  // first two parameters index an image pixel's color
};

std::string color_mode_name(ColorMode mode);
ColorMode color_mode_from_name(const std::string& name);

struct ScratchColor {
  std::array<double, 3> rgb{0.0, 0.0, 0.0};

  friend bool operator==(const ScratchColor&, const ScratchColor&) = default;
};

// One scratch as the optimizer sees it: 2*(order+1) control-point
// coordinates (x0, y0, x1, y1, ...) in image units followed by three color
// parameters normalized to [0, 1].
struct ScratchParams {
  int order = 2;
  std::vector<double> coords;
  std::array<double, 3> color_params{0.0, 0.0, 0.0};

  static constexpr int vector_size(int order) { return 2 * (order + 1) + 3; }

  BezierCurve curve() const;
  std::vector<double> flatten() const;
  static ScratchParams from_flat(std::span<const double> values, int order);

  friend bool operator==(const ScratchParams&, const ScratchParams&) = default;
};

// Splits a concatenated optimizer vector into per-scratch parameters.
std::vector<ScratchParams> split_params(std::span<const double> values,
                                        int scratch_count, int order);

struct AttackConfig {
  int scratch_count = 3;
  int per_scratch_l0 = 133;
  int bezier_order = 2;
  ColorMode color_mode = ColorMode::PolychromeSaturated;
  int query_limit = 10000;

  // Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

struct ClippedScratch {
  ScratchParams params;
  PixelSupport support;  // empty when no curve pixel lies in the region
};

// Restricts a scratch to the first contiguous in-region run of its pixel
// trace, capped at k pixels, and rebuilds the curve by subdivision so the
// returned parameters describe exactly the kept segment. A scratch whose
// trace never enters the region yields an empty support (not an error);
// color parameters pass through unchanged.
ClippedScratch clip_scratch(const ScratchParams& params, int k,
                            const TargetRegion& region);

// Resolves three color parameters to an RGB color under the given mode. For
// MonochromeSaturated the caller passes the first scratch's parameters.
ScratchColor resolve_color(const std::array<double, 3>& color_params,
                           ColorMode mode, const Image& image);

struct ScratchApplication {
  Image image;
  int total_l0 = 0;  // pixels whose final value differs from the original
  std::vector<ClippedScratch> scratches;
  std::vector<ScratchColor> colors;
};

// Clips every scratch independently, then paints them in list order; later
// scratches overwrite overlapping pixels. Pixels outside the union of the
// clipped supports are bit-identical to the input.
ScratchApplication apply_scratches(const Image& image,
                                   const std::vector<ScratchParams>& scratches,
                                   int k_per_scratch,
                                   const TargetRegion& region, ColorMode mode);

}  // namespace scratchkit
