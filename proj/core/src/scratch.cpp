#include "scratchkit/scratch.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace scratchkit {

namespace {

constexpr int kMaxClipPasses = 16;

struct WalkResult {
  std::size_t first = 0;
  std::size_t last = 0;  // inclusive
  bool found = false;
  bool whole = false;  // the accepted run is the entire support
};

// First contiguous in-region run of the support, capped at k pixels. A
// non-adjacent successor marks an out-of-bounds excursion and ends the run
// the same way leaving the region does.
WalkResult walk_support(const PixelSupport& support, const TargetRegion& region,
                        int k) {
  WalkResult result;
  std::size_t i = 0;
  for (; i < support.size(); ++i) {
    if (region.contains(support.pixels[i].row, support.pixels[i].col)) {
      result.found = true;
      result.first = i;
      break;
    }
  }
  if (!result.found) return result;

  result.last = result.first;
  int taken = 1;
  for (i = result.first + 1; i < support.size() && taken < k; ++i) {
    const Pixel& prev = support.pixels[i - 1];
    const Pixel& cur = support.pixels[i];
    if (!region.contains(cur.row, cur.col)) break;
    if (!eight_connected(prev, cur)) break;
    result.last = i;
    ++taken;
  }
  result.whole = result.found && result.first == 0 &&
                 result.last == support.size() - 1;
  return result;
}

PixelSupport slice(const PixelSupport& support, std::size_t first,
                   std::size_t last) {
  PixelSupport out;
  out.pixels.assign(support.pixels.begin() + first,
                    support.pixels.begin() + last + 1);
  out.params.assign(support.params.begin() + first,
                    support.params.begin() + last + 1);
  return out;
}

std::vector<double> coords_of(const BezierCurve& curve) {
  std::vector<double> coords;
  coords.reserve(2 * curve.control_points().size());
  for (const ControlPoint& p : curve.control_points()) {
    coords.push_back(p.x);
    coords.push_back(p.y);
  }
  return coords;
}

}  // namespace

std::string color_mode_name(ColorMode mode) {
  switch (mode) {
    case ColorMode::PolychromeSaturated: return "polychrome-saturated";
    case ColorMode::MonochromeSaturated: return "monochrome-saturated";
    case ColorMode::PolychromeGrayscale: return "polychrome-grayscale";
    case ColorMode::PolychromeImageColor: return "polychrome-image-color";
  }
  throw std::invalid_argument("color_mode_name: unknown mode");
}

ColorMode color_mode_from_name(const std::string& name) {
  if (name == "polychrome-saturated") return ColorMode::PolychromeSaturated;
  if (name == "monochrome-saturated") return ColorMode::MonochromeSaturated;
  if (name == "polychrome-grayscale") return ColorMode::PolychromeGrayscale;
  if (name == "polychrome-image-color") return ColorMode::PolychromeImageColor;
  throw std::invalid_argument("unknown color mode: " + name);
}

BezierCurve ScratchParams::curve() const {
  std::vector<ControlPoint> points;
  points.reserve(coords.size() / 2);
  for (std::size_t i = 0; i + 1 < coords.size(); i += 2) {
    points.push_back({coords[i], coords[i + 1]});
  }
  return BezierCurve(std::move(points));
}

std::vector<double> ScratchParams::flatten() const {
  std::vector<double> out = coords;
  out.insert(out.end(), color_params.begin(), color_params.end());
  return out;
}

ScratchParams ScratchParams::from_flat(std::span<const double> values,
                                       int order) {
  if (order < 1) throw std::invalid_argument("scratch order must be >= 1");
  const std::size_t expected = static_cast<std::size_t>(vector_size(order));
  if (values.size() != expected) {
    throw std::invalid_argument("scratch parameter vector has wrong length");
  }
  ScratchParams params;
  params.order = order;
  params.coords.assign(values.begin(), values.end() - 3);
  std::copy(values.end() - 3, values.end(), params.color_params.begin());
  return params;
}

std::vector<ScratchParams> split_params(std::span<const double> values,
                                        int scratch_count, int order) {
  const std::size_t per = static_cast<std::size_t>(ScratchParams::vector_size(order));
  if (scratch_count < 1 || values.size() != per * scratch_count) {
    throw std::invalid_argument("parameter vector does not match scratch count");
  }
  std::vector<ScratchParams> out;
  out.reserve(scratch_count);
  for (int s = 0; s < scratch_count; ++s) {
    out.push_back(ScratchParams::from_flat(values.subspan(s * per, per), order));
  }
  return out;
}

void AttackConfig::validate() const {
  if (scratch_count < 1 || scratch_count > 5) {
    throw std::invalid_argument("scratch_count must be in [1, 5]");
  }
  if (per_scratch_l0 < 1) throw std::invalid_argument("per_scratch_l0 must be >= 1");
  if (bezier_order < 1) throw std::invalid_argument("bezier_order must be >= 1");
  if (query_limit < 1) throw std::invalid_argument("query_limit must be >= 1");
}

ClippedScratch clip_scratch(const ScratchParams& params, int k,
                            const TargetRegion& region) {
  if (k < 1) throw std::invalid_argument("clip_scratch: k must be >= 1");
  if (region.height < 1 || region.width < 1) {
    throw std::invalid_argument("clip_scratch: empty region");
  }

  const RasterBounds bounds{region.height, region.width};
  BezierCurve curve = params.curve();

  // Iterate subdivision until the whole trace of the current curve is the
  // accepted run; at that point re-clipping is a no-op, which makes the
  // operation idempotent on the support.
  for (int pass = 0; pass < kMaxClipPasses; ++pass) {
    const PixelSupport support = rasterize(curve, bounds, RasterQuality::Fast);
    const WalkResult run = walk_support(support, region, k);
    if (!run.found) {
      return ClippedScratch{params, PixelSupport{}};
    }
    if (run.whole) {
      ScratchParams clipped;
      clipped.order = params.order;
      clipped.coords = coords_of(curve);
      clipped.color_params = params.color_params;
      return ClippedScratch{std::move(clipped), support};
    }
    const double t0 = support.params[run.first];
    const double t1 = support.params[run.last];
    if (run.first == run.last || !(t0 < t1)) {
      // Single-pixel run: collapse to a degenerate curve on that pixel.
      const ControlPoint at = curve.evaluate(t0);
      curve = BezierCurve(std::vector<ControlPoint>(
          static_cast<std::size_t>(params.order) + 1, at));
    } else {
      curve = curve.subdivide(t0, t1);
    }
  }

  // Not converged (pathological rounding oscillation): fall back to the
  // accepted run of the final raster.
  const PixelSupport support = rasterize(curve, bounds, RasterQuality::Fast);
  const WalkResult run = walk_support(support, region, k);
  ScratchParams clipped;
  clipped.order = params.order;
  clipped.coords = coords_of(curve);
  clipped.color_params = params.color_params;
  if (!run.found) return ClippedScratch{params, PixelSupport{}};
  return ClippedScratch{std::move(clipped), slice(support, run.first, run.last)};
}

ScratchColor resolve_color(const std::array<double, 3>& color_params,
                           ColorMode mode, const Image& image) {
  ScratchColor color;
  switch (mode) {
    case ColorMode::PolychromeSaturated:
    case ColorMode::MonochromeSaturated:
      for (int c = 0; c < 3; ++c) {
        color.rgb[c] = color_params[c] >= 0.5 ? 1.0 : 0.0;
      }
      return color;
    case ColorMode::PolychromeGrayscale: {
      const double luminance = std::clamp(color_params[0], 0.0, 1.0);
      color.rgb = {luminance, luminance, luminance};
      return color;
    }
    case ColorMode::PolychromeImageColor: {
      const int row = static_cast<int>(std::lround(
          std::clamp(color_params[0], 0.0, 1.0) * (image.height - 1)));
      const int col = static_cast<int>(std::lround(
          std::clamp(color_params[1], 0.0, 1.0) * (image.width - 1)));
      for (int c = 0; c < 3; ++c) color.rgb[c] = image.at(row, col, c);
      return color;
    }
  }
  throw std::invalid_argument("resolve_color: unknown mode");
}

ScratchApplication apply_scratches(const Image& image,
                                   const std::vector<ScratchParams>& scratches,
                                   int k_per_scratch,
                                   const TargetRegion& region, ColorMode mode) {
  if (scratches.empty()) {
    throw std::invalid_argument("apply_scratches: scratch list is empty");
  }
  if (region.height != image.height || region.width != image.width) {
    throw std::invalid_argument("apply_scratches: region shape mismatch");
  }

  ScratchApplication result;
  result.image = image;
  result.scratches.reserve(scratches.size());
  result.colors.reserve(scratches.size());

  for (std::size_t s = 0; s < scratches.size(); ++s) {
    result.scratches.push_back(clip_scratch(scratches[s], k_per_scratch, region));
    const auto& color_source = (mode == ColorMode::MonochromeSaturated)
                                   ? scratches[0].color_params
                                   : scratches[s].color_params;
    result.colors.push_back(resolve_color(color_source, mode, image));
  }

  for (std::size_t s = 0; s < scratches.size(); ++s) {
    const ScratchColor& color = result.colors[s];
    for (const Pixel& px : result.scratches[s].support.pixels) {
      for (int c = 0; c < 3; ++c) {
        result.image.at(px.row, px.col, c) = color.rgb[c];
      }
    }
  }

  // Exact L0: distinct pixels of the support union whose final value differs
  // from the original.
  int l0 = 0;
  std::vector<std::uint8_t> visited(image.pixel_count(), 0);
  for (const ClippedScratch& clip : result.scratches) {
    for (const Pixel& px : clip.support.pixels) {
      const std::size_t idx =
          static_cast<std::size_t>(px.row) * image.width + px.col;
      if (visited[idx]) continue;
      visited[idx] = 1;
      for (int c = 0; c < 3; ++c) {
        if (result.image.at(px.row, px.col, c) != image.at(px.row, px.col, c)) {
          ++l0;
          break;
        }
      }
    }
  }
  result.total_l0 = l0;
  return result;
}

}  // namespace scratchkit
