#pragma once

#include <cstddef>
#include <vector>

namespace scratchkit {

// Planar point in continuous image coordinates: x runs along columns (width
// axis), y along rows (height axis). Points may lie outside the image;
// rasterization drops the out-of-bounds parts.
struct ControlPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const ControlPoint&, const ControlPoint&) = default;
};

// Polynomial curve of arbitrary order n >= 1 defined by n+1 control points.
// Evaluation and subdivision use de Casteljau's construction, so endpoints
// reproduce the first and last control point exactly.
class BezierCurve {
 public:
  // Throws std::invalid_argument with fewer than two control points.
  explicit BezierCurve(std::vector<ControlPoint> control_points);

  int order() const { return static_cast<int>(points_.size()) - 1; }
  const std::vector<ControlPoint>& control_points() const { return points_; }

  // Point at parameter t. Throws std::domain_error for t outside [0, 1].
  ControlPoint evaluate(double t) const;

  // Curve of the same order tracing exactly the [t0, t1] segment of this
  // curve: evaluate(result, s) == evaluate(*this, t0 + s*(t1 - t0)).
  // Throws std::domain_error unless 0 <= t0 < t1 <= 1.
  BezierCurve subdivide(double t0, double t1) const;

  // All control points coincide; the image of the curve is a single point.
  bool degenerate() const;

  // Total length of the control polygon; an upper bound on arc length.
  double control_polygon_length() const;

 private:
  std::vector<ControlPoint> points_;
};

struct Pixel {
  int row = 0;
  int col = 0;

  friend bool operator==(const Pixel&, const Pixel&) = default;
};

// Pixels a and b touch (share an edge or a corner) and are distinct.
bool eight_connected(const Pixel& a, const Pixel& b);

struct RasterBounds {
  int height = 0;
  int width = 0;
};

// Rasterized trace of a curve, ordered by curve parameter. No two adjacent
// entries are equal and params are increasing; each entry carries the
// smallest parameter that produced its pixel. Where the curve leaves the
// bounds and re-enters, the missing part splits the trace into runs whose
// boundary entries are not 8-connected; consumers treat such breaks as
// region exits.
struct PixelSupport {
  std::vector<Pixel> pixels;
  std::vector<double> params;

  std::size_t size() const { return pixels.size(); }
  bool empty() const { return pixels.empty(); }
};

enum class RasterQuality {
  // Sample grid refines the 10^4-point uniform parameter grid, so every
  // curve point evaluated on that grid rounds into the support.
  Exhaustive,
  // N = max(64, ceil(4 * control polygon length)) samples: sub-pixel steps,
  // an order of magnitude cheaper. Used inside the clipping pipeline.
  Fast,
};

// Nearest-pixel trace of the curve within bounds. Rounding is to nearest
// with ties away from zero. A degenerate in-bounds curve yields exactly one
// pixel; a curve entirely outside the bounds yields an empty support.
PixelSupport rasterize(const BezierCurve& curve, RasterBounds bounds,
                       RasterQuality quality = RasterQuality::Exhaustive);

}  // namespace scratchkit
