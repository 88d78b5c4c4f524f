#include "scratchkit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace scratchkit {

namespace {

constexpr int kExhaustiveGrid = 10000;  // matches the coverage check grid

ControlPoint lerp(const ControlPoint& a, const ControlPoint& b, double t) {
  return {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t};
}

// Full de Casteljau triangle evaluated in place; returns the apex.
ControlPoint de_casteljau(std::vector<ControlPoint> pts, double t) {
  for (std::size_t level = pts.size() - 1; level > 0; --level) {
    for (std::size_t i = 0; i < level; ++i) {
      pts[i] = lerp(pts[i], pts[i + 1], t);
    }
  }
  return pts[0];
}

// Control points of the [0, u] segment: the first point of each triangle row.
std::vector<ControlPoint> split_left(std::vector<ControlPoint> pts, double u) {
  std::vector<ControlPoint> left;
  left.reserve(pts.size());
  left.push_back(pts[0]);
  for (std::size_t level = pts.size() - 1; level > 0; --level) {
    for (std::size_t i = 0; i < level; ++i) {
      pts[i] = lerp(pts[i], pts[i + 1], u);
    }
    left.push_back(pts[0]);
  }
  return left;
}

// Control points of the [u, 1] segment: the last point of each triangle row,
// reversed so the apex comes first and the parametrization direction is kept.
std::vector<ControlPoint> split_right(std::vector<ControlPoint> pts, double u) {
  std::vector<ControlPoint> right;
  right.reserve(pts.size());
  right.push_back(pts.back());
  for (std::size_t level = pts.size() - 1; level > 0; --level) {
    for (std::size_t i = 0; i < level; ++i) {
      pts[i] = lerp(pts[i], pts[i + 1], u);
    }
    right.push_back(pts[level - 1]);
  }
  std::reverse(right.begin(), right.end());
  return right;
}

int round_coord(double v) {
  // Nearest integer, ties away from zero.
  return static_cast<int>(std::lround(v));
}

}  // namespace

BezierCurve::BezierCurve(std::vector<ControlPoint> control_points)
    : points_(std::move(control_points)) {
  if (points_.size() < 2) {
    throw std::invalid_argument(
        "BezierCurve: at least two control points required");
  }
  for (const ControlPoint& p : points_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw std::invalid_argument("BezierCurve: control points must be finite");
    }
  }
}

ControlPoint BezierCurve::evaluate(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::domain_error("BezierCurve::evaluate: t outside [0, 1]");
  }
  return de_casteljau(points_, t);
}

BezierCurve BezierCurve::subdivide(double t0, double t1) const {
  if (!(t0 >= 0.0 && t0 < t1 && t1 <= 1.0)) {
    throw std::domain_error("BezierCurve::subdivide: need 0 <= t0 < t1 <= 1");
  }
  std::vector<ControlPoint> segment = points_;
  if (t0 > 0.0) {
    segment = split_right(std::move(segment), t0);
  }
  if (t1 < 1.0) {
    // End parameter re-expressed locally to the [t0, 1] segment.
    const double local = std::clamp((t1 - t0) / (1.0 - t0), 0.0, 1.0);
    segment = split_left(std::move(segment), local);
  }
  return BezierCurve(std::move(segment));
}

bool BezierCurve::degenerate() const {
  return std::all_of(points_.begin(), points_.end(),
                     [&](const ControlPoint& p) { return p == points_[0]; });
}

double BezierCurve::control_polygon_length() const {
  double length = 0.0;
  for (std::size_t i = 1; i < points_.size(); ++i) {
    length += std::hypot(points_[i].x - points_[i - 1].x,
                         points_[i].y - points_[i - 1].y);
  }
  return length;
}

bool eight_connected(const Pixel& a, const Pixel& b) {
  if (a == b) return false;
  return std::abs(a.row - b.row) <= 1 && std::abs(a.col - b.col) <= 1;
}

PixelSupport rasterize(const BezierCurve& curve, RasterBounds bounds,
                       RasterQuality quality) {
  if (bounds.height < 1 || bounds.width < 1) {
    throw std::invalid_argument("rasterize: bounds must be at least 1x1");
  }
  const double fast_n = std::max(64.0, std::ceil(4.0 * curve.control_polygon_length()));
  if (!(fast_n <= 64.0 * 1024 * 1024)) {
    throw std::invalid_argument("rasterize: control polygon is absurdly long");
  }
  long samples;
  if (quality == RasterQuality::Fast) {
    samples = static_cast<long>(fast_n);
  } else {
    // Smallest N with N - 1 a multiple of (grid - 1) and N >= the fast
    // density, so the coverage grid is a subset of the sample grid.
    const long step = kExhaustiveGrid - 1;
    const long need = std::max<long>(static_cast<long>(fast_n) - 1, step);
    samples = ((need + step - 1) / step) * step + 1;
  }

  PixelSupport support;
  // Division (not increment) keeps grid points bit-identical to j/(N-1)
  // evaluated elsewhere, including every point of the coverage grid.
  const double denom = static_cast<double>(samples - 1);
  for (long i = 0; i < samples; ++i) {
    const double t = static_cast<double>(i) / denom;
    const ControlPoint p = curve.evaluate(t);
    const Pixel px{round_coord(p.y), round_coord(p.x)};
    if (px.row < 0 || px.row >= bounds.height || px.col < 0 ||
        px.col >= bounds.width) {
      continue;
    }
    if (!support.pixels.empty() && support.pixels.back() == px) {
      continue;
    }
    support.pixels.push_back(px);
    support.params.push_back(t);
  }
  return support;
}

}  // namespace scratchkit
