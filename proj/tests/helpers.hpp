#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include "scratchkit/geometry.hpp"
#include "scratchkit/image.hpp"
#include "scratchkit/rng.hpp"
#include "scratchkit/scratch.hpp"

namespace testutil {

using scratchkit::BezierCurve;
using scratchkit::ControlPoint;
using scratchkit::Pixel;
using scratchkit::PixelSupport;
using scratchkit::RasterBounds;
using scratchkit::Rng;
using scratchkit::TargetRegion;

// ---------------------------------------------------------------------------
// Independent oracles. These mirror the operations' definitions directly and
// deliberately share no code with the library implementations they check.

// Bernstein-basis evaluation: sum_i C(n,i) (1-t)^(n-i) t^i P_i.
inline ControlPoint bernstein_eval(const BezierCurve& curve, double t) {
  const auto& pts = curve.control_points();
  const int n = curve.order();
  double x = 0.0, y = 0.0;
  for (int i = 0; i <= n; ++i) {
    double binom = 1.0;
    for (int j = 0; j < i; ++j) {
      binom *= static_cast<double>(n - j) / static_cast<double>(j + 1);
    }
    const double w = binom * std::pow(1.0 - t, n - i) * std::pow(t, i);
    x += w * pts[i].x;
    y += w * pts[i].y;
  }
  return {x, y};
}

// Brute-force trace: dense uniform sampling, round to nearest (ties away
// from zero), drop out-of-bounds, dedupe consecutive repeats.
inline std::vector<Pixel> dense_trace(const BezierCurve& curve,
                                      RasterBounds bounds, int samples = 10000) {
  std::vector<Pixel> out;
  for (int i = 0; i < samples; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(samples - 1);
    const ControlPoint p = curve.evaluate(t);
    const Pixel px{static_cast<int>(std::lround(p.y)),
                   static_cast<int>(std::lround(p.x))};
    if (px.row < 0 || px.row >= bounds.height || px.col < 0 ||
        px.col >= bounds.width) {
      continue;
    }
    if (!out.empty() && out.back() == px) continue;
    out.push_back(px);
  }
  return out;
}

inline std::set<std::pair<int, int>> pixel_set(const std::vector<Pixel>& pixels) {
  std::set<std::pair<int, int>> s;
  for (const Pixel& p : pixels) s.insert({p.row, p.col});
  return s;
}

inline std::set<std::pair<int, int>> pixel_set(const PixelSupport& support) {
  return pixel_set(support.pixels);
}

// Brute-force clip walk over a dense trace: first in-region pixel, then
// extend while in-region, 8-connected, and under the pixel budget.
inline std::vector<Pixel> walk_oracle(const std::vector<Pixel>& trace,
                                      const TargetRegion& region, int k) {
  std::vector<Pixel> out;
  std::size_t i = 0;
  for (; i < trace.size(); ++i) {
    if (region.contains(trace[i].row, trace[i].col)) break;
  }
  if (i == trace.size()) return out;
  out.push_back(trace[i]);
  for (++i; i < trace.size() && static_cast<int>(out.size()) < k; ++i) {
    if (!region.contains(trace[i].row, trace[i].col)) break;
    if (std::max(std::abs(trace[i].row - out.back().row),
                 std::abs(trace[i].col - out.back().col)) > 1) {
      break;
    }
    out.push_back(trace[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Generators.

inline BezierCurve random_curve(Rng& rng, int order, double lo_x, double hi_x,
                                double lo_y, double hi_y) {
  std::vector<ControlPoint> pts;
  pts.reserve(order + 1);
  for (int i = 0; i <= order; ++i) {
    pts.push_back({rng.uniform(lo_x, hi_x), rng.uniform(lo_y, hi_y)});
  }
  return BezierCurve(std::move(pts));
}

// Curve whose convex hull sits strictly inside the bounds, so every curve
// point rounds to an in-bounds pixel.
inline BezierCurve random_inner_curve(Rng& rng, int order, RasterBounds bounds) {
  return random_curve(rng, order, 1.0, bounds.width - 2.0, 1.0,
                      bounds.height - 2.0);
}

inline scratchkit::Image random_image(Rng& rng, int height, int width) {
  scratchkit::Image img = scratchkit::Image::filled(height, width, 0.0);
  for (double& v : img.data) v = rng.uniform01();
  return img;
}

// Random blob-shaped region: union of a few disks, plus optional full fill.
inline TargetRegion random_region(Rng& rng, int height, int width) {
  TargetRegion region = TargetRegion::all_zeros(height, width);
  const int disks = static_cast<int>(rng.uniform_int(1, 3));
  for (int d = 0; d < disks; ++d) {
    const double cy = rng.uniform(0.0, height - 1.0);
    const double cx = rng.uniform(0.0, width - 1.0);
    const double radius = rng.uniform(2.0, 0.4 * std::min(height, width));
    for (int r = 0; r < height; ++r) {
      for (int c = 0; c < width; ++c) {
        const double dy = r - cy, dx = c - cx;
        if (dy * dy + dx * dx <= radius * radius) region.set(r, c, true);
      }
    }
  }
  return region;
}

// ---------------------------------------------------------------------------
// Convex hull membership with tolerance (Andrew monotone chain + halfplane
// checks), for the hull invariant.

inline double cross(const ControlPoint& o, const ControlPoint& a,
                    const ControlPoint& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

inline std::vector<ControlPoint> convex_hull(std::vector<ControlPoint> pts) {
  std::sort(pts.begin(), pts.end(), [](const ControlPoint& a, const ControlPoint& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const ControlPoint& a, const ControlPoint& b) {
                          return a.x == b.x && a.y == b.y;
                        }),
            pts.end());
  if (pts.size() < 3) return pts;
  std::vector<ControlPoint> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = pts.size() - 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

inline bool in_hull(const std::vector<ControlPoint>& control_points,
                    const ControlPoint& p, double tol) {
  const std::vector<ControlPoint> hull = convex_hull(control_points);
  if (hull.size() == 1) {
    return std::abs(p.x - hull[0].x) <= tol && std::abs(p.y - hull[0].y) <= tol;
  }
  if (hull.size() == 2) {
    // Distance to the segment.
    const double vx = hull[1].x - hull[0].x, vy = hull[1].y - hull[0].y;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0 ? ((p.x - hull[0].x) * vx + (p.y - hull[0].y) * vy) / len2
                        : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = p.x - (hull[0].x + t * vx);
    const double dy = p.y - (hull[0].y + t * vy);
    return std::hypot(dx, dy) <= tol;
  }
  // Counter-clockwise polygon: p is inside when no edge sees it on the right
  // beyond tolerance (scaled by edge length to make the test metric).
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const ControlPoint& a = hull[i];
    const ControlPoint& b = hull[(i + 1) % hull.size()];
    const double edge_len = std::hypot(b.x - a.x, b.y - a.y);
    if (edge_len == 0.0) continue;
    if (cross(a, b, p) < -tol * edge_len) return false;
  }
  return true;
}

}  // namespace testutil
