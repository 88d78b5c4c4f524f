#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "helpers.hpp"
#include "scratchkit/scratch.hpp"

using namespace scratchkit;
using testutil::dense_trace;
using testutil::pixel_set;
using testutil::walk_oracle;

namespace {

ScratchParams line_params(double x0, double y0, double x1, double y1,
                          std::array<double, 3> color = {1, 1, 1}) {
  ScratchParams p;
  p.order = 1;
  p.coords = {x0, y0, x1, y1};
  p.color_params = color;
  return p;
}

ScratchParams quad_params(std::vector<double> coords,
                          std::array<double, 3> color = {1, 1, 1}) {
  ScratchParams p;
  p.order = 2;
  p.coords = std::move(coords);
  p.color_params = color;
  return p;
}

ScratchParams random_scratch(Rng& rng, int order, int height, int width) {
  ScratchParams p;
  p.order = order;
  for (int i = 0; i <= order; ++i) {
    p.coords.push_back(rng.uniform(0.0, width - 1.0));
    p.coords.push_back(rng.uniform(0.0, height - 1.0));
  }
  p.color_params = {rng.uniform01(), rng.uniform01(), rng.uniform01()};
  return p;
}

}  // namespace

TEST_CASE("parameter vector round trip and splitting") {
  const ScratchParams p = quad_params({1, 2, 3, 4, 5, 6}, {0.1, 0.2, 0.3});
  const std::vector<double> flat = p.flatten();
  REQUIRE(flat.size() == 9);
  CHECK(ScratchParams::from_flat(flat, 2) == p);

  std::vector<double> two = flat;
  two.insert(two.end(), flat.begin(), flat.end());
  const auto parts = split_params(two, 2, 2);
  REQUIRE(parts.size() == 2);
  CHECK(parts[0] == p);
  CHECK(parts[1] == p);

  CHECK_THROWS_AS(split_params(two, 3, 2), std::invalid_argument);
  CHECK_THROWS_AS(ScratchParams::from_flat(flat, 3), std::invalid_argument);
}

TEST_CASE("attack config validation") {
  AttackConfig config;
  CHECK_NOTHROW(config.validate());
  config.scratch_count = 0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.scratch_count = 6;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = AttackConfig{};
  config.per_scratch_l0 = 0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = AttackConfig{};
  config.query_limit = 0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}

TEST_CASE("color mode names round trip") {
  for (const ColorMode mode :
       {ColorMode::PolychromeSaturated, ColorMode::MonochromeSaturated,
        ColorMode::PolychromeGrayscale, ColorMode::PolychromeImageColor}) {
    CHECK(color_mode_from_name(color_mode_name(mode)) == mode);
  }
  CHECK_THROWS_AS(color_mode_from_name("sepia"), std::invalid_argument);
}

TEST_CASE("clip: masked column segment matches the brute-force walk") {
  // Vertical segment from (x=0, y=0) to (x=0, y=9) on a 10x10 canvas; only
  // rows 2..7 of column 0 are perturbable; budget 4.
  const ScratchParams params = line_params(0, 0, 0, 9);
  TargetRegion region = TargetRegion::all_zeros(10, 10);
  for (int r = 2; r <= 7; ++r) region.set(r, 0, true);

  const ClippedScratch clipped = clip_scratch(params, 4, region);
  REQUIRE(clipped.support.size() == 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(clipped.support.pixels[i] == Pixel{2 + i, 0});
  }

  const auto oracle =
      walk_oracle(dense_trace(params.curve(), {10, 10}), region, 4);
  REQUIRE(oracle.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(clipped.support.pixels[i] == oracle[i]);

  // The clipped curve's own endpoints land on the clipped segment.
  const BezierCurve sub = clipped.params.curve();
  CHECK(std::lround(sub.evaluate(0.0).y) == 2);
  CHECK(std::lround(sub.evaluate(1.0).y) == 5);
  // Color parameters pass through unchanged.
  CHECK(clipped.params.color_params == params.color_params);
}

TEST_CASE("clip: unrestricted mask with a large budget keeps the whole trace") {
  const ScratchParams params = quad_params({1, 1, 10, 18, 19, 2});
  const TargetRegion region = TargetRegion::all_ones(20, 20);
  const PixelSupport raster =
      rasterize(params.curve(), {20, 20}, RasterQuality::Fast);
  const ClippedScratch clipped = clip_scratch(params, 10000, region);
  REQUIRE(clipped.support.size() == raster.size());
  for (std::size_t i = 0; i < raster.size(); ++i) {
    CHECK(clipped.support.pixels[i] == raster.pixels[i]);
  }
  // Untouched curve: parameters math the input's control points.
  CHECK(clipped.params == params);
}

TEST_CASE("clip: all-zero mask yields an empty support, not an error") {
  const ScratchParams params = quad_params({1, 1, 10, 18, 19, 2});
  const TargetRegion region = TargetRegion::all_zeros(20, 20);
  const ClippedScratch clipped = clip_scratch(params, 16, region);
  CHECK(clipped.support.empty());
}

TEST_CASE("clip: rejects invalid budget") {
  const ScratchParams params = line_params(0, 0, 5, 5);
  CHECK_THROWS_AS(clip_scratch(params, 0, TargetRegion::all_ones(8, 8)),
                  std::invalid_argument);
}

TEST_CASE("clip: random triples satisfy the clipping contract") {
  Rng rng(21);
  const int height = 32, width = 32;
  int exact_members = 0;
  int total_pixels = 0;
  for (int trial = 0; trial < 250; ++trial) {
    const int order = static_cast<int>(rng.uniform_int(1, 4));
    const ScratchParams params = random_scratch(rng, order, height, width);
    const TargetRegion region = testutil::random_region(rng, height, width);
    const int k = static_cast<int>(rng.uniform_int(1, 64));

    const ClippedScratch clipped = clip_scratch(params, k, region);
    CHECK(static_cast<int>(clipped.support.size()) <= k);
    for (std::size_t i = 0; i < clipped.support.size(); ++i) {
      const Pixel& px = clipped.support.pixels[i];
      CHECK(region.contains(px.row, px.col));
      if (i > 0) {
        CHECK(eight_connected(clipped.support.pixels[i - 1], px));
      }
    }

    // Subset of the unclipped support: exact membership dominates; any
    // rounding stray stays within Chebyshev distance 1.
    const auto unclipped = pixel_set(rasterize(params.curve(), {height, width}));
    for (const Pixel& px : clipped.support.pixels) {
      ++total_pixels;
      if (unclipped.count({px.row, px.col})) {
        ++exact_members;
      } else {
        bool near = false;
        for (int dr = -1; dr <= 1 && !near; ++dr) {
          for (int dc = -1; dc <= 1 && !near; ++dc) {
            near = unclipped.count({px.row + dr, px.col + dc}) > 0;
          }
        }
        CHECK(near);
      }
    }

    // Idempotence: re-clipping the clipped scratch is a no-op on the support.
    if (!clipped.support.empty()) {
      const ClippedScratch again = clip_scratch(clipped.params, k, region);
      REQUIRE(again.support.size() == clipped.support.size());
      for (std::size_t i = 0; i < clipped.support.size(); ++i) {
        CHECK(again.support.pixels[i] == clipped.support.pixels[i]);
      }
    }
  }
  if (total_pixels > 0) {
    CHECK(static_cast<double>(exact_members) >= 0.95 * total_pixels);
  }
}

TEST_CASE("resolve_color: saturated thresholding") {
  const Image img = Image::filled(4, 4, 0.5);
  const ScratchColor c = resolve_color({200.0 / 255.0, 10.0 / 255.0, 128.0 / 255.0},
                                       ColorMode::PolychromeSaturated, img);
  CHECK(c.rgb == std::array<double, 3>{1.0, 0.0, 1.0});

  // All eight saturated corners are reachable.
  for (int bits = 0; bits < 8; ++bits) {
    const std::array<double, 3> params{bits & 1 ? 0.9 : 0.1,
                                       bits & 2 ? 0.9 : 0.1,
                                       bits & 4 ? 0.9 : 0.1};
    const ScratchColor corner =
        resolve_color(params, ColorMode::PolychromeSaturated, img);
    CHECK(corner.rgb[0] == (bits & 1 ? 1.0 : 0.0));
    CHECK(corner.rgb[1] == (bits & 2 ? 1.0 : 0.0));
    CHECK(corner.rgb[2] == (bits & 4 ? 1.0 : 0.0));
  }
}

TEST_CASE("resolve_color: grayscale and image-color modes") {
  const Image gray_img = Image::filled(4, 4, 0.5);
  const ScratchColor gray =
      resolve_color({0.5, 0.0, 0.9}, ColorMode::PolychromeGrayscale, gray_img);
  CHECK(gray.rgb == std::array<double, 3>{0.5, 0.5, 0.5});

  Image red = Image::filled(6, 6, 0.0);
  for (int r = 0; r < 6; ++r) {
    for (int c = 0; c < 6; ++c) red.at(r, c, 0) = 1.0;
  }
  for (double a : {0.0, 0.33, 0.99}) {
    const ScratchColor pick =
        resolve_color({a, 1.0 - a, 0.5}, ColorMode::PolychromeImageColor, red);
    CHECK(pick.rgb == std::array<double, 3>{1.0, 0.0, 0.0});
  }
}

TEST_CASE("apply: overwrite semantics for identical scratches") {
  const Image img = Image::filled(16, 16, 0.5);
  const TargetRegion region = TargetRegion::all_ones(16, 16);
  // Same geometry, different colors: black then red.
  std::vector<ScratchParams> scratches = {
      line_params(2, 3, 13, 3, {0.0, 0.0, 0.0}),
      line_params(2, 3, 13, 3, {1.0, 0.0, 0.0}),
  };
  const ScratchApplication out = apply_scratches(
      img, scratches, 64, region, ColorMode::PolychromeSaturated);
  REQUIRE(!out.scratches[1].support.empty());
  for (const Pixel& px : out.scratches[1].support.pixels) {
    CHECK(out.image.at(px.row, px.col, 0) == 1.0);
    CHECK(out.image.at(px.row, px.col, 1) == 0.0);
    CHECK(out.image.at(px.row, px.col, 2) == 0.0);
  }
  CHECK(out.total_l0 == static_cast<int>(out.scratches[1].support.size()));
}

TEST_CASE("apply: three full-length disjoint scratches reach the L0 budget") {
  // Three 133-pixel horizontal scratches on distinct rows: L0 = 399.
  const Image img = Image::filled(200, 200, 0.5);
  const TargetRegion region = TargetRegion::all_ones(200, 200);
  std::vector<ScratchParams> scratches = {
      line_params(5, 50, 190, 50, {0.0, 0.9, 0.0}),
      line_params(5, 100, 190, 100, {0.9, 0.0, 0.0}),
      line_params(5, 150, 190, 150, {0.0, 0.0, 0.9}),
  };
  const ScratchApplication out = apply_scratches(
      img, scratches, 133, region, ColorMode::PolychromeSaturated);
  for (const ClippedScratch& clip : out.scratches) {
    CHECK(clip.support.size() == 133);
  }
  CHECK(out.total_l0 == 399);
}

TEST_CASE("apply: painting the background color changes nothing") {
  const Image img = Image::filled(16, 16, 1.0);
  const TargetRegion region = TargetRegion::all_ones(16, 16);
  std::vector<ScratchParams> scratches = {
      line_params(2, 3, 13, 9, {1.0, 1.0, 1.0})};
  const ScratchApplication out = apply_scratches(
      img, scratches, 64, region, ColorMode::PolychromeSaturated);
  CHECK(out.total_l0 == 0);
  CHECK(out.image == img);
}

TEST_CASE("apply: monochrome mode shares scratch 0's color") {
  const Image img = Image::filled(24, 24, 0.5);
  const TargetRegion region = TargetRegion::all_ones(24, 24);
  std::vector<ScratchParams> scratches = {
      line_params(1, 1, 20, 1, {0.9, 0.9, 0.1}),   // resolves to yellow
      line_params(1, 10, 20, 10, {0.1, 0.1, 0.9}),  // own params ignored
  };
  const ScratchApplication out = apply_scratches(
      img, scratches, 64, region, ColorMode::MonochromeSaturated);
  for (const ClippedScratch& clip : out.scratches) {
    for (const Pixel& px : clip.support.pixels) {
      CHECK(out.image.at(px.row, px.col, 0) == 1.0);
      CHECK(out.image.at(px.row, px.col, 1) == 1.0);
      CHECK(out.image.at(px.row, px.col, 2) == 0.0);
    }
  }
}

TEST_CASE("apply: empty scratch list is rejected") {
  const Image img = Image::filled(8, 8, 0.5);
  CHECK_THROWS_AS(apply_scratches(img, {}, 8, TargetRegion::all_ones(8, 8),
                                  ColorMode::PolychromeSaturated),
                  std::invalid_argument);
}

TEST_CASE("apply: random configurations respect the L0 bound and the region") {
  Rng rng(22);
  const int height = 28, width = 28;
  for (int trial = 0; trial < 150; ++trial) {
    const int n_scratches = static_cast<int>(rng.uniform_int(1, 5));
    const int k = static_cast<int>(rng.uniform_int(1, 40));
    const int order = static_cast<int>(rng.uniform_int(1, 3));
    const ColorMode mode = static_cast<ColorMode>(rng.uniform_int(0, 3));
    const Image img = testutil::random_image(rng, height, width);
    const TargetRegion region = testutil::random_region(rng, height, width);

    std::vector<ScratchParams> scratches;
    for (int s = 0; s < n_scratches; ++s) {
      scratches.push_back(random_scratch(rng, order, height, width));
    }
    const ScratchApplication out =
        apply_scratches(img, scratches, k, region, mode);

    CHECK(out.total_l0 <= n_scratches * k);

    // Localization and locality, exact: every changed pixel is in-region and
    // in some clipped support.
    std::set<std::pair<int, int>> support_union;
    for (const ClippedScratch& clip : out.scratches) {
      for (const Pixel& px : clip.support.pixels) {
        support_union.insert({px.row, px.col});
      }
    }
    int changed = 0;
    for (int r = 0; r < height; ++r) {
      for (int c = 0; c < width; ++c) {
        bool differs = false;
        for (int ch = 0; ch < 3; ++ch) {
          if (out.image.at(r, c, ch) != img.at(r, c, ch)) differs = true;
        }
        if (differs) {
          ++changed;
          CHECK(region.contains(r, c));
          CHECK(support_union.count({r, c}) == 1);
        }
      }
    }
    CHECK(changed == out.total_l0);
  }
}
