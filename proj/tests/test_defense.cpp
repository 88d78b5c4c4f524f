#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "scratchkit/defense.hpp"
#include "scratchkit/png_io.hpp"
#include "scratchkit/toy_model.hpp"

using namespace scratchkit;

namespace {

const std::string kFixtures = SCRATCHKIT_FIXTURES_DIR;

double mean_abs_error(const Image& a, const Image& b) {
  double total = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    total += std::abs(a.data[i] - b.data[i]);
  }
  return total / static_cast<double>(a.data.size());
}

double max_abs_error(const Image& a, const Image& b) {
  double peak = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    peak = std::max(peak, std::abs(a.data[i] - b.data[i]));
  }
  return peak;
}

}  // namespace

TEST_CASE("defense spec parsing and naming") {
  CHECK(DefenseSpec::parse("median3x3").kind == DefenseKind::Median3x3);
  CHECK(DefenseSpec::parse("jpeg:85").jpeg_quality == 85);
  CHECK(DefenseSpec::parse("jpeg:85").name() == "jpeg:85");
  CHECK(DefenseSpec::median().name() == "median3x3");
  CHECK_THROWS_AS(DefenseSpec::parse("blur"), std::invalid_argument);
}

TEST_CASE("median filter: constants are fixed points, exactly") {
  // Defenses run on 8-bit data, so constants on the 8-bit grid round-trip
  // bit-identically.
  for (double v : {0.0, 64.0 / 255.0, 128.0 / 255.0, 1.0}) {
    const Image img = Image::filled(9, 11, v);
    CHECK(defend(img, DefenseSpec::median()) == img);
  }
}

TEST_CASE("median filter: interior one-pixel scratch is erased") {
  // Straight 1-px scratch through the interior of a constant background:
  // every scratch pixel has at least six background neighbors, so the
  // median restores the background exactly.
  const double bg = 64.0 / 255.0;
  Image img = Image::filled(32, 32, bg);
  int scratch_pixels = 0;
  for (int c = 3; c <= 28; ++c) {
    for (int ch = 0; ch < 3; ++ch) img.at(10, c, ch) = 1.0;
    ++scratch_pixels;
  }
  const Image defended = defend(img, DefenseSpec::median());
  int restored = 0;
  for (int c = 3; c <= 28; ++c) {
    bool ok = true;
    for (int ch = 0; ch < 3; ++ch) {
      if (defended.at(10, c, ch) != bg) ok = false;
    }
    restored += ok;
  }
  CHECK(restored >= static_cast<int>(0.95 * scratch_pixels));
  // Diagonal scratches also have minority windows.
  const double gray = 128.0 / 255.0;
  Image diag = Image::filled(32, 32, gray);
  for (int i = 4; i < 28; ++i) {
    for (int ch = 0; ch < 3; ++ch) diag.at(i, i, ch) = 0.0;
  }
  const Image defended_diag = defend(diag, DefenseSpec::median());
  int restored_diag = 0;
  for (int i = 4; i < 28; ++i) {
    if (defended_diag.at(i, i, 0) == gray) ++restored_diag;
  }
  CHECK(restored_diag >= static_cast<int>(0.95 * 24));
}

TEST_CASE("median filter: output values come from the input neighborhood") {
  Rng rng(51);
  const Image img = testutil::random_image(rng, 16, 16);
  const Image out = defend(img, DefenseSpec::median());
  for (int r = 0; r < 16; ++r) {
    for (int c = 0; c < 16; ++c) {
      for (int ch = 0; ch < 3; ++ch) {
        bool found = false;
        for (int dr = -1; dr <= 1 && !found; ++dr) {
          for (int dc = -1; dc <= 1 && !found; ++dc) {
            const int rr = std::clamp(r + dr, 0, 15);
            const int cc = std::clamp(c + dc, 0, 15);
            // 8-bit quantization happens before filtering.
            if (dequantize8(quantize8(img.at(rr, cc, ch))) == out.at(r, c, ch)) {
              found = true;
            }
          }
        }
        CHECK(found);
      }
    }
  }
}

TEST_CASE("jpeg: near-lossless at quality 100 on the smooth gradient") {
  const Image gradient = read_png(kFixtures + "/gradient.png");
  const Image decoded = defend(gradient, DefenseSpec::jpeg(100));
  CHECK(decoded.height == gradient.height);
  CHECK(decoded.width == gradient.width);
  CHECK(max_abs_error(gradient, decoded) <= 0.02);
}

TEST_CASE("jpeg: reconstruction error decreases with quality") {
  const Image gradient = read_png(kFixtures + "/gradient.png");
  const double e99 = mean_abs_error(gradient, defend(gradient, DefenseSpec::jpeg(99)));
  const double e95 = mean_abs_error(gradient, defend(gradient, DefenseSpec::jpeg(95)));
  const double e90 = mean_abs_error(gradient, defend(gradient, DefenseSpec::jpeg(90)));
  const double e85 = mean_abs_error(gradient, defend(gradient, DefenseSpec::jpeg(85)));
  CHECK(e99 <= e95);
  CHECK(e95 <= e90);
  CHECK(e90 <= e85);
  CHECK(e85 > 0.0);
}

TEST_CASE("jpeg: invalid quality factors are rejected") {
  const Image img = Image::filled(8, 8, 0.5);
  CHECK_THROWS_AS(defend(img, DefenseSpec::jpeg(0)), std::domain_error);
  CHECK_THROWS_AS(defend(img, DefenseSpec::jpeg(101)), std::domain_error);
  CHECK_NOTHROW(defend(img, DefenseSpec::jpeg(1)));
}

TEST_CASE("recovery rate: direct set arithmetic") {
  const std::vector<RecoveryFlags> flags = {
      {true, true, true},
      {true, true, false},  // defended but still wrong: not recovered
      {true, false, false},
  };
  CHECK(*recovery_rate(flags) == doctest::Approx(0.5));

  const std::vector<RecoveryFlags> all_recovered = {
      {true, true, true}, {true, true, true}};
  CHECK(*recovery_rate(all_recovered) == doctest::Approx(1.0));

  // Failed attacks never enter numerator or denominator.
  const std::vector<RecoveryFlags> no_successes = {
      {true, false, true}, {false, false, false}};
  CHECK_FALSE(recovery_rate(no_successes).has_value());

  const std::vector<RecoveryFlags> inconsistent = {{false, true, false}};
  CHECK_THROWS_AS(recovery_rate(inconsistent), std::invalid_argument);
}

TEST_CASE("clean accuracy delta: constant predictions yield zero delta") {
  // The oracle ignores pixels entirely, so any filtering leaves accuracy
  // unchanged.
  ConstantOracle oracle({0.1, 0.9});
  std::vector<CampaignImage> images;
  for (int i = 0; i < 4; ++i) {
    CampaignImage img;
    img.image_id = "c" + std::to_string(i);
    img.image = Image::filled(12, 12, 0.3 + 0.1 * i);
    img.region = TargetRegion::all_ones(12, 12);
    img.label = i % 2;
    images.push_back(std::move(img));
  }
  for (const DefenseSpec& spec : {DefenseSpec::median(), DefenseSpec::jpeg(85)}) {
    const AccuracyReport report = clean_accuracy_delta(images, oracle, spec);
    CHECK(report.clean_accuracy == doctest::Approx(0.5));
    CHECK(report.defended_accuracy == doctest::Approx(0.5));
    CHECK(report.delta == doctest::Approx(0.0));
  }
}

TEST_CASE("median defense keeps the toy model's clean accuracy intact") {
  ToyModel model = ToyModel::load_file(kFixtures + "/toy_model.json");
  const Image flat = Image::filled(model.input_height(), model.input_width(), 0.61);
  // Median filtering preserves constants exactly, so predictions agree.
  CHECK(model.classify(flat).label ==
        model.classify(defend(flat, DefenseSpec::median())).label);
}

TEST_CASE("median defense recovers scratch-attacked toy fixtures") {
  // End-to-end shape of the defense evaluation: attack, filter, re-classify.
  ToyModel model = ToyModel::load_file(kFixtures + "/toy_model.json");
  const Image img = read_png(kFixtures + "/images/img_00.png");
  const TargetRegion region = TargetRegion::all_ones(img.height, img.width);

  AttackConfig config;
  config.scratch_count = 3;
  config.per_scratch_l0 = 16;
  config.query_limit = 2000;

  int successes = 0;
  int recovered = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const AttackRecord record = attack_image(img, 0, region, config,
                                             Strategy::NgoLike, model, seed);
    if (!record.success) continue;
    ++successes;
    const ScratchApplication adv =
        apply_scratches(img, record.final_params, config.per_scratch_l0,
                        region, config.color_mode);
    const Image defended = defend(adv.image, DefenseSpec::median());
    if (model.classify(defended).label == 0) ++recovered;
  }
  REQUIRE(successes > 0);
  // 1-px scratches on smooth fixtures melt under a 3x3 median.
  CHECK(recovered == successes);
}
