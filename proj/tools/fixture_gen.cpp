// Generates the bundled desk-scale fixtures: a 24x24 synthetic image set
// with known labels, the toy classifier weights, target-region masks for a
// subset of images, attackability certificates found by brute-force grid
// search, and a smooth gradient image for codec tests. Everything is
// deterministic in the seed, so regeneration reproduces the shipped files.

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "scratchkit/attack.hpp"
#include "scratchkit/image.hpp"
#include "scratchkit/oracle.hpp"
#include "scratchkit/png_io.hpp"
#include "scratchkit/rng.hpp"
#include "scratchkit/scratch.hpp"
#include "scratchkit/toy_model.hpp"

using namespace scratchkit;
using nlohmann::json;

namespace {

constexpr int kSide = 24;
constexpr int kClasses = 4;  // red, green, bright, blue
constexpr int kImages = 20;
constexpr int kTotalL0 = 48;  // 3 scratches x 16 px in the toy experiment

// ---------------------------------------------------------------------------
// Toy model construction.

// Conv stage: one 3x3 box filter per input channel (stride 2, padding 1),
// so features are local channel means. The dense head scores each class by
// a fixed mix of the pooled channel means:
//   red    ( 2, -1, -1)
//   green  (-1,  2, -1)
//   bright ( 1,  1,  1) with a bias placing the threshold near gray 0.52
//   blue   (-1, -1,  2)
json build_model_json(double bright_bias) {
  json conv;
  conv["type"] = "conv";
  conv["out_channels"] = 3;
  conv["kernel"] = {3, 3};
  conv["stride"] = 2;
  conv["padding"] = 1;
  std::vector<double> conv_weights(3 * 3 * 3 * 3, 0.0);
  for (int oc = 0; oc < 3; ++oc) {
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        conv_weights[((oc * 3 + oc) * 3 + ky) * 3 + kx] = 1.0 / 9.0;
      }
    }
  }
  conv["weights"] = conv_weights;
  conv["bias"] = {0.0, 0.0, 0.0};

  const int cells = (kSide / 2) * (kSide / 2);  // 12x12 feature map
  const double a[kClasses][3] = {
      {2.0, -1.0, -1.0}, {-1.0, 2.0, -1.0}, {1.0, 1.0, 1.0}, {-1.0, -1.0, 2.0}};
  std::vector<double> dense_weights(static_cast<std::size_t>(kClasses) * cells * 3);
  for (int cls = 0; cls < kClasses; ++cls) {
    for (int cell = 0; cell < cells; ++cell) {
      for (int ch = 0; ch < 3; ++ch) {
        dense_weights[(static_cast<std::size_t>(cls) * cells + cell) * 3 + ch] =
            a[cls][ch] / static_cast<double>(cells);
      }
    }
  }
  json dense;
  dense["type"] = "dense";
  dense["out_features"] = kClasses;
  dense["weights"] = dense_weights;
  dense["bias"] = {0.0, 0.0, bright_bias, 0.0};

  json doc;
  doc["input_shape"] = {kSide, kSide, 3};
  doc["layers"] = json::array({conv, json{{"type", "relu"}},
                               json{{"type", "flatten"}}, dense});
  return doc;
}

// ---------------------------------------------------------------------------
// Image synthesis.

Image quantized(const Image& img) {
  Image out = img;
  for (double& v : out.data) v = dequantize8(quantize8(v));
  return out;
}

Image synth_image(Rng& rng, int label, bool masked) {
  std::array<double, 3> mean{};
  const double delta =
      masked ? rng.uniform(0.024, 0.032) : rng.uniform(0.036, 0.046);
  switch (label) {
    case 0: mean = {0.5 + delta, 0.5 - delta / 2, 0.5 - delta / 2}; break;
    case 1: mean = {0.5 - delta / 2, 0.5 + delta, 0.5 - delta / 2}; break;
    case 3: mean = {0.5 - delta / 2, 0.5 - delta / 2, 0.5 + delta}; break;
    case 2: {
      const double g =
          masked ? rng.uniform(0.555, 0.568) : rng.uniform(0.572, 0.588);
      mean = {g, g, g};
      break;
    }
    default: throw std::logic_error("bad label");
  }

  Image img = Image::filled(kSide, kSide, 0.0);
  for (int ch = 0; ch < 3; ++ch) {
    // Two low-frequency waves per channel keep the picture smooth but
    // non-constant; amplitudes stay small so the label is set by the means.
    const double a1 = rng.uniform(0.008, 0.020);
    const double a2 = rng.uniform(0.008, 0.020);
    const double fr1 = static_cast<double>(rng.uniform_int(1, 3));
    const double fc1 = static_cast<double>(rng.uniform_int(1, 3));
    const double fr2 = static_cast<double>(rng.uniform_int(1, 2));
    const double fc2 = static_cast<double>(rng.uniform_int(1, 3));
    const double p1 = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double p2 = rng.uniform(0.0, 2.0 * std::numbers::pi);
    for (int r = 0; r < kSide; ++r) {
      for (int c = 0; c < kSide; ++c) {
        const double w1 = std::sin(2.0 * std::numbers::pi *
                                       (fr1 * r + fc1 * c) / kSide + p1);
        const double w2 = std::cos(2.0 * std::numbers::pi *
                                       (fr2 * r - fc2 * c) / kSide + p2);
        img.at(r, c, ch) = std::clamp(mean[ch] + a1 * w1 + a2 * w2, 0.02, 0.98);
      }
    }
  }
  return quantized(img);
}

TargetRegion disk_region(int radius) {
  TargetRegion region = TargetRegion::all_zeros(kSide, kSide);
  const double center = (kSide - 1) / 2.0;
  for (int r = 0; r < kSide; ++r) {
    for (int c = 0; c < kSide; ++c) {
      const double dr = r - center, dc = c - center;
      if (dr * dr + dc * dc <= static_cast<double>(radius) * radius) {
        region.set(r, c, true);
      }
    }
  }
  return region;
}

// ---------------------------------------------------------------------------
// Brute-force certification: coarse grid over single quadratic scratches
// (straight and bowed) in all eight saturated colors.

struct Certificate {
  ScratchParams params;
  double margin = 0.0;
  int l0 = 0;
};

struct TargetedCertificate {
  ScratchParams params;
  int target = -1;
};

struct CertificationResult {
  std::optional<Certificate> untargeted;
  std::optional<TargetedCertificate> targeted;
};

CertificationResult certify(const ToyModel& model, const Image& image,
                            int label, const TargetRegion& region) {
  CertificationResult result;
  const std::vector<double> grid = {2, 6, 10, 14, 18, 21};
  const std::vector<double> bows = {0.0, -5.0, 5.0};

  for (double x0 : grid) {
    for (double y0 : grid) {
      for (double x1 : grid) {
        for (double y1 : grid) {
          if (std::max(std::abs(x1 - x0), std::abs(y1 - y0)) < 10.0) continue;
          if (x1 < x0 || (x1 == x0 && y1 < y0)) continue;  // unordered pairs
          for (double bow : bows) {
            // Midpoint control point, optionally pushed along the normal.
            const double mx = 0.5 * (x0 + x1), my = 0.5 * (y0 + y1);
            const double len = std::hypot(x1 - x0, y1 - y0);
            const double nx = -(y1 - y0) / len, ny = (x1 - x0) / len;
            ScratchParams params;
            params.order = 2;
            params.coords = {x0, y0,
                             std::clamp(mx + bow * nx, 0.0, kSide - 1.0),
                             std::clamp(my + bow * ny, 0.0, kSide - 1.0),
                             x1, y1};
            for (int color = 0; color < 8; ++color) {
              params.color_params = {color & 1 ? 1.0 : 0.0,
                                     color & 2 ? 1.0 : 0.0,
                                     color & 4 ? 1.0 : 0.0};
              const ScratchApplication out =
                  apply_scratches(image, {params}, kTotalL0, region,
                                  ColorMode::PolychromeSaturated);
              if (out.total_l0 == 0) continue;
              const ScoreVector scores = model.forward(out.image);
              const double margin = margin_loss(scores, label);
              if (margin < 0.0 &&
                  (!result.untargeted || margin < result.untargeted->margin)) {
                result.untargeted = Certificate{params, margin, out.total_l0};
              }
              if (!result.targeted) {
                const int pred = argmax_label(scores);
                if (pred != label) {
                  result.targeted = TargetedCertificate{params, pred};
                }
              }
            }
          }
        }
      }
    }
  }
  return result;
}

Image make_gradient(int height, int width) {
  Image img = Image::filled(height, width, 0.0);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const double u = static_cast<double>(c) / (width - 1);
      const double v = static_cast<double>(r) / (height - 1);
      img.at(r, c, 0) = 0.15 + 0.7 * u;
      img.at(r, c, 1) = 0.15 + 0.7 * v;
      img.at(r, c, 2) = std::clamp(
          0.5 + 0.25 * std::sin(2.0 * std::numbers::pi * c / 16.0) *
                    std::sin(2.0 * std::numbers::pi * r / 12.0) +
              0.15 * (u - v),
          0.0, 1.0);
    }
  }
  return img;
}

json params_json(const ScratchParams& p) {
  return json{{"order", p.order},
              {"coords", p.coords},
              {"color_params", p.color_params}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate the bundled fixture set (images, masks, toy model, "
               "certificates, gradient)"};
  std::string out_dir = "fixtures";
  std::uint64_t seed = 1449;
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--seed", seed, "Generation seed");
  CLI11_PARSE(app, argc, argv);

  namespace fs = std::filesystem;
  fs::create_directories(fs::path(out_dir) / "images");
  fs::create_directories(fs::path(out_dir) / "masks");

  // Calibrate the bright-class bias from the measured border attenuation of
  // the box-filter features: threshold sits at gray level 0.52.
  ToyModel probe = ToyModel::parse(build_model_json(0.0).dump());
  const double f = probe.forward(Image::filled(kSide, kSide, 1.0))[2] / 3.0;
  const double bright_bias = -3.0 * 0.52 * f;
  const json model_json = build_model_json(bright_bias);
  ToyModel model = ToyModel::parse(model_json.dump());
  std::printf("feature attenuation f = %.6f, bright bias = %.6f\n", f,
              bright_bias);

  // Class plan: 6 red, 5 green, 3 bright, 6 blue. Images 15..19 get a disk
  // mask to exercise the localization path end to end.
  std::vector<int> labels;
  for (int i = 0; i < 6; ++i) labels.push_back(0);
  for (int i = 0; i < 5; ++i) labels.push_back(1);
  for (int i = 0; i < 3; ++i) labels.push_back(2);
  for (int i = 0; i < 6; ++i) labels.push_back(3);

  const TargetRegion disk = disk_region(10);
  json manifest = json::array();
  json cert_entries = json::array();
  std::vector<std::pair<std::string, Image>> staged_images;
  std::vector<std::pair<std::string, TargetRegion>> staged_masks;

  for (int index = 0; index < kImages; ++index) {
    const int label = labels[index];
    const bool masked = index >= 15;
    const TargetRegion& region =
        masked ? disk : TargetRegion::all_ones(kSide, kSide);

    Image image;
    CertificationResult certs;
    double clean_margin = 0.0;
    bool ok = false;
    for (int attempt = 0; attempt < 60 && !ok; ++attempt) {
      Rng rng(mix_seed(seed, static_cast<std::uint64_t>(index) * 1000 + attempt));
      image = synth_image(rng, label, masked);
      const ScoreVector scores = model.forward(image);
      if (argmax_label(scores) != label) continue;
      clean_margin = margin_loss(scores, label);
      const double min_margin = masked ? 0.05 : 0.08;
      if (clean_margin < min_margin || clean_margin > 0.24) continue;
      certs = certify(model, image, label, region);
      if (!certs.untargeted || certs.untargeted->margin > -0.015) continue;
      if (!certs.targeted) continue;
      ok = true;
    }
    if (!ok) {
      std::fprintf(stderr, "image %02d (label %d): no certifiable sample\n",
                   index, label);
      return 1;  // nothing written yet: fixtures stay consistent
    }

    char name[32];
    std::snprintf(name, sizeof(name), "img_%02d", index);
    const std::string image_rel = std::string("images/") + name + ".png";
    staged_images.emplace_back(image_rel, image);

    json entry;
    entry["image_id"] = name;
    entry["image_path"] = image_rel;
    entry["label"] = label;
    if (masked) {
      const std::string mask_rel = std::string("masks/") + name + "_mask.png";
      staged_masks.emplace_back(mask_rel, disk);
      entry["mask_path"] = mask_rel;
    }
    manifest.push_back(entry);

    json cert;
    cert["image_id"] = name;
    cert["label"] = label;
    cert["clean_margin"] = clean_margin;
    cert["untargeted"] = params_json(certs.untargeted->params);
    cert["untargeted"]["margin"] = certs.untargeted->margin;
    cert["untargeted"]["l0"] = certs.untargeted->l0;
    cert["targeted"] = params_json(certs.targeted->params);
    cert["targeted"]["target"] = certs.targeted->target;
    cert_entries.push_back(cert);

    std::printf("img_%02d label %d clean margin %.4f cert margin %.4f%s\n",
                index, label, clean_margin, certs.untargeted->margin,
                masked ? " (masked)" : "");
  }

  // All twenty images certified; only now touch the output tree.
  {
    std::ofstream out(fs::path(out_dir) / "toy_model.json");
    out << model_json.dump() << '\n';
  }
  for (const auto& [rel, img] : staged_images) {
    write_png((fs::path(out_dir) / rel).string(), img);
  }
  for (const auto& [rel, mask] : staged_masks) {
    write_mask_png((fs::path(out_dir) / rel).string(), mask);
  }
  {
    std::ofstream out(fs::path(out_dir) / "manifest.json");
    out << manifest.dump(2) << '\n';
  }
  {
    json certs;
    certs["seed"] = seed;
    certs["k_total"] = kTotalL0;
    certs["entries"] = cert_entries;
    std::ofstream out(fs::path(out_dir) / "certificates.json");
    out << certs.dump(2) << '\n';
  }

  write_png((fs::path(out_dir) / "gradient.png").string(), make_gradient(48, 64));
  std::printf("fixtures written to %s\n", out_dir.c_str());
  return 0;
}
