#include "scratchkit/defense.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

#include "jpeg_codec.hpp"

namespace scratchkit {

DefenseSpec DefenseSpec::median() { return DefenseSpec{DefenseKind::Median3x3, 0}; }

DefenseSpec DefenseSpec::jpeg(int quality) {
  return DefenseSpec{DefenseKind::Jpeg, quality};
}

std::string DefenseSpec::name() const {
  switch (kind) {
    case DefenseKind::Median3x3: return "median3x3";
    case DefenseKind::Jpeg: return "jpeg:" + std::to_string(jpeg_quality);
  }
  throw std::invalid_argument("unknown defense kind");
}

DefenseSpec DefenseSpec::parse(const std::string& text) {
  if (text == "median3x3" || text == "median") return median();
  const std::string prefix = "jpeg:";
  if (text.rfind(prefix, 0) == 0) {
    return jpeg(std::stoi(text.substr(prefix.size())));
  }
  if (text == "jpeg") return jpeg(85);
  throw std::invalid_argument("unknown defense: " + text +
                              " (expected median3x3 or jpeg:Q)");
}

namespace {

std::vector<std::uint8_t> quantize_image(const Image& image) {
  std::vector<std::uint8_t> q(image.data.size());
  for (std::size_t i = 0; i < image.data.size(); ++i) {
    q[i] = quantize8(image.data[i]);
  }
  return q;
}

Image dequantize_image(const std::vector<std::uint8_t>& q, int height,
                       int width) {
  Image out;
  out.height = height;
  out.width = width;
  out.channels = 3;
  out.data.resize(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) out.data[i] = dequantize8(q[i]);
  return out;
}

Image median3x3(const Image& image) {
  const int h = image.height;
  const int w = image.width;
  const std::vector<std::uint8_t> src = quantize_image(image);
  std::vector<std::uint8_t> dst(src.size());

  const auto sample = [&](int r, int c, int ch) -> std::uint8_t {
    // Replicate border padding.
    r = std::clamp(r, 0, h - 1);
    c = std::clamp(c, 0, w - 1);
    return src[(static_cast<std::size_t>(r) * w + c) * 3 + ch];
  };

  std::array<std::uint8_t, 9> window;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      for (int ch = 0; ch < 3; ++ch) {
        int n = 0;
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            window[n++] = sample(r + dr, c + dc, ch);
          }
        }
        std::nth_element(window.begin(), window.begin() + 4, window.end());
        dst[(static_cast<std::size_t>(r) * w + c) * 3 + ch] = window[4];
      }
    }
  }
  return dequantize_image(dst, h, w);
}

Image jpeg_round_trip(const Image& image, int quality) {
  const std::vector<std::uint8_t> rgb = quantize_image(image);
  const std::vector<std::uint8_t> bytes =
      jpeg::encode_rgb8(rgb.data(), image.width, image.height, quality);
  const jpeg::DecodedImage decoded = jpeg::decode_rgb8(bytes.data(), bytes.size());
  if (decoded.width != image.width || decoded.height != image.height) {
    throw std::runtime_error("JPEG round trip changed image dimensions");
  }
  return dequantize_image(decoded.rgb, decoded.height, decoded.width);
}

}  // namespace

Image defend(const Image& image, const DefenseSpec& spec) {
  if (image.channels != 3) {
    throw std::invalid_argument("defend: expected a 3-channel image");
  }
  switch (spec.kind) {
    case DefenseKind::Median3x3:
      return median3x3(image);
    case DefenseKind::Jpeg:
      if (spec.jpeg_quality < 1 || spec.jpeg_quality > 100) {
        throw std::domain_error("JPEG quality must be in [1, 100]");
      }
      return jpeg_round_trip(image, spec.jpeg_quality);
  }
  throw std::invalid_argument("defend: unknown defense kind");
}

std::vector<std::uint8_t> jpeg_bytes(const Image& image, int quality) {
  if (quality < 1 || quality > 100) {
    throw std::domain_error("JPEG quality must be in [1, 100]");
  }
  const std::vector<std::uint8_t> rgb = quantize_image(image);
  return jpeg::encode_rgb8(rgb.data(), image.width, image.height, quality);
}

std::optional<double> recovery_rate(std::span<const RecoveryFlags> flags) {
  int denominator = 0;
  int numerator = 0;
  for (const RecoveryFlags& f : flags) {
    if (f.attack_success && !f.clean_correct) {
      throw std::invalid_argument(
          "recovery_rate: attack success recorded on a misclassified sample");
    }
    if (f.clean_correct && f.attack_success) {
      ++denominator;
      if (f.defended_correct) ++numerator;
    }
  }
  if (denominator == 0) return std::nullopt;
  return static_cast<double>(numerator) / denominator;
}

AccuracyReport clean_accuracy_delta(const std::vector<CampaignImage>& images,
                                    Oracle& oracle, const DefenseSpec& spec) {
  if (images.empty()) {
    throw std::invalid_argument("clean_accuracy_delta: no images");
  }
  AccuracyReport report;
  report.samples = static_cast<int>(images.size());
  int clean_ok = 0;
  int defended_ok = 0;
  for (const CampaignImage& entry : images) {
    if (oracle.classify(entry.image).label == entry.label) ++clean_ok;
    if (oracle.classify(defend(entry.image, spec)).label == entry.label) {
      ++defended_ok;
    }
  }
  report.clean_accuracy = static_cast<double>(clean_ok) / report.samples;
  report.defended_accuracy = static_cast<double>(defended_ok) / report.samples;
  report.delta = report.defended_accuracy - report.clean_accuracy;
  return report;
}

}  // namespace scratchkit
