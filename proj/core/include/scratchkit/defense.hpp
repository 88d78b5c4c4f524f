#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scratchkit/attack.hpp"
#include "scratchkit/image.hpp"
#include "scratchkit/oracle.hpp"

namespace scratchkit {

enum class DefenseKind {
  Median3x3,  // per-channel 3x3 median, replicate border padding
  Jpeg,       // baseline sequential encode/decode at a quality factor
};

struct DefenseSpec {
  DefenseKind kind = DefenseKind::Median3x3;
  int jpeg_quality = 85;  // used by Jpeg only

  static DefenseSpec median();
  static DefenseSpec jpeg(int quality);

  // "median3x3" or "jpeg:Q".
  std::string name() const;
  static DefenseSpec parse(const std::string& text);
};

// Input-filtering defense. Operates on 8-bit quantized pixel data (the
// domain JPEG is defined over) and returns to [0, 1] reals. Throws
// std::domain_error for a JPEG quality outside [1, 100].
Image defend(const Image& image, const DefenseSpec& spec);

// Per-sample outcome flags feeding the recovery rate.
struct RecoveryFlags {
  bool clean_correct = false;     // C(x) == y
  bool attack_success = false;    // C(x') != y within budget
  bool defended_correct = false;  // C(d(x')) == y (the true label, not merely
                                  // a different class than the adversarial)
};

// Fraction of successful adversarial samples whose defended version is again
// classified as the true label. Empty denominator (no successful attacks on
// correctly classified samples) yields nullopt. Throws
// std::invalid_argument when flags are inconsistent (attack success on a
// misclassified clean sample).
std::optional<double> recovery_rate(std::span<const RecoveryFlags> flags);

// Standard JPEG file bytes for the image at the given quality: the same
// codec configuration defend() round-trips through, usable directly as a
// .jpg file. Throws std::domain_error for a quality outside [1, 100].
std::vector<std::uint8_t> jpeg_bytes(const Image& image, int quality);

struct AccuracyReport {
  double clean_accuracy = 0.0;
  double defended_accuracy = 0.0;
  double delta = 0.0;  // defended - clean
  int samples = 0;
};

// Classifier accuracy on the originals and on their defended versions.
AccuracyReport clean_accuracy_delta(const std::vector<CampaignImage>& images,
                                    Oracle& oracle, const DefenseSpec& spec);

}  // namespace scratchkit
