#pragma once

#include <string>
#include <vector>

#include "scratchkit/oracle.hpp"

namespace scratchkit {

// Feed-forward scorer described by a JSON document:
//
//   {
//     "input_shape": [height, width, channels],
//     "layers": [
//       {"type": "conv", "out_channels": C, "kernel": [kh, kw],
//        "stride": s, "padding": p, "weights": [...], "bias": [...]},
//       {"type": "relu"},
//       {"type": "flatten"},
//       {"type": "dense", "out_features": F, "weights": [...], "bias": [...]}
//     ]
//   }
//
// Conv weights are row-major over [out_channel][in_channel][ky][kx]; dense
// weights row-major over [out_feature][in_feature], with the flattened input
// in (row, col, channel) order. All weights are finite reals.
//
// The same loader serves the bundled desk-scale model and larger local model
// files of the same format.
class ToyModel : public Oracle {
 public:
  static ToyModel load_file(const std::string& path);
  static ToyModel parse(const std::string& json_text);

  OracleResult query(const Image& image) override;
  bool supports_concurrency() const override { return true; }

  // Forward pass. Throws std::invalid_argument on input shape mismatch.
  ScoreVector forward(const Image& image) const;

  int input_height() const { return input_height_; }
  int input_width() const { return input_width_; }
  int input_channels() const { return input_channels_; }
  int num_classes() const;

 private:
  ToyModel() = default;

  struct Layer {
    enum class Type { Conv, Dense, Relu, Flatten };
    Type type = Type::Relu;
    int out_channels = 0;
    int kernel_h = 0;
    int kernel_w = 0;
    int stride = 1;
    int padding = 0;
    int out_features = 0;
    std::vector<double> weights;
    std::vector<double> bias;
  };

  int input_height_ = 0;
  int input_width_ = 0;
  int input_channels_ = 0;
  std::vector<Layer> layers_;
};

}  // namespace scratchkit
