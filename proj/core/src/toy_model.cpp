#include "scratchkit/toy_model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace scratchkit {

namespace {

using nlohmann::json;

// Activations flow through the network as a (height, width, channels)
// tensor; flatten reshapes to (1, 1, features).
struct Tensor {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<double> data;

  double at(int r, int c, int ch) const {
    return data[(static_cast<std::size_t>(r) * width + c) * channels + ch];
  }
};

std::vector<double> require_finite(std::vector<double> values,
                                   const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument(std::string("model file: non-finite ") + what);
    }
  }
  return values;
}

}  // namespace

ToyModel ToyModel::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open model file: " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

ToyModel ToyModel::parse(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("model file: bad JSON: ") + e.what());
  }
  if (!doc.contains("input_shape") || !doc.contains("layers")) {
    throw std::invalid_argument("model file: missing input_shape or layers");
  }
  const auto shape = doc["input_shape"];
  if (!shape.is_array() || shape.size() != 3) {
    throw std::invalid_argument("model file: input_shape must be [h, w, c]");
  }

  ToyModel model;
  model.input_height_ = shape[0].get<int>();
  model.input_width_ = shape[1].get<int>();
  model.input_channels_ = shape[2].get<int>();
  if (model.input_height_ < 1 || model.input_width_ < 1 ||
      model.input_channels_ < 1) {
    throw std::invalid_argument("model file: degenerate input_shape");
  }

  for (const auto& spec : doc["layers"]) {
    Layer layer;
    const std::string type = spec.at("type").get<std::string>();
    if (type == "conv") {
      layer.type = Layer::Type::Conv;
      layer.out_channels = spec.at("out_channels").get<int>();
      const auto kernel = spec.at("kernel");
      layer.kernel_h = kernel.at(0).get<int>();
      layer.kernel_w = kernel.at(1).get<int>();
      layer.stride = spec.value("stride", 1);
      layer.padding = spec.value("padding", 0);
      layer.weights = require_finite(
          spec.at("weights").get<std::vector<double>>(), "conv weights");
      layer.bias = require_finite(spec.at("bias").get<std::vector<double>>(),
                                  "conv bias");
      if (layer.out_channels < 1 || layer.kernel_h < 1 || layer.kernel_w < 1 ||
          layer.stride < 1 || layer.padding < 0) {
        throw std::invalid_argument("model file: bad conv geometry");
      }
      if (static_cast<int>(layer.bias.size()) != layer.out_channels) {
        throw std::invalid_argument("model file: conv bias length mismatch");
      }
    } else if (type == "dense") {
      layer.type = Layer::Type::Dense;
      layer.out_features = spec.at("out_features").get<int>();
      layer.weights = require_finite(
          spec.at("weights").get<std::vector<double>>(), "dense weights");
      layer.bias = require_finite(spec.at("bias").get<std::vector<double>>(),
                                  "dense bias");
      if (layer.out_features < 1 ||
          static_cast<int>(layer.bias.size()) != layer.out_features) {
        throw std::invalid_argument("model file: dense bias length mismatch");
      }
    } else if (type == "relu") {
      layer.type = Layer::Type::Relu;
    } else if (type == "flatten") {
      layer.type = Layer::Type::Flatten;
    } else {
      throw std::invalid_argument("model file: unknown layer type: " + type);
    }
    model.layers_.push_back(std::move(layer));
  }
  if (model.layers_.empty()) {
    throw std::invalid_argument("model file: no layers");
  }

  // Shape-check the whole stack once so classify never faults mid-forward.
  (void)model.forward(
      Image::filled(model.input_height_, model.input_width_, 0.0,
                    model.input_channels_));
  return model;
}

ScoreVector ToyModel::forward(const Image& image) const {
  if (image.height != input_height_ || image.width != input_width_ ||
      image.channels != input_channels_) {
    throw std::invalid_argument("model input shape mismatch");
  }

  Tensor current;
  current.height = image.height;
  current.width = image.width;
  current.channels = image.channels;
  current.data = image.data;

  for (const Layer& layer : layers_) {
    switch (layer.type) {
      case Layer::Type::Relu: {
        for (double& v : current.data) v = v > 0.0 ? v : 0.0;
        break;
      }
      case Layer::Type::Flatten: {
        current.channels = static_cast<int>(current.data.size());
        current.height = 1;
        current.width = 1;
        break;
      }
      case Layer::Type::Conv: {
        const int in_c = current.channels;
        const int out_h =
            (current.height + 2 * layer.padding - layer.kernel_h) / layer.stride + 1;
        const int out_w =
            (current.width + 2 * layer.padding - layer.kernel_w) / layer.stride + 1;
        if (out_h < 1 || out_w < 1) {
          throw std::invalid_argument("conv output collapses to zero size");
        }
        const std::size_t expected = static_cast<std::size_t>(layer.out_channels) *
                                     in_c * layer.kernel_h * layer.kernel_w;
        if (layer.weights.size() != expected) {
          throw std::invalid_argument("conv weight count mismatch");
        }
        Tensor next;
        next.height = out_h;
        next.width = out_w;
        next.channels = layer.out_channels;
        next.data.assign(static_cast<std::size_t>(out_h) * out_w * layer.out_channels,
                         0.0);
        for (int oy = 0; oy < out_h; ++oy) {
          for (int ox = 0; ox < out_w; ++ox) {
            for (int oc = 0; oc < layer.out_channels; ++oc) {
              double acc = layer.bias[oc];
              for (int ky = 0; ky < layer.kernel_h; ++ky) {
                const int iy = oy * layer.stride + ky - layer.padding;
                if (iy < 0 || iy >= current.height) continue;  // zero padding
                for (int kx = 0; kx < layer.kernel_w; ++kx) {
                  const int ix = ox * layer.stride + kx - layer.padding;
                  if (ix < 0 || ix >= current.width) continue;
                  for (int ic = 0; ic < in_c; ++ic) {
                    const double w =
                        layer.weights[((static_cast<std::size_t>(oc) * in_c + ic) *
                                           layer.kernel_h +
                                       ky) *
                                          layer.kernel_w +
                                      kx];
                    acc += w * current.at(iy, ix, ic);
                  }
                }
              }
              next.data[(static_cast<std::size_t>(oy) * out_w + ox) *
                            layer.out_channels +
                        oc] = acc;
            }
          }
        }
        current = std::move(next);
        break;
      }
      case Layer::Type::Dense: {
        const std::size_t in_features = current.data.size();
        if (layer.weights.size() !=
            static_cast<std::size_t>(layer.out_features) * in_features) {
          throw std::invalid_argument("dense weight count mismatch");
        }
        Tensor next;
        next.height = 1;
        next.width = 1;
        next.channels = layer.out_features;
        next.data.assign(layer.out_features, 0.0);
        for (int o = 0; o < layer.out_features; ++o) {
          double acc = layer.bias[o];
          const double* row = layer.weights.data() + static_cast<std::size_t>(o) * in_features;
          for (std::size_t i = 0; i < in_features; ++i) {
            acc += row[i] * current.data[i];
          }
          next.data[o] = acc;
        }
        current = std::move(next);
        break;
      }
    }
  }
  return current.data;
}

OracleResult ToyModel::query(const Image& image) {
  return {forward(image), {}, {}};
}

int ToyModel::num_classes() const {
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) {
    if (it->type == Layer::Type::Dense) return it->out_features;
    if (it->type == Layer::Type::Conv) return it->out_channels;
  }
  return 0;
}

}  // namespace scratchkit
