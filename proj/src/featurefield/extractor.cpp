#include "geodiff/featurefield/extractor.hpp"

#include <string>

#include "geodiff/error.hpp"

namespace geodiff::ff {
namespace {

void check_size(int size) {
  if (size < 1 || size % 2 == 0) throw InputError("conv kernel size must be odd and positive, got " + std::to_string(size));
}

int layer_out_channels(const ConvLayer& layer, int in_channels) {
  if (layer.kind == ConvLayer::Kind::box) return in_channels;
  if (layer.in_channels != in_channels) {
    throw InputError("conv layer expects " + std::to_string(layer.in_channels) + " input channels, got " +
                     std::to_string(in_channels));
  }
  return layer.out_channels;
}

double weight(const ConvLayer& layer, int o, int i, int ky, int kx) {
  const int k = layer.size;
  return layer.weights[((static_cast<std::size_t>(o) * layer.in_channels + i) * k + ky) * k + kx];
}

}  // namespace

ConvLayer ConvLayer::box(int size) {
  check_size(size);
  ConvLayer layer;
  layer.kind = Kind::box;
  layer.size = size;
  return layer;
}

ConvLayer ConvLayer::dense(int in_channels, int out_channels, int size, std::vector<double> weights) {
  check_size(size);
  if (in_channels <= 0 || out_channels <= 0) throw InputError("conv layer channel counts must be positive");
  const auto expected = static_cast<std::size_t>(in_channels) * out_channels * size * size;
  if (weights.size() != expected) {
    throw InputError("conv layer needs " + std::to_string(expected) + " weights, got " + std::to_string(weights.size()));
  }
  return {Kind::dense, in_channels, out_channels, size, std::move(weights)};
}

LatentField conv_forward(const ConvLayer& layer, const LatentField& in) {
  const int h = in.height(), w = in.width(), cin = in.channels();
  const int cout = layer_out_channels(layer, cin);
  const int half = layer.size / 2;
  LatentField out(h, w, cout);
  if (layer.kind == ConvLayer::Kind::box) {
    const double norm = 1.0 / (layer.size * layer.size);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        for (int dy = -half; dy <= half; ++dy)
          for (int dx = -half; dx <= half; ++dx) {
            const int sy = y + dy, sx = x + dx;
            if (sy < 0 || sx < 0 || sy >= h || sx >= w) continue;
            for (int c = 0; c < cin; ++c) out.at(y, x, c) += norm * in.at(sy, sx, c);
          }
    return out;
  }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int ky = 0; ky < layer.size; ++ky)
        for (int kx = 0; kx < layer.size; ++kx) {
          const int sy = y + ky - half, sx = x + kx - half;
          if (sy < 0 || sx < 0 || sy >= h || sx >= w) continue;
          for (int o = 0; o < cout; ++o)
            for (int i = 0; i < cin; ++i) out.at(y, x, o) += weight(layer, o, i, ky, kx) * in.at(sy, sx, i);
        }
  return out;
}

LatentField conv_adjoint(const ConvLayer& layer, const LatentField& grad_out, int in_channels) {
  const int h = grad_out.height(), w = grad_out.width();
  const int cout = layer_out_channels(layer, in_channels);
  if (grad_out.channels() != cout) throw InputError("conv adjoint: gradient channel count mismatch");
  const int half = layer.size / 2;
  LatentField grad_in(h, w, in_channels);
  if (layer.kind == ConvLayer::Kind::box) {
    const double norm = 1.0 / (layer.size * layer.size);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        for (int dy = -half; dy <= half; ++dy)
          for (int dx = -half; dx <= half; ++dx) {
            const int sy = y + dy, sx = x + dx;
            if (sy < 0 || sx < 0 || sy >= h || sx >= w) continue;
            for (int c = 0; c < in_channels; ++c) grad_in.at(sy, sx, c) += norm * grad_out.at(y, x, c);
          }
    return grad_in;
  }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int ky = 0; ky < layer.size; ++ky)
        for (int kx = 0; kx < layer.size; ++kx) {
          const int sy = y + ky - half, sx = x + kx - half;
          if (sy < 0 || sx < 0 || sy >= h || sx >= w) continue;
          for (int o = 0; o < cout; ++o)
            for (int i = 0; i < in_channels; ++i)
              grad_in.at(sy, sx, i) += weight(layer, o, i, ky, kx) * grad_out.at(y, x, o);
        }
  return grad_in;
}

FeatureExtractor::FeatureExtractor(std::vector<ConvLayer> layers) : layers_(std::move(layers)) {}

int FeatureExtractor::output_channels(int input_channels) const {
  int c = input_channels;
  for (const auto& layer : layers_) c = layer_out_channels(layer, c);
  return c;
}

LatentField FeatureExtractor::apply(const LatentField& z) const {
  if (layers_.empty()) return z;
  LatentField f = conv_forward(layers_.front(), z);
  for (std::size_t i = 1; i < layers_.size(); ++i) f = conv_forward(layers_[i], f);
  return f;
}

LatentField FeatureExtractor::adjoint(const LatentField& grad_features, int input_channels) const {
  if (layers_.empty()) return grad_features;
  // channel count entering each layer
  std::vector<int> in_channels{input_channels};
  for (const auto& layer : layers_) in_channels.push_back(layer_out_channels(layer, in_channels.back()));
  LatentField g = grad_features;
  for (std::size_t i = layers_.size(); i-- > 0;) g = conv_adjoint(layers_[i], g, in_channels[i]);
  return g;
}

nlohmann::json FeatureExtractor::to_json() const {
  if (layers_.empty()) return {{"kind", "identity"}};
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& layer : layers_) {
    if (layer.kind == ConvLayer::Kind::box) {
      layers.push_back({{"type", "box"}, {"size", layer.size}});
    } else {
      layers.push_back({{"type", "dense"},
                        {"in", layer.in_channels},
                        {"out", layer.out_channels},
                        {"size", layer.size},
                        {"weights", layer.weights}});
    }
  }
  return {{"kind", "conv"}, {"layers", layers}};
}

FeatureExtractor FeatureExtractor::from_json(const nlohmann::json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "identity") return identity();
    if (kind == "box3") return FeatureExtractor({ConvLayer::box(3)});
    if (kind != "conv") throw InputError("unknown extractor kind '" + kind + "' (expected identity, box3 or conv)");
    std::vector<ConvLayer> layers;
    for (const auto& l : j.at("layers")) {
      const std::string type = l.value("type", "dense");
      if (type == "box") {
        layers.push_back(ConvLayer::box(l.at("size").get<int>()));
      } else if (type == "dense") {
        layers.push_back(ConvLayer::dense(l.at("in").get<int>(), l.at("out").get<int>(), l.at("size").get<int>(),
                                          l.at("weights").get<std::vector<double>>()));
      } else {
        throw InputError("unknown conv layer type '" + type + "'");
      }
    }
    return FeatureExtractor(std::move(layers));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("extractor: ") + e.what());
  }
}

}  // namespace geodiff::ff
