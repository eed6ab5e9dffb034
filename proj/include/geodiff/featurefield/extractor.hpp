#pragma once

#include <vector>

#include <json.hpp>

#include "geodiff/featurefield/latent_field.hpp"

namespace geodiff::ff {

// One stride-1, zero-padded ("same") convolution without bias.
//
// A dense layer maps in_channels -> out_channels with weights laid out
// [out][in][ky][kx]. A box layer averages each channel independently over a
// size x size window and works for any channel count.
struct ConvLayer {
  enum class Kind { dense, box };
  Kind kind = Kind::dense;
  int in_channels = 0;
  int out_channels = 0;
  int size = 1;  // odd
  std::vector<double> weights;

  static ConvLayer box(int size);
  static ConvLayer dense(int in_channels, int out_channels, int size, std::vector<double> weights);
};

// Feature map F applied to a latent before patch sampling. Always linear,
// so the loss gradient can be pulled back through adjoint().
class FeatureExtractor {
 public:
  FeatureExtractor() = default;  // identity
  explicit FeatureExtractor(std::vector<ConvLayer> layers);

  static FeatureExtractor identity() { return {}; }

  bool is_identity() const { return layers_.empty(); }
  const std::vector<ConvLayer>& layers() const { return layers_; }
  int output_channels(int input_channels) const;

  LatentField apply(const LatentField& z) const;
  // Transpose of apply(): maps a gradient w.r.t. features back onto the input grid.
  LatentField adjoint(const LatentField& grad_features, int input_channels) const;

  nlohmann::json to_json() const;
  static FeatureExtractor from_json(const nlohmann::json& j);

 private:
  std::vector<ConvLayer> layers_;
};

LatentField conv_forward(const ConvLayer& layer, const LatentField& in);
LatentField conv_adjoint(const ConvLayer& layer, const LatentField& grad_out, int in_channels);

}  // namespace geodiff::ff
