#pragma once

#include <span>
#include <vector>

#include "geodiff/featurefield/extractor.hpp"
#include "geodiff/featurefield/latent_field.hpp"
#include "geodiff/featurefield/sampling.hpp"

namespace geodiff::ff {

// || sample(F(z), patch) - target ||_1, with target held constant.
struct PatchTerm {
  Patch patch;
  PatchBlock target;
};

struct LossAndGradient {
  double value = 0.0;
  LatentField gradient;  // d value / d z, same shape as z
};

// Sum of patch terms over F(z). The gradient is the exact reverse pass:
// sign(residual) with sign(0) = 0, scattered bilinearly, pulled back through F.
LossAndGradient patch_loss_gradient(const LatentField& z, const FeatureExtractor& extractor,
                                    std::span<const PatchTerm> terms);

// weight * sum over cells of keep[cell] * |x - reference|, summed over channels.
// keep has one entry per grid cell (H*W); gradient is w.r.t. x.
LossAndGradient masked_l1_gradient(const LatentField& x, const LatentField& reference, std::span<const double> keep,
                                   double weight);

}  // namespace geodiff::ff
