#pragma once

#include <span>
#include <vector>

#include "geodiff/featurefield/extractor.hpp"
#include "geodiff/featurefield/latent_field.hpp"

namespace geodiff::ff {

// Square patch Omega(center, radius): the (2r+1) x (2r+1) offsets around a
// continuous center.
struct Patch {
  Point2 center;
  int radius = 0;
};

// Features sampled over a patch, laid out [dy][dx][channel].
struct PatchBlock {
  int radius = 0;
  int channels = 0;
  std::vector<double> values;

  int side() const { return 2 * radius + 1; }
  bool same_shape(const PatchBlock& o) const { return radius == o.radius && channels == o.channels; }
};

bool patch_in_bounds(const LatentField& field, const Patch& patch);
void require_patch_in_bounds(const LatentField& field, const Patch& patch);

// Bilinear sample of every channel at p (must satisfy 0 <= x <= W-1, 0 <= y <= H-1).
// Integral positions return the stored value exactly.
void sample_point(const LatentField& field, Point2 p, std::span<double> out);
std::vector<double> sample_point(const LatentField& field, Point2 p);

// Samples already-extracted features over a patch.
PatchBlock sample_patch(const LatentField& features, const Patch& patch);
// Applies F to z, then samples.
PatchBlock sample_patch(const LatentField& z, const FeatureExtractor& extractor, const Patch& patch);

// Sum of absolute differences; throws on shape mismatch.
double patch_l1(const PatchBlock& a, const PatchBlock& b);

// Adjoint of sample_patch on the feature grid: adds each block entry's
// gradient to the four neighbouring cells with bilinear weights.
void scatter_patch_gradient(LatentField& grad_features, const Patch& patch, const PatchBlock& block_grad);

}  // namespace geodiff::ff
