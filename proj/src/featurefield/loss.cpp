#include "geodiff/featurefield/loss.hpp"

#include <cmath>

#include "geodiff/error.hpp"

namespace geodiff::ff {
namespace {

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void require_finite(const LatentField& g) {
  if (!g.all_finite()) throw NumericError("non-finite gradient");
}

}  // namespace

LossAndGradient patch_loss_gradient(const LatentField& z, const FeatureExtractor& extractor,
                                    std::span<const PatchTerm> terms) {
  const LatentField features = extractor.apply(z);
  LatentField grad_features(features.height(), features.width(), features.channels());
  double value = 0.0;
  for (const auto& term : terms) {
    const PatchBlock sampled = sample_patch(features, term.patch);
    value += patch_l1(sampled, term.target);
    PatchBlock residual_sign = sampled;
    for (std::size_t i = 0; i < sampled.values.size(); ++i)
      residual_sign.values[i] = sign(sampled.values[i] - term.target.values[i]);
    scatter_patch_gradient(grad_features, term.patch, residual_sign);
  }
  LossAndGradient out{value, extractor.adjoint(grad_features, z.channels())};
  require_finite(out.gradient);
  if (!std::isfinite(out.value)) throw NumericError("non-finite loss");
  return out;
}

LossAndGradient masked_l1_gradient(const LatentField& x, const LatentField& reference, std::span<const double> keep,
                                   double weight) {
  if (!x.same_shape(reference)) throw InputError("masked_l1: field shapes differ");
  if (keep.size() != static_cast<std::size_t>(x.height()) * x.width()) {
    throw InputError("masked_l1: mask size does not match grid");
  }
  LossAndGradient out{0.0, LatentField(x.height(), x.width(), x.channels())};
  if (weight == 0.0) return out;
  for (int y = 0; y < x.height(); ++y)
    for (int xx = 0; xx < x.width(); ++xx) {
      const double k = keep[static_cast<std::size_t>(y) * x.width() + xx];
      if (k == 0.0) continue;
      for (int c = 0; c < x.channels(); ++c) {
        const double r = x.at(y, xx, c) - reference.at(y, xx, c);
        out.value += weight * k * std::abs(r);
        out.gradient.at(y, xx, c) = weight * k * sign(r);
      }
    }
  require_finite(out.gradient);
  return out;
}

}  // namespace geodiff::ff
