#include "geodiff/geodrag/motion.hpp"

#include <algorithm>

#include "geodiff/error.hpp"

namespace geodiff::drag {

EditableMask::EditableMask(int height, int width, std::vector<std::uint8_t> cells)
    : height_(height), width_(width), cells_(std::move(cells)) {
  if (cells_.size() != static_cast<std::size_t>(height) * width) throw InputError("editable mask size mismatch");
}

EditableMask EditableMask::all_editable(int height, int width) {
  return {height, width, std::vector<std::uint8_t>(static_cast<std::size_t>(height) * width, 1)};
}

std::vector<double> EditableMask::protected_weights() const {
  std::vector<double> w(cells_.size());
  std::transform(cells_.begin(), cells_.end(), w.begin(), [](std::uint8_t m) { return m ? 0.0 : 1.0; });
  return w;
}

std::vector<ff::PatchBlock> motion_targets(const ff::LatentField& z0, const DragState& state,
                                           const ff::FeatureExtractor& extractor, int r1) {
  const ff::LatentField features = extractor.apply(z0);
  std::vector<ff::PatchBlock> out;
  out.reserve(state.size());
  for (const Point2 origin : state.origins) out.push_back(ff::sample_patch(features, {origin, r1}));
  return out;
}

std::vector<double> gradient_keep_mask(int height, int width, const DragState& state, int r_grad) {
  std::vector<double> keep(static_cast<std::size_t>(height) * width, 1.0);
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (!state.fixated[i]) continue;
    const ff::Cell c = ff::round_to_cell(state.points[i]);
    for (int y = std::max(0, c.y - r_grad); y <= std::min(height - 1, c.y + r_grad); ++y)
      for (int x = std::max(0, c.x - r_grad); x <= std::min(width - 1, c.x + r_grad); ++x)
        keep[static_cast<std::size_t>(y) * width + x] = 0.0;
  }
  return keep;
}

ff::LossAndGradient motion_supervision_loss(const ff::LatentField& z, std::span<const ff::PatchBlock> targets,
                                            const ff::LatentField& z0_prev, const DragState& state,
                                            const EditableMask& mask, const ff::FeatureExtractor& extractor,
                                            const Denoiser& denoiser, const DragConfig& cfg) {
  if (targets.size() != state.size()) throw InputError("motion loss: one target block per point required");
  if (mask.height() != z.height() || mask.width() != z.width()) throw InputError("motion loss: mask shape mismatch");

  std::vector<ff::PatchTerm> terms;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state.fixated[i]) continue;
    terms.push_back({{state.stepped(i, cfg.beta_step), cfg.r1}, targets[i]});
  }
  ff::LossAndGradient total = ff::patch_loss_gradient(z, extractor, terms);

  if (cfg.lambda > 0.0) {
    const bool through_denoiser = denoiser.is_linear();
    const ff::LatentField z_prev = through_denoiser ? denoiser.apply(z) : z;
    const auto weights = mask.protected_weights();
    const ff::LossAndGradient guard = ff::masked_l1_gradient(z_prev, z0_prev, weights, cfg.lambda);
    total.value += guard.value;
    const ff::LatentField pulled = through_denoiser ? denoiser.adjoint(guard.gradient) : guard.gradient;
    auto g = total.gradient.values();
    const auto p = pulled.values();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += p[i];
  }

  const auto keep = gradient_keep_mask(z.height(), z.width(), state, cfg.r_grad);
  for (int y = 0; y < z.height(); ++y)
    for (int x = 0; x < z.width(); ++x)
      if (keep[static_cast<std::size_t>(y) * z.width() + x] == 0.0)
        for (double& v : total.gradient.cell(y, x)) v = 0.0;
  return total;
}

ff::LossAndGradient motion_supervision_loss(const ff::LatentField& z, const ff::LatentField& z0,
                                            const ff::LatentField& z0_prev, const DragState& state,
                                            const EditableMask& mask, const ff::FeatureExtractor& extractor,
                                            const Denoiser& denoiser, const DragConfig& cfg) {
  const auto targets = motion_targets(z0, state, extractor, cfg.r1);
  return motion_supervision_loss(z, targets, z0_prev, state, mask, extractor, denoiser, cfg);
}

ff::LatentField gradient_step(const ff::LatentField& z, const ff::LatentField& gradient, double eta) {
  if (!z.same_shape(gradient)) throw InputError("gradient_step: shape mismatch");
  ff::LatentField next = z;
  auto v = next.values();
  const auto g = gradient.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] -= eta * g[i];
    if (!std::isfinite(v[i])) throw NumericError("gradient step produced a non-finite latent value");
  }
  return next;
}

bool lambda_acts_on_latent(const Denoiser& denoiser) { return denoiser.kind() != Denoiser::Kind::gaussian; }

void lambda_proximal_step(ff::LatentField& z, const ff::LatentField& z0_prev, const EditableMask& mask,
                          std::span<const double> keep, double eta_lambda) {
  if (!z.same_shape(z0_prev)) throw InputError("lambda_proximal_step: shape mismatch");
  for (int y = 0; y < z.height(); ++y)
    for (int x = 0; x < z.width(); ++x) {
      const std::size_t k = static_cast<std::size_t>(y) * z.width() + x;
      if (mask.editable(y, x) || keep[k] == 0.0) continue;
      auto v = z.cell(y, x);
      const auto ref = z0_prev.cell(y, x);
      for (std::size_t c = 0; c < v.size(); ++c) {
        const double r = v[c] - ref[c];
        v[c] = ref[c] + (r > eta_lambda ? r - eta_lambda : (r < -eta_lambda ? r + eta_lambda : 0.0));
      }
    }
}

ff::LatentField descend(const ff::LatentField& z, const LossFunction& loss, int steps, double eta, double* first_loss,
                        const StepObserver& observer, const ProximalMap& proximal) {
  ff::LatentField current = z;
  for (int j = 0; j < steps; ++j) {
    const ff::LossAndGradient lg = loss(current);
    if (j == 0 && first_loss) *first_loss = lg.value;
    if (observer) observer(j, lg);
    current = gradient_step(current, lg.gradient, eta);
    if (proximal) proximal(current);
  }
  return current;
}

}  // namespace geodiff::drag
