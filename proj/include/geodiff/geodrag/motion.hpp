#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "geodiff/featurefield/extractor.hpp"
#include "geodiff/featurefield/loss.hpp"
#include "geodiff/featurefield/sampling.hpp"
#include "geodiff/geodrag/config.hpp"
#include "geodiff/geodrag/denoiser.hpp"
#include "geodiff/geodrag/state.hpp"

namespace geodiff::drag {

// Binary H x W grid; 1 marks editable cells.
class EditableMask {
 public:
  EditableMask() = default;
  EditableMask(int height, int width, std::vector<std::uint8_t> cells);
  static EditableMask all_editable(int height, int width);

  int height() const { return height_; }
  int width() const { return width_; }
  bool editable(int y, int x) const { return cells_[static_cast<std::size_t>(y) * width_ + x] != 0; }
  const std::vector<std::uint8_t>& cells() const { return cells_; }
  // 1 - M per cell, as weights for the non-editable term.
  std::vector<double> protected_weights() const;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> cells_;
};

// Stop-gradient targets F_{Omega(p_i^0, r1)}(z0), one block per point.
std::vector<ff::PatchBlock> motion_targets(const ff::LatentField& z0, const DragState& state,
                                           const ff::FeatureExtractor& extractor, int r1);

// Gradient-mask weights: 0 on Omega(round(p_i), r_grad) of every fixated point, 1 elsewhere.
std::vector<double> gradient_keep_mask(int height, int width, const DragState& state, int r_grad);

// Motion-supervision loss over non-fixated points plus the lambda-weighted
// non-editable term on z_prev = f(z) against z0_prev, with the gradient w.r.t.
// z already multiplied by the gradient mask.
ff::LossAndGradient motion_supervision_loss(const ff::LatentField& z, std::span<const ff::PatchBlock> targets,
                                            const ff::LatentField& z0_prev, const DragState& state,
                                            const EditableMask& mask, const ff::FeatureExtractor& extractor,
                                            const Denoiser& denoiser, const DragConfig& cfg);

// Convenience form that samples the targets from z0 first.
ff::LossAndGradient motion_supervision_loss(const ff::LatentField& z, const ff::LatentField& z0,
                                            const ff::LatentField& z0_prev, const DragState& state,
                                            const EditableMask& mask, const ff::FeatureExtractor& extractor,
                                            const Denoiser& denoiser, const DragConfig& cfg);

// z - eta * gradient.
ff::LatentField gradient_step(const ff::LatentField& z, const ff::LatentField& gradient, double eta);

// True when the lambda term acts on z itself (identity denoiser, or the
// external hook, which the gradient treats as identity). The drag loop then
// takes the lambda term as a proximal step instead of a subgradient step.
bool lambda_acts_on_latent(const Denoiser& denoiser);

// Proximal map of eta * lambda * sum (1 - M) |z - z0_prev|: protected cells with
// keep = 1 move toward z0_prev by at most eta * lambda and never past it.
void lambda_proximal_step(ff::LatentField& z, const ff::LatentField& z0_prev, const EditableMask& mask,
                          std::span<const double> keep, double eta_lambda);

using LossFunction = std::function<ff::LossAndGradient(const ff::LatentField&)>;
using StepObserver = std::function<void(int inner_step, const ff::LossAndGradient&)>;
using ProximalMap = std::function<void(ff::LatentField&)>;

// J gradient steps, re-evaluating the loss before each one, each optionally
// followed by a proximal map. Returns z_{t,J}; first_loss receives the loss at z_{t,0}.
ff::LatentField descend(const ff::LatentField& z, const LossFunction& loss, int steps, double eta,
                        double* first_loss = nullptr, const StepObserver& observer = {},
                        const ProximalMap& proximal = {});

}  // namespace geodiff::drag
