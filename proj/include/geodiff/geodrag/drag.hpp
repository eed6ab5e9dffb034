#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "geodiff/featurefield/extractor.hpp"
#include "geodiff/featurefield/latent_field.hpp"
#include "geodiff/geodrag/config.hpp"
#include "geodiff/geodrag/denoiser.hpp"
#include "geodiff/geodrag/motion.hpp"
#include "geodiff/geodrag/state.hpp"
#include "geodiff/geodrag/trajectory.hpp"

namespace geodiff::drag {

// Unedited-chain latents for the current timestep: z_t^0 and f(z_t^0).
struct Snapshots {
  const ff::LatentField& z0;
  const ff::LatentField& z0_prev;
};

// Called after every loss evaluation inside the gradient loop with the state
// the gradient was computed for.
using GradientObserver = std::function<void(const DragState&, const ff::LossAndGradient&)>;

struct RunContext {
  const EditableMask& mask;
  const ff::FeatureExtractor& extractor;
  const Denoiser& denoiser;
  const DragConfig& cfg;
  std::mt19937_64& rng;
  std::vector<TrajectoryRecord>& log;
  GradientObserver observer = {};
};

struct TimestepResult {
  ff::LatentField latent;         // z_{t-1}
  ff::LatentField pre_denoise;    // latent right before the denoiser step
};

FixationRule fixation_rule(const DragConfig& cfg);

// B iterations of {loss -> J gradient steps -> tracking -> fixation update},
// copy-paste for every fixated point, then one denoiser step.
TimestepResult run_timestep(const ff::LatentField& z_t, const Snapshots& snapshots, DragState& state,
                            RunContext& ctx);

struct DragResult {
  ff::LatentField latent;
  std::vector<TrajectoryRecord> log;
  DragState state;
  std::vector<Point2> final_points;        // located in the final latent
  std::vector<Point2> pre_denoise_points;  // located before the last denoiser step
  int fixation_events = 0;
  bool ok = true;
  std::string error;
  bool bounds_error = false;
};

// Stage 1: T_drag timesteps of run_timestep. Stage 2 (if final_copy_paste):
// N_post timesteps pasting alpha * z_t^0[Omega(p_i^0)] onto every target patch,
// no blur, then denoising. Handles are finally relocated by one more tracking
// pass. Points are in latent cells. Never throws for runtime failures: the
// result carries the error and the log written so far.
DragResult run_drag(const ff::LatentField& z_T, const std::vector<Point2>& handles, const std::vector<Point2>& targets,
                    const EditableMask& mask, const ff::FeatureExtractor& extractor, const Denoiser& denoiser,
                    const DragConfig& cfg, const GradientObserver& observer = {});

}  // namespace geodiff::drag
