#include "geodiff/geodrag/drag.hpp"

#include <limits>

#include "geodiff/error.hpp"
#include "geodiff/geodrag/copy_paste.hpp"
#include "geodiff/geodrag/tracking.hpp"

namespace geodiff::drag {
namespace {

TrajectoryRecord point_record(const DragState& s, std::size_t i, std::string event = {}) {
  TrajectoryRecord r;
  r.timestep = s.timestep;
  r.iteration = s.iteration;
  r.point_id = static_cast<int>(i);
  r.x = s.points[i].x;
  r.y = s.points[i].y;
  r.e = s.distance[i];
  r.fixated = static_cast<bool>(s.fixated[i]);
  r.event = std::move(event);
  r.tx = s.targets[i].x;
  r.ty = s.targets[i].y;
  return r;
}

void log_denoise(const DragState& s, std::vector<TrajectoryRecord>& log) {
  TrajectoryRecord r;
  r.timestep = s.timestep;
  r.iteration = s.iteration;
  r.point_id = -1;
  r.event = "denoise";
  log.push_back(r);
}

int log_fixation_events(const DragState& s, const std::vector<FixationEvent>& events,
                        std::vector<TrajectoryRecord>& log) {
  for (const auto& ev : events) log.push_back(point_record(s, ev.point, ev.entered ? "enter_I" : "exit_I"));
  return static_cast<int>(events.size());
}

}  // namespace

FixationRule fixation_rule(const DragConfig& cfg) {
  return {cfg.l, cfg.u, cfg.fixation, cfg.reentry};
}

TimestepResult run_timestep(const ff::LatentField& z_t, const Snapshots& snapshots, DragState& state,
                            RunContext& ctx) {
  const DragConfig& cfg = ctx.cfg;
  const auto targets = motion_targets(snapshots.z0, state, ctx.extractor, cfg.r1);
  const auto references = reference_features(snapshots.z0, state, ctx.extractor);
  const FixationRule rule = fixation_rule(cfg);

  // the lambda term on z itself is taken as a proximal step; a plain
  // subgradient step of size eta * lambda overshoots and oscillates
  const bool proximal = cfg.lambda > 0.0 && lambda_acts_on_latent(ctx.denoiser);
  DragConfig motion_cfg = cfg;
  if (proximal) motion_cfg.lambda = 0.0;
  const auto protect = ctx.mask.protected_weights();

  ff::LatentField z = z_t;
  for (int b = 0; b < cfg.B; ++b) {
    const LossFunction loss = [&](const ff::LatentField& current) {
      ff::LossAndGradient lg = motion_supervision_loss(current, targets, snapshots.z0_prev, state, ctx.mask,
                                                       ctx.extractor, ctx.denoiser, motion_cfg);
      if (proximal) lg.value += ff::masked_l1_gradient(current, snapshots.z0_prev, protect, cfg.lambda).value;
      return lg;
    };
    StepObserver observer;
    if (ctx.observer) observer = [&](int, const ff::LossAndGradient& lg) { ctx.observer(state, lg); };
    ProximalMap prox;
    if (proximal) {
      prox = [&](ff::LatentField& current) {
        const auto keep = gradient_keep_mask(current.height(), current.width(), state, cfg.r_grad);
        lambda_proximal_step(current, snapshots.z0_prev, ctx.mask, keep, cfg.eta * cfg.lambda);
      };
    }
    double loss_value = 0.0;
    z = descend(z, loss, cfg.J, cfg.eta, &loss_value, observer, prox);

    state.points = track_points(z, references, state, ctx.extractor, cfg.r2, cfg.beta_step);
    state.recompute_distances();
    ++state.iteration;
    for (std::size_t i = 0; i < state.size(); ++i) {
      ctx.log.push_back(point_record(state, i));
      ctx.log.back().loss = loss_value;
    }
    log_fixation_events(state, update_fixation(state, rule), ctx.log);
  }

  std::vector<CopyPasteMove> moves;
  for (std::size_t i = 0; i < state.size(); ++i)
    if (state.fixated[i]) moves.push_back({i, state.points[i], state.targets[i]});
  if (!moves.empty()) {
    const ff::LatentField source = z;
    const CopyPasteOptions options{cfg.r_cp, cfg.alpha, cfg.beta_blur, true};
    for (std::size_t i : copy_paste_refine(z, source, moves, options, ctx.rng))
      ctx.log.push_back(point_record(state, i, "copy_paste"));
  }

  TimestepResult out{ctx.denoiser.apply(z), z};
  log_denoise(state, ctx.log);
  return out;
}

DragResult run_drag(const ff::LatentField& z_T, const std::vector<Point2>& handles, const std::vector<Point2>& targets,
                    const EditableMask& mask, const ff::FeatureExtractor& extractor, const Denoiser& denoiser,
                    const DragConfig& cfg, const GradientObserver& observer) {
  DragResult result;
  result.latent = z_T;
  std::mt19937_64 rng(cfg.seed);
  try {
    cfg.validate();
    result.state = DragState::start(handles, targets);
    DragState& state = result.state;
    for (std::size_t i = 0; i < state.size(); ++i) {
      for (const Point2 p : {state.points[i], state.targets[i]}) {
        if (!(p.x >= 0 && p.y >= 0 && p.x <= z_T.width() - 1 && p.y <= z_T.height() - 1)) {
          throw BoundsError("drag point " + std::to_string(i) + " lies outside the latent grid");
        }
      }
    }

    RunContext ctx{mask, extractor, denoiser, cfg, rng, result.log, observer};
    for (std::size_t i = 0; i < state.size(); ++i) result.log.push_back(point_record(state, i));
    result.fixation_events += log_fixation_events(state, update_fixation(state, fixation_rule(cfg)), result.log);

    ff::LatentField z = z_T;
    ff::LatentField z0 = z_T;
    ff::LatentField pre_denoise = z_T, z0_pre_denoise = z_T;
    for (int t = 0; t < cfg.T_drag; ++t) {
      state.timestep = t;
      const ff::LatentField z0_prev = denoiser.apply(z0);
      const std::size_t log_mark = result.log.size();
      TimestepResult step = run_timestep(z, {z0, z0_prev}, state, ctx);
      for (std::size_t i = log_mark; i < result.log.size(); ++i)
        if (result.log[i].event == "enter_I" || result.log[i].event == "exit_I") ++result.fixation_events;
      pre_denoise = std::move(step.pre_denoise);
      z0_pre_denoise = z0;
      z = std::move(step.latent);
      z0 = z0_prev;
      result.latent = z;
    }

    if (cfg.final_copy_paste) {
      const CopyPasteOptions options{cfg.r_cp, cfg.alpha, cfg.beta_blur, false};
      for (int s = 0; s < cfg.N_post; ++s) {
        state.timestep = cfg.T_drag + s;
        std::vector<CopyPasteMove> moves;
        for (std::size_t i = 0; i < state.size(); ++i) moves.push_back({i, state.origins[i], state.targets[i]});
        for (std::size_t i : copy_paste_refine(z, z0, moves, options, rng))
          result.log.push_back(point_record(state, i, "copy_paste"));
        pre_denoise = z;
        z0_pre_denoise = z0;
        z = denoiser.apply(z);
        z0 = denoiser.apply(z0);
        log_denoise(state, result.log);
        result.latent = z;
      }
    }

    // relocate handles in the final latent (and right before its last denoise)
    state.timestep = cfg.T_drag + (cfg.final_copy_paste ? cfg.N_post : 0);
    const auto refs_pre = reference_features(z0_pre_denoise, state, extractor);
    result.pre_denoise_points = track_points(pre_denoise, refs_pre, state, extractor, cfg.r2, cfg.beta_step);
    const auto refs = reference_features(z0, state, extractor);
    result.final_points = track_points(z, refs, state, extractor, cfg.r2, cfg.beta_step);
    state.points = result.final_points;
    state.recompute_distances();
    for (std::size_t i = 0; i < state.size(); ++i) result.log.push_back(point_record(state, i));
  } catch (const BoundsError& e) {
    result.ok = false;
    result.bounds_error = true;
    result.error = e.what();
  } catch (const std::exception& e) {
    result.ok = false;
    result.error = e.what();
  }
  return result;
}

}  // namespace geodiff::drag
