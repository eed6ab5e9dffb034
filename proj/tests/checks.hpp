// Check routines shared by the unit tests and the acceptance binary.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "geodiff/evalharness/synthetic.hpp"
#include "geodiff/featurefield/extractor.hpp"
#include "geodiff/geodrag/copy_paste.hpp"
#include "geodiff/geodrag/drag.hpp"
#include "geodiff/geodrag/tracking.hpp"
#include "oracles.hpp"

namespace checks {

using geodiff::ff::LatentField;
using geodiff::ff::Point2;

// z_new(y, x) = z0(y - sy, x - sx); cells shifted in from outside are fresh noise.
inline LatentField shifted(const LatentField& z0, int sx, int sy, std::uint64_t seed) {
  LatentField out = oracle::random_field(z0.height(), z0.width(), z0.channels(), seed);
  for (int y = 0; y < z0.height(); ++y)
    for (int x = 0; x < z0.width(); ++x) {
      const int ys = y - sy, xs = x - sx;
      if (ys < 0 || xs < 0 || ys >= z0.height() || xs >= z0.width()) continue;
      for (int c = 0; c < z0.channels(); ++c) out.at(y, x, c) = z0.at(ys, xs, c);
    }
  return out;
}

// Tracks one point at the grid centre after shifting a random field by (sx, sy);
// returns the detected displacement.
inline Point2 track_after_shift(std::uint64_t seed, int sx, int sy, int r2) {
  using namespace geodiff;
  const int n = 2 * r2 + 24;
  const LatentField z0 = oracle::random_field(n, n, 4, seed);
  const LatentField z_new = shifted(z0, sx, sy, seed + 1000003);
  const Point2 p{double(n / 2), double(n / 2)};
  const drag::DragState state = drag::DragState::start({p}, {{p.x + 5, p.y}});
  const ff::FeatureExtractor F;
  return drag::track_points(z_new, drag::reference_features(z0, state, F), state, F, r2, 2.0)[0] - p;
}

// On a constant field every candidate ties; the winner is the cell nearest p + beta d.
struct TieCase {
  Point2 p, target;
  double beta;
};
inline Point2 tie_winner(const TieCase& tc, int r2) {
  using namespace geodiff;
  const LatentField z(40, 40, 3, 0.25);
  const drag::DragState state = drag::DragState::start({tc.p}, {tc.target});
  const ff::FeatureExtractor F;
  return drag::track_points(z, drag::reference_features(z, state, F), state, F, r2, tc.beta)[0];
}
// Brute-force expectation: nearest window cell to p + beta d, first in row-major order on ties.
inline Point2 tie_expected(const TieCase& tc, int r2) {
  const double dx = tc.target.x - tc.p.x, dy = tc.target.y - tc.p.y, e = std::hypot(dx, dy);
  const double ax = e > 0 ? tc.p.x + tc.beta * dx / e : tc.p.x, ay = e > 0 ? tc.p.y + tc.beta * dy / e : tc.p.y;
  const int px = static_cast<int>(std::lround(tc.p.x)), py = static_cast<int>(std::lround(tc.p.y));
  Point2 best{};
  double best_d = 1e300;
  for (int y = py - r2; y <= py + r2; ++y)
    for (int x = px - r2; x <= px + r2; ++x) {
      const double d = std::hypot(x - ax, y - ay);
      if (d < best_d) {
        best_d = d;
        best = {double(x), double(y)};
      }
    }
  return best;
}

// Expected membership after one update, written out case by case.
inline bool hysteresis_expected(bool fixated, double e, double l, double u) {
  if (!fixated && e <= l) return true;
  if (fixated && e >= u) return false;
  return fixated;
}

// Feeds an e-trajectory through update_fixation; returns +1 (enter) / -1 (exit) per step, 0 otherwise.
inline std::vector<int> fixation_events(const std::vector<double>& es, double l, double u) {
  using namespace geodiff;
  drag::DragState s = drag::DragState::start({{0, 0}}, {{50, 0}});
  const drag::FixationRule rule{l, u, true, true};
  std::vector<int> out;
  for (double e : es) {
    s.distance[0] = e;
    const auto ev = drag::update_fixation(s, rule);
    out.push_back(ev.empty() ? 0 : (ev[0].entered ? 1 : -1));
  }
  return out;
}

// alpha * source patch is pasted bit-exactly at G for integral positions.
inline bool paste_is_exact(std::uint64_t seed, double alpha) {
  using namespace geodiff;
  LatentField z = oracle::random_field(24, 24, 4, seed);
  const LatentField src = oracle::random_field(24, 24, 4, seed + 7);
  std::mt19937_64 pick(seed);
  std::uniform_int_distribution<int> pos(2, 21);
  Point2 q{double(pos(pick)), double(pos(pick))}, g{double(pos(pick)), double(pos(pick))};
  if (round_to_cell(q) == round_to_cell(g)) g.x = g.x > 10 ? g.x - 6 : g.x + 6;
  const drag::CopyPasteMove move{0, q, g};
  std::mt19937_64 rng(seed);
  drag::copy_paste_refine(z, src, {&move, 1}, {2, alpha, 0.5, true}, rng);
  for (int dy = -2; dy <= 2; ++dy)
    for (int dx = -2; dx <= 2; ++dx)
      for (int c = 0; c < 4; ++c) {
        const double want = alpha * src.at(int(q.y) + dy, int(q.x) + dx, c);
        if (z.at(int(g.y) + dy, int(g.x) + dx, c) != want) return false;
      }
  return true;
}

struct BlurStats {
  double pooled_mean = 0.0, pooled_var = 0.0;
  double worst_cell_mean = 0.0;           // largest |per-cell mean|
  double min_cell_var = 1e300, max_cell_var = 0.0;
  int cells = 0;
};

// beta_blur = 0 and disjoint Q/G: each vacated value becomes pure N(0, 1) noise.
// `trials` independent pastes over a 5x5x1 source patch.
inline BlurStats blur_statistics(int trials, std::uint64_t seed) {
  using namespace geodiff;
  const LatentField src = oracle::random_field(16, 16, 1, seed, 3.0);
  const drag::CopyPasteMove move{0, {4, 4}, {11, 11}};
  std::mt19937_64 rng(seed);
  std::vector<double> sum(25, 0.0), sq(25, 0.0);
  long double all = 0.0L, all_sq = 0.0L;
  for (int t = 0; t < trials; ++t) {
    LatentField z = src;
    drag::copy_paste_refine(z, src, {&move, 1}, {2, 1.0, 0.0, true}, rng);
    for (int k = 0; k < 25; ++k) {
      const double v = z.at(2 + k / 5, 2 + k % 5, 0);
      sum[k] += v;
      sq[k] += v * v;
      all += v;
      all_sq += v * v;
    }
  }
  BlurStats s;
  s.cells = 25 * trials;
  s.pooled_mean = static_cast<double>(all / s.cells);
  s.pooled_var = static_cast<double>(all_sq / s.cells) - s.pooled_mean * s.pooled_mean;
  for (int k = 0; k < 25; ++k) {
    const double m = sum[k] / trials, var = sq[k] / trials - m * m;
    s.worst_cell_mean = std::max(s.worst_cell_mean, std::abs(m));
    s.min_cell_var = std::min(s.min_cell_var, var);
    s.max_cell_var = std::max(s.max_cell_var, var);
  }
  return s;
}

// Runs a synthetic case with the identity denoiser and checks that every target
// patch of the final latent equals alpha times the patch at round(p0) of z_T.
// Points whose rounded source and target coincide are not moved and are skipped.
struct PinningResult {
  bool exact = true;
  int patches = 0;
};
inline PinningResult stage2_pinning(const geodiff::eval::SyntheticSpec& spec, geodiff::drag::DragConfig cfg) {
  using namespace geodiff;
  const eval::SyntheticCase sc = eval::generate_synthetic_case(spec);
  cfg.denoiser_kind = "identity";
  const drag::EditableMask mask = drag::EditableMask::all_editable(sc.field.height(), sc.field.width());
  const drag::DragResult r = drag::run_drag(sc.field, sc.centers, sc.targets, mask, ff::FeatureExtractor{},
                                            drag::Denoiser::identity(), cfg);
  PinningResult out;
  if (!r.ok) return {false, 0};
  const int rc = cfg.r_cp;
  for (std::size_t i = 0; i < sc.centers.size(); ++i) {
    const ff::Cell q = ff::round_to_cell(sc.centers[i]), g = ff::round_to_cell(sc.targets[i]);
    if (q == g) continue;
    ++out.patches;
    for (int dy = -rc; dy <= rc; ++dy)
      for (int dx = -rc; dx <= rc; ++dx)
        for (int c = 0; c < sc.field.channels(); ++c)
          if (r.latent.at(g.y + dy, g.x + dx, c) != cfg.alpha * sc.field.at(q.y + dy, q.x + dx, c)) out.exact = false;
  }
  return out;
}

}  // namespace checks
