#pragma once

#include <cstddef>
#include <vector>

#include "geodiff/featurefield/latent_field.hpp"

namespace geodiff::drag {

using ff::Point2;

// Per-run handle bookkeeping. All vectors are indexed by point id.
struct DragState {
  std::vector<Point2> points;   // current handle positions p_i^k
  std::vector<Point2> targets;  // g_i
  std::vector<Point2> origins;  // p_i^0
  std::vector<bool> fixated;    // membership in the fixation set
  std::vector<double> distance; // e_i = |g_i - p_i|
  int iteration = 0;            // global drag-iteration counter k
  int timestep = 0;

  static DragState start(std::vector<Point2> handles, std::vector<Point2> targets);

  std::size_t size() const { return points.size(); }
  void recompute_distances();
  // Unit vector toward the target, or (0, 0) when the point sits on it.
  Point2 direction(std::size_t i) const;
  // p_i + beta * d_i
  Point2 stepped(std::size_t i, double beta) const { return points[i] + beta * direction(i); }
};

struct FixationRule {
  double enter = 1.0;  // l
  double exit = 3.0;   // u
  bool allow_entry = true;
  bool allow_exit = true;
};

// Hysteresis: a free point with e <= l enters, a fixated point with e >= u
// leaves, anything in between keeps its membership.
inline bool next_fixation(bool fixated, double e, const FixationRule& rule) {
  if (!fixated) return rule.allow_entry && e <= rule.enter;
  return !(rule.allow_exit && e >= rule.exit);
}

struct FixationEvent {
  std::size_t point;
  bool entered;  // false: exited
};

// Applies next_fixation to every point using the current distances.
std::vector<FixationEvent> update_fixation(DragState& state, const FixationRule& rule);

}  // namespace geodiff::drag
