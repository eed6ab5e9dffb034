#include "geodiff/geodrag/state.hpp"

#include "geodiff/error.hpp"

namespace geodiff::drag {

DragState DragState::start(std::vector<Point2> handles, std::vector<Point2> targets) {
  if (handles.size() != targets.size()) throw InputError("drag state: handle and target counts differ");
  if (handles.empty()) throw InputError("drag state: no points");
  DragState s;
  s.origins = handles;
  s.points = std::move(handles);
  s.targets = std::move(targets);
  s.fixated.assign(s.points.size(), false);
  s.recompute_distances();
  return s;
}

void DragState::recompute_distances() {
  distance.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) distance[i] = ff::distance(targets[i], points[i]);
}

Point2 DragState::direction(std::size_t i) const {
  const double e = distance[i];
  if (e == 0.0) return {0.0, 0.0};
  return (1.0 / e) * (targets[i] - points[i]);
}

std::vector<FixationEvent> update_fixation(DragState& state, const FixationRule& rule) {
  std::vector<FixationEvent> events;
  for (std::size_t i = 0; i < state.size(); ++i) {
    const bool next = next_fixation(state.fixated[i], state.distance[i], rule);
    if (next != state.fixated[i]) events.push_back({i, next});
    state.fixated[i] = next;
  }
  return events;
}

}  // namespace geodiff::drag
