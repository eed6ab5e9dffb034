#include "geodiff/geodrag/tracking.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "geodiff/error.hpp"
#include "geodiff/featurefield/sampling.hpp"

namespace geodiff::drag {

std::vector<std::vector<double>> reference_features(const ff::LatentField& z0, const DragState& state,
                                                    const ff::FeatureExtractor& extractor) {
  const ff::LatentField features = extractor.apply(z0);
  std::vector<std::vector<double>> refs;
  refs.reserve(state.size());
  for (const Point2 origin : state.origins) refs.push_back(ff::sample_point(features, origin));
  return refs;
}

std::vector<Point2> track_points(const ff::LatentField& z_new, const std::vector<std::vector<double>>& references,
                                 const DragState& state, const ff::FeatureExtractor& extractor, int r2,
                                 double beta_step) {
  if (references.size() != state.size()) throw InputError("track_points: one reference vector per point required");
  const ff::LatentField features = extractor.apply(z_new);
  std::vector<Point2> out;
  out.reserve(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) {
    const ff::Cell center = ff::round_to_cell(state.points[i]);
    if (center.x - r2 < 0 || center.y - r2 < 0 || center.x + r2 >= features.width() ||
        center.y + r2 >= features.height()) {
      std::ostringstream msg;
      msg << "tracking window of radius " << r2 << " around (" << center.x << ", " << center.y << ") leaves the grid";
      throw BoundsError(msg.str());
    }
    const Point2 aim = state.stepped(i, beta_step);
    const auto& ref = references[i];
    double best_cost = std::numeric_limits<double>::infinity();
    double best_aim = std::numeric_limits<double>::infinity();
    ff::Cell best = center;
    // row-major scan; strict comparisons keep the first of equal candidates
    for (int y = center.y - r2; y <= center.y + r2; ++y)
      for (int x = center.x - r2; x <= center.x + r2; ++x) {
        const auto v = features.cell(y, x);
        double cost = 0.0;
        for (std::size_t c = 0; c < v.size(); ++c) cost += std::abs(v[c] - ref[c]);
        const double to_aim = ff::distance({double(x), double(y)}, aim);
        if (cost < best_cost || (cost == best_cost && to_aim < best_aim)) {
          best_cost = cost;
          best_aim = to_aim;
          best = {x, y};
        }
      }
    out.push_back(ff::to_point(best));
  }
  return out;
}

std::vector<Point2> track_points(const ff::LatentField& z_new, const ff::LatentField& z0, const DragState& state,
                                 const ff::FeatureExtractor& extractor, const DragConfig& cfg) {
  return track_points(z_new, reference_features(z0, state, extractor), state, extractor, cfg.r2, cfg.beta_step);
}

}  // namespace geodiff::drag
