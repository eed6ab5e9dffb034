#include "geodiff/featurefield/detect.hpp"

#include <cmath>
#include <sstream>

#include "geodiff/error.hpp"

namespace geodiff::ff {
namespace {

constexpr double kTieTolerance = 1e-12;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

std::vector<Detection> detect_points(const LatentField& feat_ref, const LatentField& feat_new,
                                     std::span<const Point2> annotated) {
  if (feat_ref.channels() != feat_new.channels()) {
    throw InputError("detect_points: feature fields have different channel counts");
  }
  std::vector<double> norms(static_cast<std::size_t>(feat_new.height()) * feat_new.width());
  for (int y = 0; y < feat_new.height(); ++y)
    for (int x = 0; x < feat_new.width(); ++x) {
      const auto v = feat_new.cell(y, x);
      norms[static_cast<std::size_t>(y) * feat_new.width() + x] = std::sqrt(dot(v, v));
    }

  std::vector<Detection> out;
  out.reserve(annotated.size());
  for (const Point2 p : annotated) {
    const Cell a = round_to_cell(p);
    if (!feat_ref.contains(a)) {
      std::ostringstream msg;
      msg << "detect_points: annotated point (" << p.x << ", " << p.y << ") outside reference field";
      throw BoundsError(msg.str());
    }
    const auto query = feat_ref.cell(a.y, a.x);
    const double qn = std::sqrt(dot(query, query));
    if (qn == 0.0) {
      std::ostringstream msg;
      msg << "detect_points: zero-norm feature at annotated point (" << a.x << ", " << a.y << ")";
      throw InputError(msg.str());
    }

    std::vector<double> sims(norms.size(), -2.0);
    Detection best{{0, 0}, -2.0, 0};
    for (int y = 0; y < feat_new.height(); ++y)
      for (int x = 0; x < feat_new.width(); ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * feat_new.width() + x;
        if (norms[i] == 0.0) continue;
        sims[i] = dot(query, feat_new.cell(y, x)) / (qn * norms[i]);
        if (sims[i] > best.similarity) best = {{x, y}, sims[i], 0};
      }
    for (double s : sims)
      if (s >= best.similarity - kTieTolerance) ++best.tie_count;
    out.push_back(best);
  }
  return out;
}

}  // namespace geodiff::ff
