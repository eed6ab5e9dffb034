#include "geodiff/evalharness/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "geodiff/error.hpp"

namespace geodiff::eval {

double mean_distance(std::span<const ff::Point2> final_points, std::span<const ff::Point2> targets, double scale) {
  if (final_points.size() != targets.size()) throw InputError("mean_distance: point and target counts differ");
  if (!(scale > 0.0)) throw InputError("mean_distance: scale must be > 0");
  if (final_points.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < final_points.size(); ++i) sum += ff::distance(final_points[i], targets[i]);
  return sum / static_cast<double>(final_points.size()) * scale;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

}  // namespace geodiff::eval
