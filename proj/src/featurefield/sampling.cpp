#include "geodiff/featurefield/sampling.hpp"

#include <cmath>
#include <sstream>

#include "geodiff/error.hpp"

namespace geodiff::ff {
namespace {

struct Bilinear {
  int x0, y0;
  double fx, fy;
  bool integral;
};

Bilinear bilinear_at(const LatentField& field, Point2 p) {
  Bilinear b{};
  const double fx0 = std::floor(p.x), fy0 = std::floor(p.y);
  b.integral = fx0 == p.x && fy0 == p.y;
  b.x0 = static_cast<int>(fx0);
  b.y0 = static_cast<int>(fy0);
  b.fx = p.x - fx0;
  b.fy = p.y - fy0;
  if (b.integral) return b;
  // keep x0 + 1 inside the grid at the far edge
  if (b.x0 == field.width() - 1 && b.x0 > 0) {
    b.x0 -= 1;
    b.fx = 1.0;
  }
  if (b.y0 == field.height() - 1 && b.y0 > 0) {
    b.y0 -= 1;
    b.fy = 1.0;
  }
  return b;
}

bool point_in_bounds(const LatentField& field, Point2 p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && p.x >= 0.0 && p.y >= 0.0 && p.x <= field.width() - 1 &&
         p.y <= field.height() - 1;
}

}  // namespace

bool patch_in_bounds(const LatentField& field, const Patch& patch) {
  const Point2 lo{patch.center.x - patch.radius, patch.center.y - patch.radius};
  const Point2 hi{patch.center.x + patch.radius, patch.center.y + patch.radius};
  return patch.radius >= 0 && point_in_bounds(field, lo) && point_in_bounds(field, hi);
}

void require_patch_in_bounds(const LatentField& field, const Patch& patch) {
  if (!patch_in_bounds(field, patch)) {
    std::ostringstream msg;
    msg << "patch centered at (" << patch.center.x << ", " << patch.center.y << ") with radius " << patch.radius
        << " leaves the " << field.height() << "x" << field.width() << " grid";
    throw BoundsError(msg.str());
  }
}

void sample_point(const LatentField& field, Point2 p, std::span<double> out) {
  if (!point_in_bounds(field, p)) {
    std::ostringstream msg;
    msg << "sample position (" << p.x << ", " << p.y << ") outside grid";
    throw BoundsError(msg.str());
  }
  const Bilinear b = bilinear_at(field, p);
  if (b.integral) {
    const auto cell = field.cell(b.y0, b.x0);
    std::copy(cell.begin(), cell.end(), out.begin());
    return;
  }
  const int x1 = std::min(b.x0 + 1, field.width() - 1);
  const int y1 = std::min(b.y0 + 1, field.height() - 1);
  const double w00 = (1 - b.fx) * (1 - b.fy), w01 = b.fx * (1 - b.fy);
  const double w10 = (1 - b.fx) * b.fy, w11 = b.fx * b.fy;
  for (int c = 0; c < field.channels(); ++c) {
    out[c] = w00 * field.at(b.y0, b.x0, c) + w01 * field.at(b.y0, x1, c) + w10 * field.at(y1, b.x0, c) +
             w11 * field.at(y1, x1, c);
  }
}

std::vector<double> sample_point(const LatentField& field, Point2 p) {
  std::vector<double> out(field.channels());
  sample_point(field, p, out);
  return out;
}

PatchBlock sample_patch(const LatentField& features, const Patch& patch) {
  require_patch_in_bounds(features, patch);
  PatchBlock block{patch.radius, features.channels(), {}};
  const int side = block.side();
  block.values.resize(static_cast<std::size_t>(side) * side * block.channels);
  for (int dy = -patch.radius; dy <= patch.radius; ++dy)
    for (int dx = -patch.radius; dx <= patch.radius; ++dx) {
      const std::size_t off = (static_cast<std::size_t>(dy + patch.radius) * side + (dx + patch.radius)) * block.channels;
      sample_point(features, {patch.center.x + dx, patch.center.y + dy},
                   std::span<double>(block.values.data() + off, block.channels));
    }
  for (double v : block.values)
    if (!std::isfinite(v)) throw NumericError("non-finite feature value in sampled patch");
  return block;
}

PatchBlock sample_patch(const LatentField& z, const FeatureExtractor& extractor, const Patch& patch) {
  require_patch_in_bounds(z, patch);
  return sample_patch(extractor.apply(z), patch);
}

double patch_l1(const PatchBlock& a, const PatchBlock& b) {
  if (!a.same_shape(b) || a.values.size() != b.values.size()) {
    throw InputError("patch_l1: blocks differ in shape (radius " + std::to_string(a.radius) + "/" +
                     std::to_string(b.radius) + ", channels " + std::to_string(a.channels) + "/" +
                     std::to_string(b.channels) + ")");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) sum += std::abs(a.values[i] - b.values[i]);
  return sum;
}

void scatter_patch_gradient(LatentField& grad_features, const Patch& patch, const PatchBlock& block_grad) {
  require_patch_in_bounds(grad_features, patch);
  if (block_grad.radius != patch.radius || block_grad.channels != grad_features.channels()) {
    throw InputError("scatter_patch_gradient: block shape does not match patch");
  }
  const int side = block_grad.side();
  const int channels = block_grad.channels;
  for (int dy = -patch.radius; dy <= patch.radius; ++dy)
    for (int dx = -patch.radius; dx <= patch.radius; ++dx) {
      const double* g =
          block_grad.values.data() + (static_cast<std::size_t>(dy + patch.radius) * side + (dx + patch.radius)) * channels;
      const Bilinear b = bilinear_at(grad_features, {patch.center.x + dx, patch.center.y + dy});
      if (b.integral) {
        for (int c = 0; c < channels; ++c) grad_features.at(b.y0, b.x0, c) += g[c];
        continue;
      }
      const int x1 = std::min(b.x0 + 1, grad_features.width() - 1);
      const int y1 = std::min(b.y0 + 1, grad_features.height() - 1);
      const double w00 = (1 - b.fx) * (1 - b.fy), w01 = b.fx * (1 - b.fy);
      const double w10 = (1 - b.fx) * b.fy, w11 = b.fx * b.fy;
      for (int c = 0; c < channels; ++c) {
        grad_features.at(b.y0, b.x0, c) += w00 * g[c];
        grad_features.at(b.y0, x1, c) += w01 * g[c];
        grad_features.at(y1, b.x0, c) += w10 * g[c];
        grad_features.at(y1, x1, c) += w11 * g[c];
      }
    }
}

}  // namespace geodiff::ff
