#include "geodiff/geodrag/copy_paste.hpp"

#include <cmath>
#include <sstream>

#include "geodiff/error.hpp"

namespace geodiff::drag {
namespace {

void require_square_in_bounds(const ff::LatentField& z, ff::Cell c, int r, const char* what) {
  if (c.x - r < 0 || c.y - r < 0 || c.x + r >= z.width() || c.y + r >= z.height()) {
    std::ostringstream msg;
    msg << "copy-paste " << what << " patch at (" << c.x << ", " << c.y << ") radius " << r << " leaves the grid";
    throw BoundsError(msg.str());
  }
}

}  // namespace

std::vector<std::size_t> copy_paste_refine(ff::LatentField& z, const ff::LatentField& z_source,
                                           std::span<const CopyPasteMove> moves, const CopyPasteOptions& options,
                                           std::mt19937_64& rng) {
  if (!z.same_shape(z_source)) throw InputError("copy_paste_refine: source latent shape mismatch");
  const int r = options.radius;
  const double noise_scale = std::sqrt(1.0 - options.beta_blur * options.beta_blur);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::size_t> applied;

  for (const auto& move : moves) {
    const ff::Cell q = ff::round_to_cell(move.source);
    const ff::Cell g = ff::round_to_cell(move.target);
    require_square_in_bounds(z, q, r, "source");
    require_square_in_bounds(z, g, r, "target");
    if (q == g) continue;

    for (int dy = -r; dy <= r; ++dy)
      for (int dx = -r; dx <= r; ++dx)
        for (int c = 0; c < z.channels(); ++c)
          z.at(g.y + dy, g.x + dx, c) = options.alpha * z_source.at(q.y + dy, q.x + dx, c);

    if (options.blur_source) {
      for (int y = q.y - r; y <= q.y + r; ++y)
        for (int x = q.x - r; x <= q.x + r; ++x) {
          if (std::abs(x - g.x) <= r && std::abs(y - g.y) <= r) continue;  // pasted cell
          for (double& v : z.cell(y, x)) v = options.beta_blur * v + noise_scale * normal(rng);
        }
    }
    applied.push_back(move.point);
  }
  return applied;
}

}  // namespace geodiff::drag
