#pragma once

#include <random>
#include <span>
#include <vector>

#include "geodiff/featurefield/latent_field.hpp"

namespace geodiff::drag {

struct CopyPasteMove {
  std::size_t point = 0;
  ff::Point2 source;  // rounded to a cell for the source patch Q
  ff::Point2 target;  // rounded to a cell for the target patch G
};

struct CopyPasteOptions {
  int radius = 2;
  double alpha = 1.01;
  double beta_blur = 0.8;
  bool blur_source = true;
};

// For each move, in order: G <- alpha * z_source[Q]; then, if blur_source,
// every cell of Q \ G becomes beta_blur * z + sqrt(1 - beta_blur^2) * eps with
// eps ~ N(0, 1) per value. Moves whose Q and G coincide are skipped. Both
// patches must lie inside the grid. Returns the ids of the moves applied.
std::vector<std::size_t> copy_paste_refine(ff::LatentField& z, const ff::LatentField& z_source,
                                           std::span<const CopyPasteMove> moves, const CopyPasteOptions& options,
                                           std::mt19937_64& rng);

}  // namespace geodiff::drag
