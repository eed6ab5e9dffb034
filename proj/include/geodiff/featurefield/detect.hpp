#pragma once

#include <span>
#include <vector>

#include "geodiff/featurefield/latent_field.hpp"

namespace geodiff::ff {

struct Detection {
  Cell position;
  double similarity = 0.0;
  // Cells whose similarity equals the winner's within 1e-12; > 1 means the
  // match is ambiguous (e.g. a constant field).
  int tie_count = 0;
};

// Re-detects annotated points: for each annotated point (rounded to its grid
// cell) finds the cell of feat_new whose feature vector has maximum cosine
// similarity with the annotated vector in feat_ref. Full-grid search; ties go
// to the first cell in row-major order.
std::vector<Detection> detect_points(const LatentField& feat_ref, const LatentField& feat_new,
                                     std::span<const Point2> annotated);

}  // namespace geodiff::ff
