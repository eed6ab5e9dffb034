#pragma once

#include <vector>

#include "geodiff/featurefield/extractor.hpp"
#include "geodiff/featurefield/latent_field.hpp"
#include "geodiff/geodrag/config.hpp"
#include "geodiff/geodrag/state.hpp"

namespace geodiff::drag {

// F_{p_i^0}(z0): the reference feature vector of every point.
std::vector<std::vector<double>> reference_features(const ff::LatentField& z0, const DragState& state,
                                                    const ff::FeatureExtractor& extractor);

// Nearest-feature search: each point (fixated or not) moves to the integer cell
// of Omega(round(p_i), r2) whose F(z_new) vector has the smallest L1 distance
// to its reference vector. Ties go to the cell closest to p_i + beta_step * d_i,
// then to the first in row-major order. Returns the new positions; the state
// is not modified.
std::vector<Point2> track_points(const ff::LatentField& z_new, const std::vector<std::vector<double>>& references,
                                 const DragState& state, const ff::FeatureExtractor& extractor, int r2,
                                 double beta_step);

std::vector<Point2> track_points(const ff::LatentField& z_new, const ff::LatentField& z0, const DragState& state,
                                 const ff::FeatureExtractor& extractor, const DragConfig& cfg);

}  // namespace geodiff::drag
