#pragma once

#include <span>
#include <vector>

#include "geodiff/featurefield/latent_field.hpp"

namespace geodiff::eval {

// Mean Euclidean distance between final points and targets, both in latent
// cells, multiplied by the latent -> image scale factor (result in image pixels).
double mean_distance(std::span<const ff::Point2> final_points, std::span<const ff::Point2> targets, double scale);

// Converts an MD in image pixels to the 512-pixel-wide convention.
inline double md_at_512(double md_pixels, int image_width) { return md_pixels * 512.0 / image_width; }

double median(std::vector<double> values);
double mean(std::span<const double> values);

}  // namespace geodiff::eval
