#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "geodiff/evalharness/instruction.hpp"
#include "geodiff/featurefield/latent_field.hpp"

namespace geodiff::eval {

struct SyntheticSpec {
  int height = 64;
  int width = 64;
  int channels = 4;
  int blob_count = 1;
  double sigma = 2.5;              // blob standard deviation (cells)
  std::vector<Point2> drags;       // one per blob; missing entries mean no drag
  std::vector<Point2> centers;     // optional explicit centers; drawn from the seed otherwise
  double texture_amplitude = 0.1;  // smoothed background noise amplitude
  int margin = 16;                 // minimum distance of centers and targets from the border
  int image_scale = 1;             // image pixels per latent cell in the instruction
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
  static SyntheticSpec from_json(const nlohmann::json& j);
};

struct SyntheticCase {
  ff::LatentField field;         // background + blobs at their centers
  DragInstruction instruction;   // blob centers -> centers + drags, image pixels
  ff::LatentField ground_truth;  // background + blobs re-centred at the targets
  ff::LatentField background;
  std::vector<Point2> centers;
  std::vector<Point2> targets;
  std::vector<std::vector<double>> amplitudes;  // per blob, per channel
};

// Seeded Gaussian blobs on a textured background. Centers are integral cells.
// Throws InputError when centers/targets cannot satisfy the margin and
// separation constraints.
SyntheticCase generate_synthetic_case(const SyntheticSpec& spec);

// Shipped benchmark: `count` single-blob 64x64x4 cases with drags of 10-25
// cells in seeded directions.
struct SuiteCase {
  std::string id;
  SyntheticSpec spec;
};
std::vector<SuiteCase> blob_suite(int count, std::uint64_t seed);

}  // namespace geodiff::eval
