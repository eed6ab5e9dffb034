#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "geodiff/featurefield/latent_field.hpp"
#include "geodiff/geodrag/motion.hpp"
#include "geodiff/raster.hpp"

namespace geodiff::eval {

using ff::Point2;

struct DragPair {
  Point2 source;  // image pixels
  Point2 target;
  std::string name;  // optional keypoint name
};

// Paired source/target points in image pixels plus an optional editable mask
// at image resolution.
//
// JSON form:
//   {"image":{"w":W,"h":H}, "latent":{"w":w,"h":h},
//    "pairs":[{"source":[x,y],"target":[x,y]}, ...],
//    "mask_path":"mask.pgm", "tags":{}}
struct DragInstruction {
  int image_width = 0;
  int image_height = 0;
  int latent_width = 0;
  int latent_height = 0;
  std::vector<DragPair> pairs;
  std::optional<GrayImage> mask;
  std::string mask_path;  // as written in the document
  nlohmann::json tags = nlohmann::json::object();

  // Throws InputError on inconsistent dimensions and BoundsError on
  // points outside the image.
  void validate() const;
  // Integral image/latent factor (same on both axes).
  int scale() const;

  std::vector<Point2> latent_sources() const;
  std::vector<Point2> latent_targets() const;
  // A latent cell is editable when any pixel of its image block is non-zero.
  drag::EditableMask latent_mask() const;

  nlohmann::ordered_json to_json() const;
  // mask_path is resolved against base_dir.
  static DragInstruction from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
};

DragInstruction load_instruction(const std::filesystem::path& path);
// Writes the document; when a mask is present and mask_path is set, the mask
// is written next to it.
void save_instruction(const std::filesystem::path& path, const DragInstruction& instruction);

}  // namespace geodiff::eval
