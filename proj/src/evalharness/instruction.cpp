#include "geodiff/evalharness/instruction.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "geodiff/error.hpp"

namespace geodiff::eval {
namespace {

using nlohmann::json;

Point2 read_point(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw InputError(what + " must be [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

int read_dim(const json& j, const char* obj, const char* key) {
  if (!j.contains(obj) || !j[obj].is_object() || !j[obj].contains(key) || !j[obj][key].is_number_integer() ||
      j[obj][key].get<long long>() <= 0) {
    throw InputError(std::string("instruction field '") + obj + "." + key + "' must be a positive integer");
  }
  return j[obj][key].get<int>();
}

bool inside_image(Point2 p, int w, int h) {
  return std::isfinite(p.x) && std::isfinite(p.y) && p.x >= 0 && p.y >= 0 && p.x < w && p.y < h;
}

}  // namespace

void DragInstruction::validate() const {
  if (image_width <= 0 || image_height <= 0 || latent_width <= 0 || latent_height <= 0) {
    throw InputError("instruction: image and latent dimensions must be positive");
  }
  if (image_width % latent_width != 0 || image_height % latent_height != 0 ||
      image_width / latent_width != image_height / latent_height) {
    throw InputError("instruction: latent dimensions must divide the image dimensions by one integral factor");
  }
  if (pairs.empty()) throw InputError("instruction: no pairs");
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (const Point2 p : {pairs[i].source, pairs[i].target}) {
      if (!inside_image(p, image_width, image_height)) {
        std::ostringstream msg;
        msg << "instruction: pair " << i << " point (" << p.x << ", " << p.y << ") outside the " << image_width << "x"
            << image_height << " image";
        throw BoundsError(msg.str());
      }
    }
  }
  if (mask && (mask->width != image_width || mask->height != image_height)) {
    throw InputError("instruction: mask size differs from the image size");
  }
}

int DragInstruction::scale() const { return image_width / latent_width; }

std::vector<Point2> DragInstruction::latent_sources() const {
  std::vector<Point2> out;
  const double s = scale();
  for (const auto& p : pairs) out.push_back({p.source.x / s, p.source.y / s});
  return out;
}

std::vector<Point2> DragInstruction::latent_targets() const {
  std::vector<Point2> out;
  const double s = scale();
  for (const auto& p : pairs) out.push_back({p.target.x / s, p.target.y / s});
  return out;
}

drag::EditableMask DragInstruction::latent_mask() const {
  if (!mask) return drag::EditableMask::all_editable(latent_height, latent_width);
  const int s = scale();
  std::vector<std::uint8_t> cells(static_cast<std::size_t>(latent_height) * latent_width, 0);
  for (int y = 0; y < latent_height; ++y)
    for (int x = 0; x < latent_width; ++x) {
      bool any = false;
      for (int py = y * s; py < (y + 1) * s && !any; ++py)
        for (int px = x * s; px < (x + 1) * s && !any; ++px) any = mask->at(px, py) != 0;
      cells[static_cast<std::size_t>(y) * latent_width + x] = any ? 1 : 0;
    }
  return {latent_height, latent_width, std::move(cells)};
}

nlohmann::ordered_json DragInstruction::to_json() const {
  nlohmann::ordered_json j;
  j["image"] = {{"w", image_width}, {"h", image_height}};
  j["latent"] = {{"w", latent_width}, {"h", latent_height}};
  j["pairs"] = nlohmann::ordered_json::array();
  for (const auto& p : pairs) {
    nlohmann::ordered_json pj;
    if (!p.name.empty()) pj["name"] = p.name;
    pj["source"] = {p.source.x, p.source.y};
    pj["target"] = {p.target.x, p.target.y};
    j["pairs"].push_back(pj);
  }
  if (!mask_path.empty()) j["mask_path"] = mask_path;
  j["tags"] = tags;
  return j;
}

DragInstruction DragInstruction::from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw InputError("instruction must be a JSON object");
  DragInstruction ins;
  ins.image_width = read_dim(j, "image", "w");
  ins.image_height = read_dim(j, "image", "h");
  ins.latent_width = read_dim(j, "latent", "w");
  ins.latent_height = read_dim(j, "latent", "h");
  if (!j.contains("pairs") || !j["pairs"].is_array()) throw InputError("instruction field 'pairs' must be an array");
  for (std::size_t i = 0; i < j["pairs"].size(); ++i) {
    const auto& pj = j["pairs"][i];
    const std::string where = "instruction pairs[" + std::to_string(i) + "]";
    if (!pj.is_object() || !pj.contains("source") || !pj.contains("target")) {
      throw InputError(where + " needs source and target");
    }
    DragPair pair{read_point(pj["source"], where + ".source"), read_point(pj["target"], where + ".target"), ""};
    if (pj.contains("name") && pj["name"].is_string()) pair.name = pj["name"].get<std::string>();
    ins.pairs.push_back(std::move(pair));
  }
  if (j.contains("mask_path") && !j["mask_path"].is_null()) {
    if (!j["mask_path"].is_string()) throw InputError("instruction field 'mask_path' must be a string");
    ins.mask_path = j["mask_path"].get<std::string>();
    std::filesystem::path mp = ins.mask_path;
    if (mp.is_relative() && !base_dir.empty()) mp = base_dir / mp;
    ins.mask = load_pgm(mp);
  }
  if (j.contains("tags")) {
    if (!j["tags"].is_object()) throw InputError("instruction field 'tags' must be an object");
    ins.tags = j["tags"];
  }
  ins.validate();
  return ins;
}

DragInstruction load_instruction(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open instruction '" + path.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError("instruction '" + path.string() + "': " + e.what());
  }
  return DragInstruction::from_json(j, path.parent_path());
}

void save_instruction(const std::filesystem::path& path, const DragInstruction& instruction) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  out << instruction.to_json().dump(2) << '\n';
  if (instruction.mask && !instruction.mask_path.empty()) {
    std::filesystem::path mp = instruction.mask_path;
    if (mp.is_relative()) mp = path.parent_path() / mp;
    save_pgm(mp, *instruction.mask);
  }
}

}  // namespace geodiff::eval
