#include "geodiff/scene3d/reference_object.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "geodiff/error.hpp"

namespace geodiff::scene {
namespace {

Mesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open mesh '" + path.string() + "'");
  try {
    return parse_obj(in);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace

void ReferenceObject::validate() const {
  if (vertices.empty()) throw InputError("reference object: mesh has no vertices");
  for (std::size_t f = 0; f < faces.size(); ++f) {
    if (faces[f].size() < 3) throw InputError("reference object: face " + std::to_string(f + 1) + " has fewer than 3 vertices");
    for (int idx : faces[f]) {
      if (idx < 0 || idx >= static_cast<int>(vertices.size())) {
        throw InputError("reference object: face " + std::to_string(f + 1) + " index " + std::to_string(idx + 1) +
                         " out of range (mesh has " + std::to_string(vertices.size()) + " vertices)");
      }
    }
  }
  if (keypoints.empty()) throw InputError("reference object: no keypoints");
  std::set<std::string> names;
  for (const auto& k : keypoints) {
    if (!names.insert(k.name).second) throw InputError("reference object: duplicate keypoint '" + k.name + "'");
    if (!k.position.allFinite()) throw InputError("reference object: keypoint '" + k.name + "' is not finite");
  }
}

std::vector<Vec3> ReferenceObject::keypoint_positions() const {
  std::vector<Vec3> out;
  out.reserve(keypoints.size());
  for (const auto& k : keypoints) out.push_back(k.position);
  return out;
}

int ReferenceObject::keypoint_index(const std::string& name) const {
  for (std::size_t i = 0; i < keypoints.size(); ++i)
    if (keypoints[i].name == name) return static_cast<int>(i);
  return -1;
}

Mesh parse_obj(std::istream& in) {
  Mesh mesh;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 v;
      if (!(ls >> v.x() >> v.y() >> v.z()) || !v.allFinite()) {
        throw InputError("line " + std::to_string(line_no) + ": malformed vertex");
      }
      mesh.vertices.push_back(v);
    } else if (tag == "f") {
      std::vector<int> face;
      std::string tok;
      while (ls >> tok) {
        const std::string head = tok.substr(0, tok.find('/'));
        std::size_t used = 0;
        int idx = 0;
        try {
          idx = std::stoi(head, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used == 0 || used != head.size() || idx <= 0) {
          throw InputError("line " + std::to_string(line_no) + ": bad face index '" + tok + "' (1-based indices expected)");
        }
        face.push_back(idx - 1);
      }
      if (face.size() < 3) throw InputError("line " + std::to_string(line_no) + ": face needs at least 3 vertices");
      mesh.faces.push_back(std::move(face));
    }
  }
  return mesh;
}

std::vector<Keypoint> parse_keypoints(const nlohmann::json& j, const std::vector<Vec3>& vertices) {
  if (!j.is_object()) throw InputError("keypoints must be an object mapping name -> [x, y, z]");
  std::vector<Keypoint> out;
  for (const auto& [name, value] : j.items()) {
    Keypoint k{name, Vec3::Zero()};
    if (value.is_array()) {
      if (value.size() != 3 || !value[0].is_number() || !value[1].is_number() || !value[2].is_number()) {
        throw InputError("keypoint '" + name + "' must have three numeric coordinates");
      }
      k.position = {value[0].get<double>(), value[1].get<double>(), value[2].get<double>()};
    } else if (value.is_object() && value.contains("vertex") && value["vertex"].is_number_integer()) {
      const int v = value["vertex"].get<int>();
      if (v < 1 || v > static_cast<int>(vertices.size())) {
        throw InputError("keypoint '" + name + "' references missing vertex " + std::to_string(v));
      }
      k.position = vertices[v - 1];
    } else {
      throw InputError("keypoint '" + name + "' has no coordinates");
    }
    out.push_back(std::move(k));
  }
  return out;
}

std::filesystem::path keypoint_sidecar(const std::filesystem::path& mesh_path) {
  auto p = mesh_path;
  p.replace_extension(".keypoints.json");
  return p;
}

ReferenceObject load_reference(const std::filesystem::path& mesh_path) {
  const auto sidecar = keypoint_sidecar(mesh_path);
  std::ifstream in(sidecar);
  if (!in) throw InputError("cannot open keypoint sidecar '" + sidecar.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(sidecar.string() + ": " + e.what());
  }
  return load_reference(mesh_path, j);
}

ReferenceObject load_reference(const std::filesystem::path& mesh_path, const nlohmann::json& keypoints) {
  Mesh mesh = load_mesh(mesh_path);
  ReferenceObject obj;
  obj.keypoints = parse_keypoints(keypoints, mesh.vertices);
  obj.vertices = std::move(mesh.vertices);
  obj.faces = std::move(mesh.faces);
  obj.validate();
  return obj;
}

}  // namespace geodiff::scene
