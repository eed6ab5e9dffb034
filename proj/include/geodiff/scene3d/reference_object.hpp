#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

namespace geodiff::scene {

using Vec3 = Eigen::Vector3d;

struct Keypoint {
  std::string name;
  Vec3 position;  // meters
};

// Reference mesh plus named keypoints. Faces are polygons (>= 3 vertices,
// 0-based indices); triangles are the common case.
struct ReferenceObject {
  std::vector<Vec3> vertices;
  std::vector<std::vector<int>> faces;
  std::vector<Keypoint> keypoints;

  // Throws InputError on out-of-range face indices, an empty mesh, no
  // keypoints or duplicate keypoint names.
  void validate() const;
  std::vector<Vec3> keypoint_positions() const;
  int keypoint_index(const std::string& name) const;  // -1 if absent
};

struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<std::vector<int>> faces;
};

// OBJ subset: `v x y z` and `f i j k ...` records with 1-based indices
// (`i/t/n` forms accepted, only the vertex index is used). Other records are
// ignored.
Mesh parse_obj(std::istream& in);

// Keypoint map {name: [x, y, z]} or {name: {"vertex": i}} (1-based vertex).
std::vector<Keypoint> parse_keypoints(const nlohmann::json& j, const std::vector<Vec3>& vertices);

// Sidecar next to a mesh: foo.obj -> foo.keypoints.json
std::filesystem::path keypoint_sidecar(const std::filesystem::path& mesh_path);

// Loads mesh and sidecar keypoints.
ReferenceObject load_reference(const std::filesystem::path& mesh_path);
// Loads the mesh and uses the given keypoint document instead of a sidecar.
ReferenceObject load_reference(const std::filesystem::path& mesh_path, const nlohmann::json& keypoints);

}  // namespace geodiff::scene
