#include "geodiff/scene3d/scene_spec.hpp"

#include <fstream>
#include <set>

#include "geodiff/error.hpp"

namespace geodiff::scene {

Scene parse_scene(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw InputError("scene must be a JSON object");
  static const std::set<std::string> known = {"mesh_path", "keypoints", "camera",      "parameters",
                                              "rules",     "gamma",     "latent_scale"};
  for (const auto& [key, _] : j.items())
    if (!known.contains(key)) throw InputError("scene." + key + " is not a known field");
  if (!j.contains("mesh_path") || !j["mesh_path"].is_string()) throw InputError("scene.mesh_path must be a string");
  if (!j.contains("camera")) throw InputError("scene.camera is required");

  Scene s;
  std::filesystem::path mesh = j["mesh_path"].get<std::string>();
  if (mesh.is_relative()) mesh = base_dir / mesh;
  if (!std::filesystem::exists(mesh)) throw InputError("scene.mesh_path: '" + mesh.string() + "' does not exist");
  s.object = j.contains("keypoints") ? load_reference(mesh, j["keypoints"]) : load_reference(mesh);
  s.camera = CameraPose::from_json(j["camera"]);
  const nlohmann::json none;
  s.rules = TranslationRuleSet::from_json(j.contains("parameters") ? j["parameters"] : none,
                                          j.contains("rules") ? j["rules"] : none, s.object.keypoints);
  s.gamma = s.rules.reference();
  for (const auto& [name, value] : parse_parameters(j.contains("gamma") ? j["gamma"] : none, "scene.gamma")) {
    if (!s.gamma.contains(name)) throw InputError("scene.gamma." + name + " is not a declared parameter");
    s.gamma[name] = value;
  }
  if (j.contains("latent_scale")) {
    if (!j["latent_scale"].is_number_integer() || j["latent_scale"].get<int>() < 1) {
      throw InputError("scene.latent_scale must be a positive integer");
    }
    s.latent_scale = j["latent_scale"].get<int>();
  }
  if (s.camera.width % s.latent_scale != 0 || s.camera.height % s.latent_scale != 0) {
    throw InputError("scene.latent_scale must divide camera.width and camera.height");
  }
  return s;
}

Scene load_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open scene '" + path.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return parse_scene(j, path.parent_path());
}

SceneProjection project_scene(const Scene& scene) {
  SceneProjection out;
  out.targets = translate_points(scene.object.keypoints, scene.rules, scene.gamma);
  out.pairs = project_pairs(scene.object, out.targets, scene.camera);
  auto& ins = out.instruction;
  ins.image_width = scene.camera.width;
  ins.image_height = scene.camera.height;
  ins.latent_width = scene.camera.width / scene.latent_scale;
  ins.latent_height = scene.camera.height / scene.latent_scale;
  for (const auto& p : out.pairs) ins.pairs.push_back({p.source, p.target, p.name});
  nlohmann::json gamma = nlohmann::json::object();
  for (const auto& [k, v] : scene.gamma) gamma[k] = v;
  ins.tags = {{"source", "scene"}, {"gamma", gamma}};
  ins.validate();
  return out;
}

}  // namespace geodiff::scene
