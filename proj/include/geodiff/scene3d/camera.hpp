#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "geodiff/featurefield/latent_field.hpp"
#include "geodiff/raster.hpp"
#include "geodiff/scene3d/reference_object.hpp"

namespace geodiff::scene {

using ff::Point2;

// Camera on a sphere of radius r about the world origin, looking at the origin.
// Right-handed world with +z up; image origin top-left, y down; pinhole, no
// distortion.
struct CameraPose {
  double r = 4.0;          // meters
  double theta_deg = 0.0;  // elevation, [-90, 90]
  double phi_deg = 0.0;    // azimuth, [0, 360)
  double focal_px = 512.0;
  double cx = 256.0;
  double cy = 256.0;
  int width = 512;
  int height = 512;

  // Throws InputError naming the offending field.
  void validate() const;
  static CameraPose from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
};

class Camera {
 public:
  explicit Camera(const CameraPose& pose);

  const CameraPose& pose() const { return pose_; }
  const Eigen::Vector3d& center() const { return center_; }
  // Rows: camera right, down, forward (world -> camera rotation).
  const Eigen::Matrix3d& rotation() const { return rotation_; }
  // Composed K [R | -R C]; pixel = (m X)_{xy} / (m X)_z.
  Eigen::Matrix<double, 3, 4> matrix() const;

  // Depth along the optical axis (camera z) of a world point.
  double depth(const Vec3& world) const;
  // Perspective projection; throws BoundsError if the point is at or behind
  // the camera plane. No bounds check against the image.
  Point2 project(const Vec3& world) const;
  // World point on the ray through `pixel` at the given optical-axis depth.
  Vec3 unproject(const Point2& pixel, double depth) const;
  bool in_image(const Point2& pixel) const;

 private:
  CameraPose pose_;
  Eigen::Vector3d center_;
  Eigen::Matrix3d rotation_;
};

struct ProjectedPair {
  Point2 source;  // pixels
  Point2 target;
  std::string name;
};

// One pair per keypoint (P_ref -> G). Throws BoundsError for points at or
// behind the camera plane or projecting outside [0, w) x [0, h).
std::vector<ProjectedPair> project_pairs(const ReferenceObject& obj, const std::vector<Vec3>& targets,
                                         const CameraPose& pose);

// Unique mesh edges (i < j) in first-seen face order.
std::vector<std::pair<int, int>> mesh_edges(const ReferenceObject& obj);

// Line raster (255 on 0) of the projected mesh edges. Edges with an endpoint
// at or behind the camera plane are skipped; throws BoundsError when every
// vertex is behind the camera.
GrayImage render_wireframe(const ReferenceObject& obj, const CameraPose& pose);

}  // namespace geodiff::scene
