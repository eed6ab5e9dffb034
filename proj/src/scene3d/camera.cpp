#include "geodiff/scene3d/camera.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include <Eigen/Geometry>

#include "geodiff/error.hpp"

namespace geodiff::scene {
namespace {

double radians(double deg) { return deg * std::numbers::pi / 180.0; }

std::string format_point(const Vec3& p) {
  return "(" + std::to_string(p.x()) + ", " + std::to_string(p.y()) + ", " + std::to_string(p.z()) + ")";
}

// Liang-Barsky clip of segment a-b against [lo, hi] on both axes.
bool clip_segment(Point2& a, Point2& b, double xmax, double ymax) {
  double t0 = 0.0, t1 = 1.0;
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {a.x, xmax - a.x, a.y, ymax - a.y};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;
      continue;
    }
    const double t = q[i] / p[i];
    if (p[i] < 0.0) {
      if (t > t1) return false;
      t0 = std::max(t0, t);
    } else {
      if (t < t0) return false;
      t1 = std::min(t1, t);
    }
  }
  const Point2 a0 = a;
  a = {a0.x + t0 * dx, a0.y + t0 * dy};
  b = {a0.x + t1 * dx, a0.y + t1 * dy};
  return true;
}

void draw_line(GrayImage& img, int x0, int y0, int x1, int y1) {
  const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
  const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  for (;;) {
    if (img.contains(x0, y0)) img.at(x0, y0) = 255;
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

}  // namespace

void CameraPose::validate() const {
  auto bad = [](const std::string& field, const std::string& why) { throw InputError("camera." + field + " " + why); };
  if (!(r > 0.0) || !std::isfinite(r)) bad("r", "must be > 0");
  if (!(theta_deg >= -90.0 && theta_deg <= 90.0)) bad("theta_deg", "must be in [-90, 90]");
  if (!(phi_deg >= 0.0 && phi_deg < 360.0)) bad("phi_deg", "must be in [0, 360)");
  if (!(focal_px > 0.0) || !std::isfinite(focal_px)) bad("focal_px", "must be > 0");
  if (width < 16) bad("width", "must be >= 16");
  if (height < 16) bad("height", "must be >= 16");
  if (!(cx >= 0.0 && cx < width)) bad("cx", "must lie inside the image");
  if (!(cy >= 0.0 && cy < height)) bad("cy", "must lie inside the image");
}

CameraPose CameraPose::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("camera must be an object");
  static const std::set<std::string> known = {"r", "theta_deg", "phi_deg", "focal_px", "cx", "cy", "width", "height"};
  for (const auto& [key, _] : j.items())
    if (!known.contains(key)) throw InputError("camera." + key + " is not a known field");
  CameraPose p;
  auto num = [&](const char* key, double& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_number()) throw InputError(std::string("camera.") + key + " must be a number");
    out = j[key].get<double>();
  };
  auto integer = [&](const char* key, int& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_number_integer()) throw InputError(std::string("camera.") + key + " must be an integer");
    out = j[key].get<int>();
  };
  num("r", p.r);
  num("theta_deg", p.theta_deg);
  num("phi_deg", p.phi_deg);
  num("focal_px", p.focal_px);
  integer("width", p.width);
  integer("height", p.height);
  p.cx = p.width / 2.0;
  p.cy = p.height / 2.0;
  num("cx", p.cx);
  num("cy", p.cy);
  p.validate();
  return p;
}

nlohmann::ordered_json CameraPose::to_json() const {
  return {{"r", r},         {"theta_deg", theta_deg}, {"phi_deg", phi_deg}, {"focal_px", focal_px},
          {"cx", cx},       {"cy", cy},               {"width", width},     {"height", height}};
}

Camera::Camera(const CameraPose& pose) : pose_(pose) {
  pose_.validate();
  const double th = radians(pose_.theta_deg), ph = radians(pose_.phi_deg);
  center_ = pose_.r * Eigen::Vector3d(std::cos(th) * std::cos(ph), std::cos(th) * std::sin(ph), std::sin(th));
  const Eigen::Vector3d forward = -center_.normalized();
  const bool pole = std::abs(pose_.theta_deg) == 90.0;
  const Eigen::Vector3d up = pole ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitZ();
  const Eigen::Vector3d right = forward.cross(up).normalized();
  const Eigen::Vector3d cam_up = right.cross(forward);
  rotation_.row(0) = right.transpose();
  rotation_.row(1) = -cam_up.transpose();
  rotation_.row(2) = forward.transpose();
}

Eigen::Matrix<double, 3, 4> Camera::matrix() const {
  Eigen::Matrix3d k = Eigen::Matrix3d::Identity();
  k(0, 0) = pose_.focal_px;
  k(1, 1) = pose_.focal_px;
  k(0, 2) = pose_.cx;
  k(1, 2) = pose_.cy;
  Eigen::Matrix<double, 3, 4> ext;
  ext.leftCols<3>() = rotation_;
  ext.col(3) = -rotation_ * center_;
  return k * ext;
}

double Camera::depth(const Vec3& world) const { return rotation_.row(2).dot(world - center_); }

Point2 Camera::project(const Vec3& world) const {
  const Eigen::Vector3d c = rotation_ * (world - center_);
  if (!(c.z() > 0.0)) throw BoundsError("point " + format_point(world) + " is at or behind the camera plane");
  return {pose_.focal_px * c.x() / c.z() + pose_.cx, pose_.focal_px * c.y() / c.z() + pose_.cy};
}

Vec3 Camera::unproject(const Point2& pixel, double depth) const {
  const Eigen::Vector3d c((pixel.x - pose_.cx) / pose_.focal_px * depth, (pixel.y - pose_.cy) / pose_.focal_px * depth,
                          depth);
  return rotation_.transpose() * c + center_;
}

bool Camera::in_image(const Point2& p) const {
  return p.x >= 0.0 && p.y >= 0.0 && p.x < pose_.width && p.y < pose_.height;
}

std::vector<ProjectedPair> project_pairs(const ReferenceObject& obj, const std::vector<Vec3>& targets,
                                         const CameraPose& pose) {
  if (targets.size() != obj.keypoints.size()) {
    throw InputError("project_pairs: " + std::to_string(targets.size()) + " targets for " +
                     std::to_string(obj.keypoints.size()) + " keypoints");
  }
  const Camera cam(pose);
  std::vector<ProjectedPair> out;
  out.reserve(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const auto& name = obj.keypoints[i].name;
    auto proj = [&](const Vec3& x, const char* role) {
      if (!x.allFinite()) throw InputError("keypoint '" + name + "' " + role + " is not finite");
      Point2 p;
      try {
        p = cam.project(x);
      } catch (const BoundsError& e) {
        throw BoundsError("keypoint '" + name + "' " + role + ": " + e.what());
      }
      if (!cam.in_image(p)) {
        throw BoundsError("keypoint '" + name + "' " + role + " projects to (" + std::to_string(p.x) + ", " +
                          std::to_string(p.y) + "), outside the " + std::to_string(pose.width) + "x" +
                          std::to_string(pose.height) + " image");
      }
      return p;
    };
    out.push_back({proj(obj.keypoints[i].position, "source"), proj(targets[i], "target"), name});
  }
  return out;
}

std::vector<std::pair<int, int>> mesh_edges(const ReferenceObject& obj) {
  std::vector<std::pair<int, int>> edges;
  std::set<std::pair<int, int>> seen;
  for (const auto& face : obj.faces) {
    for (std::size_t k = 0; k < face.size(); ++k) {
      const int a = face[k], b = face[(k + 1) % face.size()];
      const std::pair<int, int> e{std::min(a, b), std::max(a, b)};
      if (e.first != e.second && seen.insert(e).second) edges.push_back(e);
    }
  }
  return edges;
}

GrayImage render_wireframe(const ReferenceObject& obj, const CameraPose& pose) {
  obj.validate();
  const Camera cam(pose);
  std::vector<Point2> pix(obj.vertices.size());
  std::vector<bool> visible(obj.vertices.size(), false);
  bool any = false;
  for (std::size_t i = 0; i < obj.vertices.size(); ++i) {
    if (cam.depth(obj.vertices[i]) > 0.0) {
      pix[i] = cam.project(obj.vertices[i]);
      visible[i] = true;
      any = true;
    }
  }
  if (!any) throw BoundsError("render_wireframe: every vertex is at or behind the camera");

  GrayImage img(pose.width, pose.height, 0);
  for (const auto& [a, b] : mesh_edges(obj)) {
    if (!visible[a] || !visible[b]) continue;
    Point2 pa = pix[a], pb = pix[b];
    if (!clip_segment(pa, pb, pose.width - 1.0, pose.height - 1.0)) continue;
    draw_line(img, static_cast<int>(std::lround(pa.x)), static_cast<int>(std::lround(pa.y)),
              static_cast<int>(std::lround(pb.x)), static_cast<int>(std::lround(pb.y)));
  }
  return img;
}

}  // namespace geodiff::scene
