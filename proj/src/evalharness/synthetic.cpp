#include "geodiff/evalharness/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "geodiff/error.hpp"

namespace geodiff::eval {
namespace {

using nlohmann::json;

constexpr int kPlacementAttempts = 10000;

json points_json(const std::vector<Point2>& pts) {
  json a = json::array();
  for (const auto& p : pts) a.push_back({p.x, p.y});
  return a;
}

std::vector<Point2> points_from(const json& a, const char* key) {
  std::vector<Point2> out;
  if (!a.is_array()) throw InputError(std::string("synthetic spec '") + key + "' must be an array of [x, y]");
  for (const auto& p : a) {
    if (!p.is_array() || p.size() != 2) throw InputError(std::string("synthetic spec '") + key + "' entries must be [x, y]");
    out.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return out;
}

bool inside_margin(Point2 p, const SyntheticSpec& s) {
  return p.x >= s.margin && p.y >= s.margin && p.x <= s.width - 1 - s.margin && p.y <= s.height - 1 - s.margin;
}

ff::LatentField smoothed_noise(const SyntheticSpec& spec, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ff::LatentField noise(spec.height, spec.width, spec.channels);
  for (double& v : noise.values()) v = normal(rng);
  // two 3x3 box passes with replicate borders
  for (int pass = 0; pass < 2; ++pass) {
    ff::LatentField out(spec.height, spec.width, spec.channels);
    for (int y = 0; y < spec.height; ++y)
      for (int x = 0; x < spec.width; ++x)
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int sy = std::clamp(y + dy, 0, spec.height - 1), sx = std::clamp(x + dx, 0, spec.width - 1);
            for (int c = 0; c < spec.channels; ++c) out.at(y, x, c) += noise.at(sy, sx, c) / 9.0;
          }
    noise = std::move(out);
  }
  for (double& v : noise.values()) v *= spec.texture_amplitude * 3.0;  // box passes shrink std by ~1/3
  return noise;
}

void add_blob(ff::LatentField& f, Point2 center, double sigma, const std::vector<double>& amplitude) {
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (int y = 0; y < f.height(); ++y)
    for (int x = 0; x < f.width(); ++x) {
      const double dx = x - center.x, dy = y - center.y;
      const double w = std::exp(-(dx * dx + dy * dy) * inv);
      for (int c = 0; c < f.channels(); ++c) f.at(y, x, c) += amplitude[c] * w;
    }
}

}  // namespace

nlohmann::json SyntheticSpec::to_json() const {
  json j = {{"height", height},   {"width", width},         {"channels", channels},
            {"blob_count", blob_count}, {"sigma", sigma}, {"drags", points_json(drags)},
            {"texture_amplitude", texture_amplitude}, {"margin", margin}, {"image_scale", image_scale},
            {"seed", seed}};
  if (!centers.empty()) j["centers"] = points_json(centers);
  return j;
}

SyntheticSpec SyntheticSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("synthetic spec must be an object");
  static const char* known[] = {"height", "width", "channels", "blob_count", "sigma", "drags", "centers",
                                "texture_amplitude", "margin", "image_scale", "seed"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known))
      throw InputError("unknown synthetic spec key '" + key + "'");
  }
  SyntheticSpec s;
  try {
    s.height = j.value("height", s.height);
    s.width = j.value("width", s.width);
    s.channels = j.value("channels", s.channels);
    s.blob_count = j.value("blob_count", s.blob_count);
    s.sigma = j.value("sigma", s.sigma);
    if (j.contains("drags")) s.drags = points_from(j["drags"], "drags");
    if (j.contains("centers")) s.centers = points_from(j["centers"], "centers");
    s.texture_amplitude = j.value("texture_amplitude", s.texture_amplitude);
    s.margin = j.value("margin", s.margin);
    s.image_scale = j.value("image_scale", s.image_scale);
    s.seed = j.value("seed", s.seed);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("synthetic spec: ") + e.what());
  }
  return s;
}

SyntheticCase generate_synthetic_case(const SyntheticSpec& spec) {
  if (spec.blob_count < 1) throw InputError("synthetic spec: blob_count must be >= 1");
  if (!(spec.sigma > 0.0)) throw InputError("synthetic spec: sigma must be > 0");
  if (spec.image_scale < 1) throw InputError("synthetic spec: image_scale must be >= 1");
  if (spec.drags.size() > static_cast<std::size_t>(spec.blob_count)) throw InputError("synthetic spec: more drags than blobs");
  if (!spec.centers.empty() && spec.centers.size() != static_cast<std::size_t>(spec.blob_count))
    throw InputError("synthetic spec: centers must list every blob");

  std::mt19937_64 rng(spec.seed);
  SyntheticCase out;
  out.background = smoothed_noise(spec, rng);

  const double separation = 6.0 * spec.sigma;
  std::uniform_int_distribution<int> pick_x(spec.margin, spec.width - 1 - spec.margin);
  std::uniform_int_distribution<int> pick_y(spec.margin, spec.height - 1 - spec.margin);
  std::uniform_real_distribution<double> magnitude(0.6, 1.4);
  std::bernoulli_distribution flip(0.5);

  for (int b = 0; b < spec.blob_count; ++b) {
    const Point2 drag = b < static_cast<int>(spec.drags.size()) ? spec.drags[b] : Point2{0, 0};
    auto acceptable = [&](Point2 c) {
      const Point2 t = c + drag;
      if (!inside_margin(c, spec) || !inside_margin(t, spec)) return false;
      for (std::size_t o = 0; o < out.centers.size(); ++o)
        for (const Point2 a : {out.centers[o], out.targets[o]})
          if (ff::distance(a, c) < separation || ff::distance(a, t) < separation) return false;
      return true;
    };
    Point2 center;
    bool placed = false;
    if (!spec.centers.empty()) {
      center = spec.centers[b];
      placed = acceptable(center);
    } else {
      for (int attempt = 0; attempt < kPlacementAttempts && !placed; ++attempt) {
        center = {double(pick_x(rng)), double(pick_y(rng))};
        placed = acceptable(center);
      }
    }
    if (!placed) {
      throw InputError("synthetic spec: blob " + std::to_string(b) +
                       " cannot satisfy the border margin and separation constraints");
    }
    out.centers.push_back(center);
    out.targets.push_back(center + drag);
    std::vector<double> amp(spec.channels);
    for (double& a : amp) a = magnitude(rng) * (flip(rng) ? 1.0 : -1.0);
    out.amplitudes.push_back(std::move(amp));
  }

  out.field = out.background;
  out.ground_truth = out.background;
  for (int b = 0; b < spec.blob_count; ++b) {
    add_blob(out.field, out.centers[b], spec.sigma, out.amplitudes[b]);
    add_blob(out.ground_truth, out.targets[b], spec.sigma, out.amplitudes[b]);
  }

  DragInstruction& ins = out.instruction;
  ins.latent_width = spec.width;
  ins.latent_height = spec.height;
  ins.image_width = spec.width * spec.image_scale;
  ins.image_height = spec.height * spec.image_scale;
  const double s = spec.image_scale;
  for (int b = 0; b < spec.blob_count; ++b)
    ins.pairs.push_back({s * out.centers[b], s * out.targets[b], "blob" + std::to_string(b)});
  ins.tags = {{"generator", "synthetic-blobs"}, {"seed", spec.seed}};
  ins.validate();
  return out;
}

std::vector<SuiteCase> blob_suite(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> length(10.0, 25.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::vector<SuiteCase> suite;
  for (int i = 0; i < count; ++i) {
    SyntheticSpec spec;
    spec.seed = rng();
    // integral drag vectors whose length stays within [10, 25]
    Point2 drag;
    do {
      const double len = length(rng), a = angle(rng);
      drag = {std::round(len * std::cos(a)), std::round(len * std::sin(a))};
    } while (ff::norm(drag) < 10.0 || ff::norm(drag) > 25.0);
    spec.drags = {drag};
    char id[32];
    std::snprintf(id, sizeof id, "blob-%02d", i);
    suite.push_back({id, spec});
  }
  return suite;
}

}  // namespace geodiff::eval
