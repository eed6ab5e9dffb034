#include "geodiff/geodrag/denoiser.hpp"

#include <cmath>
#include <cstdlib>
#include <vector>

#include "geodiff/error.hpp"
#include "geodiff/featurefield/latent_io.hpp"

namespace geodiff::drag {
namespace {

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

int clamp_index(int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

// One 1-D pass along rows (axis 0) or columns (axis 1). transpose selects the adjoint.
ff::LatentField blur_pass(const ff::LatentField& in, const std::vector<double>& k, int axis, bool transpose) {
  const int radius = static_cast<int>(k.size() / 2);
  ff::LatentField out(in.height(), in.width(), in.channels());
  for (int y = 0; y < in.height(); ++y)
    for (int x = 0; x < in.width(); ++x)
      for (int t = -radius; t <= radius; ++t) {
        const int sy = axis == 0 ? clamp_index(y + t, in.height()) : y;
        const int sx = axis == 1 ? clamp_index(x + t, in.width()) : x;
        const double w = k[t + radius];
        for (int c = 0; c < in.channels(); ++c) {
          if (transpose)
            out.at(sy, sx, c) += w * in.at(y, x, c);
          else
            out.at(y, x, c) += w * in.at(sy, sx, c);
        }
      }
  return out;
}

std::string substitute(std::string s, const std::string& key, const std::string& value) {
  for (std::size_t pos = s.find(key); pos != std::string::npos; pos = s.find(key, pos + value.size()))
    s.replace(pos, key.size(), value);
  return s;
}

}  // namespace

Denoiser Denoiser::gaussian(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InputError("gaussian denoiser needs sigma > 0");
  Denoiser d;
  d.kind_ = Kind::gaussian;
  d.sigma_ = sigma;
  return d;
}

Denoiser Denoiser::external(std::string command, std::filesystem::path work_dir) {
  if (command.empty()) throw InputError("external denoiser needs a command");
  Denoiser d;
  d.kind_ = Kind::external;
  d.command_ = std::move(command);
  d.work_dir_ = std::move(work_dir);
  return d;
}

ff::LatentField Denoiser::apply(const ff::LatentField& z) const {
  switch (kind_) {
    case Kind::identity:
      return z;
    case Kind::gaussian: {
      const auto k = gaussian_kernel(sigma_);
      return blur_pass(blur_pass(z, k, 0, false), k, 1, false);
    }
    case Kind::external: {
      const auto dir = work_dir_.empty() ? std::filesystem::temp_directory_path() : work_dir_;
      std::filesystem::create_directories(dir);
      const auto in_path = dir / "denoise_in.lat";
      const auto out_path = dir / "denoise_out.lat";
      std::filesystem::remove(out_path);
      ff::save_latent(in_path, z);
      const std::string cmd = substitute(substitute(command_, "{in}", in_path.string()), "{out}", out_path.string());
      if (const int rc = std::system(cmd.c_str()); rc != 0) {
        throw InputError("external denoiser command failed (status " + std::to_string(rc) + "): " + cmd);
      }
      ff::LatentField result = ff::load_latent(out_path);
      if (!result.same_shape(z)) throw InputError("external denoiser changed the latent shape");
      return result;
    }
  }
  return z;
}

ff::LatentField Denoiser::adjoint(const ff::LatentField& grad) const {
  if (kind_ != Kind::gaussian) return grad;
  const auto k = gaussian_kernel(sigma_);
  return blur_pass(blur_pass(grad, k, 1, true), k, 0, true);
}

nlohmann::json Denoiser::to_json() const {
  switch (kind_) {
    case Kind::identity:
      return {{"kind", "identity"}};
    case Kind::gaussian:
      return {{"kind", "gaussian"}, {"sigma", sigma_}};
    case Kind::external:
      return {{"kind", "external"}, {"command", command_}};
  }
  return {};
}

Denoiser Denoiser::from_json(const nlohmann::json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "identity") return identity();
    if (kind == "gaussian") return gaussian(j.at("sigma").get<double>());
    if (kind == "external") return external(j.at("command").get<std::string>(), {});
    throw InputError("unknown denoiser kind '" + kind + "' (expected identity, gaussian or external)");
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("denoiser: ") + e.what());
  }
}

}  // namespace geodiff::drag
