#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "geodiff/featurefield/latent_field.hpp"

namespace geodiff::drag {

// Latent transition applied between drag phases (stand-in for one diffusion
// denoising step).
//
//   identity  - returns its input
//   gaussian  - separable Gaussian blur per channel, kernel radius ceil(3 sigma),
//               replicate borders
//   external  - writes the latent container to <work_dir>/denoise_in.lat, runs
//               `command` with {in} and {out} replaced by file paths, reads
//               <work_dir>/denoise_out.lat back
//
// identity and gaussian are linear and expose their adjoint; the external hook
// is treated as identity when a gradient has to flow through it.
class Denoiser {
 public:
  enum class Kind { identity, gaussian, external };

  Denoiser() = default;
  static Denoiser identity() { return {}; }
  static Denoiser gaussian(double sigma);
  static Denoiser external(std::string command, std::filesystem::path work_dir);

  Kind kind() const { return kind_; }
  double sigma() const { return sigma_; }
  const std::string& command() const { return command_; }
  bool is_linear() const { return kind_ != Kind::external; }

  ff::LatentField apply(const ff::LatentField& z) const;
  // Transpose of apply() for linear kinds; identity for the external hook.
  ff::LatentField adjoint(const ff::LatentField& grad) const;

  nlohmann::json to_json() const;
  static Denoiser from_json(const nlohmann::json& j);

  void set_work_dir(std::filesystem::path dir) { work_dir_ = std::move(dir); }

 private:
  Kind kind_ = Kind::identity;
  double sigma_ = 0.0;
  std::string command_;
  std::filesystem::path work_dir_;
};

}  // namespace geodiff::drag
