#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "geodiff/featurefield/extractor.hpp"
#include "geodiff/geodrag/denoiser.hpp"

namespace geodiff::drag {

struct DragConfig {
  int r1 = 4;              // motion-supervision patch radius
  int r2 = 12;             // point-tracking search radius
  int r_grad = 3;          // gradient-mask radius around fixated points
  int r_cp = 2;            // copy-paste patch radius
  double beta_step = 2.0;  // handle step along the drag direction
  double eta = 0.2;        // learning rate
  int J = 1;               // gradient steps per drag iteration
  int B = 10;              // drag iterations per timestep
  int T_drag = 6;          // timesteps with a drag phase
  int N_post = 5;          // copy-paste-only timesteps after dragging
  double lambda = 0.1;     // weight of the non-editable-region term
  double l = 1.0;          // fixation entry threshold
  double u = 3.0;          // fixation exit threshold
  double alpha = 1.01;     // copy amplification
  double beta_blur = 0.8;  // retention of the vacated source region
  std::uint64_t seed = 0;

  // ablation switches
  bool fixation = true;          // points may enter the fixation set
  bool reentry = true;           // fixated points leave the set at e >= u
  bool final_copy_paste = true;  // run the N_post pinning stage

  std::string extractor_kind = "identity";  // identity | box3 | conv (file only)
  nlohmann::json extractor_layers;          // conv layers when extractor_kind == conv
  std::string denoiser_kind = "identity";   // identity | gaussian | external
  double denoiser_sigma = 1.0;
  std::string denoiser_command;

  // Throws InputError naming the offending field.
  void validate() const;

  ff::FeatureExtractor make_extractor() const;
  Denoiser make_denoiser() const;

  nlohmann::json to_json() const;
  // Starts from defaults; unknown keys are rejected.
  static DragConfig from_json(const nlohmann::json& j);

  // Dotted-key override, e.g. ("denoiser.kind", "gaussian") or ("r1", "3").
  void set(const std::string& key, const std::string& value);

  // Stable FNV-1a digest of to_json(), hex encoded.
  std::string hash() const;
};

struct ConfigKey {
  std::string key;
  std::string default_value;
  std::string help;
};

// Every settable key with its default, in declaration order.
const std::vector<ConfigKey>& config_keys();

std::string fnv1a_hex(const std::string& bytes);

}  // namespace geodiff::drag
