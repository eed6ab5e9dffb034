#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "geodiff/evalharness/instruction.hpp"
#include "geodiff/evalharness/synthetic.hpp"
#include "geodiff/geodrag/config.hpp"
#include "geodiff/geodrag/drag.hpp"

namespace geodiff::eval {

// Result of running one instruction on one latent.
struct DragOutcome {
  drag::DragResult result;
  double md_before = 0.0;       // image pixels
  double md_after = 0.0;        // image pixels; equals md_before when the run failed
  double md_pre_denoise = 0.0;  // image pixels, located before the last denoiser step
};

// Scales the instruction to latent cells, runs GeoDrag, measures MD in image pixels.
DragOutcome run_instruction(const ff::LatentField& latent, const DragInstruction& instruction,
                            const drag::DragConfig& cfg);
// Same, with a caller-supplied denoiser (e.g. an external one with its own work dir).
DragOutcome run_instruction(const ff::LatentField& latent, const DragInstruction& instruction,
                            const drag::DragConfig& cfg, const drag::Denoiser& denoiser);

enum class Variant { full, no_final_copy_paste, no_reentry, no_fixation };

const char* variant_name(Variant v);
Variant parse_variant(const std::string& name);
drag::DragConfig apply_variant(drag::DragConfig cfg, Variant v);

struct CaseRow {
  std::string case_id;
  Variant variant = Variant::full;
  double md_before = 0.0;
  double md_after = 0.0;
  double md_pre_denoise = 0.0;
  double md_after_512 = 0.0;
  double wall_time_s = 0.0;
  int fixation_events = 0;
  std::string config_hash;
  std::string latent_digest;  // FNV-1a of the final latent container
  bool ok = true;
  std::string error;
};

struct VariantAggregate {
  Variant variant = Variant::full;
  int cases = 0;
  double mean_md = 0.0;
  double median_md = 0.0;
  double mean_time_s = 0.0;
};

struct BenchReport {
  std::vector<CaseRow> rows;  // grouped by case, variants in request order
  std::vector<VariantAggregate> aggregates;

  // Aggregates recomputed from rows.
  std::vector<VariantAggregate> recompute_aggregates() const;
  bool aggregates_consistent() const;
  const VariantAggregate* aggregate(Variant v) const;
  std::vector<const CaseRow*> rows_for(Variant v) const;

  nlohmann::ordered_json to_json(bool include_wall_time = true) const;
};

// Runs every case under every variant (full only when variants is empty).
// Case failures are recorded in their rows; workers > 1 runs cases in parallel.
BenchReport run_benchmark(const std::vector<SuiteCase>& suite, const drag::DragConfig& cfg,
                          std::vector<Variant> variants, int workers = 1);

// Suite document:
//   {"cases":[{"id":..., "spec":{synthetic spec}}, ...]  or  "generate":{"count":20,"seed":7},
//    "variants":["full", ...], "config":{...}, "workers":1}
struct SuiteDocument {
  std::vector<SuiteCase> cases;
  std::vector<Variant> variants;
  nlohmann::json config = nlohmann::json::object();
  int workers = 1;
};
SuiteDocument parse_suite(const nlohmann::json& j);

}  // namespace geodiff::eval
