#include "geodiff/evalharness/bench.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <set>
#include <thread>

#include "geodiff/error.hpp"
#include "geodiff/evalharness/metrics.hpp"
#include "geodiff/featurefield/latent_io.hpp"

namespace geodiff::eval {
namespace {

constexpr Variant kAllVariants[] = {Variant::full, Variant::no_final_copy_paste, Variant::no_reentry,
                                    Variant::no_fixation};

// Rounded for reporting so the aggregate check is immune to summation order.
double report_value(double v) { return std::round(v * 1e9) / 1e9; }

std::vector<CaseRow> run_case(const SuiteCase& c, const drag::DragConfig& cfg, const std::vector<Variant>& variants) {
  std::vector<CaseRow> rows;
  std::optional<SyntheticCase> generated;
  std::string gen_error;
  try {
    generated = generate_synthetic_case(c.spec);
  } catch (const std::exception& e) {
    gen_error = e.what();
  }
  for (Variant v : variants) {
    CaseRow row;
    row.case_id = c.id;
    row.variant = v;
    const drag::DragConfig vcfg = apply_variant(cfg, v);
    row.config_hash = vcfg.hash();
    if (!generated) {
      row.ok = false;
      row.error = gen_error;
      rows.push_back(row);
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    const DragOutcome outcome = run_instruction(generated->field, generated->instruction, vcfg);
    row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    row.md_before = outcome.md_before;
    row.md_after = outcome.md_after;
    row.md_pre_denoise = outcome.md_pre_denoise;
    row.md_after_512 = md_at_512(outcome.md_after, generated->instruction.image_width);
    row.fixation_events = outcome.result.fixation_events;
    row.latent_digest = drag::fnv1a_hex(ff::encode_latent(outcome.result.latent));
    row.ok = outcome.result.ok;
    row.error = outcome.result.error;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

DragOutcome run_instruction(const ff::LatentField& latent, const DragInstruction& instruction,
                            const drag::DragConfig& cfg) {
  return run_instruction(latent, instruction, cfg, cfg.make_denoiser());
}

DragOutcome run_instruction(const ff::LatentField& latent, const DragInstruction& instruction,
                            const drag::DragConfig& cfg, const drag::Denoiser& denoiser) {
  instruction.validate();
  if (latent.width() != instruction.latent_width || latent.height() != instruction.latent_height) {
    throw InputError("instruction latent size " + std::to_string(instruction.latent_width) + "x" +
                     std::to_string(instruction.latent_height) + " does not match the latent " +
                     std::to_string(latent.width()) + "x" + std::to_string(latent.height()));
  }
  const auto sources = instruction.latent_sources();
  const auto targets = instruction.latent_targets();
  const double scale = instruction.scale();

  DragOutcome out;
  out.md_before = mean_distance(sources, targets, scale);
  out.result = drag::run_drag(latent, sources, targets, instruction.latent_mask(), cfg.make_extractor(),
                              denoiser, cfg);
  if (out.result.ok) {
    out.md_after = mean_distance(out.result.final_points, targets, scale);
    out.md_pre_denoise = mean_distance(out.result.pre_denoise_points, targets, scale);
  } else {
    out.md_after = out.md_before;
    out.md_pre_denoise = out.md_before;
  }
  return out;
}

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::full:
      return "full";
    case Variant::no_final_copy_paste:
      return "no_final_copy_paste";
    case Variant::no_reentry:
      return "no_reentry";
    case Variant::no_fixation:
      return "no_fixation";
  }
  return "?";
}

Variant parse_variant(const std::string& name) {
  for (Variant v : kAllVariants)
    if (name == variant_name(v)) return v;
  throw InputError("unknown variant '" + name + "' (expected full, no_final_copy_paste, no_reentry, no_fixation)");
}

drag::DragConfig apply_variant(drag::DragConfig cfg, Variant v) {
  switch (v) {
    case Variant::full:
      break;
    case Variant::no_final_copy_paste:
      cfg.final_copy_paste = false;
      break;
    case Variant::no_reentry:
      cfg.reentry = false;
      break;
    case Variant::no_fixation:
      cfg.fixation = false;
      break;
  }
  return cfg;
}

std::vector<VariantAggregate> BenchReport::recompute_aggregates() const {
  std::vector<VariantAggregate> out;
  for (Variant v : kAllVariants) {
    std::vector<double> md, time;
    for (const auto* row : rows_for(v)) {
      md.push_back(row->md_after);
      time.push_back(row->wall_time_s);
    }
    if (md.empty()) continue;
    out.push_back({v, static_cast<int>(md.size()), report_value(mean(md)), report_value(median(md)),
                   report_value(mean(time))});
  }
  return out;
}

bool BenchReport::aggregates_consistent() const {
  const auto fresh = recompute_aggregates();
  if (fresh.size() != aggregates.size()) return false;
  for (std::size_t i = 0; i < fresh.size(); ++i) {
    const auto& a = fresh[i];
    const auto& b = aggregates[i];
    if (a.variant != b.variant || a.cases != b.cases || a.mean_md != b.mean_md || a.median_md != b.median_md ||
        a.mean_time_s != b.mean_time_s)
      return false;
  }
  return true;
}

const VariantAggregate* BenchReport::aggregate(Variant v) const {
  for (const auto& a : aggregates)
    if (a.variant == v) return &a;
  return nullptr;
}

std::vector<const CaseRow*> BenchReport::rows_for(Variant v) const {
  std::vector<const CaseRow*> out;
  for (const auto& r : rows)
    if (r.variant == v) out.push_back(&r);
  return out;
}

nlohmann::ordered_json BenchReport::to_json(bool include_wall_time) const {
  nlohmann::ordered_json j;
  j["cases"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json row;
    row["case_id"] = r.case_id;
    row["variant"] = variant_name(r.variant);
    row["md_before"] = r.md_before;
    row["md_after"] = r.md_after;
    row["md_pre_denoise"] = r.md_pre_denoise;
    row["md_after_512"] = r.md_after_512;
    if (include_wall_time) row["wall_time_s"] = r.wall_time_s;
    row["fixation_events"] = r.fixation_events;
    row["config_hash"] = r.config_hash;
    row["latent_digest"] = r.latent_digest;
    row["ok"] = r.ok;
    if (!r.ok) row["error"] = r.error;
    j["cases"].push_back(row);
  }
  j["aggregate"] = nlohmann::ordered_json::array();
  for (const auto& a : aggregates) {
    nlohmann::ordered_json agg;
    agg["variant"] = variant_name(a.variant);
    agg["cases"] = a.cases;
    agg["mean_md"] = a.mean_md;
    agg["median_md"] = a.median_md;
    if (include_wall_time) agg["mean_time_s"] = a.mean_time_s;
    j["aggregate"].push_back(agg);
  }
  return j;
}

BenchReport run_benchmark(const std::vector<SuiteCase>& suite, const drag::DragConfig& cfg,
                          std::vector<Variant> variants, int workers) {
  if (suite.empty()) throw InputError("benchmark suite is empty");
  cfg.validate();
  if (variants.empty()) variants = {Variant::full};
  std::set<std::string> ids;
  for (const auto& c : suite)
    if (!ids.insert(c.id).second) throw InputError("duplicate case id '" + c.id + "'");

  std::vector<std::vector<CaseRow>> per_case(suite.size());
  const int n_workers = std::max(1, std::min<int>(workers, static_cast<int>(suite.size())));
  if (n_workers == 1) {
    for (std::size_t i = 0; i < suite.size(); ++i) per_case[i] = run_case(suite[i], cfg, variants);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (int w = 0; w < n_workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < suite.size(); i = next++) per_case[i] = run_case(suite[i], cfg, variants);
      });
    }
  }

  BenchReport report;
  for (auto& rows : per_case)
    for (auto& r : rows) report.rows.push_back(std::move(r));
  report.aggregates = report.recompute_aggregates();
  if (!report.aggregates_consistent()) throw std::logic_error("benchmark aggregates do not match their rows");
  return report;
}

SuiteDocument parse_suite(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("suite spec must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (key != "cases" && key != "generate" && key != "variants" && key != "config" && key != "workers")
      throw InputError("unknown suite key '" + key + "'");
  }
  SuiteDocument doc;
  try {
    if (j.contains("generate")) {
      const auto& g = j["generate"];
      doc.cases = blob_suite(g.value("count", 20), g.value("seed", std::uint64_t{0}));
    }
    if (j.contains("cases")) {
      for (const auto& c : j["cases"]) {
        if (!c.contains("id") || !c["id"].is_string()) throw InputError("suite case needs a string 'id'");
        doc.cases.push_back({c["id"].get<std::string>(), SyntheticSpec::from_json(c.value("spec", nlohmann::json::object()))});
      }
    }
    if (j.contains("variants"))
      for (const auto& v : j["variants"]) doc.variants.push_back(parse_variant(v.get<std::string>()));
    if (j.contains("config")) doc.config = j["config"];
    doc.workers = j.value("workers", 1);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("suite spec: ") + e.what());
  }
  if (doc.cases.empty()) throw InputError("suite spec has no cases");
  std::set<std::string> ids;
  for (const auto& c : doc.cases)
    if (!ids.insert(c.id).second) throw InputError("duplicate case id '" + c.id + "'");
  return doc;
}

}  // namespace geodiff::eval
