// Acceptance run: one PASS/FAIL line per headline criterion. Exit status is
// non-zero when any line fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "checks.hpp"
#include "fd_check.hpp"
#include "geodiff/evalharness/bench.hpp"
#include "geodiff/evalharness/metrics.hpp"
#include "geodiff/scene3d/scene_spec.hpp"
#include "scene_checks.hpp"

using namespace geodiff;
using Clock = std::chrono::steady_clock;

namespace {

// Tolerances.
constexpr double kFdRelError = 1e-4;
constexpr double kFdSeconds = 60.0;
constexpr int kFdSeeds = 100;
constexpr int kTrackSeeds = 50;
constexpr int kBlurCells = 10000;
constexpr double kBlurMeanBound = 0.05;
constexpr double kBlurVarLo = 0.9, kBlurVarHi = 1.1;
constexpr double kSuiteMedian = 3.0, kSuiteWorst = 6.0, kSuiteSeconds = 300.0;
constexpr double kWinOrTie = 0.70;
constexpr double kRoundTripPx = 1e-9;
constexpr int kRoundTripPoints = 1000;
constexpr double kBoxcarPx = 1e-6;

int failures = 0;

void report(const char* name, bool pass, const std::string& detail) {
  std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void gradient_check() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  long compared = 0;
  for (int seed = 0; seed < kFdSeeds; ++seed)
    for (bool conv : {false, true}) {
      const fdcheck::Result r = fdcheck::run(seed, conv);
      worst = std::max(worst, r.max_rel_error);
      compared += r.compared;
    }
  const double secs = seconds_since(t0);
  report("gradient", worst <= kFdRelError && secs <= kFdSeconds && compared > 0,
         fmt("max rel error %.3g over %ld entries, %d seeds x {identity, conv}, %.1f s", worst, compared, kFdSeeds,
             secs));
}

void tracking_check() {
  const drag::DragConfig cfg;
  const int r2 = cfg.r2;
  int shifts = 0, wrong = 0;
  for (int seed = 0; seed < kTrackSeeds; ++seed)
    for (int sy = -r2; sy <= r2; ++sy)
      for (int sx = -r2; sx <= r2; ++sx) {
        const ff::Point2 d = checks::track_after_shift(1000 + seed, sx, sy, r2);
        ++shifts;
        if (d.x != sx || d.y != sy) ++wrong;
      }
  const std::vector<checks::TieCase> ties = {
      {{20, 20}, {30, 20}, 2.0}, {{20, 20}, {20, 5}, 2.0},   {{20, 20}, {27, 27}, 2.0}, {{20, 20}, {20, 20}, 2.0},
      {{20, 20}, {21, 20}, 0.5}, {{19.6, 20.4}, {5, 33}, 3.0}, {{20, 20}, {20.5, 21}, 1.0}, {{20, 20}, {14, 26}, 40.0}};
  int tie_wrong = 0;
  for (const auto& tc : ties) {
    const ff::Point2 got = checks::tie_winner(tc, 4), want = checks::tie_expected(tc, 4);
    if (!(got == want)) ++tie_wrong;
  }
  report("tracking", wrong == 0 && tie_wrong == 0,
         fmt("%d/%d shifts with |sx|,|sy| <= %d recovered on %d fields; %d/%zu tie cases correct", shifts - wrong,
             shifts, r2, kTrackSeeds, int(ties.size()) - tie_wrong, ties.size()));
}

void fixation_check() {
  const double l = 1.0, u = 3.0, eps = 1e-9;
  const std::vector<double> grid = {l - eps, l, l + eps, u - eps, u, u + eps};
  int mismatches = 0, cases = 0;
  // Every two-step path over the boundary values, from both starting states.
  for (bool start_fixated : {false, true})
    for (double a : grid)
      for (double b : grid) {
        std::vector<double> es;
        if (start_fixated) es.push_back(0.0);
        es.push_back(a);
        es.push_back(b);
        const std::vector<int> got = checks::fixation_events(es, l, u);
        bool fixated = false;
        for (std::size_t i = 0; i < es.size(); ++i) {
          const bool next = checks::hysteresis_expected(fixated, es[i], l, u);
          const int want = next == fixated ? 0 : (next ? 1 : -1);
          fixated = next;
          if (got[i] != want) ++mismatches;
        }
        ++cases;
      }
  // Long oscillation strictly inside (l, u) after entering: no events at all.
  std::vector<double> inside = {0.5};
  for (int i = 0; i < 200; ++i) inside.push_back(l + (u - l) * (0.01 + 0.98 * ((i * 37) % 101) / 100.0));
  const std::vector<int> ev = checks::fixation_events(inside, l, u);
  const int chatter = static_cast<int>(std::count_if(ev.begin() + 1, ev.end(), [](int e) { return e != 0; }));
  report("fixation", mismatches == 0 && chatter == 0 && ev[0] == 1,
         fmt("%d boundary paths, %d mismatched steps; %d events over 200 steps inside (l, u)", cases, mismatches,
             chatter));
}

void copy_paste_check() {
  int exact = 0;
  const int trials = 200;
  for (int s = 0; s < trials; ++s)
    if (checks::paste_is_exact(s, s % 2 ? 1.01 : 1.0)) ++exact;
  const checks::BlurStats b = checks::blur_statistics((kBlurCells + 24) / 25, 99);
  const bool stats_ok = b.cells >= kBlurCells && std::abs(b.pooled_mean) <= kBlurMeanBound &&
                        b.pooled_var >= kBlurVarLo && b.pooled_var <= kBlurVarHi;
  report("copy_paste", exact == trials && stats_ok,
         fmt("%d/%d pastes bit-exact; blur over %d cells: mean %.4f, variance %.4f", exact, trials, b.cells,
             b.pooled_mean, b.pooled_var));
}

void pinning_check() {
  int exact = 0, runs = 0, patches = 0;
  for (const auto& c : eval::blob_suite(10, 31)) {
    for (int n_post : {1, 5}) {
      drag::DragConfig cfg;
      cfg.N_post = n_post;
      const checks::PinningResult r = checks::stage2_pinning(c.spec, cfg);
      ++runs;
      patches += r.patches;
      if (r.exact) ++exact;
    }
  }
  report("stage2_pinning", exact == runs && patches > 0,
         fmt("%d/%d runs exact over %d target patches (identity denoiser, N_post in {1, 5})", exact, runs, patches));
}

struct SuiteRun {
  eval::BenchReport report;
  double seconds = 0.0;
};

SuiteRun run_suite(const eval::SuiteDocument& doc) {
  const drag::DragConfig cfg = drag::DragConfig::from_json(doc.config);
  const auto t0 = Clock::now();
  SuiteRun r{eval::run_benchmark(doc.cases, cfg, doc.variants, doc.workers), 0.0};
  r.seconds = seconds_since(t0);
  return r;
}

std::vector<double> md_cells(const eval::BenchReport& report, eval::Variant v) {
  std::vector<double> out;
  for (const auto* row : report.rows_for(v)) out.push_back(row->ok ? row->md_after : 1e300);
  return out;
}

void suite_check(const SuiteRun& run) {
  const std::vector<double> md = md_cells(run.report, eval::Variant::full);
  const double med = eval::median(md), worst = *std::max_element(md.begin(), md.end());
  report("synthetic_suite",
         md.size() == 20 && med <= kSuiteMedian && worst <= kSuiteWorst && run.seconds <= kSuiteSeconds,
         fmt("%zu cases: median MD %.3f cells, worst %.3f cells, %.1f s for all variants", md.size(), med, worst,
             run.seconds));
}

void ablation_check(const SuiteRun& run) {
  const std::vector<double> full = md_cells(run.report, eval::Variant::full);
  bool pass = true;
  std::string detail = fmt("median full %.3f", eval::median(full));
  for (eval::Variant v : {eval::Variant::no_final_copy_paste, eval::Variant::no_reentry, eval::Variant::no_fixation}) {
    const std::vector<double> other = md_cells(run.report, v);
    int wins = 0;
    for (std::size_t i = 0; i < full.size(); ++i)
      if (full[i] <= other[i]) ++wins;
    const double frac = full.empty() ? 0.0 : double(wins) / double(full.size());
    const double med = eval::median(other);
    pass = pass && other.size() == full.size() && eval::median(full) <= med && frac >= kWinOrTie;
    detail += fmt("; %s median %.3f, full wins or ties %d/%zu", eval::variant_name(v), med, wins, full.size());
  }
  report("ablation", pass, detail);
}

void projection_check() {
  const scene_checks::RoundTrip rt = scene_checks::projection_roundtrip(kRoundTripPoints, 2024);
  const scene::Scene boxcar = scene::load_scene(std::string(GEODIFF_DATA_DIR) + "/scenes/boxcar_length.json");
  const double box_err = scene_checks::boxcar_pair_error(boxcar);
  report("projection", rt.max_pixel_error <= kRoundTripPx && box_err <= kBoxcarPx,
         fmt("round trip max %.3g px over %d points/poses; box-car pairs max %.3g px", rt.max_pixel_error, rt.points,
             box_err));
}

void determinism_check(const SuiteRun& first, const eval::SuiteDocument& doc) {
  const SuiteRun second = run_suite(doc);
  const std::string a = first.report.to_json(false).dump(2), b = second.report.to_json(false).dump(2);
  int digest_mismatch = 0;
  for (std::size_t i = 0; i < first.report.rows.size() && i < second.report.rows.size(); ++i)
    if (first.report.rows[i].latent_digest != second.report.rows[i].latent_digest) ++digest_mismatch;
  report("determinism", a == b && digest_mismatch == 0 && first.report.rows.size() == second.report.rows.size(),
         fmt("reports %s (%zu bytes), %d latent digest mismatches over %zu rows", a == b ? "identical" : "differ",
             a.size(), digest_mismatch, first.report.rows.size()));
}

}  // namespace

int main() {
  gradient_check();
  tracking_check();
  fixation_check();
  copy_paste_check();
  pinning_check();

  std::ifstream in(std::string(GEODIFF_DATA_DIR) + "/suite.json");
  const eval::SuiteDocument doc = eval::parse_suite(nlohmann::json::parse(in));
  const SuiteRun suite = run_suite(doc);
  suite_check(suite);
  ablation_check(suite);
  projection_check();
  determinism_check(suite, doc);

  std::printf("%d failing\n", failures);
  return failures ? 1 : 0;
}
