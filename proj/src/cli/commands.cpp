#include "geodiff/cli/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "geodiff/error.hpp"
#include "geodiff/evalharness/bench.hpp"
#include "geodiff/evalharness/instruction.hpp"
#include "geodiff/evalharness/metrics.hpp"
#include "geodiff/evalharness/synthetic.hpp"
#include "geodiff/featurefield/latent_io.hpp"
#include "geodiff/scene3d/scene_spec.hpp"

namespace geodiff::cli {
namespace {

namespace fs = std::filesystem;

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

nlohmann::json read_json(const fs::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw InputError(std::string("cannot open ") + what + " '" + path.string() + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw InputError("cannot create output directory '" + dir.string() + "'");
}

void write_log(const fs::path& path, const std::vector<drag::TrajectoryRecord>& log) {
  std::ostringstream s;
  drag::write_trajectory(s, log);
  write_text(path, s.str());
}

std::string config_help() {
  std::ostringstream s;
  s << "\nConfig keys (--set key=value, or a JSON --config file):\n";
  for (const auto& k : drag::config_keys()) {
    s << "  " << k.key << " = " << (k.default_value.empty() ? "\"\"" : k.default_value) << "\n      " << k.help
      << "\n";
  }
  return s.str();
}

}  // namespace

drag::DragConfig resolve_config(const ConfigOptions& options, const nlohmann::json& base) {
  nlohmann::json merged = base.is_object() ? base : nlohmann::json::object();
  if (!options.config_path.empty()) {
    const nlohmann::json file = read_json(options.config_path, "config");
    if (!file.is_object()) throw InputError("config '" + options.config_path.string() + "' must be a JSON object");
    merged.merge_patch(file);
  }
  drag::DragConfig cfg = drag::DragConfig::from_json(merged);
  for (const auto& kv : options.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw InputError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (options.seed) cfg.seed = *options.seed;
  cfg.validate();
  return cfg;
}

int cmd_project(const fs::path& scene_path, const fs::path& out, const fs::path& wireframe, std::ostream& out_stream,
                std::ostream& err) {
  try {
    const scene::Scene scene = scene::load_scene(scene_path);
    const scene::SceneProjection proj = scene::project_scene(scene);
    if (out.has_parent_path()) ensure_dir(out.parent_path());
    eval::save_instruction(out, proj.instruction);
    if (!wireframe.empty()) {
      if (wireframe.has_parent_path()) ensure_dir(wireframe.parent_path());
      save_pgm(wireframe, scene::render_wireframe(scene.object, scene.camera));
    }
    for (const auto& p : proj.pairs) {
      out_stream << p.name << " source=(" << fixed(p.source.x) << ", " << fixed(p.source.y) << ") target=("
                 << fixed(p.target.x) << ", " << fixed(p.target.y) << ")\n";
    }
    return ok;
  } catch (const std::exception& e) {
    // Out-of-bounds projections are validation failures of the scene.
    err << "project: " << e.what() << "\n";
    return input_error;
  }
}

int cmd_drag(const fs::path& latent_path, const fs::path& instruction_path, const ConfigOptions& config,
             const fs::path& out_dir, std::ostream& out_stream, std::ostream& err) {
  ff::LatentField latent(1, 1, 1);
  eval::DragInstruction instruction;
  drag::DragConfig cfg;
  try {
    ensure_dir(out_dir);
    latent = ff::load_latent(latent_path);
    cfg = resolve_config(config);
  } catch (const std::exception& e) {
    err << "drag: " << e.what() << "\n";
    return input_error;
  }
  const fs::path log_path = out_dir / "trajectory.jsonl";
  try {
    instruction = eval::load_instruction(instruction_path);
  } catch (const BoundsError& e) {
    write_log(log_path, {});
    err << "drag: " << e.what() << "\n";
    return runtime_error;
  } catch (const std::exception& e) {
    err << "drag: " << e.what() << "\n";
    return input_error;
  }

  eval::DragOutcome outcome;
  try {
    drag::Denoiser denoiser = cfg.make_denoiser();
    denoiser.set_work_dir(out_dir);
    outcome = eval::run_instruction(latent, instruction, cfg, denoiser);
  } catch (const BoundsError& e) {
    write_log(log_path, {});
    err << "drag: " << e.what() << "\n";
    return runtime_error;
  } catch (const std::exception& e) {
    err << "drag: " << e.what() << "\n";
    return input_error;
  }

  try {
    write_log(log_path, outcome.result.log);
    if (!outcome.result.ok) {
      err << "drag: " << outcome.result.error << "\n";
      return runtime_error;
    }
    ff::save_latent(out_dir / "final.lat", outcome.result.latent);
    nlohmann::ordered_json summary;
    summary["md_before"] = outcome.md_before;
    summary["md_after"] = outcome.md_after;
    summary["md_pre_denoise"] = outcome.md_pre_denoise;
    summary["md_after_512"] = eval::md_at_512(outcome.md_after, instruction.image_width);
    summary["fixation_events"] = outcome.result.fixation_events;
    summary["config_hash"] = cfg.hash();
    nlohmann::ordered_json points = nlohmann::ordered_json::array();
    for (const auto& p : outcome.result.final_points) points.push_back({p.x, p.y});
    summary["final_points"] = points;
    write_text(out_dir / "summary.json", summary.dump(2) + "\n");
    out_stream << "md_before=" << fixed(outcome.md_before) << " md_after=" << fixed(outcome.md_after)
               << " md_pre_denoise=" << fixed(outcome.md_pre_denoise)
               << " fixation_events=" << outcome.result.fixation_events << "\n";
    return ok;
  } catch (const std::exception& e) {
    err << "drag: " << e.what() << "\n";
    return input_error;
  }
}

int cmd_bench(const fs::path& suite_path, const fs::path& out, const ConfigOptions& config, std::optional<int> workers,
              bool include_wall_time, std::ostream& out_stream, std::ostream& err) {
  eval::SuiteDocument doc;
  drag::DragConfig cfg;
  try {
    doc = eval::parse_suite(read_json(suite_path, "suite spec"));
    cfg = resolve_config(config, doc.config);
    if (workers) doc.workers = *workers;
    if (doc.workers < 1) throw InputError("workers must be >= 1");
    if (out.has_parent_path()) ensure_dir(out.parent_path());
  } catch (const std::exception& e) {
    err << "bench: " << e.what() << "\n";
    return input_error;
  }
  try {
    const eval::BenchReport report = eval::run_benchmark(doc.cases, cfg, doc.variants, doc.workers);
    if (!report.aggregates_consistent()) throw std::runtime_error("aggregates do not match the rows");
    write_text(out, report.to_json(include_wall_time).dump(2) + "\n");
    for (const auto& a : report.aggregates) {
      out_stream << eval::variant_name(a.variant) << " cases=" << a.cases << " mean_md=" << fixed(a.mean_md)
                 << " median_md=" << fixed(a.median_md) << "\n";
    }
    return ok;
  } catch (const InputError& e) {
    err << "bench: " << e.what() << "\n";
    return input_error;
  } catch (const std::exception& e) {
    err << "bench: " << e.what() << "\n";
    return runtime_error;
  }
}

std::string render_trajectory_svg(const std::vector<drag::TrajectoryRecord>& records) {
  struct Track {
    std::vector<ff::Point2> path;
    std::optional<ff::Point2> target;
    std::vector<std::pair<ff::Point2, std::string>> events;
  };
  std::map<int, Track> tracks;
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  bool any = false;
  auto extend = [&](const ff::Point2& p) {
    if (!any) {
      xmin = xmax = p.x;
      ymin = ymax = p.y;
      any = true;
    }
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  };
  for (const auto& r : records) {
    if (r.point_id < 0) continue;
    Track& t = tracks[r.point_id];
    if (r.tx && r.ty) {
      t.target = ff::Point2{*r.tx, *r.ty};
      extend(*t.target);
    }
    if (!r.x || !r.y) continue;
    const ff::Point2 p{*r.x, *r.y};
    extend(p);
    if (r.event.empty()) {
      if (t.path.empty() || !(t.path.back() == p)) t.path.push_back(p);
    } else if (r.event == "enter_I" || r.event == "exit_I") {
      t.events.emplace_back(p, r.event);
    }
  }

  const double pad = 4.0, unit = 10.0;
  const double w = (xmax - xmin + 2 * pad) * unit, h = (ymax - ymin + 2 * pad) * unit;
  auto sx = [&](double x) { return fixed((x - xmin + pad) * unit, 3); };
  auto sy = [&](double y) { return fixed((y - ymin + pad) * unit, 3); };

  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(w, 3) << "\" height=\"" << fixed(h, 3)
    << "\" viewBox=\"0 0 " << fixed(w, 3) << " " << fixed(h, 3) << "\">\n";
  s << "<rect x=\"0\" y=\"0\" width=\"" << fixed(w, 3) << "\" height=\"" << fixed(h, 3) << "\" fill=\"white\"/>\n";
  for (const auto& [id, t] : tracks) {
    s << "<g id=\"point-" << id << "\">\n";
    if (!t.path.empty()) {
      s << "<polyline class=\"path\" fill=\"none\" stroke=\"red\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < t.path.size(); ++i) s << (i ? " " : "") << sx(t.path[i].x) << "," << sy(t.path[i].y);
      s << "\"/>\n";
      s << "<circle class=\"source\" cx=\"" << sx(t.path.front().x) << "\" cy=\"" << sy(t.path.front().y)
        << "\" r=\"4.000\" fill=\"red\"/>\n";
    }
    if (t.target) {
      s << "<circle class=\"target\" cx=\"" << sx(t.target->x) << "\" cy=\"" << sy(t.target->y)
        << "\" r=\"4.000\" fill=\"blue\"/>\n";
    }
    for (const auto& [p, name] : t.events) {
      s << "<g class=\"event\"><rect x=\"" << fixed((p.x - xmin + pad) * unit - 3, 3) << "\" y=\""
        << fixed((p.y - ymin + pad) * unit - 3, 3) << "\" width=\"6.000\" height=\"6.000\" fill=\"none\" stroke=\""
        << (name == "enter_I" ? "green" : "orange") << "\"/><text x=\"" << sx(p.x) << "\" y=\"" << sy(p.y)
        << "\" dx=\"5\" dy=\"-5\" font-size=\"9\">" << name << "</text></g>\n";
    }
    s << "</g>\n";
  }
  s << "</svg>\n";
  return s.str();
}

int cmd_plot(const fs::path& log_path, const fs::path& out, std::ostream& out_stream, std::ostream& err) {
  try {
    std::ifstream in(log_path);
    if (!in) throw InputError("cannot open trajectory log '" + log_path.string() + "'");
    const auto records = drag::read_trajectory(in);
    write_text(out, render_trajectory_svg(records));
    out_stream << "wrote " << out.string() << "\n";
    return ok;
  } catch (const std::exception& e) {
    err << "plot: " << e.what() << "\n";
    return input_error;
  }
}

int cmd_synth(const fs::path& spec_path, std::optional<std::uint64_t> seed, int suite_count, const fs::path& out_dir,
              std::ostream& out_stream, std::ostream& err) {
  try {
    auto write_case = [&](const eval::SyntheticSpec& spec, const fs::path& dir) {
      ensure_dir(dir);
      const eval::SyntheticCase c = eval::generate_synthetic_case(spec);
      ff::save_latent(dir / "latent.lat", c.field);
      ff::save_latent(dir / "ground_truth.lat", c.ground_truth);
      eval::save_instruction(dir / "instruction.json", c.instruction);
      write_text(dir / "spec.json", spec.to_json().dump(2) + "\n");
    };
    if (suite_count > 0) {
      const auto suite = eval::blob_suite(suite_count, seed.value_or(0));
      nlohmann::ordered_json doc;
      doc["cases"] = nlohmann::ordered_json::array();
      for (const auto& c : suite) {
        write_case(c.spec, out_dir / c.id);
        doc["cases"].push_back({{"id", c.id}, {"spec", c.spec.to_json()}});
      }
      doc["variants"] = {"full", "no_final_copy_paste", "no_reentry", "no_fixation"};
      write_text(out_dir / "suite.json", doc.dump(2) + "\n");
      out_stream << "wrote " << suite.size() << " cases to " << out_dir.string() << "\n";
      return ok;
    }
    eval::SyntheticSpec spec;
    if (!spec_path.empty()) spec = eval::SyntheticSpec::from_json(read_json(spec_path, "synthetic spec"));
    if (seed) spec.seed = *seed;
    write_case(spec, out_dir);
    out_stream << "wrote " << out_dir.string() << "\n";
    return ok;
  } catch (const std::exception& e) {
    err << "synth: " << e.what() << "\n";
    return input_error;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Geometry-guided drag editing toolkit"};
  app.require_subcommand(1);
  app.footer(config_help());

  ConfigOptions config;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config.config_path, "JSON config file mirroring DragConfig");
    sub->add_option("--set", config.overrides, "Config override key=value (repeatable)")->take_all();
  };
  auto add_seed = [&](CLI::App* sub) { sub->add_option("--seed", seed, "Random seed"); };

  fs::path scene, out_path, wireframe, latent, instruction, out_dir, suite, log, spec;
  bool no_wall_time = false;
  int suite_count = 0;

  auto* project = app.add_subcommand("project", "Project scene keypoints into a drag instruction");
  project->add_option("scene", scene, "Scene JSON")->required();
  project->add_option("-o,--out", out_path, "Instruction output path")->required();
  project->add_option("--wireframe", wireframe, "Optional wireframe PGM output");

  auto* drag_cmd = app.add_subcommand("drag", "Run GeoDrag on a latent container");
  drag_cmd->add_option("latent", latent, "Latent container")->required();
  drag_cmd->add_option("instruction", instruction, "Drag instruction JSON")->required();
  drag_cmd->add_option("-o,--out", out_dir, "Output directory")->required();
  add_config(drag_cmd);
  add_seed(drag_cmd);

  auto* bench = app.add_subcommand("bench", "Run a benchmark suite over ablation variants");
  bench->add_option("suite", suite, "Suite spec JSON")->required();
  bench->add_option("-o,--out", out_path, "Report output path")->required();
  bench->add_option("--workers", workers, "Parallel cases");
  bench->add_flag("--no-wall-time", no_wall_time, "Omit wall-time fields from the report");
  add_config(bench);
  add_seed(bench);

  auto* plot = app.add_subcommand("plot", "Render a trajectory log to SVG");
  plot->add_option("log", log, "trajectory.jsonl")->required();
  plot->add_option("-o,--out", out_path, "SVG output path")->required();

  auto* synth = app.add_subcommand("synth", "Generate a synthetic blob case or the shipped suite");
  synth->add_option("--spec", spec, "Synthetic spec JSON");
  synth->add_option("--suite", suite_count, "Generate this many shipped suite cases instead");
  synth->add_option("-o,--out", out_dir, "Output directory")->required();
  add_seed(synth);

  for (auto* sub : {project, drag_cmd, bench, plot, synth}) sub->footer(config_help());

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : input_error;
  }

  if (*project) return cmd_project(scene, out_path, wireframe, out, err);
  if (*drag_cmd) {
    config.seed = seed;
    return cmd_drag(latent, instruction, config, out_dir, out, err);
  }
  if (*bench) {
    config.seed = seed;
    return cmd_bench(suite, out_path, config, workers, !no_wall_time, out, err);
  }
  if (*plot) return cmd_plot(log, out_path, out, err);
  return cmd_synth(spec, seed, suite_count, out_dir, out, err);
}

}  // namespace geodiff::cli
