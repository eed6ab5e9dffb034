#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "geodiff/geodrag/config.hpp"
#include "geodiff/geodrag/trajectory.hpp"

namespace geodiff::cli {

enum ExitCode : int { ok = 0, input_error = 2, runtime_error = 3 };

struct ConfigOptions {
  std::filesystem::path config_path;   // optional base config file
  std::vector<std::string> overrides;  // key=value, dotted keys allowed
  std::optional<std::uint64_t> seed;
};

// base (may be null) <- config file <- overrides <- seed. Throws InputError.
drag::DragConfig resolve_config(const ConfigOptions& options, const nlohmann::json& base = nullptr);

int cmd_project(const std::filesystem::path& scene, const std::filesystem::path& out,
                const std::filesystem::path& wireframe, std::ostream& out_stream, std::ostream& err);

// Writes <out_dir>/final.lat, trajectory.jsonl and summary.json.
int cmd_drag(const std::filesystem::path& latent, const std::filesystem::path& instruction,
             const ConfigOptions& config, const std::filesystem::path& out_dir, std::ostream& out_stream,
             std::ostream& err);

int cmd_bench(const std::filesystem::path& suite, const std::filesystem::path& out, const ConfigOptions& config,
              std::optional<int> workers, bool include_wall_time, std::ostream& out_stream, std::ostream& err);

int cmd_plot(const std::filesystem::path& log, const std::filesystem::path& out, std::ostream& out_stream,
             std::ostream& err);

// Single case: <out_dir>/latent.lat, instruction.json, ground_truth.lat, spec.json.
// With suite_count > 0: one such directory per shipped suite case plus suite.json.
int cmd_synth(const std::filesystem::path& spec, std::optional<std::uint64_t> seed, int suite_count,
              const std::filesystem::path& out_dir, std::ostream& out_stream, std::ostream& err);

// Deterministic SVG rendering of a trajectory log.
std::string render_trajectory_svg(const std::vector<drag::TrajectoryRecord>& records);

// Full command line: args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace geodiff::cli
