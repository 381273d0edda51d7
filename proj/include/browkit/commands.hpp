#pragma once

#include "browkit/landmarks.hpp"
#include "browkit/metrics.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace browkit::cli {

/// Settings shared by every subcommand. Field names double as the keys of
/// the optional JSON config file; command-line flags take precedence.
struct RunConfig {
  std::vector<std::string> inputs;  // paths or glob patterns
  std::string output_dir = ".";
  /// auto | openface | mediapipe | custom. auto picks by file type.
  std::string tracker = "auto";
  std::string schema;  // schema JSON path; empty = tracker default
  /// CSV with a `path` column and any of camera_distance, condition,
  /// eyebrows_raised, subject, tracker, fps.
  std::string manifest;
  // Metadata applied to every input when set.
  std::string camera_distance;
  std::string condition;
  std::string subject;
  std::string eyebrows_raised;  // "true" | "false" | ""

  double confidence_threshold = 0.75;
  double fps = 30.0;
  /// auto | file | rigid
  std::string pose_source = "auto";
  bool signed_distance = false;
  bool planar = false;

  std::size_t baseline_window = 1;
  std::string deviation_variant = "rms";
  std::string scale_mode = "per_group";
  std::size_t normalize_n = kDefaultNormalizedLength;
  bool normalize = true;
  bool scale = true;
  std::optional<std::size_t> max_gap;

  // correct
  std::string features;  // empty = model's / linear
  std::vector<std::string> models;
  std::vector<std::string> fit_inputs;
  std::string brow_kind = "both";

  // aggregate
  std::string group_by = "condition";

  // synth
  std::string scenario;
  std::uint64_t seed = 0;
  bool seed_set = false;

  // plot-data
  std::vector<std::string> channels{"inner", "outer"};
  std::string plot_name = "plot";
  std::string title;

  // extract
  bool derotated = false;
};

/// Overlays keys present in a JSON config object onto `cfg`.
void apply_config_json(RunConfig& cfg, const nlohmann::json& j);

/// Expands glob patterns; literal paths pass through (sorted per pattern).
std::vector<std::filesystem::path> expand_inputs(const std::vector<std::string>& patterns);

/// Landmark file with metadata resolved from flags, manifest, file header
/// and file name, in that order of precedence.
LandmarkSequence load_sequence(const std::filesystem::path& path, const RunConfig& cfg);
/// Trace from a trace CSV (with sidecar) or from a landmark file.
BrowTrace load_trace(const std::filesystem::path& path, const RunConfig& cfg);

// Each returns the process exit code: 0 success, 1 some input failed,
// 2 usage/configuration error. Diagnostics go to `log`.
int cmd_extract(const RunConfig& cfg, std::ostream& log);
int cmd_deviations(const RunConfig& cfg, std::ostream& log);
int cmd_correct(const RunConfig& cfg, std::ostream& log);
int cmd_aggregate(const RunConfig& cfg, std::ostream& log);
int cmd_synth(const RunConfig& cfg, std::ostream& log);
int cmd_plot_data(const RunConfig& cfg, std::ostream& log);

}  // namespace browkit::cli
