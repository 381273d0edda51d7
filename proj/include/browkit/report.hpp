#pragma once

#include "browkit/metrics.hpp"
#include "browkit/stats.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace browkit {

// ---------------------------------------------------------------------------
// Trace CSV: frame,t,inner,outer,pitch,yaw,roll,present. Absent frames leave
// the value cells empty. Recording metadata lives in a JSON sidecar next to
// the CSV (`<name>.trace.csv` -> `<name>.trace.meta.json`).

std::string trace_csv(const BrowTrace& trace);
/// Parses records only; metadata is left default.
BrowTrace parse_trace_csv(std::string_view content);

nlohmann::ordered_json trace_meta_json(const BrowTrace& trace);
void apply_trace_meta(BrowTrace& trace, const nlohmann::json& meta);
std::filesystem::path trace_meta_path(const std::filesystem::path& trace_csv_path);

/// Writes the CSV and its metadata sidecar.
void write_trace(const BrowTrace& trace, const std::filesystem::path& csv_path);
/// Reads a trace CSV plus its sidecar when one exists.
BrowTrace read_trace(const std::filesystem::path& csv_path);

// ---------------------------------------------------------------------------
// Deviation report (machine-readable form of the deviation tables)

struct DeviationRow {
  std::string video;
  std::string tracker;
  std::string distance_group;
  std::string condition;
  std::optional<bool> eyebrows_raised;
  BrowKind kind = BrowKind::inner;
  /// Deviation under the selected variant. For tracker comparison rows this
  /// is the first tracker's deviation minus the second's.
  double deviation = 0.0;
  std::size_t n = 0;
  /// One-sample t-test of |d_i - baseline| against 0 (Welch test of the two
  /// trackers' |d_i - baseline| for comparison rows). Empty when the test is
  /// undefined (fewer than 2 frames or zero variance).
  std::optional<stats::TTestResult> test;
  double baseline = 0.0;
  double rms = 0.0;
  std::optional<double> sd;
  double mean_abs = 0.0;
};

struct DeviationOptions {
  std::size_t baseline_window = 1;
  DeviationVariant variant = DeviationVariant::rms;
  ScaleMode scale_mode = ScaleMode::per_group;
};

struct DeviationReport {
  std::vector<DeviationRow> rows;
  /// Notes about fallbacks taken (constant scaling groups, skipped tests).
  std::vector<std::string> warnings;
};

/// Scales traces within each (tracker, camera distance) group, then reports
/// per-recording deviations and tracker-vs-tracker comparisons for
/// recordings sharing subject, distance, condition and eyebrow state.
/// Throws InvalidArgument when a trace has an unknown camera distance under
/// per-group scaling.
DeviationReport build_deviation_report(const std::vector<BrowTrace>& traces,
                                       const DeviationOptions& options = {});
std::string deviation_csv(const DeviationReport& report);

// ---------------------------------------------------------------------------

std::string aggregate_csv(const std::vector<AggregateTrace>& aggregates);

/// One plotted line. Absent points break the line.
struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<std::optional<double>> y;
};

/// Long format: series,x,y with an empty y for absent points.
std::string plot_long_csv(const std::vector<PlotSeries>& series);
/// Static line chart, one <polyline> per contiguous run of present points.
std::string plot_svg(const std::vector<PlotSeries>& series, const std::string& title);

}  // namespace browkit
