#pragma once

#include "browkit/geometry.hpp"
#include "browkit/landmarks.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace browkit {

enum class BrowKind { inner, outer };
std::string_view to_string(BrowKind kind);
BrowKind brow_kind_from_string(std::string_view s);

enum class Channel { inner, outer, pitch, yaw, roll };
std::string_view to_string(Channel c);
Channel channel_from_string(std::string_view s);

struct TraceSample {
  double inner = 0.0;
  double outer = 0.0;
  HeadPose pose;

  double value(Channel c) const;
  double& value(Channel c);
  double value(BrowKind k) const { return k == BrowKind::inner ? inner : outer; }
  double& value(BrowKind k) { return k == BrowKind::inner ? inner : outer; }
};

struct TraceRecord {
  std::int64_t frame_index = 0;
  double t = 0.0;
  /// Empty for dropout frames.
  std::optional<TraceSample> sample;

  bool present() const { return sample.has_value(); }
};

/// Per-frame eyebrow distances and head pose for one recording.
struct BrowTrace {
  std::vector<TraceRecord> records;
  SequenceMeta meta;
  /// Identifier of the source recording (file stem).
  std::string video;

  std::size_t present_count() const;
  /// Values of one channel over present frames, in order.
  std::vector<double> present_values(Channel c) const;
  std::vector<double> present_values(BrowKind k) const;
};

enum class PoseSource { from_file, rigid_estimate };

struct TraceOptions {
  PoseSource pose_source = PoseSource::from_file;
  BrowOptions brow;
  /// Position (not frame_index) of the neutral reference frame used by
  /// rigid_estimate; defaults to the first present frame.
  std::optional<std::size_t> reference_frame;
  std::vector<Role> rigid_roles{kDefaultRigidRoles.begin(), kDefaultRigidRoles.end()};
};

/// Eyebrow measures and pose for every frame. Throws InvalidArgument when no
/// frame is present and SchemaError when a needed role or pose is missing.
BrowTrace extract_trace(const LandmarkSequence& seq, const TraceOptions& options = {});

// ---------------------------------------------------------------------------
// Scaling

/// Affine map sending [min, max] onto [0, 1].
struct UnitScaling {
  double min = 0.0;
  double max = 1.0;

  double apply(double v) const { return (v - min) / (max - min); }
  double range() const { return max - min; }
};

/// Min and max over every value of every series. Throws DegenerateError for
/// a constant group and InvalidArgument for an empty or non-finite one.
UnitScaling fit_unit_scaling(std::span<const std::vector<double>> group);
std::vector<double> scale_unit(std::span<const double> values, const UnitScaling& scaling);
std::vector<double> scale_unit(std::span<const double> values,
                               std::span<const std::vector<double>> group);

struct TraceScaling {
  UnitScaling inner;
  UnitScaling outer;

  const UnitScaling& of(BrowKind k) const { return k == BrowKind::inner ? inner : outer; }
};

/// Separate min/max for the inner and outer distance channels across all
/// traces of a group. Pose channels are left in radians.
TraceScaling fit_trace_scaling(std::span<const BrowTrace> group);
BrowTrace apply_scaling(const BrowTrace& trace, const TraceScaling& scaling);

enum class ScaleMode { per_group, per_video };
std::vector<BrowTrace> scale_group(std::span<const BrowTrace> group,
                                   ScaleMode mode = ScaleMode::per_group);

// ---------------------------------------------------------------------------
// Time normalization

inline constexpr std::size_t kDefaultNormalizedLength = 70;

/// Resamples onto `n` equally spaced times spanning the first to the last
/// record by linear interpolation between present frames. A target time
/// falls in a gap (and is emitted absent) when it is not bracketed by
/// present frames or when more than `max_gap` dropout records separate the
/// bracketing pair.
BrowTrace normalize_time(const BrowTrace& trace, std::size_t n = kDefaultNormalizedLength,
                         std::optional<std::size_t> max_gap = std::nullopt);

// ---------------------------------------------------------------------------
// Baseline deviation

enum class DeviationVariant {
  rms,                ///< sqrt(mean((d - b)^2))
  sd_of_differences,  ///< sample SD of (d - b)
  mean_abs,           ///< mean |d - b|
};
std::string_view to_string(DeviationVariant v);
DeviationVariant deviation_variant_from_string(std::string_view s);

/// Mean of the first `baseline_window` present values.
double baseline(const BrowTrace& trace, BrowKind kind, std::size_t baseline_window = 1);
/// d_i - baseline for every present frame.
std::vector<double> baseline_differences(const BrowTrace& trace, BrowKind kind,
                                         std::size_t baseline_window = 1);
double deviation(const BrowTrace& trace, BrowKind kind, std::size_t baseline_window = 1,
                 DeviationVariant variant = DeviationVariant::rms);

// ---------------------------------------------------------------------------
// Aggregation

struct AggregateTrace {
  std::string key;
  BrowKind kind = BrowKind::inner;
  std::size_t traces = 0;
  /// Pointwise mean and sample SD (0 with fewer than 2 contributors); empty
  /// where no trace is present.
  std::vector<std::optional<double>> mean;
  std::vector<std::optional<double>> sd;
  std::vector<std::size_t> count;
};

/// Pointwise mean and dispersion of equally long traces.
AggregateTrace aggregate_condition(std::span<const BrowTrace> traces, BrowKind kind,
                                   std::string key);

}  // namespace browkit
