#pragma once

#include "browkit/correction.hpp"
#include "browkit/landmarks.hpp"
#include "browkit/metrics.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace browkit::synth {

/// Neutral face in head-local coordinates: +x toward the subject's left, +y
/// up, +z toward the camera. Units are nominal centimetres.
struct FaceTemplate {
  std::map<Role, Point3> points;
  /// Displacement of each brow role when fully raised.
  std::map<Role, Eigen::Vector3d> raise;
  /// Extra landmarks copied through posing (index -> local position).
  std::map<int, Point3> filler;
  /// Distance of the neck pivot below the upper nose point.
  double pivot_below_nose = 12.0;

  /// Throws InvalidArgument on coincident eye corners or brows not above
  /// the eye line.
  void validate() const;
  Point3 pivot() const;

  static FaceTemplate standard();
};

/// 0 outside [start, end], rising to `peak_value` at `peak`.
struct Profile {
  enum class Shape { none, linear, raised_cosine };
  Shape shape = Shape::none;
  int start = 0;
  int peak = 0;
  int end = 0;
  double peak_value = 0.0;

  double value(int frame) const;
};

struct BrowProfile {
  enum class Kind { neutral, raised, ramp };
  Kind kind = Kind::neutral;
  /// Used by ramp; peak_value is the raise level in [0, 1].
  Profile ramp;

  double level(int frame) const;
};

struct MotionScript {
  int frames = 90;
  double fps = 30.0;
  Profile pitch;
  Profile yaw;
  Profile roll;
  BrowProfile brows;
  /// Head position (pivot) in camera space.
  Eigen::Vector3d head_position{0.0, 0.0, 60.0};

  void validate() const;
  HeadPose pose_at(int frame) const;
};

struct DropoutRule {
  /// Upward pitch (radians, positive number) beyond which frames may drop.
  double pitch_up_threshold = 0.35;
  double probability = 1.0;
};

struct DistortionSpec {
  enum class Kind { none, of_like, mph_like, custom };
  Kind kind = Kind::none;
  /// Slope of the vertical scale factor s(pitch).
  double k = 0.4;
  /// mph_like only: stronger squish of raised brows under upward pitch.
  bool brow_interaction = false;
  double interaction_gain = 1.5;
  /// custom: additive vertical brow offset sum_f c_f * feature_f(pose) in
  /// template units, independent of brow state.
  std::map<Feature, double> coefficients;
  /// Gaussian noise added to every observed coordinate.
  double noise_sigma = 0.0;
  std::optional<DropoutRule> dropout;
  /// Whether observed frames report the head pose. Defaults to false for
  /// mph_like (that tracker reports none) and true otherwise.
  std::optional<bool> emit_pose;
  /// Tracker tag of the observed sequence. Defaults by kind.
  std::optional<Tracker> observed_tracker;

  /// Vertical scale factor applied about the eye line; s(0, .) = 1.
  double vertical_scale(double pitch, double raise_level) const;
  bool emits_pose() const;
  Tracker tracker() const;
  void validate() const;
};

std::string_view to_string(DistortionSpec::Kind k);

struct Generated {
  LandmarkSequence truth;
  LandmarkSequence observed;
};

struct GenerateOptions {
  LandmarkSchema schema = LandmarkSchema::openface68();
  CameraDistance camera_distance = CameraDistance::unknown;
  Condition condition = Condition::custom;
  std::string subject = "synthetic";
};

/// Poses the template along the script (truth) and applies the distortion
/// (observed). Bit-deterministic for a given seed.
Generated generate(const FaceTemplate& face, const MotionScript& script,
                   const DistortionSpec& distortion, std::uint64_t seed,
                   const GenerateOptions& options = {});

struct Scorecard {
  double rmse_uncorrected = 0.0;
  double rmse_corrected = 0.0;
  /// rmse_corrected / rmse_uncorrected; empty when the uncorrected error is 0.
  std::optional<double> improvement_ratio;
  std::size_t n = 0;
};

/// RMSE of observed and corrected brow distances against truth over frames
/// present in all three traces.
Scorecard score_correction(const BrowTrace& truth, const BrowTrace& observed,
                           const BrowTrace& corrected, BrowKind kind);

/// Trace of a generated sequence: file pose when the sequence carries one,
/// rigid estimate against the first present frame otherwise.
BrowTrace trace_of(const LandmarkSequence& seq);

// ---------------------------------------------------------------------------
// Scenario files

struct Scenario {
  std::string name = "scenario";
  std::uint64_t seed = 0;
  FaceTemplate face = FaceTemplate::standard();
  MotionScript script;
  DistortionSpec distortion;
  GenerateOptions options;
};

struct CorrectionPlan {
  /// Neutral-eyebrow scenarios the model is fitted on.
  std::vector<Scenario> train;
  FeatureSpec features = linear_features();
  std::vector<BrowKind> kinds{BrowKind::inner, BrowKind::outer};
};

struct ScenarioSpec {
  Scenario scenario;
  std::optional<CorrectionPlan> correction;
};

/// Accepts a single scenario object or {"scenarios": [...]}.
std::vector<ScenarioSpec> scenarios_from_json(const nlohmann::json& j);

struct ScenarioResult {
  Generated generated;
  BrowTrace truth_trace;
  BrowTrace observed_trace;
  /// Per brow kind, with correction when a plan was given.
  std::map<BrowKind, Scorecard> scores;
  std::map<BrowKind, CorrectionModel> models;
};

/// Generates the scenario and, when a correction plan is present, fits one
/// model per brow kind on the plan's training scenarios (sharing the target's
/// scaling group) and scores the corrected target. Without a plan the
/// corrected trace equals the observed one.
ScenarioResult run_scenario(const ScenarioSpec& spec);

}  // namespace browkit::synth
