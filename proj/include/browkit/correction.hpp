#pragma once

#include "browkit/landmarks.hpp"
#include "browkit/metrics.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace browkit {

/// Head-pose regressors available to a correction model.
enum class Feature { pitch, yaw, roll, pitch2, yaw2, roll2, pitch_yaw, pitch_roll, yaw_roll };

using FeatureSpec = std::vector<Feature>;

std::string_view to_string(Feature f);
Feature feature_from_string(std::string_view s);
double feature_value(Feature f, const HeadPose& pose);

/// pitch, yaw, roll.
FeatureSpec linear_features();
/// Linear terms plus squares and pairwise products.
FeatureSpec quadratic_features();
/// "linear", "quadratic" or a comma-separated feature list ("pitch,pitch^2").
FeatureSpec parse_feature_spec(std::string_view spec);
std::string format_feature_spec(const FeatureSpec& spec);

struct TrainingRow {
  HeadPose pose;
  /// Unit-scaled eyebrow distance.
  double distance = 0.0;
};

/// Rows drawn from neutral-eyebrow recordings only.
struct TrainingSet {
  std::vector<TrainingRow> rows;
  Tracker tracker = Tracker::custom;
  BrowKind kind = BrowKind::inner;
  CameraDistance camera_distance = CameraDistance::unknown;
  /// Scaling the distances were mapped with.
  UnitScaling scaling;

  /// Appends every present frame of an already unit-scaled trace. Throws
  /// InvalidArgument unless the trace is flagged eyebrows_raised=false.
  void add(const BrowTrace& scaled_trace);
};

struct CorrectionModel {
  Tracker tracker = Tracker::custom;
  BrowKind kind = BrowKind::inner;
  CameraDistance camera_distance = CameraDistance::unknown;
  FeatureSpec features;
  double beta0 = 0.0;
  std::vector<double> betas;
  /// Training diagnostics.
  double rmse = 0.0;
  std::size_t n = 0;
  std::vector<double> standard_errors;  // intercept first
  UnitScaling scaling;

  /// beta^T x(pose): the pose-attributable part of the scaled distance.
  double pose_component(const HeadPose& pose) const;
  double predict(const HeadPose& pose) const { return beta0 + pose_component(pose); }
};

/// Ordinary least squares of distance on [1, features] via Householder QR.
/// Throws InvalidArgument for too few rows and IllConditionedError for a
/// rank-deficient design.
CorrectionModel fit(const TrainingSet& training, const FeatureSpec& features = linear_features());

/// d_i - beta^T x_i on the model's brow channel of a unit-scaled trace.
/// Dropout frames pass through. Throws InvalidArgument on tracker mismatch.
BrowTrace apply(const CorrectionModel& model, const BrowTrace& scaled_trace);

/// Same correction expressed in the trace's original units:
/// d_i - range * beta^T x_i.
BrowTrace apply_unscaled(const CorrectionModel& model, const BrowTrace& trace);

nlohmann::ordered_json model_to_json(const CorrectionModel& model);
CorrectionModel model_from_json(const nlohmann::json& j);
void save_model(const CorrectionModel& model, const std::filesystem::path& path);
CorrectionModel load_model(const std::filesystem::path& path);

}  // namespace browkit
