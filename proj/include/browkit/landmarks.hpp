#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace browkit {

using Point3 = Eigen::Vector3d;

/// Semantic landmark roles used by the eyebrow measures.
enum class Role {
  inner_brow_L,
  inner_brow_R,
  outer_brow_L,
  outer_brow_R,
  inner_eye_L,
  inner_eye_R,
  upper_nose,
};

inline constexpr std::array<Role, 7> kAllRoles = {
    Role::inner_brow_L, Role::inner_brow_R, Role::outer_brow_L, Role::outer_brow_R,
    Role::inner_eye_L,  Role::inner_eye_R,  Role::upper_nose,
};

std::string_view to_string(Role role);
Role role_from_string(std::string_view name);

enum class Tracker { openface, mediapipe, custom };
enum class CameraDistance { close, middle, far, unknown };
enum class Condition { statement, polar_q, content_q, pitch_up, pitch_down, custom };

std::string_view to_string(Tracker v);
std::string_view to_string(CameraDistance v);
std::string_view to_string(Condition v);
Tracker tracker_from_string(std::string_view s);
CameraDistance camera_distance_from_string(std::string_view s);
Condition condition_from_string(std::string_view s);

/// Head rotation in radians. Positive pitch is head down (chin toward the
/// chest) in a right-handed frame with +y up and +z toward the camera; the
/// matrix form is R = Rz(roll) * Ry(yaw) * Rx(pitch).
struct HeadPose {
  double pitch = 0.0;
  double yaw = 0.0;
  double roll = 0.0;

  friend bool operator==(const HeadPose&, const HeadPose&) = default;
};

/// Throws InvalidArgument unless every angle is finite with |angle| < pi.
void validate(const HeadPose& pose);

/// Role -> tracker landmark indices. A role mapped to several indices
/// resolves to the component-wise mean of those landmarks.
struct LandmarkSchema {
  Tracker tracker = Tracker::custom;
  std::map<Role, std::vector<int>> roles;

  /// Throws SchemaError if a role is unmapped or has duplicate indices.
  void validate() const;
  /// All landmark indices referenced by any role, ascending and unique.
  std::vector<int> referenced_indices() const;

  /// 68-point OpenFace model defaults.
  static LandmarkSchema openface68();
  /// 468-point MediaPipe face mesh defaults (provisional, see schemas/).
  static LandmarkSchema mediapipe468();
};

struct LandmarkFrame {
  std::int64_t frame_index = 0;
  double time_s = 0.0;
  std::optional<double> confidence;
  /// False marks a tracker dropout; such frames carry no landmarks.
  bool present = true;
  /// Raw tracker landmarks by index.
  std::map<int, Point3> landmarks;
  /// Landmarks resolved to roles via the sequence schema.
  std::map<Role, Point3> points;
  /// Pose reported by the tracker, if any.
  std::optional<HeadPose> pose;

  const Point3& at(Role role) const;
};

struct SequenceMeta {
  Tracker tracker = Tracker::custom;
  CameraDistance camera_distance = CameraDistance::unknown;
  Condition condition = Condition::custom;
  std::optional<bool> eyebrows_raised;
  double fps = 30.0;
  std::string subject;
  /// Free-form coordinate unit tag ("mm", "normalized", "template").
  std::string units;
};

struct LandmarkSequence {
  std::vector<LandmarkFrame> frames;
  SequenceMeta meta;
  LandmarkSchema schema;

  /// Throws InvalidArgument when a sequence invariant is broken.
  void validate() const;
};

/// Fills frame.points from frame.landmarks. Throws SchemaError naming the
/// role and index when a referenced landmark is missing.
void resolve_roles(LandmarkFrame& frame, const LandmarkSchema& schema);

bool is_finite(const Point3& p);

}  // namespace browkit
