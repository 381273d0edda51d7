#include "browkit/landmarks.hpp"

#include "browkit/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace browkit {

namespace {

template <typename E, std::size_t N>
E parse_enum(std::string_view s, const std::array<std::pair<E, std::string_view>, N>& table,
             std::string_view what) {
  for (const auto& [value, name] : table) {
    if (name == s) return value;
  }
  throw SchemaError("unknown " + std::string(what) + " '" + std::string(s) + "'");
}

template <typename E, std::size_t N>
std::string_view enum_name(E v, const std::array<std::pair<E, std::string_view>, N>& table) {
  for (const auto& [value, name] : table) {
    if (value == v) return name;
  }
  return "?";
}

constexpr std::array<std::pair<Role, std::string_view>, 7> kRoleNames = {{
    {Role::inner_brow_L, "inner_brow_L"},
    {Role::inner_brow_R, "inner_brow_R"},
    {Role::outer_brow_L, "outer_brow_L"},
    {Role::outer_brow_R, "outer_brow_R"},
    {Role::inner_eye_L, "inner_eye_L"},
    {Role::inner_eye_R, "inner_eye_R"},
    {Role::upper_nose, "upper_nose"},
}};

constexpr std::array<std::pair<Tracker, std::string_view>, 3> kTrackerNames = {{
    {Tracker::openface, "openface"},
    {Tracker::mediapipe, "mediapipe"},
    {Tracker::custom, "custom"},
}};

constexpr std::array<std::pair<CameraDistance, std::string_view>, 4> kDistanceNames = {{
    {CameraDistance::close, "close"},
    {CameraDistance::middle, "middle"},
    {CameraDistance::far, "far"},
    {CameraDistance::unknown, "unknown"},
}};

constexpr std::array<std::pair<Condition, std::string_view>, 6> kConditionNames = {{
    {Condition::statement, "statement"},
    {Condition::polar_q, "polar_q"},
    {Condition::content_q, "content_q"},
    {Condition::pitch_up, "pitch_up"},
    {Condition::pitch_down, "pitch_down"},
    {Condition::custom, "custom"},
}};

}  // namespace

std::string_view to_string(Role role) { return enum_name(role, kRoleNames); }
Role role_from_string(std::string_view name) { return parse_enum(name, kRoleNames, "role"); }

std::string_view to_string(Tracker v) { return enum_name(v, kTrackerNames); }
std::string_view to_string(CameraDistance v) { return enum_name(v, kDistanceNames); }
std::string_view to_string(Condition v) { return enum_name(v, kConditionNames); }

Tracker tracker_from_string(std::string_view s) { return parse_enum(s, kTrackerNames, "tracker"); }
CameraDistance camera_distance_from_string(std::string_view s) {
  return parse_enum(s, kDistanceNames, "camera distance");
}
Condition condition_from_string(std::string_view s) {
  return parse_enum(s, kConditionNames, "condition");
}

void validate(const HeadPose& pose) {
  for (double a : {pose.pitch, pose.yaw, pose.roll}) {
    if (!std::isfinite(a) || std::abs(a) >= std::numbers::pi) {
      throw InvalidArgument("head pose angle out of range: " + std::to_string(a));
    }
  }
}

void LandmarkSchema::validate() const {
  for (Role role : kAllRoles) {
    auto it = roles.find(role);
    if (it == roles.end() || it->second.empty()) {
      throw SchemaError("schema role '" + std::string(to_string(role)) + "' is not mapped");
    }
    std::set<int> seen;
    for (int idx : it->second) {
      if (idx < 0) {
        throw SchemaError("negative landmark index in role '" + std::string(to_string(role)) + "'");
      }
      if (!seen.insert(idx).second) {
        throw SchemaError("duplicate index " + std::to_string(idx) + " in role '" +
                          std::string(to_string(role)) + "'");
      }
    }
  }
}

std::vector<int> LandmarkSchema::referenced_indices() const {
  std::set<int> all;
  for (const auto& [role, idx] : roles) all.insert(idx.begin(), idx.end());
  return {all.begin(), all.end()};
}

LandmarkSchema LandmarkSchema::openface68() {
  LandmarkSchema s;
  s.tracker = Tracker::openface;
  s.roles = {
      {Role::inner_brow_L, {21}}, {Role::inner_brow_R, {22}}, {Role::outer_brow_L, {17}},
      {Role::outer_brow_R, {26}}, {Role::inner_eye_L, {39}},  {Role::inner_eye_R, {42}},
      {Role::upper_nose, {27}},
  };
  return s;
}

LandmarkSchema LandmarkSchema::mediapipe468() {
  LandmarkSchema s;
  s.tracker = Tracker::mediapipe;
  s.roles = {
      {Role::inner_brow_L, {55, 107}}, {Role::inner_brow_R, {285, 336}},
      {Role::outer_brow_L, {46, 70}},  {Role::outer_brow_R, {276, 300}},
      {Role::inner_eye_L, {133}},      {Role::inner_eye_R, {362}},
      {Role::upper_nose, {168}},
  };
  return s;
}

const Point3& LandmarkFrame::at(Role role) const {
  auto it = points.find(role);
  if (it == points.end()) {
    throw SchemaError("frame " + std::to_string(frame_index) + " has no point for role '" +
                      std::string(to_string(role)) + "'");
  }
  return it->second;
}

void LandmarkSequence::validate() const {
  if (frames.empty()) throw InvalidArgument("landmark sequence has no frames");
  if (!(meta.fps > 0.0) || !std::isfinite(meta.fps)) {
    throw InvalidArgument("landmark sequence fps must be positive");
  }
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& f = frames[i];
    if (f.frame_index < 0) throw InvalidArgument("negative frame index");
    if (i > 0 && f.frame_index <= frames[i - 1].frame_index) {
      throw InvalidArgument("frame indices must be strictly increasing (frame " +
                            std::to_string(f.frame_index) + ")");
    }
    if (!(f.time_s >= 0.0) || !std::isfinite(f.time_s)) {
      throw InvalidArgument("frame time must be a non-negative finite number");
    }
    if (f.confidence && !(*f.confidence >= 0.0 && *f.confidence <= 1.0)) {
      throw InvalidArgument("frame confidence outside [0,1]");
    }
    if (!f.present && (!f.landmarks.empty() || !f.points.empty())) {
      throw InvalidArgument("dropout frame " + std::to_string(f.frame_index) + " carries points");
    }
    for (const auto& [idx, p] : f.landmarks) {
      if (!is_finite(p)) throw InvalidArgument("non-finite landmark coordinate");
    }
    if (f.pose) browkit::validate(*f.pose);
  }
}

void resolve_roles(LandmarkFrame& frame, const LandmarkSchema& schema) {
  frame.points.clear();
  if (!frame.present) return;
  for (const auto& [role, indices] : schema.roles) {
    Point3 sum = Point3::Zero();
    for (int idx : indices) {
      auto it = frame.landmarks.find(idx);
      if (it == frame.landmarks.end()) {
        throw SchemaError("landmark " + std::to_string(idx) + " for role '" +
                          std::string(to_string(role)) + "' missing in frame " +
                          std::to_string(frame.frame_index));
      }
      sum += it->second;
    }
    frame.points[role] = sum / static_cast<double>(indices.size());
  }
}

bool is_finite(const Point3& p) { return p.allFinite(); }

}  // namespace browkit
