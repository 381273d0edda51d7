#pragma once

#include "browkit/landmarks.hpp"
#include "browkit/metrics.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

namespace testing {

inline constexpr double kPi = 3.14159265358979323846;

// Small generator wrapper so property tests read as "draw a thing".
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  double normal(double sd = 1.0) { return std::normal_distribution<double>(0.0, sd)(eng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }
  browkit::Point3 point(double scale = 10.0) {
    return {uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale)};
  }
  browkit::HeadPose pose(double limit = 1.2) {
    return {uniform(-limit, limit), uniform(-limit, limit), uniform(-limit, limit)};
  }
  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

// Frame with every role set directly (landmark i == role i).
inline browkit::LandmarkFrame role_frame(const std::map<browkit::Role, browkit::Point3>& pts) {
  browkit::LandmarkFrame f;
  int i = 0;
  for (auto role : browkit::kAllRoles) {
    f.landmarks[i++] = pts.at(role);
  }
  f.points = pts;
  return f;
}

inline browkit::LandmarkSchema identity_schema() {
  browkit::LandmarkSchema s;
  int i = 0;
  for (auto role : browkit::kAllRoles) s.roles[role] = {i++};
  return s;
}

// Face with inner brows `inner` and outer brows `outer` above an eye line on
// the x axis, upper nose in front.
inline std::map<browkit::Role, browkit::Point3> simple_face(double inner = 3.0, double outer = 2.5) {
  using browkit::Role;
  return {
      {Role::inner_eye_L, {-1.5, 0.0, 0.0}}, {Role::inner_eye_R, {1.5, 0.0, 0.0}},
      {Role::inner_brow_L, {-1.2, inner, 0.0}}, {Role::inner_brow_R, {1.2, inner, 0.0}},
      {Role::outer_brow_L, {-4.5, outer, 0.0}}, {Role::outer_brow_R, {4.5, outer, 0.0}},
      {Role::upper_nose, {0.0, 1.0, 1.0}},
  };
}

// Trace built straight from values; nullopt entries are dropouts.
inline browkit::BrowTrace make_trace(const std::vector<std::optional<double>>& inner,
                                     const std::vector<std::optional<double>>& outer = {},
                                     double fps = 30.0) {
  browkit::BrowTrace t;
  for (std::size_t i = 0; i < inner.size(); ++i) {
    browkit::TraceRecord r;
    r.frame_index = static_cast<std::int64_t>(i);
    r.t = static_cast<double>(i) / fps;
    if (inner[i]) {
      browkit::TraceSample s;
      s.inner = *inner[i];
      s.outer = outer.empty() ? *inner[i] : outer[i].value_or(0.0);
      r.sample = s;
    }
    t.records.push_back(r);
  }
  t.meta.fps = fps;
  return t;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("browkit_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing
