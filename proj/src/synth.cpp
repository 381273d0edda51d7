#include "browkit/synth.hpp"

#include "browkit/error.hpp"
#include "browkit/geometry.hpp"
#include "browkit/landmark_io.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace browkit::synth {

namespace {

constexpr double kMinScale = 0.05;

bool is_brow(Role r) {
  return r == Role::inner_brow_L || r == Role::inner_brow_R || r == Role::outer_brow_L ||
         r == Role::outer_brow_R;
}

// Portable draws on top of mt19937_64 so outputs do not depend on the
// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace

// ---------------------------------------------------------------------------

void FaceTemplate::validate() const {
  for (Role r : kAllRoles) {
    if (!points.contains(r)) {
      throw InvalidArgument("face template lacks role '" + std::string(to_string(r)) + "'");
    }
  }
  const Point3& a = points.at(Role::inner_eye_L);
  const Point3& b = points.at(Role::inner_eye_R);
  if (!((b - a).norm() > 1e-9)) throw InvalidArgument("face template eye corners coincide");
  for (Role r : kAllRoles) {
    if (!is_brow(r)) continue;
    if (!(signed_point_to_line_distance(points.at(r), a, b, Eigen::Vector3d::UnitY()) > 0.0)) {
      throw InvalidArgument("face template brow '" + std::string(to_string(r)) +
                            "' is not above the eye line");
    }
  }
  for (const auto& [role, d] : raise) {
    if (!is_brow(role)) throw InvalidArgument("raise displacement given for a non-brow role");
    if (!d.allFinite()) throw InvalidArgument("raise displacement is not finite");
  }
}

Point3 FaceTemplate::pivot() const {
  return points.at(Role::upper_nose) - Eigen::Vector3d(0.0, pivot_below_nose, 0.0);
}

FaceTemplate FaceTemplate::standard() {
  FaceTemplate t;
  t.points = {
      {Role::inner_eye_L, {-1.5, 0.0, 0.0}},  {Role::inner_eye_R, {1.5, 0.0, 0.0}},
      {Role::inner_brow_L, {-1.2, 2.0, 0.0}}, {Role::inner_brow_R, {1.2, 2.0, 0.0}},
      {Role::outer_brow_L, {-4.5, 1.6, 0.0}}, {Role::outer_brow_R, {4.5, 1.6, 0.0}},
      {Role::upper_nose, {0.0, 1.0, 1.0}},
  };
  t.raise = {
      {Role::inner_brow_L, {0.0, 0.6, 0.0}},
      {Role::inner_brow_R, {0.0, 0.6, 0.0}},
      {Role::outer_brow_L, {0.0, 0.5, 0.0}},
      {Role::outer_brow_R, {0.0, 0.5, 0.0}},
  };
  return t;
}

double Profile::value(int frame) const {
  if (shape == Shape::none || frame < start || frame > end) return 0.0;
  double u = 0.0;
  if (frame <= peak) {
    u = peak == start ? 1.0 : static_cast<double>(frame - start) / (peak - start);
  } else {
    u = end == peak ? 1.0 : static_cast<double>(end - frame) / (end - peak);
  }
  if (shape == Shape::raised_cosine) u = 0.5 * (1.0 - std::cos(std::numbers::pi * u));
  return u * peak_value;
}

double BrowProfile::level(int frame) const {
  switch (kind) {
    case Kind::neutral: return 0.0;
    case Kind::raised: return 1.0;
    case Kind::ramp: return ramp.value(frame);
  }
  return 0.0;
}

void MotionScript::validate() const {
  if (frames <= 0) throw InvalidArgument("motion script needs at least one frame");
  if (!(fps > 0.0)) throw InvalidArgument("motion script fps must be positive");
  auto check = [](const Profile& p, const char* what, double limit) {
    if (p.shape == Profile::Shape::none) return;
    if (!(p.start <= p.peak && p.peak <= p.end && p.start < p.end) || p.start < 0) {
      throw InvalidArgument(std::string(what) + " profile needs 0 <= start <= peak <= end, start < end");
    }
    if (!std::isfinite(p.peak_value) || std::abs(p.peak_value) >= limit) {
      throw InvalidArgument(std::string(what) + " profile peak out of range");
    }
  };
  check(pitch, "pitch", std::numbers::pi / 2);
  check(yaw, "yaw", std::numbers::pi / 2);
  check(roll, "roll", std::numbers::pi / 2);
  if (brows.kind == BrowProfile::Kind::ramp) {
    check(brows.ramp, "eyebrow", 1.0 + 1e-12);
    if (brows.ramp.peak_value < 0.0) throw InvalidArgument("eyebrow ramp level must be in [0,1]");
  }
  if (!head_position.allFinite()) throw InvalidArgument("head position is not finite");
}

HeadPose MotionScript::pose_at(int frame) const {
  return {pitch.value(frame), yaw.value(frame), roll.value(frame)};
}

double DistortionSpec::vertical_scale(double pitch, double raise_level) const {
  double s = 1.0;
  switch (kind) {
    case Kind::none:
    case Kind::custom:
      return 1.0;
    case Kind::of_like:
      s = 1.0 - k * pitch;
      break;
    case Kind::mph_like: {
      // Negative pitch is head up: the model is squished (s < 1).
      double slope = k;
      if (brow_interaction && pitch < 0.0) slope *= 1.0 + interaction_gain * raise_level;
      s = 1.0 + slope * pitch;
      break;
    }
  }
  return std::max(s, kMinScale);
}

bool DistortionSpec::emits_pose() const {
  if (emit_pose) return *emit_pose;
  return kind != Kind::mph_like;
}

Tracker DistortionSpec::tracker() const {
  if (observed_tracker) return *observed_tracker;
  switch (kind) {
    case Kind::of_like: return Tracker::openface;
    case Kind::mph_like: return Tracker::mediapipe;
    default: return Tracker::custom;
  }
}

void DistortionSpec::validate() const {
  if (!std::isfinite(k) || !std::isfinite(interaction_gain)) {
    throw InvalidArgument("distortion parameters must be finite");
  }
  if (!(noise_sigma >= 0.0)) throw InvalidArgument("noise sigma must be non-negative");
  if (dropout && !(dropout->probability >= 0.0 && dropout->probability <= 1.0)) {
    throw InvalidArgument("dropout probability must be in [0,1]");
  }
  for (const auto& [f, c] : coefficients) {
    if (!std::isfinite(c)) throw InvalidArgument("distortion coefficient is not finite");
  }
}

std::string_view to_string(DistortionSpec::Kind k) {
  switch (k) {
    case DistortionSpec::Kind::none: return "none";
    case DistortionSpec::Kind::of_like: return "of_like";
    case DistortionSpec::Kind::mph_like: return "mph_like";
    case DistortionSpec::Kind::custom: return "custom";
  }
  return "?";
}

// ---------------------------------------------------------------------------

Generated generate(const FaceTemplate& face, const MotionScript& script,
                   const DistortionSpec& distortion, std::uint64_t seed,
                   const GenerateOptions& options) {
  face.validate();
  script.validate();
  distortion.validate();
  options.schema.validate();

  Generated g;
  for (LandmarkSequence* seq : {&g.truth, &g.observed}) {
    seq->schema = options.schema;
    seq->meta.camera_distance = options.camera_distance;
    seq->meta.condition = options.condition;
    seq->meta.subject = options.subject;
    seq->meta.fps = script.fps;
    seq->meta.units = "template";
    switch (script.brows.kind) {
      case BrowProfile::Kind::neutral: seq->meta.eyebrows_raised = false; break;
      case BrowProfile::Kind::raised: seq->meta.eyebrows_raised = true; break;
      case BrowProfile::Kind::ramp: seq->meta.eyebrows_raised = std::nullopt; break;
    }
  }
  g.truth.meta.tracker = Tracker::custom;
  g.observed.meta.tracker = distortion.tracker();

  const Point3 pivot = face.pivot();
  const double eye_y =
      0.5 * (face.points.at(Role::inner_eye_L).y() + face.points.at(Role::inner_eye_R).y());
  Rng rng(seed);

  for (int f = 0; f < script.frames; ++f) {
    const HeadPose pose = script.pose_at(f);
    const double raise = script.brows.level(f);
    const Eigen::Matrix3d rot = euler_to_matrix(pose);
    const double scale = distortion.vertical_scale(pose.pitch, raise);
    auto squish = [&](Point3 p) {
      if (scale != 1.0) p.y() = eye_y + scale * (p.y() - eye_y);
      return p;
    };
    auto place = [&](const Point3& local) -> Point3 {
      return script.head_position + rot * (local - pivot);
    };

    // Head-local positions keyed by output landmark index.
    std::map<int, Point3> truth_local;
    std::map<int, Point3> observed_local;
    for (const auto& [role, indices] : options.schema.roles) {
      Point3 p = face.points.at(role);
      if (auto it = face.raise.find(role); it != face.raise.end()) p += raise * it->second;
      Point3 q = squish(p);
      if (distortion.kind == DistortionSpec::Kind::custom && is_brow(role)) {
        for (const auto& [feature, c] : distortion.coefficients) q.y() += c * feature_value(feature, pose);
      }
      for (int idx : indices) {
        truth_local[idx] = p;
        observed_local[idx] = q;
      }
    }
    for (const auto& [idx, p] : face.filler) {
      if (truth_local.contains(idx)) continue;
      truth_local[idx] = p;
      observed_local[idx] = squish(p);
    }

    LandmarkFrame tf;
    tf.frame_index = f;
    tf.time_s = f / script.fps;
    tf.confidence = 1.0;
    tf.pose = pose;
    for (const auto& [idx, p] : truth_local) tf.landmarks[idx] = place(p);
    resolve_roles(tf, options.schema);

    LandmarkFrame of;
    of.frame_index = f;
    of.time_s = tf.time_s;
    bool dropped = false;
    if (distortion.dropout) {
      const double u = rng.uniform();
      dropped = -pose.pitch > distortion.dropout->pitch_up_threshold &&
                u < distortion.dropout->probability;
    }
    if (dropped) {
      of.present = false;
      of.confidence = 0.0;
    } else {
      of.confidence = 1.0;
      if (distortion.emits_pose()) of.pose = pose;
      for (const auto& [idx, p] : observed_local) {
        Point3 w = place(p);
        if (distortion.noise_sigma > 0.0) {
          for (int c = 0; c < 3; ++c) w(c) += distortion.noise_sigma * rng.normal();
        }
        of.landmarks[idx] = w;
      }
      resolve_roles(of, options.schema);
    }

    g.truth.frames.push_back(std::move(tf));
    g.observed.frames.push_back(std::move(of));
  }
  return g;
}

// ---------------------------------------------------------------------------

Scorecard score_correction(const BrowTrace& truth, const BrowTrace& observed,
                           const BrowTrace& corrected, BrowKind kind) {
  const std::size_t n = truth.records.size();
  if (observed.records.size() != n || corrected.records.size() != n) {
    throw InvalidArgument("score_correction needs traces of equal length");
  }
  double ss_obs = 0.0, ss_cor = 0.0;
  Scorecard card;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& t = truth.records[i].sample;
    const auto& o = observed.records[i].sample;
    const auto& c = corrected.records[i].sample;
    if (!t || !o || !c) continue;
    const double e_obs = o->value(kind) - t->value(kind);
    const double e_cor = c->value(kind) - t->value(kind);
    ss_obs += e_obs * e_obs;
    ss_cor += e_cor * e_cor;
    ++card.n;
  }
  if (card.n == 0) throw InvalidArgument("no frame is present in all three traces");
  card.rmse_uncorrected = std::sqrt(ss_obs / static_cast<double>(card.n));
  card.rmse_corrected = std::sqrt(ss_cor / static_cast<double>(card.n));
  if (card.rmse_uncorrected > 0.0) card.improvement_ratio = card.rmse_corrected / card.rmse_uncorrected;
  return card;
}

BrowTrace trace_of(const LandmarkSequence& seq) {
  TraceOptions opts;
  const bool has_pose = std::all_of(seq.frames.begin(), seq.frames.end(),
                                    [](const auto& f) { return !f.present || f.pose.has_value(); });
  opts.pose_source = has_pose ? PoseSource::from_file : PoseSource::rigid_estimate;
  return extract_trace(seq, opts);
}

}  // namespace browkit::synth
