#include "browkit/geometry.hpp"

#include "browkit/error.hpp"

#include <Eigen/Geometry>
#include <Eigen/SVD>

#include <cmath>
#include <vector>

namespace browkit {

namespace {

constexpr double kMinLineLength = 1e-9;
constexpr double kCollinearRatio = 1e-9;

Point3 flatten(const Point3& p, bool planar) { return planar ? Point3(p.x(), p.y(), 0.0) : p; }

void check_line(const Point3& a, const Point3& b) {
  if (!((b - a).norm() > kMinLineLength)) {
    throw DegenerateError("line endpoints coincide; distance to a line through them is undefined");
  }
}

Eigen::MatrixX3d centered(std::span<const Point3> pts) {
  Eigen::MatrixX3d m(static_cast<Eigen::Index>(pts.size()), 3);
  for (std::size_t i = 0; i < pts.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = pts[i].transpose();
  const Eigen::RowVector3d mean = m.colwise().mean();
  m.rowwise() -= mean;
  return m;
}

void check_spread(const Eigen::MatrixX3d& c, const char* which) {
  Eigen::JacobiSVD<Eigen::MatrixX3d> svd(c);
  const auto& s = svd.singularValues();
  if (!(s(0) > 0.0) || s(1) / s(0) < kCollinearRatio) {
    throw DegenerateError(std::string(which) + " points are collinear or coincident");
  }
}

}  // namespace

double point_to_line_distance(const Point3& p, const Point3& a, const Point3& b) {
  check_line(a, b);
  const Point3 dir = b - a;
  return (p - a).cross(dir).norm() / dir.norm();
}

double signed_point_to_line_distance(const Point3& p, const Point3& a, const Point3& b,
                                     const Eigen::Vector3d& up) {
  const double d = point_to_line_distance(p, a, b);
  const Point3 dir = (b - a).normalized();
  const Point3 offset = (p - a) - dir * dir.dot(p - a);
  return offset.dot(up) < 0.0 ? -d : d;
}

std::optional<BrowMeasures> brow_measures(const LandmarkFrame& frame, const BrowOptions& options) {
  if (!frame.present) return std::nullopt;
  const Point3 eye_l = flatten(frame.at(Role::inner_eye_L), options.planar);
  const Point3 eye_r = flatten(frame.at(Role::inner_eye_R), options.planar);
  check_line(eye_l, eye_r);

  Eigen::Vector3d up = options.up_axis;
  if (frame.pose) up = euler_to_matrix(*frame.pose) * up;
  if (options.planar) up.z() = 0.0;

  auto dist = [&](Role role) {
    const Point3 p = flatten(frame.at(role), options.planar);
    return options.signed_distance ? signed_point_to_line_distance(p, eye_l, eye_r, up)
                                   : point_to_line_distance(p, eye_l, eye_r);
  };
  BrowMeasures m;
  m.inner_L = dist(Role::inner_brow_L);
  m.inner_R = dist(Role::inner_brow_R);
  m.outer_L = dist(Role::outer_brow_L);
  m.outer_R = dist(Role::outer_brow_R);
  m.inner_mean = 0.5 * (m.inner_L + m.inner_R);
  m.outer_mean = 0.5 * (m.outer_L + m.outer_R);
  return m;
}

RotationMatrix euler_to_matrix(const HeadPose& pose) {
  using Eigen::AngleAxisd;
  using Eigen::Vector3d;
  return (AngleAxisd(pose.roll, Vector3d::UnitZ()) * AngleAxisd(pose.yaw, Vector3d::UnitY()) *
          AngleAxisd(pose.pitch, Vector3d::UnitX()))
      .toRotationMatrix();
}

HeadPose matrix_to_euler(const RotationMatrix& r) {
  HeadPose pose;
  const double cos_yaw = std::hypot(r(0, 0), r(1, 0));
  pose.yaw = std::atan2(-r(2, 0), cos_yaw);
  if (cos_yaw > 1e-12) {
    pose.pitch = std::atan2(r(2, 1), r(2, 2));
    pose.roll = std::atan2(r(1, 0), r(0, 0));
  } else {
    // Gimbal lock: only pitch - roll (or pitch + roll) is observable.
    pose.pitch = std::atan2(-r(1, 2), r(1, 1));
    pose.roll = 0.0;
  }
  return pose;
}

std::optional<LandmarkFrame> derotate_and_center(const LandmarkFrame& frame, const HeadPose& pose) {
  if (!frame.present) return std::nullopt;
  const Point3 origin = frame.at(Role::upper_nose);
  const RotationMatrix rt = euler_to_matrix(pose).transpose();
  LandmarkFrame out = frame;
  for (auto& [idx, p] : out.landmarks) p = rt * (p - origin);
  for (auto& [role, p] : out.points) p = rt * (p - origin);
  out.points[Role::upper_nose] = Point3::Zero();
  out.pose = HeadPose{};
  return out;
}

RotationMatrix kabsch_rotation(std::span<const Point3> from, std::span<const Point3> to) {
  if (from.size() != to.size()) throw InvalidArgument("point sets differ in size");
  if (from.size() < 3) throw InvalidArgument("rigid alignment needs at least 3 points");
  const Eigen::MatrixX3d a = centered(from);
  const Eigen::MatrixX3d b = centered(to);
  check_spread(a, "reference");
  check_spread(b, "target");

  const Eigen::Matrix3d h = a.transpose() * b;
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Matrix3d u = svd.matrixU();
  const Eigen::Matrix3d v = svd.matrixV();
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  if ((v * u.transpose()).determinant() < 0.0) d(2, 2) = -1.0;
  return v * d * u.transpose();
}

HeadPose estimate_pose_rigid(const LandmarkFrame& frame, const LandmarkFrame& reference,
                             std::span<const Role> rigid_roles) {
  if (!frame.present || !reference.present) {
    throw InvalidArgument("pose estimation needs present frames");
  }
  if (rigid_roles.size() < 3) throw InvalidArgument("rigid alignment needs at least 3 roles");
  std::vector<Point3> from, to;
  for (Role role : rigid_roles) {
    from.push_back(reference.at(role));
    to.push_back(frame.at(role));
  }
  return matrix_to_euler(kabsch_rotation(from, to));
}

HeadPose estimate_pose_rigid(const LandmarkFrame& frame, const LandmarkFrame& reference) {
  return estimate_pose_rigid(frame, reference, kDefaultRigidRoles);
}

}  // namespace browkit
