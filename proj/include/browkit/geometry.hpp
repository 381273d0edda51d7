#pragma once

#include "browkit/landmarks.hpp"

#include <Eigen/Core>

#include <optional>
#include <span>

namespace browkit {

using RotationMatrix = Eigen::Matrix3d;

/// Perpendicular distance from p to the infinite line through a and b.
/// Throws DegenerateError when |b - a| <= 1e-9.
double point_to_line_distance(const Point3& p, const Point3& a, const Point3& b);

/// Distance with a sign: positive when p lies on the `up` side of the line.
double signed_point_to_line_distance(const Point3& p, const Point3& a, const Point3& b,
                                     const Eigen::Vector3d& up);

struct BrowMeasures {
  double inner_L = 0.0;
  double inner_R = 0.0;
  double outer_L = 0.0;
  double outer_R = 0.0;
  double inner_mean = 0.0;
  double outer_mean = 0.0;
};

struct BrowOptions {
  /// Report distances signed, positive above the eye line.
  bool signed_distance = false;
  /// Face-local up direction used for the sign. Rotated by the frame pose
  /// when one is available.
  Eigen::Vector3d up_axis = Eigen::Vector3d::UnitY();
  /// Drop z before measuring (screen-plane distances).
  bool planar = false;
};

/// Eyebrow-to-eye-line distances. Returns nullopt for dropout frames.
std::optional<BrowMeasures> brow_measures(const LandmarkFrame& frame,
                                          const BrowOptions& options = {});

/// R = Rz(roll) * Ry(yaw) * Rx(pitch).
RotationMatrix euler_to_matrix(const HeadPose& pose);
/// Inverse of euler_to_matrix for |yaw| < pi/2.
HeadPose matrix_to_euler(const RotationMatrix& r);

/// Every point p becomes R^T (p - upper_nose). Returns nullopt for dropouts.
std::optional<LandmarkFrame> derotate_and_center(const LandmarkFrame& frame, const HeadPose& pose);

/// Least-squares rotation (reflection excluded) taking the centred
/// `reference` role points onto the centred `frame` role points.
HeadPose estimate_pose_rigid(const LandmarkFrame& frame, const LandmarkFrame& reference,
                             std::span<const Role> rigid_roles);
HeadPose estimate_pose_rigid(const LandmarkFrame& frame, const LandmarkFrame& reference);

/// Eye corners plus upper nose.
inline constexpr std::array<Role, 3> kDefaultRigidRoles = {Role::inner_eye_L, Role::inner_eye_R,
                                                           Role::upper_nose};

/// Optimal rotation between two paired point sets (Kabsch). Exposed for
/// callers that work on raw point lists.
RotationMatrix kabsch_rotation(std::span<const Point3> from, std::span<const Point3> to);

}  // namespace browkit
