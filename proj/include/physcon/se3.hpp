#pragma once

// Rotation and rigid-transform algebra on SO(3)/SE(3).
//
// Conventions used throughout the library:
//  * Rotations are stored as 3x3 matrices. Quaternions only appear in file I/O.
//  * Tangent vectors are 6-vectors ordered (translation, rotation).
//  * Perturbations act on the right: T <- T * exp(eps). Gradients of scalar
//    costs with respect to a pose are therefore expressed in the body frame.

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace physcon {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// 6-vector (translation part, rotation part) in the right-tangent convention.
using Tangent = Vec6;

inline constexpr double kRotationTolerance = 1e-9;

/// Rigid transform mapping object coordinates to the parent (camera) frame.
struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static Pose identity() { return {}; }
  static Pose from_translation(const Vec3& t) { return {Mat3::Identity(), t}; }

  Vec3 operator*(const Vec3& p) const { return rotation * p + translation; }
  Pose operator*(const Pose& other) const {
    return {rotation * other.rotation, rotation * other.translation + translation};
  }
};

Mat3 skew(const Vec3& v);

/// Max-norm of R R^T - I and |det R - 1| both within tolerance.
bool is_rotation(const Mat3& r, double tolerance = kRotationTolerance);

/// Rodrigues' formula.
Mat3 exp_so3(const Vec3& omega);

/// Axis-angle vector with angle in [0, pi]. At exactly pi the sign is chosen
/// so that the first nonzero axis component is positive.
/// Throws Error(InvalidRotation) if r is not a rotation.
Vec3 log_so3(const Mat3& r);

/// Right Jacobian of SO(3).
Mat3 right_jacobian(const Vec3& theta);

/// Inverse right Jacobian: d/d eps log(exp(theta) exp(eps)) at eps = 0.
Mat3 log_jacobian_inv(const Vec3& theta);

/// Exponential map of SE(3), tangent ordered (rho, phi).
Pose exp_se3(const Tangent& xi);

Pose pose_compose(const Pose& a, const Pose& b);
Pose pose_inverse(const Pose& a);
Vec3 act(const Pose& a, const Vec3& p);

/// Right retraction T * exp(xi).
Pose retract(const Pose& pose, const Tangent& xi);

/// Adjoint of a pose acting on (rho, phi) tangents: exp(Ad_T xi) = T exp(xi) T^-1.
Mat6 adjoint(const Pose& pose);

/// Projects the rotation back onto SO(3).
Mat3 orthonormalize(const Mat3& r);

/// Quaternion (w, x, y, z) conversions. The quaternion is normalized first.
Mat3 rotation_from_quaternion(const Eigen::Vector4d& wxyz);
Eigen::Vector4d quaternion_from_rotation(const Mat3& r);

}  // namespace physcon
