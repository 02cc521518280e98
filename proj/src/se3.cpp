#include "physcon/se3.hpp"

#include <cmath>

#include "physcon/error.hpp"

namespace physcon {

namespace {

constexpr double kSmallAngle = 1e-8;
constexpr double kSmallAngleJacobian = 1e-6;

}  // namespace

Mat3 skew(const Vec3& v) {
  Mat3 s;
  // clang-format off
  s <<     0, -v.z(),  v.y(),
       v.z(),      0, -v.x(),
      -v.y(),  v.x(),      0;
  // clang-format on
  return s;
}

bool is_rotation(const Mat3& r, double tolerance) {
  if (!r.allFinite()) return false;
  const double ortho = (r * r.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff();
  return ortho <= tolerance && std::abs(r.determinant() - 1.0) <= tolerance;
}

Mat3 exp_so3(const Vec3& omega) {
  const double theta = omega.norm();
  const Mat3 k = skew(omega);
  if (theta < kSmallAngle) {
    return Mat3::Identity() + k + 0.5 * k * k;
  }
  const double a = std::sin(theta) / theta;
  const double b = (1.0 - std::cos(theta)) / (theta * theta);
  return Mat3::Identity() + a * k + b * k * k;
}

Vec3 log_so3(const Mat3& r) {
  if (!is_rotation(r)) {
    throw Error(ErrorKind::InvalidRotation, "log_so3 requires an orthonormal matrix with det +1");
  }
  Eigen::Quaterniond q(r);
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  Vec3 v = q.vec();
  const double w = q.w();
  const double sin_half = v.norm();
  if (sin_half < kSmallAngle) {
    // angle/sin_half -> 2/w
    return (2.0 / w) * v;
  }
  if (w == 0.0) {
    // Exactly pi: both signs are valid, pick the one whose first nonzero
    // component is positive.
    for (int i = 0; i < 3; ++i) {
      if (v[i] != 0.0) {
        if (v[i] < 0.0) v = -v;
        break;
      }
    }
  }
  const double angle = 2.0 * std::atan2(sin_half, w);
  return (angle / sin_half) * v;
}

Mat3 right_jacobian(const Vec3& theta) {
  const double angle = theta.norm();
  const Mat3 k = skew(theta);
  if (angle < kSmallAngleJacobian) {
    return Mat3::Identity() - 0.5 * k + (1.0 / 6.0) * k * k;
  }
  const double a2 = angle * angle;
  return Mat3::Identity() - ((1.0 - std::cos(angle)) / a2) * k +
         ((angle - std::sin(angle)) / (a2 * angle)) * k * k;
}

Mat3 log_jacobian_inv(const Vec3& theta) {
  const double angle = theta.norm();
  const Mat3 k = skew(theta);
  if (angle < kSmallAngleJacobian) {
    return Mat3::Identity() + 0.5 * k + (1.0 / 12.0) * k * k;
  }
  const double c = 1.0 / (angle * angle) -
                   (1.0 + std::cos(angle)) / (2.0 * angle * std::sin(angle));
  return Mat3::Identity() + 0.5 * k + c * k * k;
}

Pose exp_se3(const Tangent& xi) {
  const Vec3 rho = xi.head<3>();
  const Vec3 phi = xi.tail<3>();
  // Left Jacobian of SO(3) couples the translation to the rotation.
  const Mat3 v = right_jacobian(-phi);
  return {exp_so3(phi), v * rho};
}

Pose pose_compose(const Pose& a, const Pose& b) { return a * b; }

Pose pose_inverse(const Pose& a) {
  const Mat3 rt = a.rotation.transpose();
  return {rt, -(rt * a.translation)};
}

Vec3 act(const Pose& a, const Vec3& p) { return a * p; }

Pose retract(const Pose& pose, const Tangent& xi) {
  Pose out = pose * exp_se3(xi);
  out.rotation = orthonormalize(out.rotation);
  return out;
}

Mat6 adjoint(const Pose& pose) {
  Mat6 ad = Mat6::Zero();
  ad.topLeftCorner<3, 3>() = pose.rotation;
  ad.topRightCorner<3, 3>() = skew(pose.translation) * pose.rotation;
  ad.bottomRightCorner<3, 3>() = pose.rotation;
  return ad;
}

Mat3 orthonormalize(const Mat3& r) {
  return Eigen::Quaterniond(r).normalized().toRotationMatrix();
}

Mat3 rotation_from_quaternion(const Eigen::Vector4d& wxyz) {
  Eigen::Quaterniond q(wxyz[0], wxyz[1], wxyz[2], wxyz[3]);
  q.normalize();
  return q.toRotationMatrix();
}

Eigen::Vector4d quaternion_from_rotation(const Mat3& r) {
  Eigen::Quaterniond q(r);
  q.normalize();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  return {q.w(), q.x(), q.y(), q.z()};
}

}  // namespace physcon
