#include <cmath>

#include "physcon/costs.hpp"
#include "physcon/error.hpp"

namespace physcon {

PosePrior build_covariance(const Pose& estimate, const CovarianceParams& params) {
  if (!(params.sigma_xy > 0.0 && params.sigma_z > 0.0 && params.sigma_theta > 0.0)) {
    throw Error(ErrorKind::PreconditionViolated, "covariance parameters must be positive");
  }
  const double dist = estimate.translation.norm();
  if (!(dist > 1e-6)) {
    throw Error(ErrorKind::DegenerateRay, "object center coincides with the camera origin");
  }

  // Frame C' whose z-axis points from the camera to the object.
  const Vec3 z = estimate.translation / dist;
  Vec3 helper = Vec3::UnitX();
  if (std::abs(z.x()) > std::abs(z.y())) helper = Vec3::UnitY();
  if (std::abs(z.dot(helper)) > std::abs(z.z())) helper = Vec3::UnitZ();
  const Vec3 x = helper.cross(z).normalized();
  const Vec3 y = z.cross(x);
  Mat3 ray_frame;
  ray_frame << x, y, z;

  const Vec3 trans_var(params.sigma_xy * params.sigma_xy, params.sigma_xy * params.sigma_xy,
                       params.sigma_z * params.sigma_z);
  const Vec3 rot_var = Vec3::Constant(params.sigma_theta * params.sigma_theta);

  PosePrior prior;
  prior.estimate = estimate;
  prior.covariance.setZero();
  prior.covariance.topLeftCorner<3, 3>() =
      ray_frame * trans_var.asDiagonal() * ray_frame.transpose();
  prior.covariance.bottomRightCorner<3, 3>() =
      estimate.rotation * rot_var.asDiagonal() * estimate.rotation.transpose();

  prior.precision.setZero();
  prior.precision.topLeftCorner<3, 3>() =
      ray_frame * trans_var.cwiseInverse().asDiagonal() * ray_frame.transpose();
  prior.precision.bottomRightCorner<3, 3>() =
      estimate.rotation * rot_var.cwiseInverse().asDiagonal() * estimate.rotation.transpose();
  return prior;
}

PoseCost pose_cost_and_grad(const Pose& current, const PosePrior& prior) {
  Vec6 residual;
  residual.head<3>() = current.translation - prior.estimate.translation;
  const Vec3 theta = log_so3(prior.estimate.rotation.transpose() * current.rotation);
  residual.tail<3>() = theta;

  const Vec6 weighted = prior.precision * residual;
  Mat6 jacobian = Mat6::Zero();
  jacobian.topLeftCorner<3, 3>() = current.rotation;
  jacobian.bottomRightCorner<3, 3>() = log_jacobian_inv(theta);

  PoseCost out;
  out.cost = 0.5 * residual.dot(weighted);
  out.grad = jacobian.transpose() * weighted;
  return out;
}

}  // namespace physcon
