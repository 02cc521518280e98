#include "physcon/metrics.hpp"

#include <cmath>
#include <limits>

#include "physcon/error.hpp"

namespace physcon {

namespace {

constexpr double kMinDepth = 1e-6;

bool is_identity(const Pose& p) {
  return (p.rotation - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12 &&
         p.translation.cwiseAbs().maxCoeff() < 1e-12;
}

Eigen::Vector2d project(const Vec3& p, const CameraIntrinsics& c) {
  if (!(p.z() > kMinDepth)) {
    throw Error(ErrorKind::BehindCamera, "projected point has depth " + std::to_string(p.z()));
  }
  return {c.fx * p.x() / p.z() + c.cx, c.fy * p.y() / p.z() + c.cy};
}

}  // namespace

std::vector<Pose> SymmetrySet::transforms() const {
  std::vector<Pose> base = discrete;
  bool has_identity = false;
  for (const auto& p : base) {
    if (!is_rotation(p.rotation, 1e-6)) {
      throw Error(ErrorKind::InvalidRotation, "symmetry transform is not a rigid transform");
    }
    has_identity = has_identity || is_identity(p);
  }
  if (!has_identity) base.insert(base.begin(), Pose::identity());
  if (!continuous || continuous->samples <= 1) return base;

  const Vec3 axis = continuous->axis.normalized();
  if (!axis.allFinite()) throw Error(ErrorKind::PreconditionViolated, "zero symmetry axis");
  std::vector<Pose> out;
  out.reserve(base.size() * static_cast<std::size_t>(continuous->samples));
  for (const auto& d : base) {
    for (int k = 0; k < continuous->samples; ++k) {
      const double angle = 2.0 * M_PI * k / continuous->samples;
      out.push_back(d * Pose{exp_so3(angle * axis), Vec3::Zero()});
    }
  }
  return out;
}

double eval_mssd(const Pose& estimate, const Pose& ground_truth, std::span<const Vec3> vertices,
                 const SymmetrySet& symmetries) {
  if (vertices.empty()) throw Error(ErrorKind::PreconditionViolated, "no vertices to evaluate");
  double best = std::numeric_limits<double>::infinity();
  for (const Pose& s : symmetries.transforms()) {
    const Pose gt = ground_truth * s;
    double worst = 0.0;
    for (const auto& v : vertices) {
      worst = std::max(worst, (estimate * v - gt * v).norm());
      if (worst >= best) break;
    }
    best = std::min(best, worst);
  }
  return best;
}

double eval_mspd(const Pose& estimate, const Pose& ground_truth, std::span<const Vec3> vertices,
                 const SymmetrySet& symmetries, const CameraIntrinsics& camera) {
  if (vertices.empty()) throw Error(ErrorKind::PreconditionViolated, "no vertices to evaluate");
  std::vector<Eigen::Vector2d> projected;
  projected.reserve(vertices.size());
  for (const auto& v : vertices) projected.push_back(project(estimate * v, camera));

  double best = std::numeric_limits<double>::infinity();
  for (const Pose& s : symmetries.transforms()) {
    const Pose gt = ground_truth * s;
    double worst = 0.0;
    for (std::size_t i = 0; i < vertices.size(); ++i)
      worst = std::max(worst, (projected[i] - project(gt * vertices[i], camera)).norm());
    best = std::min(best, worst);
  }
  return best;
}

}  // namespace physcon
