#include <cmath>
#include <limits>
#include <random>

#include "physcon/collision.hpp"

namespace physcon {

DistanceGradient witness_gradient(const DistanceResult& result, const Pose& pose_a,
                                  const Pose& pose_b) {
  DistanceGradient g;
  g.signed_distance = result.signed_distance;
  const Vec3 axis_a = pose_a.rotation.transpose() * result.axis;
  const Vec3 lever_a = pose_a.rotation.transpose() * (result.witness_a - pose_a.translation);
  g.wrt_a.head<3>() = -axis_a;
  g.wrt_a.tail<3>() = -lever_a.cross(axis_a);
  const Vec3 axis_b = pose_b.rotation.transpose() * result.axis;
  const Vec3 lever_b = pose_b.rotation.transpose() * (result.witness_b - pose_b.translation);
  g.wrt_b.head<3>() = axis_b;
  g.wrt_b.tail<3>() = lever_b.cross(axis_b);
  return g;
}

std::vector<SmoothingSample> smoothing_samples(std::uint64_t seed, double noise_scale,
                                               int sample_count) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<SmoothingSample> samples(static_cast<std::size_t>(std::max(sample_count, 0)));
  for (auto& s : samples) {
    for (int i = 0; i < 6; ++i) s.on_a[i] = noise_scale * normal(rng);
    for (int i = 0; i < 6; ++i) s.on_b[i] = noise_scale * normal(rng);
  }
  return samples;
}

DistanceGradient distance_gradient(const ConvexPart& a, const Pose& pose_a, const ConvexPart& b,
                                   const Pose& pose_b, const SmoothingOptions& options) {
  const DistanceResult nominal = signed_distance(a, pose_a, b, pose_b);
  if (options.noise_scale == 0.0 || options.sample_count <= 1) {
    return witness_gradient(nominal, pose_a, pose_b);
  }
  DistanceGradient out;
  out.signed_distance = nominal.signed_distance;
  for (const auto& s : smoothing_samples(options.seed, options.noise_scale, options.sample_count)) {
    const Pose ea = exp_se3(s.on_a);
    const Pose eb = exp_se3(s.on_b);
    const Pose pa = pose_a * ea;
    const Pose pb = pose_b * eb;
    const DistanceGradient g = witness_gradient(signed_distance(a, pa, b, pb), pa, pb);
    // T exp(delta) E = T E exp(Ad_{E^-1} delta)
    out.wrt_a += adjoint(pose_inverse(ea)).transpose() * g.wrt_a;
    out.wrt_b += adjoint(pose_inverse(eb)).transpose() * g.wrt_b;
  }
  out.wrt_a /= options.sample_count;
  out.wrt_b /= options.sample_count;
  return out;
}

std::optional<double> ray_cast(const ConvexPart& part, const Pose& pose, const Vec3& origin,
                               const Vec3& direction) {
  const Vec3 o = pose.rotation.transpose() * (origin - pose.translation);
  const Vec3 d = pose.rotation.transpose() * direction;
  double enter = 0.0;
  double exit = std::numeric_limits<double>::infinity();
  for (const auto& plane : part.planes()) {
    const double denom = plane.normal.dot(d);
    const double num = plane.offset - plane.normal.dot(o);
    if (std::abs(denom) < 1e-15) {
      if (num < 0.0) return std::nullopt;
      continue;
    }
    const double s = num / denom;
    if (denom < 0.0) {
      enter = std::max(enter, s);
    } else {
      exit = std::min(exit, s);
    }
    if (enter > exit) return std::nullopt;
  }
  return enter;
}

}  // namespace physcon
