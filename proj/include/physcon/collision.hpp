#pragma once

// Convex geometry kernel: hulls, signed distance between convex parts
// (GJK for separation, EPA for penetration) and pose gradients of the
// distance.
//
// Direction convention: DistanceResult::axis points from witness_a toward
// witness_b when the parts are separated; when they overlap it is the
// direction in which b must be translated (by -signed_distance) to make the
// parts touch. In both regimes moving a along the axis decreases the signed
// distance and moving b along it increases it.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "physcon/se3.hpp"

namespace physcon {

/// Outward plane n.x = offset of a hull face, in the part's local frame.
struct FacePlane {
  Vec3 normal;
  double offset = 0.0;
};

/// Convex polytope given by its vertex set. Construct through convex_hull or
/// the primitive factories so that the invariants hold.
class ConvexPart {
 public:
  ConvexPart() = default;

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<FacePlane>& planes() const { return planes_; }
  const Vec3& centroid() const { return centroid_; }
  double radius() const { return radius_; }

  /// Vertex maximizing dot(v, direction), direction in the local frame.
  const Vec3& support(const Vec3& direction) const;

  /// Copy with all vertices scaled about the local origin.
  ConvexPart scaled(double factor) const;

 private:
  friend ConvexPart convex_hull(std::span<const Vec3> points);

  std::vector<Vec3> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<FacePlane> planes_;
  Vec3 centroid_ = Vec3::Zero();
  double radius_ = 0.0;
};

/// Minimal vertex set enclosing the points. Throws DegenerateInput for
/// fewer than four points or (near-)coplanar input.
ConvexPart convex_hull(std::span<const Vec3> points);

/// Axis-aligned box with the given full side lengths centered at `center`.
ConvexPart make_box(const Vec3& size, const Vec3& center = Vec3::Zero());
/// Prism approximating a cylinder along local z, centered at the origin.
ConvexPart make_cylinder(double radius, double height, int segments = 16);
/// Geodesic sphere; subdivisions = 2 gives 162 vertices.
ConvexPart make_icosphere(double radius, int subdivisions = 2);

struct DistanceResult {
  double signed_distance = 0.0;
  Vec3 witness_a = Vec3::Zero();
  Vec3 witness_b = Vec3::Zero();
  Vec3 axis = Vec3::UnitX();
};

struct GjkResult {
  bool overlap = false;
  DistanceResult distance;  // valid when !overlap
};

inline constexpr int kGjkMaxIterations = 128;
inline constexpr int kEpaMaxIterations = 256;

/// Separation distance; reports overlap (including touching) without a depth.
/// Throws IterationLimit on pathological geometry.
GjkResult gjk_distance(const ConvexPart& a, const Pose& pose_a, const ConvexPart& b,
                       const Pose& pose_b);

/// Penetration depth of overlapping parts; signed_distance = -depth.
DistanceResult epa_penetration(const ConvexPart& a, const Pose& pose_a, const ConvexPart& b,
                               const Pose& pose_b);

/// GJK followed by EPA when the parts overlap. Negative iff interiors overlap.
DistanceResult signed_distance(const ConvexPart& a, const Pose& pose_a, const ConvexPart& b,
                               const Pose& pose_b);

/// Conservative culling: true if the bounding spheres are farther apart
/// than `margin`, in which case the signed distance is > margin.
bool spheres_separated(const ConvexPart& a, const Pose& pose_a, const ConvexPart& b,
                       const Pose& pose_b, double margin);

struct DistanceGradient {
  double signed_distance = 0.0;  // unsmoothed distance at the given poses
  Tangent wrt_a = Tangent::Zero();
  Tangent wrt_b = Tangent::Zero();
};

/// Gradient of the signed distance given witness points, right-tangent
/// convention: d(T_a exp(eps)) ~ d + wrt_a . eps.
DistanceGradient witness_gradient(const DistanceResult& result, const Pose& pose_a,
                                  const Pose& pose_b);

/// One sample of the smoothing noise: right perturbations of pose a and b.
struct SmoothingSample {
  Tangent on_a;
  Tangent on_b;
};

/// Zero-mean Gaussian perturbations with the given standard deviation on
/// every tangent coordinate. Deterministic in `seed`.
std::vector<SmoothingSample> smoothing_samples(std::uint64_t seed, double noise_scale,
                                               int sample_count);

struct SmoothingOptions {
  double noise_scale = 1e-3;
  int sample_count = 32;
  std::uint64_t seed = 0;
};

/// With noise_scale == 0 and a single sample this is the deterministic
/// witness-point gradient. Otherwise it is the exact gradient of the sample
/// average of d(T_a exp(e_a), T_b exp(e_b)) over smoothing_samples(seed, ...).
DistanceGradient distance_gradient(const ConvexPart& a, const Pose& pose_a, const ConvexPart& b,
                                   const Pose& pose_b, const SmoothingOptions& options);

/// Parameter of the first intersection of the ray origin + s*dir (s >= 0)
/// with the part, 0 if the origin is inside.
std::optional<double> ray_cast(const ConvexPart& part, const Pose& pose, const Vec3& origin,
                               const Vec3& direction);

}  // namespace physcon
