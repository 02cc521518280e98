#pragma once

// Internal helpers shared by GJK and EPA: support points of the Minkowski
// difference A - B in world coordinates.

#include "physcon/collision.hpp"

namespace physcon::detail {

struct SupportPoint {
  Vec3 w;  // a - b
  Vec3 a;
  Vec3 b;
};

class MinkowskiDifference {
 public:
  MinkowskiDifference(const ConvexPart& a, const Pose& pose_a, const ConvexPart& b,
                      const Pose& pose_b)
      : a_(a), b_(b), pose_a_(pose_a), pose_b_(pose_b) {}

  /// Support of A - B in world direction d.
  SupportPoint support(const Vec3& d) const {
    const Vec3 pa = pose_a_ * a_.support(pose_a_.rotation.transpose() * d);
    const Vec3 pb = pose_b_ * b_.support(-(pose_b_.rotation.transpose() * d));
    return {pa - pb, pa, pb};
  }

  Vec3 centroid_difference() const {
    return pose_a_ * a_.centroid() - pose_b_ * b_.centroid();
  }

  double scale() const { return a_.radius() + b_.radius(); }

 private:
  const ConvexPart& a_;
  const ConvexPart& b_;
  Pose pose_a_;
  Pose pose_b_;
};

}  // namespace physcon::detail
