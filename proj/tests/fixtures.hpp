#pragma once

// Small hand-built scenes. Camera frame: y points down (gravity), the table
// top is the plane y = kTableTop one meter in front of the camera.

#include <string>

#include "physcon/costs.hpp"
#include "physcon/scene.hpp"

namespace fixture {

using namespace physcon;

inline constexpr double kTableTop = 0.1;
inline constexpr double kDepth = 1.0;

inline Body table(double extent = 2.0, double thickness = 0.1) {
  Body b;
  b.id = "table";
  b.parts.push_back(make_box(Vec3(extent, thickness, extent)));
  b.pose = Pose::from_translation(Vec3(0, kTableTop + 0.5 * thickness, kDepth));
  return b;
}

/// Movable whose prior estimate equals `pose`.
inline MovableObject movable(const std::string& id, std::vector<ConvexPart> parts, const Pose& pose,
                             const CovarianceParams& cov = {}) {
  MovableObject m;
  m.body.id = id;
  m.body.parts = std::move(parts);
  m.body.pose = pose;
  m.covariance = cov;
  m.prior = build_covariance(pose, cov);
  return m;
}

/// Cube of side `size` whose bottom face is `gap` above the table top
/// (negative gap: penetration), centered at lateral offset x.
inline Pose cube_on_table(double size, double gap, double x = 0.0) {
  return Pose::from_translation(Vec3(x, kTableTop - 0.5 * size - gap, kDepth));
}

inline Scene table_scene() {
  Scene s;
  s.gravity = Vec3::UnitY();
  s.statics.push_back(table());
  return s;
}

}  // namespace fixture
