#pragma once

#include <string>
#include <vector>

#include "physcon/collision.hpp"
#include "physcon/se3.hpp"

namespace physcon {

struct CameraIntrinsics {
  double fx = 600.0;
  double fy = 600.0;
  double cx = 320.0;
  double cy = 240.0;
};

/// Standard deviations of the image-based pose estimate. sigma_z is along the
/// camera ray through the object center, sigma_xy across it.
struct CovarianceParams {
  double sigma_xy = 0.01;
  double sigma_z = 0.05;
  double sigma_theta = 0.1;
};

/// Initial estimate with its 6x6 precision (inverse covariance) in the
/// camera frame, block-diagonal over (translation, rotation).
struct PosePrior {
  Pose estimate;
  Mat6 covariance = Mat6::Identity();
  Mat6 precision = Mat6::Identity();
};

struct CostWeights {
  double pose = 1.0;
  double collision = 100.0;
  double gravity = 100.0;
};

/// A rigid object made of convex parts expressed in its own frame.
struct Body {
  std::string id;
  std::vector<ConvexPart> parts;
  Pose pose;
};

struct MovableObject {
  Body body;
  CovarianceParams covariance;
  PosePrior prior;
  /// Surface vertices used for pose-error metrics; empty means "use the
  /// vertices of the convex parts".
  std::vector<Vec3> surface_vertices;
};

struct Scene {
  CameraIntrinsics camera;
  std::vector<MovableObject> movables;
  std::vector<Body> statics;
  /// Unit vector in the camera frame.
  Vec3 gravity = Vec3::UnitY();
  CostWeights weights;
  /// Pairs closer than this count as "in contact" for the support indicator.
  double contact_tolerance = 1e-3;
  /// Part pairs whose bounding spheres are farther apart than this are skipped.
  double activation_margin = 0.05;
};

/// World-frame mean of the part centroids.
Vec3 body_centroid(const Body& body);

/// Vertices used to evaluate pose errors for a movable.
std::vector<Vec3> evaluation_vertices(const MovableObject& object);

/// Recomputes every prior from its estimate and covariance parameters.
void rebuild_priors(Scene& scene);

/// Sets the current pose of every movable back to its prior estimate.
void reset_to_priors(Scene& scene);

}  // namespace physcon
