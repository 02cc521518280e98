#pragma once

// Tabletop scenes with known ground truth and image-like pose noise.

#include <cstdint>
#include <vector>

#include "physcon/scene.hpp"

namespace physcon {

struct NoiseModel {
  double sigma_z = 0.05;      // along the camera ray through the object
  double sigma_xy = 0.01;     // across the ray
  double sigma_theta = 0.1;   // rotation, per axis
  /// Fraction of objects pushed away from the camera into the table.
  double penetration_fraction = 0.3;
};

struct SyntheticLayout {
  double camera_distance = 0.9;    // to the table point on the optical axis
  double camera_elevation = 0.61;  // radians above the table plane
  double placement_radius = 0.16;  // objects are centered within this disc
  double min_clearance = 0.005;    // between ground-truth objects
};

struct Perturbation {
  Vec3 translation = Vec3::Zero();  // added to the ground-truth translation
  Vec3 rotation = Vec3::Zero();     // prior rotation = R_gt exp(rotation)
  bool forced_penetration = false;
};

struct SyntheticScene {
  /// Movables start at their perturbed priors.
  Scene scene;
  std::vector<Pose> ground_truth;
  std::vector<Perturbation> perturbations;
};

inline constexpr int kMaxPlacementAttempts = 1000;

/// Boxes and cylinder hulls resting on a table without ground-truth overlap.
/// Deterministic in `seed`. Throws PlacementFailure when an object cannot be
/// placed within kMaxPlacementAttempts.
SyntheticScene generate_synthetic_scene(std::uint64_t seed, int object_count,
                                        const NoiseModel& noise = {},
                                        const SyntheticLayout& layout = {});

}  // namespace physcon
