#pragma once

// Symmetry-aware pose error metrics in 3D (meters) and in the image (pixels).

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "physcon/scene.hpp"

namespace physcon {

struct ContinuousSymmetry {
  Vec3 axis = Vec3::UnitZ();  // through the object origin
  int samples = 36;
};

struct SymmetrySet {
  std::vector<Pose> discrete;
  std::optional<ContinuousSymmetry> continuous;

  /// Every discrete transform composed with every sampled rotation about the
  /// continuous axis. The identity is always part of the result.
  std::vector<Pose> transforms() const;
};

/// min over S of max over v of |T_est v - T_gt S v|.
double eval_mssd(const Pose& estimate, const Pose& ground_truth, std::span<const Vec3> vertices,
                 const SymmetrySet& symmetries = {});

/// As eval_mssd on pinhole projections. Throws BehindCamera if a projected
/// point has z <= 1e-6.
double eval_mspd(const Pose& estimate, const Pose& ground_truth, std::span<const Vec3> vertices,
                 const SymmetrySet& symmetries, const CameraIntrinsics& camera);

struct EvalRecord {
  std::string object_id;
  double mssd = 0.0;
  double mspd = 0.0;
};

}  // namespace physcon
