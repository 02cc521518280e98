#pragma once

// Cost terms minimized by the refiner and their gradients with respect to the
// movable poses (right-tangent convention, see se3.hpp):
//
//   C = sum_i ( P_i + zeta_C * C_i + zeta_G * G_i )
//
// P_i is the Mahalanobis pose residual against the image-based estimate, C_i
// sums hinge penetration costs of object i against every other object and
// G_i pulls a levitating object toward the static part below it unless the
// object is already in contact with something.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "physcon/scene.hpp"

namespace physcon {

/// Distances shallower than this are treated as touching, not penetrating.
inline constexpr double kPenetrationFloor = 1e-9;

PosePrior build_covariance(const Pose& estimate, const CovarianceParams& params);

struct PoseCost {
  double cost = 0.0;
  Tangent grad = Tangent::Zero();
};

/// 1/2 e^T H e with e = (t - t_est, log(R_est^T R)).
PoseCost pose_cost_and_grad(const Pose& current, const PosePrior& prior);

enum class GradientMode { Deterministic, Smoothed };

struct GradientOptions {
  GradientMode mode = GradientMode::Deterministic;
  double noise_scale = 1e-3;
  int sample_count = 32;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct PairCost {
  double cost = 0.0;
  int colliding_pairs = 0;
  Tangent grad_a = Tangent::Zero();
  Tangent grad_b = Tangent::Zero();
};

/// Hinge over all part pairs averaged by the number of colliding pairs.
/// `pair_seed` decorrelates the smoothing noise between object pairs.
PairCost pairwise_collision_cost(const Body& a, const Body& b, double activation_margin,
                                 const GradientOptions& options, std::uint64_t pair_seed = 0,
                                 bool with_gradient = true);

/// A term together with its gradient with respect to every movable pose.
struct SceneTerm {
  double cost = 0.0;
  std::vector<Tangent> grads;
};

/// C_i: sum of pairwise costs of movable i against all other objects.
SceneTerm collision_cost_and_grad(std::size_t i, const Scene& scene,
                                  const GradientOptions& options = {});

/// delta_i: 0 if any part of movable i is closer than `contact_tolerance` to
/// any part of another object, 1 otherwise.
int support_indicator(std::size_t i, const Scene& scene, double contact_tolerance);

struct PartRef {
  std::size_t body = 0;
  std::size_t part = 0;
};

/// Static part hit first by the ray from the centroid of movable i along
/// `gravity`, if any.
std::optional<PartRef> gravity_target(std::size_t i, const Scene& scene, const Vec3& gravity);

/// Per-iteration state held constant while differentiating: the support
/// indicators and the gravity targets.
struct IterationContext {
  std::vector<int> support;
  std::vector<std::optional<PartRef>> target;
};

IterationContext freeze_context(const Scene& scene);

struct GravityCost {
  double cost = 0.0;
  Tangent grad = Tangent::Zero();
  bool no_support_below = false;
};

/// delta/|A| * sum_k [d(A_k, B)]_+ with B = gravity target.
GravityCost gravity_cost_and_grad(std::size_t i, const Scene& scene, int support,
                                  const std::optional<PartRef>& target,
                                  const GradientOptions& options = {});

/// Convenience overload computing delta and the target from the scene.
GravityCost gravity_cost_and_grad(std::size_t i, const Scene& scene,
                                  const GradientOptions& options = {});

struct ObjectCosts {
  double pose = 0.0;
  double collision = 0.0;
  double gravity = 0.0;
  bool no_support_below = false;
};

struct TotalCost {
  double cost = 0.0;
  std::vector<Tangent> grads;
  std::vector<ObjectCosts> per_object;
};

/// Weighted total and per-movable gradients under a frozen context. Results
/// are reduced in a fixed order, independent of options.threads.
TotalCost total_cost_and_grad(const Scene& scene, const IterationContext& context,
                              const GradientOptions& options, bool with_gradient = true);

/// Total with the context recomputed from the scene's current poses.
TotalCost total_cost_and_grad(const Scene& scene, const GradientOptions& options = {});

/// Mixes integers into a seed (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace physcon
