#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "physcon/costs.hpp"
#include "physcon/scene.hpp"

namespace physcon {

struct OptimizerConfig {
  double step_size = 1e-3;
  int max_iterations = 300;
  /// Absolute decrease of the cost per iteration below which we stop.
  double cost_tolerance = 1e-8;
  /// Max-norm of the stacked gradient below which we stop.
  double gradient_tolerance = 1e-5;
  GradientMode collision_gradient_mode = GradientMode::Deterministic;
  double smoothing_noise = 1e-3;
  int smoothing_samples = 32;
  std::uint64_t seed = 0;
  int threads = 1;
};

/// Throws PreconditionViolated if the config is out of range.
void validate(const OptimizerConfig& config);

enum class Termination { GradientTolerance, CostTolerance, MaxIterations, NoProgress, NonFiniteCost };

std::string to_string(Termination t);

struct ObjectOutcome {
  std::string id;
  Pose pose;
  /// Deepest penetration against any other object, >= 0.
  double penetration = 0.0;
  /// Clearance to the nearest other object, >= 0 (0 when in contact).
  double support_gap = 0.0;
  bool no_support_below = false;
};

struct RefinementReport {
  std::vector<double> cost_trace;
  std::vector<ObjectOutcome> objects;
  int iterations = 0;
  Termination termination = Termination::MaxIterations;
  std::vector<std::string> warnings;
};

/// T <- T exp(-step * grad) for every movable; statics are untouched.
Scene step(const Scene& scene, std::span<const Tangent> grads, double step_size);

struct LineSearchResult {
  double step = 0.0;  // 0 when no trial satisfied the Armijo condition
  double cost = 0.0;
  Scene scene;
};

inline constexpr double kArmijo = 1e-4;
inline constexpr int kMaxHalvings = 8;

/// Backtracking along -grads. Each trial is scored with the full objective
/// (support indicators and gravity targets re-evaluated at the trial poses).
LineSearchResult line_search(const Scene& scene, std::span<const Tangent> grads,
                             double current_cost, double initial_step,
                             const GradientOptions& options);

/// Objective value with the context taken from the scene's current poses.
double scene_cost(const Scene& scene, const GradientOptions& options);

/// Jointly refines all movable poses starting from their current values.
RefinementReport refine_scene(const Scene& scene, const OptimizerConfig& config);

/// Penetration depth and clearance of every movable at its current pose.
std::vector<ObjectOutcome> summarize_objects(const Scene& scene);

/// Writes the report's final poses into the scene.
void apply_poses(Scene& scene, const RefinementReport& report);

GradientOptions gradient_options(const OptimizerConfig& config, std::uint64_t stream = 0);

}  // namespace physcon
