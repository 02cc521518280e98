#include "physcon/optimizer.hpp"

#include <cmath>
#include <limits>

#include "physcon/error.hpp"

namespace physcon {

namespace {

double squared_norm(std::span<const Tangent> grads) {
  double sum = 0.0;
  for (const auto& g : grads) sum += g.squaredNorm();
  return sum;
}

double max_norm(std::span<const Tangent> grads) {
  double m = 0.0;
  for (const auto& g : grads) m = std::max(m, g.cwiseAbs().maxCoeff());
  return m;
}

bool all_finite(std::span<const Tangent> grads) {
  for (const auto& g : grads)
    if (!g.allFinite()) return false;
  return true;
}

}  // namespace

void validate(const OptimizerConfig& config) {
  if (!(config.step_size > 0.0) || config.max_iterations < 1 || !(config.cost_tolerance >= 0.0) ||
      !(config.gradient_tolerance >= 0.0) || !(config.smoothing_noise >= 0.0) ||
      config.smoothing_samples < 1 || config.threads < 1) {
    throw Error(ErrorKind::PreconditionViolated, "optimizer configuration out of range");
  }
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::GradientTolerance: return "gradient_tolerance";
    case Termination::CostTolerance: return "cost_tolerance";
    case Termination::MaxIterations: return "max_iterations";
    case Termination::NoProgress: return "no_progress";
    case Termination::NonFiniteCost: return "non_finite_cost";
  }
  return "unknown";
}

GradientOptions gradient_options(const OptimizerConfig& config, std::uint64_t stream) {
  GradientOptions o;
  o.mode = config.collision_gradient_mode;
  o.noise_scale = config.smoothing_noise;
  o.sample_count = config.smoothing_samples;
  o.seed = mix_seed(config.seed, stream);
  o.threads = config.threads;
  return o;
}

Scene step(const Scene& scene, std::span<const Tangent> grads, double step_size) {
  Scene out = scene;
  for (std::size_t i = 0; i < out.movables.size() && i < grads.size(); ++i) {
    if (grads[i].isZero(0.0)) continue;
    Pose& pose = out.movables[i].body.pose;
    pose = retract(pose, -step_size * grads[i]);
  }
  return out;
}

double scene_cost(const Scene& scene, const GradientOptions& options) {
  return total_cost_and_grad(scene, freeze_context(scene), options, false).cost;
}

LineSearchResult line_search(const Scene& scene, std::span<const Tangent> grads,
                             double current_cost, double initial_step,
                             const GradientOptions& options) {
  LineSearchResult result;
  result.cost = current_cost;
  const double slope = squared_norm(grads);
  if (slope == 0.0) {
    result.scene = scene;
    return result;
  }
  double s = initial_step;
  for (int attempt = 0; attempt <= kMaxHalvings; ++attempt, s *= 0.5) {
    Scene trial = step(scene, grads, s);
    const double cost = scene_cost(trial, options);
    if (!std::isfinite(cost)) {
      result.step = s;
      result.cost = cost;
      result.scene = scene;
      return result;
    }
    if (cost <= current_cost - kArmijo * s * slope) {
      result.step = s;
      result.cost = cost;
      result.scene = std::move(trial);
      return result;
    }
  }
  result.scene = scene;
  return result;
}

std::vector<ObjectOutcome> summarize_objects(const Scene& scene) {
  std::vector<ObjectOutcome> out;
  out.reserve(scene.movables.size());
  for (std::size_t i = 0; i < scene.movables.size(); ++i) {
    const Body& self = scene.movables[i].body;
    double min_d = std::numeric_limits<double>::infinity();
    auto visit = [&](const Body& other) {
      for (const auto& pa : self.parts)
        for (const auto& pb : other.parts)
          min_d = std::min(min_d, signed_distance(pa, self.pose, pb, other.pose).signed_distance);
    };
    for (std::size_t j = 0; j < scene.movables.size(); ++j)
      if (j != i) visit(scene.movables[j].body);
    for (const auto& s : scene.statics) visit(s);

    ObjectOutcome o;
    o.id = self.id;
    o.pose = self.pose;
    o.penetration = std::max(0.0, -min_d);
    o.support_gap = std::max(0.0, min_d);
    o.no_support_below = !gravity_target(i, scene, scene.gravity).has_value();
    out.push_back(std::move(o));
  }
  return out;
}

void apply_poses(Scene& scene, const RefinementReport& report) {
  for (std::size_t i = 0; i < scene.movables.size() && i < report.objects.size(); ++i)
    scene.movables[i].body.pose = report.objects[i].pose;
}

RefinementReport refine_scene(const Scene& input, const OptimizerConfig& config) {
  validate(config);
  Scene scene = input;
  RefinementReport report;

  double cost = scene_cost(scene, gradient_options(config));
  report.cost_trace.push_back(cost);
  report.termination = Termination::MaxIterations;
  const double initial_cost = cost;

  if (!std::isfinite(cost)) {
    report.termination = Termination::NonFiniteCost;
    report.warnings.push_back("initial cost is not finite");
  } else {
    for (int k = 0; k < config.max_iterations; ++k) {
      const IterationContext context = freeze_context(scene);
      GradientOptions options = gradient_options(config, 2 * static_cast<std::uint64_t>(k));
      TotalCost total = total_cost_and_grad(scene, context, options);
      if (!std::isfinite(total.cost) || !all_finite(total.grads)) {
        report.termination = Termination::NonFiniteCost;
        report.warnings.push_back("non-finite gradient at iteration " + std::to_string(k));
        break;
      }
      if (max_norm(total.grads) <= config.gradient_tolerance) {
        report.termination = Termination::GradientTolerance;
        break;
      }
      LineSearchResult ls = line_search(scene, total.grads, cost, config.step_size, options);
      if (ls.step == 0.0 && config.collision_gradient_mode == GradientMode::Smoothed) {
        // One fresh draw of the smoothing noise before giving up.
        options = gradient_options(config, 2 * static_cast<std::uint64_t>(k) + 1);
        total = total_cost_and_grad(scene, context, options);
        if (all_finite(total.grads))
          ls = line_search(scene, total.grads, cost, config.step_size, options);
      }
      if (ls.step == 0.0) {
        report.termination = Termination::NoProgress;
        break;
      }
      if (!std::isfinite(ls.cost) || ls.cost > 1e6 * std::max(initial_cost, 1e-12)) {
        report.termination = Termination::NonFiniteCost;
        report.warnings.push_back("cost diverged at iteration " + std::to_string(k));
        break;
      }
      const double decrease = cost - ls.cost;
      scene = std::move(ls.scene);
      cost = ls.cost;
      report.cost_trace.push_back(cost);
      ++report.iterations;
      if (decrease <= config.cost_tolerance) {
        report.termination = Termination::CostTolerance;
        break;
      }
    }
  }

  report.objects = summarize_objects(scene);
  for (const auto& o : report.objects)
    if (o.no_support_below) report.warnings.push_back("no static support below object " + o.id);
  return report;
}

}  // namespace physcon
