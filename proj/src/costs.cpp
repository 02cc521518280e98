#include "physcon/costs.hpp"

#include <limits>

#include "parallel.hpp"

namespace physcon {

namespace {

constexpr std::uint64_t kGravityStream = 0x6772617669747900ULL;

DistanceGradient part_gradient(const ConvexPart& a, const Pose& pose_a, const ConvexPart& b,
                               const Pose& pose_b, const DistanceResult& nominal,
                               const GradientOptions& options, std::uint64_t seed) {
  if (options.mode == GradientMode::Deterministic) {
    return witness_gradient(nominal, pose_a, pose_b);
  }
  return distance_gradient(a, pose_a, b, pose_b,
                           {options.noise_scale, options.sample_count, seed});
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

PairCost pairwise_collision_cost(const Body& a, const Body& b, double activation_margin,
                                 const GradientOptions& options, std::uint64_t pair_seed,
                                 bool with_gradient) {
  PairCost out;
  for (std::size_t ia = 0; ia < a.parts.size(); ++ia) {
    for (std::size_t ib = 0; ib < b.parts.size(); ++ib) {
      const ConvexPart& pa = a.parts[ia];
      const ConvexPart& pb = b.parts[ib];
      if (spheres_separated(pa, a.pose, pb, b.pose, activation_margin)) continue;
      const DistanceResult r = signed_distance(pa, a.pose, pb, b.pose);
      if (!(r.signed_distance < -kPenetrationFloor)) continue;
      ++out.colliding_pairs;
      out.cost -= r.signed_distance;
      if (with_gradient) {
        const DistanceGradient g =
            part_gradient(pa, a.pose, pb, b.pose, r, options,
                          mix_seed(pair_seed, ia * b.parts.size() + ib));
        out.grad_a -= g.wrt_a;
        out.grad_b -= g.wrt_b;
      }
    }
  }
  if (out.colliding_pairs > 0) {
    const double n = out.colliding_pairs;
    out.cost /= n;
    out.grad_a /= n;
    out.grad_b /= n;
  }
  return out;
}

SceneTerm collision_cost_and_grad(std::size_t i, const Scene& scene,
                                  const GradientOptions& options) {
  SceneTerm term;
  term.grads.assign(scene.movables.size(), Tangent::Zero());
  const Body& self = scene.movables[i].body;
  for (std::size_t j = 0; j < scene.movables.size(); ++j) {
    if (j == i) continue;
    const std::size_t lo = std::min(i, j), hi = std::max(i, j);
    const PairCost pc =
        pairwise_collision_cost(self, scene.movables[j].body, scene.activation_margin, options,
                                mix_seed(mix_seed(options.seed, lo), hi));
    term.cost += pc.cost;
    term.grads[i] += pc.grad_a;
    term.grads[j] += pc.grad_b;
  }
  for (std::size_t k = 0; k < scene.statics.size(); ++k) {
    const PairCost pc =
        pairwise_collision_cost(self, scene.statics[k], scene.activation_margin, options,
                                mix_seed(mix_seed(options.seed, i), scene.movables.size() + k));
    term.cost += pc.cost;
    term.grads[i] += pc.grad_a;
  }
  return term;
}

int support_indicator(std::size_t i, const Scene& scene, double contact_tolerance) {
  const Body& self = scene.movables[i].body;
  auto touches = [&](const Body& other) {
    for (const auto& pa : self.parts) {
      for (const auto& pb : other.parts) {
        if (spheres_separated(pa, self.pose, pb, other.pose, contact_tolerance)) continue;
        if (signed_distance(pa, self.pose, pb, other.pose).signed_distance < contact_tolerance)
          return true;
      }
    }
    return false;
  };
  for (std::size_t j = 0; j < scene.movables.size(); ++j)
    if (j != i && touches(scene.movables[j].body)) return 0;
  for (const auto& s : scene.statics)
    if (touches(s)) return 0;
  return 1;
}

std::optional<PartRef> gravity_target(std::size_t i, const Scene& scene, const Vec3& gravity) {
  const Vec3 origin = body_centroid(scene.movables[i].body);
  std::optional<PartRef> best;
  double best_t = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < scene.statics.size(); ++k) {
    const Body& s = scene.statics[k];
    for (std::size_t p = 0; p < s.parts.size(); ++p) {
      const auto hit = ray_cast(s.parts[p], s.pose, origin, gravity);
      if (hit && *hit < best_t) {
        best_t = *hit;
        best = PartRef{k, p};
      }
    }
  }
  return best;
}

IterationContext freeze_context(const Scene& scene) {
  IterationContext ctx;
  ctx.support.resize(scene.movables.size());
  ctx.target.resize(scene.movables.size());
  for (std::size_t i = 0; i < scene.movables.size(); ++i) {
    ctx.support[i] = support_indicator(i, scene, scene.contact_tolerance);
    ctx.target[i] = gravity_target(i, scene, scene.gravity);
  }
  return ctx;
}

GravityCost gravity_cost_and_grad(std::size_t i, const Scene& scene, int support,
                                  const std::optional<PartRef>& target,
                                  const GradientOptions& options) {
  GravityCost out;
  out.no_support_below = !target.has_value();
  if (support == 0 || !target) return out;
  const Body& self = scene.movables[i].body;
  if (self.parts.empty()) return out;
  const Body& base = scene.statics[target->body];
  const ConvexPart& below = base.parts[target->part];
  for (std::size_t k = 0; k < self.parts.size(); ++k) {
    const DistanceResult r = signed_distance(self.parts[k], self.pose, below, base.pose);
    if (!(r.signed_distance > 0.0)) continue;
    out.cost += r.signed_distance;
    const DistanceGradient g =
        part_gradient(self.parts[k], self.pose, below, base.pose, r, options,
                      mix_seed(mix_seed(options.seed, kGravityStream + i), k));
    out.grad += g.wrt_a;
  }
  const double count = static_cast<double>(self.parts.size());
  out.cost /= count;
  out.grad /= count;
  return out;
}

GravityCost gravity_cost_and_grad(std::size_t i, const Scene& scene,
                                  const GradientOptions& options) {
  return gravity_cost_and_grad(i, scene, support_indicator(i, scene, scene.contact_tolerance),
                               gravity_target(i, scene, scene.gravity), options);
}

TotalCost total_cost_and_grad(const Scene& scene, const IterationContext& context,
                              const GradientOptions& options, bool with_gradient) {
  const std::size_t n = scene.movables.size();
  struct PairJob {
    std::size_t a;
    std::size_t b;
    bool is_static;
  };
  std::vector<PairJob> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.push_back({i, j, false});
    for (std::size_t k = 0; k < scene.statics.size(); ++k) pairs.push_back({i, k, true});
  }

  std::vector<PairCost> pair_results(pairs.size());
  std::vector<PoseCost> pose_results(n);
  std::vector<GravityCost> gravity_results(n);
  const bool use_gravity = scene.weights.gravity != 0.0;
  const bool use_collision = scene.weights.collision != 0.0;

  detail::parallel_for(pairs.size() + n, options.threads, [&](std::size_t job) {
    if (job < pairs.size()) {
      if (!use_collision) return;
      const PairJob& p = pairs[job];
      const Body& a = scene.movables[p.a].body;
      const Body& b = p.is_static ? scene.statics[p.b] : scene.movables[p.b].body;
      const std::uint64_t seed =
          mix_seed(mix_seed(options.seed, p.a), p.is_static ? n + p.b : p.b);
      pair_results[job] =
          pairwise_collision_cost(a, b, scene.activation_margin, options, seed, with_gradient);
      return;
    }
    const std::size_t i = job - pairs.size();
    pose_results[i] = pose_cost_and_grad(scene.movables[i].body.pose, scene.movables[i].prior);
    if (use_gravity) {
      GradientOptions gravity_options = options;
      if (!with_gradient) gravity_options.mode = GradientMode::Deterministic;
      gravity_results[i] = gravity_cost_and_grad(i, scene, context.support[i], context.target[i],
                                                 gravity_options);
    } else {
      gravity_results[i].no_support_below = !context.target[i].has_value();
    }
  });

  TotalCost total;
  total.grads.assign(n, Tangent::Zero());
  total.per_object.resize(n);
  const CostWeights& w = scene.weights;
  for (std::size_t job = 0; job < pairs.size(); ++job) {
    const PairJob& p = pairs[job];
    const PairCost& pc = pair_results[job];
    if (p.is_static) {
      total.per_object[p.a].collision += pc.cost;
      total.grads[p.a] += w.collision * pc.grad_a;
    } else {
      // The pair appears in both C_a and C_b.
      total.per_object[p.a].collision += pc.cost;
      total.per_object[p.b].collision += pc.cost;
      total.grads[p.a] += 2.0 * w.collision * pc.grad_a;
      total.grads[p.b] += 2.0 * w.collision * pc.grad_b;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    ObjectCosts& oc = total.per_object[i];
    oc.pose = pose_results[i].cost;
    oc.gravity = gravity_results[i].cost;
    oc.no_support_below = gravity_results[i].no_support_below;
    total.grads[i] += w.pose * pose_results[i].grad + w.gravity * gravity_results[i].grad;
    total.cost += w.pose * oc.pose + w.collision * oc.collision + w.gravity * oc.gravity;
  }
  if (!with_gradient) total.grads.assign(n, Tangent::Zero());
  return total;
}

TotalCost total_cost_and_grad(const Scene& scene, const GradientOptions& options) {
  return total_cost_and_grad(scene, freeze_context(scene), options, true);
}

}  // namespace physcon
