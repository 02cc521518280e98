#include "physcon/scene.hpp"

#include "physcon/costs.hpp"

namespace physcon {

Vec3 body_centroid(const Body& body) {
  Vec3 sum = Vec3::Zero();
  for (const auto& part : body.parts) sum += part.centroid();
  if (!body.parts.empty()) sum /= static_cast<double>(body.parts.size());
  return body.pose * sum;
}

std::vector<Vec3> evaluation_vertices(const MovableObject& object) {
  if (!object.surface_vertices.empty()) return object.surface_vertices;
  std::vector<Vec3> out;
  for (const auto& part : object.body.parts)
    out.insert(out.end(), part.vertices().begin(), part.vertices().end());
  return out;
}

void rebuild_priors(Scene& scene) {
  for (auto& m : scene.movables) m.prior = build_covariance(m.prior.estimate, m.covariance);
}

void reset_to_priors(Scene& scene) {
  for (auto& m : scene.movables) m.body.pose = m.prior.estimate;
}

}  // namespace physcon
