#include "physcon/synthetic.hpp"

#include <cmath>
#include <random>

#include "physcon/costs.hpp"
#include "physcon/error.hpp"
#include "physcon/scenegeom.hpp"

namespace physcon {

namespace {

// Resting objects sit this far above the table, well inside the contact
// tolerance, so that ground truth has no penetration at all.
constexpr double kRestingLift = 1e-7;

struct Sampler {
  std::mt19937_64 rng;
  std::normal_distribution<double> normal{0.0, 1.0};
  std::uniform_real_distribution<double> unit{0.0, 1.0};

  double gauss(double sigma) { return sigma * normal(rng); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(rng); }
};

struct Shape {
  ConvexPart part;
  double height = 0.0;
};

Shape random_shape(Sampler& s) {
  if (s.unit(s.rng) < 0.5) {
    const Vec3 size(s.uniform(0.04, 0.12), s.uniform(0.04, 0.12), s.uniform(0.04, 0.15));
    return {make_box(size), size.z()};
  }
  const double radius = s.uniform(0.025, 0.05);
  const double height = s.uniform(0.05, 0.15);
  return {make_cylinder(radius, height, 16), height};
}

double positive_or(double v, double fallback) { return v > 0.0 ? v : fallback; }

}  // namespace

SyntheticScene generate_synthetic_scene(std::uint64_t seed, int object_count,
                                        const NoiseModel& noise, const SyntheticLayout& layout) {
  if (object_count < 0 || noise.sigma_z < 0 || noise.sigma_xy < 0 || noise.sigma_theta < 0 ||
      noise.penetration_fraction < 0 || noise.penetration_fraction > 1) {
    throw Error(ErrorKind::PreconditionViolated, "invalid synthetic scene parameters");
  }
  Sampler s{std::mt19937_64(mix_seed(seed, 0x73796e7468ULL))};

  const double a = layout.camera_elevation;
  const Vec3 gravity(0.0, std::cos(a), std::sin(a));
  const Vec3 up = -gravity;
  const Vec3 table_center(0.0, 0.0, layout.camera_distance);
  const Vec3 x_axis = Vec3::UnitX();
  const Vec3 y_axis = up.cross(x_axis);
  Mat3 table_frame;
  table_frame << x_axis, y_axis, up;

  SyntheticScene out;
  Scene& scene = out.scene;
  scene.gravity = gravity;
  PlaneModel plane;
  plane.normal = up;
  plane.offset = up.dot(table_center);
  plane.center = table_center;
  scene.statics.push_back(plane_to_static_object(plane, 1.0, 0.05, "table"));

  const CovarianceParams cov{positive_or(noise.sigma_xy, 0.01), positive_or(noise.sigma_z, 0.05),
                             positive_or(noise.sigma_theta, 0.1)};

  std::vector<Body> placed;
  for (int i = 0; i < object_count; ++i) {
    const Shape shape = random_shape(s);
    Body body;
    body.id = "obj" + std::to_string(i);
    body.parts.push_back(shape.part);
    bool ok = false;
    for (int attempt = 0; attempt < kMaxPlacementAttempts && !ok; ++attempt) {
      const double r = layout.placement_radius * std::sqrt(s.unit(s.rng));
      const double phi = s.uniform(0.0, 2.0 * M_PI);
      const double yaw = s.uniform(0.0, 2.0 * M_PI);
      const Vec3 foot = table_center + r * std::cos(phi) * x_axis + r * std::sin(phi) * y_axis;
      body.pose.rotation = table_frame * exp_so3(yaw * Vec3::UnitZ());
      body.pose.translation = foot + (0.5 * shape.height + kRestingLift) * up;
      ok = true;
      for (const Body& other : placed) {
        if (spheres_separated(body.parts[0], body.pose, other.parts[0], other.pose,
                              layout.min_clearance))
          continue;
        const double d =
            signed_distance(body.parts[0], body.pose, other.parts[0], other.pose).signed_distance;
        if (d < layout.min_clearance) {
          ok = false;
          break;
        }
      }
    }
    if (!ok) {
      throw Error(ErrorKind::PlacementFailure,
                  "could not place " + body.id + " after " + std::to_string(kMaxPlacementAttempts) +
                      " attempts");
    }
    placed.push_back(body);

    // Image-like noise: large along the viewing ray, small across it.
    const Vec3 ray = body.pose.translation.normalized();
    const Vec3 helper = std::abs(ray.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    const Vec3 e1 = (helper - helper.dot(ray) * ray).normalized();
    const Vec3 e2 = ray.cross(e1);
    Perturbation p;
    p.forced_penetration = s.unit(s.rng) < noise.penetration_fraction;
    const double along = p.forced_penetration ? std::abs(s.gauss(noise.sigma_z)) + 0.01
                                              : s.gauss(noise.sigma_z);
    const double lateral1 = s.gauss(noise.sigma_xy);
    const double lateral2 = s.gauss(noise.sigma_xy);
    p.translation = along * ray + lateral1 * e1 + lateral2 * e2;
    p.rotation = Vec3(s.gauss(noise.sigma_theta), s.gauss(noise.sigma_theta),
                      s.gauss(noise.sigma_theta));

    MovableObject m;
    m.body = body;
    m.covariance = cov;
    m.prior.estimate.rotation = orthonormalize(body.pose.rotation * exp_so3(p.rotation));
    m.prior.estimate.translation = body.pose.translation + p.translation;
    if (p.rotation.isZero(0.0)) m.prior.estimate.rotation = body.pose.rotation;
    m.body.pose = m.prior.estimate;
    out.ground_truth.push_back(body.pose);
    out.perturbations.push_back(p);
    scene.movables.push_back(std::move(m));
  }
  rebuild_priors(scene);
  return out;
}

}  // namespace physcon
