#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "parallel.hpp"
#include "physcon/costs.hpp"
#include "physcon/error.hpp"
#include "physcon/scenegeom.hpp"

namespace physcon {

namespace {

struct Hypothesis {
  bool valid = false;
  Vec3 normal = Vec3::Zero();
  double offset = 0.0;
  std::size_t support = 0;
};

std::size_t count_inliers(std::span<const Vec3> points, const Vec3& n, double d, double thr) {
  std::size_t c = 0;
  for (const auto& p : points)
    if (std::abs(n.dot(p) - d) <= thr) ++c;
  return c;
}

// Total least squares plane through the inliers of (n, d). Returns false if
// fewer than three inliers remain.
bool refit(std::span<const Vec3> points, double thr, Vec3& n, double& d) {
  Vec3 mean = Vec3::Zero();
  std::size_t count = 0;
  for (const auto& p : points) {
    if (std::abs(n.dot(p) - d) <= thr) {
      mean += p;
      ++count;
    }
  }
  if (count < 3) return false;
  mean /= static_cast<double>(count);
  Mat3 scatter = Mat3::Zero();
  for (const auto& p : points) {
    if (std::abs(n.dot(p) - d) <= thr) {
      const Vec3 q = p - mean;
      scatter += q * q.transpose();
    }
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(scatter);
  Vec3 fitted = eig.eigenvectors().col(0).normalized();
  if (fitted.dot(n) < 0.0) fitted = -fitted;
  n = fitted;
  d = n.dot(mean);
  return true;
}

}  // namespace

PlaneModel fit_plane_ransac(std::span<const Vec3> points, const PlaneRansacOptions& options) {
  if (points.size() < 3) {
    throw Error(ErrorKind::PreconditionViolated, "plane fitting needs at least three points");
  }
  if (options.iterations < 1 || !(options.inlier_threshold > 0.0)) {
    throw Error(ErrorKind::PreconditionViolated, "invalid plane RANSAC options");
  }
  const double thr = options.inlier_threshold;

  std::vector<Hypothesis> hypotheses(static_cast<std::size_t>(options.iterations));
  detail::parallel_for(hypotheses.size(), options.threads, [&](std::size_t k) {
    std::mt19937_64 rng(mix_seed(options.seed, k));
    std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);
    const std::size_t i0 = pick(rng);
    std::size_t i1 = pick(rng);
    std::size_t i2 = pick(rng);
    if (i0 == i1 || i0 == i2 || i1 == i2) return;
    const Vec3 e1 = points[i1] - points[i0];
    const Vec3 e2 = points[i2] - points[i0];
    const Vec3 n = e1.cross(e2);
    const double norm = n.norm();
    if (!(norm > 1e-12 * e1.norm() * e2.norm()) || norm == 0.0) return;
    Hypothesis h;
    h.valid = true;
    h.normal = n / norm;
    h.offset = h.normal.dot(points[i0]);
    h.support = count_inliers(points, h.normal, h.offset, thr);
    hypotheses[k] = h;
  });

  const Hypothesis* best = nullptr;
  for (const auto& h : hypotheses)
    if (h.valid && (best == nullptr || h.support > best->support)) best = &h;
  if (best == nullptr ||
      static_cast<double>(best->support) <
          options.min_inlier_fraction * static_cast<double>(points.size())) {
    throw Error(ErrorKind::NoConsensus, "no plane hypothesis reached the inlier fraction");
  }

  Vec3 n = best->normal;
  double d = best->offset;
  for (int pass = 0; pass < 2; ++pass) {
    Vec3 n_next = n;
    double d_next = d;
    if (!refit(points, thr, n_next, d_next)) break;
    n = n_next;
    d = d_next;
  }

  if (d > 0.0) {
    n = -n;
    d = -d;
  }

  PlaneModel model;
  model.normal = n;
  model.offset = d;
  double sq = 0.0;
  Vec3 center = Vec3::Zero();
  for (const auto& p : points) {
    const double r = n.dot(p) - d;
    if (std::abs(r) <= thr) {
      ++model.inlier_count;
      sq += r * r;
      center += p;
    }
  }
  if (model.inlier_count > 0) {
    model.inlier_rms = std::sqrt(sq / static_cast<double>(model.inlier_count));
    model.center = center / static_cast<double>(model.inlier_count);
  } else {
    model.center = d * n;
  }
  return model;
}

PlaneModel fit_plane_ransac(const PointCloud& cloud, const PlaneRansacOptions& options) {
  return fit_plane_ransac(std::span<const Vec3>(cloud.points), options);
}

Vec3 gravity_from_plane(const PlaneModel& plane) { return -plane.normal.normalized(); }

Body plane_to_static_object(const PlaneModel& plane, double extent, double thickness,
                            std::string id, std::optional<Vec3> anchor) {
  if (!(extent > 0.0) || !(thickness > 0.0)) {
    throw Error(ErrorKind::PreconditionViolated, "table extent and thickness must be positive");
  }
  const Vec3 n = plane.normal.normalized();
  const Vec3 a = anchor.value_or(plane.center);
  const Vec3 on_plane = a - (n.dot(a) - plane.offset) * n;

  // Local z is the plane normal.
  const Vec3 helper = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 x = (helper - helper.dot(n) * n).normalized();
  const Vec3 y = n.cross(x);
  Mat3 r;
  r << x, y, n;

  Body body;
  body.id = std::move(id);
  body.pose.rotation = r;
  body.pose.translation = on_plane;
  body.parts.push_back(make_box(Vec3(extent, extent, thickness), Vec3(0.0, 0.0, -0.5 * thickness)));
  return body;
}

}  // namespace physcon
