#include <doctest.h>

#include <algorithm>

#include "geom_data.hpp"
#include "oracles.hpp"
#include "physcon/error.hpp"
#include "physcon/scenegeom.hpp"

using namespace physcon;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::PreconditionViolated;
}

PointCloud cloud_of(std::vector<Vec3> pts) {
  PointCloud c;
  c.points = std::move(pts);
  c.confidence.assign(c.points.size(), 1.0);
  return c;
}

}  // namespace

TEST_CASE("scale from clean correspondences") {
  const auto pairs = geomdata::scale_pairs(1, 2.5, 1, 10, 0.0);
  const double s = estimate_scale_ransac(pairs);
  CHECK(std::abs(s - 2.5) < 1e-9);
}

TEST_CASE("scale with outliers") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto pairs = geomdata::scale_pairs(seed, 2.5, 3, 20, 0.2);
    ScaleRansacOptions o;
    o.seed = seed;
    const double s = estimate_scale_ransac(pairs, o);
    CHECK(std::abs(s / 2.5 - 1.0) < 0.005);
  }
}

TEST_CASE("scale is invariant to rigid motion of the cloud") {
  std::mt19937_64 rng(3);
  auto pairs = geomdata::scale_pairs(4, 1.7, 2, 15, 0.2);
  const double base = estimate_scale_ransac(pairs);
  const Pose t{oracle::random_rotation(rng), oracle::random_vec(rng, -2, 2)};
  for (auto& p : pairs) p.cloud_xyz = t * p.cloud_xyz;
  const double moved = estimate_scale_ransac(pairs);
  CHECK(std::abs(moved - base) < 1e-9 * base);
  CHECK(moved > 0);
}

TEST_CASE("scale errors") {
  const auto pairs = geomdata::scale_pairs(1, 2.0, 1, 10, 0.0);
  CHECK(kind_of([&] { estimate_scale_ransac(std::span(pairs).first(1)); }) == ErrorKind::InsufficientPairs);
  // Two pairs on different objects cannot be sampled together.
  std::vector<CorrespondencePair> split{pairs[0], pairs[1]};
  split[1].object_id = "other";
  CHECK(kind_of([&] { estimate_scale_ransac(split); }) == ErrorKind::InsufficientPairs);
  // Coincident cloud points only.
  std::vector<CorrespondencePair> same{pairs[0], pairs[0], pairs[0]};
  CHECK(kind_of([&] { estimate_scale_ransac(same); }) == ErrorKind::InsufficientPairs);
}

TEST_CASE("scale is deterministic across thread counts") {
  const auto pairs = geomdata::scale_pairs(9, 3.0, 4, 25, 0.3);
  ScaleRansacOptions a;
  a.seed = 5;
  ScaleRansacOptions b = a;
  b.threads = 4;
  CHECK(estimate_scale_ransac(pairs, a) == estimate_scale_ransac(pairs, b));
}

TEST_CASE("filter cloud") {
  PointCloud c;
  for (int i = 0; i < 200; ++i) {
    c.points.emplace_back(i, 0, 1);
    c.confidence.push_back(1.0);
  }
  const PointCloud same = filter_cloud(c);
  CHECK(same.points == c.points);

  c.labels.assign(200, PointLabel::Background);
  for (int i = 0; i < 200; i += 2) c.labels[i] = PointLabel::Object;
  const PointCloud half = filter_cloud(c);
  REQUIRE(half.size() == 100);
  for (std::size_t i = 0; i < half.size(); ++i) CHECK(half.points[i].x() == 2.0 * i + 1);

  c.in_bbox.assign(200, 1);
  for (int i = 0; i < 100; ++i) c.in_bbox[i] = 0;
  FilterOptions bbox;
  bbox.require_bbox = true;
  CHECK(filter_cloud(c, bbox).size() == 50);

  FilterOptions strict;
  strict.confidence_min = 1.5;
  CHECK(kind_of([&] { filter_cloud(c, strict); }) == ErrorKind::EmptyResult);

  c.confidence[3] = 2.0;
  CHECK(kind_of([&] { c.validate(); }) == ErrorKind::PreconditionViolated);
}

TEST_CASE("plane fit on a noisy table") {
  const auto pc = geomdata::plane_cloud(1, Vec3(0, 0, 0.8), Vec3(0, 0, 1), 2000, 1e-3, 0.3);
  const PlaneModel m = fit_plane_ransac(pc.points);
  CHECK(geomdata::angle_deg(m.normal, Vec3(0, 0, -1)) < 1.0);
  CHECK(std::abs(m.offset - (-0.8)) < 3e-3);
  // Camera origin on the positive side.
  CHECK(-m.offset > 0);
  CHECK(geomdata::angle_deg(gravity_from_plane(m), Vec3(0, 0, 1)) < 1.0);
}

TEST_CASE("plane fit on an exact plane") {
  const auto pc = geomdata::plane_cloud(2, Vec3(0.1, 0.2, 1.0), Vec3(0.2, -1.0, -0.4), 500, 0.0, 0.0);
  const PlaneModel m = fit_plane_ransac(pc.points);
  CHECK(m.inlier_rms <= 1e-9);
  CHECK(m.inlier_count == 500);
  CHECK((m.normal - pc.normal).norm() < 1e-9);
}

TEST_CASE("plane fit is equivariant under rotation") {
  std::mt19937_64 rng(5);
  const auto pc = geomdata::plane_cloud(3, Vec3(0, 0.1, 0.9), Vec3(0.1, -1, -0.3), 1000, 1e-3, 0.2);
  const PlaneModel base = fit_plane_ransac(pc.points);
  const Mat3 r = physcon::exp_so3(Vec3(0.1, -0.2, 0.15));
  std::vector<Vec3> rotated;
  for (const auto& p : pc.points) rotated.push_back(r * p);
  const PlaneModel turned = fit_plane_ransac(rotated);
  CHECK((turned.normal - r * base.normal).norm() < 1e-6);
  CHECK(std::abs(turned.offset - base.offset) < 1e-6);
}

TEST_CASE("plane fit errors") {
  const std::vector<Vec3> two{Vec3(0, 0, 1), Vec3(1, 0, 1)};
  CHECK(kind_of([&] { fit_plane_ransac(two); }) == ErrorKind::PreconditionViolated);
  std::mt19937_64 rng(6);
  std::vector<Vec3> noise;
  for (int i = 0; i < 1000; ++i) noise.push_back(oracle::random_vec(rng, -1, 1) + Vec3(0, 0, 3));
  PlaneRansacOptions o;
  o.inlier_threshold = 1e-4;
  CHECK(kind_of([&] { fit_plane_ransac(noise, o); }) == ErrorKind::NoConsensus);
}

TEST_CASE("plane fit on a point cloud honors labels") {
  auto pc = geomdata::plane_cloud(7, Vec3(0, 0, 1), Vec3(0, 0.3, -1), 800, 5e-4, 0.0);
  PointCloud c = cloud_of(pc.points);
  const PlaneModel m = fit_plane_ransac(c);
  CHECK(geomdata::angle_deg(m.normal, pc.normal) < 0.5);
}

TEST_CASE("gravity from plane") {
  PlaneModel p;
  p.normal = Vec3(0, 0, 1);
  CHECK(gravity_from_plane(p) == Vec3(0, 0, -1));
  p.normal = Vec3(0.3, -0.4, 0.5).normalized();
  CHECK(std::abs(gravity_from_plane(p).norm() - 1.0) < 1e-15);
  CHECK((gravity_from_plane(p) + p.normal).norm() < 1e-15);
}

TEST_CASE("plane to static object") {
  PlaneModel flat;
  flat.normal = Vec3(0, 0, 1);
  flat.offset = 0.0;
  const Body b = plane_to_static_object(flat, 2.0, 0.1);
  double top = -1e9;
  for (const auto& v : b.parts[0].vertices()) top = std::max(top, (b.pose * v).z());
  CHECK(std::abs(top) < 1e-9);

  PlaneModel tilted;
  tilted.normal = Vec3(0.2, -0.9, -0.3).normalized();
  tilted.center = Vec3(0.1, 0.3, 0.9);
  tilted.offset = tilted.normal.dot(tilted.center);
  const Body t = plane_to_static_object(tilted, 1.0, 0.05);
  CHECK((t.pose.rotation.col(2) - tilted.normal).norm() < 1e-9);
  double max_height = -1e9;
  for (const auto& v : t.parts[0].vertices())
    max_height = std::max(max_height, tilted.normal.dot(t.pose * v) - tilted.offset);
  CHECK(std::abs(max_height) < 1e-9);
  // The plane center lies on the top face.
  const Vec3 local = pose_inverse(t.pose) * tilted.center;
  CHECK(std::abs(local.z()) < 1e-9);
  CHECK(local.head<2>().norm() < 1e-9);
}
