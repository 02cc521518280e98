#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "physcon/error.hpp"
#include "physcon/metrics.hpp"
#include "physcon/optimizer.hpp"
#include "physcon/synthetic.hpp"

using namespace physcon;

namespace {

std::vector<Vec3> box_vertices() { return oracle::box_corners(Vec3(0.1, 0.06, 0.04)); }

}  // namespace

TEST_CASE("MSSD examples") {
  std::mt19937_64 rng(1);
  const auto v = box_vertices();
  const Pose gt{oracle::random_rotation(rng), Vec3(0.1, 0.0, 0.9)};
  CHECK(eval_mssd(gt, gt, v) == 0.0);
  for (int i = 0; i < 20; ++i) {
    const Vec3 t = oracle::random_vec(rng, -0.05, 0.05);
    const Pose moved{gt.rotation, gt.translation + t};
    CHECK(std::abs(eval_mssd(moved, gt, v) - t.norm()) < 1e-15);
  }
}

TEST_CASE("MSSD under symmetries") {
  std::mt19937_64 rng(2);
  const auto v = box_vertices();
  SymmetrySet sym;
  sym.discrete.push_back(Pose{exp_so3(Vec3(0, 0, M_PI)), Vec3::Zero()});
  const Pose gt{oracle::random_rotation(rng), Vec3(0, 0.1, 1.0)};
  const Pose flipped{gt.rotation * exp_so3(Vec3(0, 0, M_PI)), gt.translation};
  CHECK(eval_mssd(flipped, gt, v, sym) < 1e-12);
  CHECK(eval_mssd(flipped, gt, v) > 0.05);

  // Pre-composing the ground truth with a listed symmetry changes nothing.
  for (int i = 0; i < 10; ++i) {
    const Pose est{oracle::random_rotation(rng), gt.translation + oracle::random_vec(rng, -0.02, 0.02)};
    const double base = eval_mssd(est, gt, v, sym);
    const Pose gt_sym{gt.rotation * sym.discrete[0].rotation, gt.translation};
    CHECK(std::abs(eval_mssd(est, gt_sym, v, sym) - base) < 1e-9);
  }

  SymmetrySet cont;
  cont.continuous = ContinuousSymmetry{Vec3::UnitZ(), 36};
  CHECK(cont.transforms().size() == 36);
  const auto cyl = oracle::box_corners(Vec3(0.05, 0.05, 0.1));
  const Pose spun{gt.rotation * exp_so3(Vec3(0, 0, 2 * M_PI / 36 * 5)), gt.translation};
  CHECK(eval_mssd(spun, gt, cyl, cont) < 1e-12);
}

TEST_CASE("MSPD examples") {
  const auto v = box_vertices();
  CameraIntrinsics cam;
  cam.fx = cam.fy = 500;
  cam.cx = 320;
  cam.cy = 240;
  const Pose gt = Pose::from_translation(Vec3(0, 0, 1));
  CHECK(eval_mspd(gt, gt, v, {}, cam) == 0.0);
  const Pose shifted = Pose::from_translation(Vec3(0.01, 0, 1));
  // Pinhole: every vertex moves by fx * 0.01 / z_vertex pixels.
  double expected = 0;
  for (const auto& p : v) expected = std::max(expected, 500 * 0.01 / (1 + p.z()));
  CHECK(std::abs(eval_mspd(shifted, gt, v, {}, cam) - expected) < 1e-9);
  CHECK(std::abs(expected - 5.0) < 0.2);

  const Pose behind = Pose::from_translation(Vec3(0, 0, -0.01));
  try {
    eval_mspd(behind, gt, v, {}, cam);
    FAIL("expected BehindCamera");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BehindCamera);
  }
}

TEST_CASE("synthetic scenes are deterministic") {
  const SyntheticScene a = generate_synthetic_scene(5, 6);
  const SyntheticScene b = generate_synthetic_scene(5, 6);
  REQUIRE(a.scene.movables.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(a.ground_truth[i].translation == b.ground_truth[i].translation);
    CHECK(a.ground_truth[i].rotation == b.ground_truth[i].rotation);
    CHECK(a.scene.movables[i].body.pose.translation == b.scene.movables[i].body.pose.translation);
    CHECK(a.scene.movables[i].body.parts[0].vertices() == b.scene.movables[i].body.parts[0].vertices());
  }
  const SyntheticScene c = generate_synthetic_scene(6, 6);
  CHECK(c.ground_truth[0].translation != a.ground_truth[0].translation);
}

TEST_CASE("ground truth has no overlaps and rests on the table") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SyntheticScene ss = generate_synthetic_scene(seed, 6);
    std::vector<Body> bodies;
    for (std::size_t i = 0; i < ss.ground_truth.size(); ++i) {
      Body b = ss.scene.movables[i].body;
      b.pose = ss.ground_truth[i];
      bodies.push_back(b);
    }
    for (std::size_t i = 0; i < bodies.size(); ++i) {
      for (std::size_t j = i + 1; j < bodies.size(); ++j)
        CHECK(signed_distance(bodies[i].parts[0], bodies[i].pose, bodies[j].parts[0], bodies[j].pose)
                  .signed_distance >= 0.0);
      const Body& table = ss.scene.statics[0];
      const double d =
          signed_distance(bodies[i].parts[0], bodies[i].pose, table.parts[0], table.pose).signed_distance;
      CHECK(d >= 0.0);
      CHECK(d < ss.scene.contact_tolerance);
    }
  }
}

TEST_CASE("zero noise makes refinement a no-op") {
  const NoiseModel none{0, 0, 0, 0};
  const SyntheticScene ss = generate_synthetic_scene(2, 4, none);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(ss.scene.movables[i].body.pose.translation == ss.ground_truth[i].translation);
    CHECK(ss.scene.movables[i].body.pose.rotation == ss.ground_truth[i].rotation);
  }
  const RefinementReport r = refine_scene(ss.scene, {});
  CHECK(r.iterations == 0);
  for (std::size_t i = 0; i < 4; ++i) CHECK(r.objects[i].pose.translation == ss.ground_truth[i].translation);
}

TEST_CASE("initial MSSD matches the sampled perturbation") {
  // Translation-only noise: MSSD is exactly the translation magnitude.
  const NoiseModel trans{0.05, 0.01, 0.0, 0.3};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SyntheticScene ss = generate_synthetic_scene(seed, 5, trans);
    for (std::size_t i = 0; i < ss.ground_truth.size(); ++i) {
      const auto& v = ss.scene.movables[i].body.parts[0].vertices();
      CHECK(std::abs(eval_mssd(ss.scene.movables[i].body.pose, ss.ground_truth[i], v) -
                     ss.perturbations[i].translation.norm()) < 1e-12);
    }
  }
  // Forced penetrations move objects away from the camera.
  int forced = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const SyntheticScene ss = generate_synthetic_scene(seed, 5);
    for (std::size_t i = 0; i < ss.ground_truth.size(); ++i) {
      ++total;
      if (!ss.perturbations[i].forced_penetration) continue;
      ++forced;
      const Vec3 ray = ss.ground_truth[i].translation.normalized();
      CHECK(ss.perturbations[i].translation.dot(ray) >= 0.01);
    }
  }
  CHECK(std::abs(forced / static_cast<double>(total) - 0.3) < 0.1);
}

TEST_CASE("placement failure") {
  SyntheticLayout tiny;
  tiny.placement_radius = 0.01;
  try {
    generate_synthetic_scene(1, 8, {}, tiny);
    FAIL("expected PlacementFailure");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PlacementFailure);
  }
}
