#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "physcon/error.hpp"
#include "physcon/optimizer.hpp"
#include "physcon/synthetic.hpp"

using namespace physcon;

namespace {

const ConvexPart kBox = make_box(Vec3(0.1, 0.1, 0.1));

Scene single_box(double gap) {
  Scene s = fixture::table_scene();
  s.movables.push_back(fixture::movable("box", {kBox}, fixture::cube_on_table(0.1, gap)));
  return s;
}

// Camera looking straight down at a table one meter away: the loose depth
// direction is the vertical. The box prior sits `gap` above the table.
Scene overhead_box(double gap) {
  Scene s;
  s.gravity = Vec3::UnitZ();
  Body table;
  table.id = "table";
  table.parts.push_back(make_box(Vec3(2, 2, 0.1)));
  table.pose = Pose::from_translation(Vec3(0, 0, 1.05));
  s.statics.push_back(table);
  s.movables.push_back(fixture::movable("box", {kBox}, Pose::from_translation(Vec3(0, 0, 0.95 - gap))));
  return s;
}

bool orthonormal(const Mat3& r) { return (r * r.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() <= 1e-9; }

}  // namespace

TEST_CASE("validate rejects out-of-range configurations") {
  OptimizerConfig c;
  CHECK_NOTHROW(validate(c));
  c.step_size = 0;
  CHECK_THROWS_AS(validate(c), Error);
  c = {};
  c.max_iterations = 0;
  CHECK_THROWS_AS(validate(c), Error);
  c = {};
  c.cost_tolerance = -1;
  CHECK_THROWS_AS(validate(c), Error);
}

TEST_CASE("consistent scene stays put") {
  Scene s = single_box(0.0);
  const RefinementReport r = refine_scene(s, {});
  CHECK(r.iterations == 0);
  CHECK(r.termination == Termination::GradientTolerance);
  CHECK(r.cost_trace.size() == 1);
  CHECK(r.objects[0].pose.translation == s.movables[0].body.pose.translation);
  CHECK(r.objects[0].pose.rotation == s.movables[0].body.pose.rotation);
}

TEST_CASE("levitating box settles on the table") {
  const Scene s = overhead_box(0.05);
  const Pose start = s.movables[0].body.pose;
  const RefinementReport r = refine_scene(s, {});
  CHECK(r.objects[0].support_gap <= 1e-3);
  CHECK(r.objects[0].penetration <= 1e-3);
  CHECK((r.objects[0].pose.translation - start.translation).head<2>().norm() <= 2e-3);
}

TEST_CASE("penetrating box is pushed out of the table") {
  const Scene s = overhead_box(-0.02);
  const Pose start = s.movables[0].body.pose;
  const RefinementReport r = refine_scene(s, {});
  CHECK(r.objects[0].penetration <= 1e-3);
  CHECK(r.cost_trace.back() < r.cost_trace.front());
  CHECK((r.objects[0].pose.translation - start.translation).head<2>().norm() <= 2e-3);
}

TEST_CASE("step retraction") {
  std::mt19937_64 rng(1);
  Scene s = single_box(0.0);
  s.movables[0].body.pose.rotation = oracle::random_rotation(rng);
  const Pose p0 = s.movables[0].body.pose;

  const std::vector<Tangent> zero{Tangent::Zero()};
  const Scene same = step(s, zero, 0.1);
  CHECK(same.movables[0].body.pose.translation == p0.translation);
  CHECK(same.movables[0].body.pose.rotation == p0.rotation);
  CHECK(same.statics[0].pose.translation == s.statics[0].pose.translation);

  Tangent g = Tangent::Zero();
  g.head<3>() = Vec3(0.3, -0.2, 0.5);
  const Scene moved = step(s, std::vector<Tangent>{g}, 0.01);
  const Vec3 expected = p0.translation - 0.01 * p0.rotation * g.head<3>();
  CHECK((moved.movables[0].body.pose.translation - expected).norm() < 1e-12);
  CHECK((moved.movables[0].body.pose.rotation - p0.rotation).norm() < 1e-12);

  // Two half steps agree with one full step to second order.
  Tangent h;
  h << 0.3, -0.2, 0.5, 0.4, 0.1, -0.7;
  for (double eps : {1e-2, 1e-3}) {
    const Scene full = step(s, std::vector<Tangent>{h}, eps);
    const Scene half = step(step(s, std::vector<Tangent>{h}, eps / 2), std::vector<Tangent>{h}, eps / 2);
    const double diff = (full.movables[0].body.pose.translation - half.movables[0].body.pose.translation).norm() +
                        (full.movables[0].body.pose.rotation - half.movables[0].body.pose.rotation).norm();
    CHECK(diff < 10 * eps * eps);
  }
}

TEST_CASE("line search on a quadratic pose cost") {
  Scene s;
  const Pose est = Pose::from_translation(Vec3(0.1, 0.0, 1.0));
  s.movables.push_back(fixture::movable("q", {kBox}, est));
  s.weights = {1.0, 0.0, 0.0};
  s.movables[0].body.pose = Pose::from_translation(Vec3(0.105, 0.003, 1.02));
  const GradientOptions opts;
  const TotalCost t = total_cost_and_grad(s, opts);
  Eigen::SelfAdjointEigenSolver<Mat6> eig(s.movables[0].prior.precision);
  const double lambda_max = eig.eigenvalues().maxCoeff();

  const LineSearchResult ok = line_search(s, t.grads, t.cost, 1.0 / lambda_max, opts);
  CHECK(ok.step == 1.0 / lambda_max);
  CHECK(ok.cost < t.cost);

  const LineSearchResult big = line_search(s, t.grads, t.cost, 100.0 / lambda_max, opts);
  CHECK(big.step > 0.0);
  CHECK(big.step < 100.0 / lambda_max);
  CHECK(big.cost <= t.cost - kArmijo * big.step * t.grads[0].squaredNorm());

  const LineSearchResult none = line_search(s, std::vector<Tangent>{Tangent::Zero()}, t.cost, 1.0, opts);
  CHECK(none.step == 0.0);
}

TEST_CASE("refinement invariants on synthetic scenes") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SyntheticScene ss = generate_synthetic_scene(seed, 4);
    OptimizerConfig config;
    config.seed = seed;
    const RefinementReport r = refine_scene(ss.scene, config);
    CHECK(r.cost_trace.size() == static_cast<std::size_t>(r.iterations) + 1);
    for (std::size_t k = 1; k < r.cost_trace.size(); ++k) CHECK(r.cost_trace[k] <= r.cost_trace[k - 1]);
    for (const auto& o : r.objects) CHECK(orthonormal(o.pose.rotation));

    // Reported residuals are recomputable from the final poses.
    Scene final_scene = ss.scene;
    apply_poses(final_scene, r);
    const auto again = summarize_objects(final_scene);
    for (std::size_t i = 0; i < again.size(); ++i) {
      CHECK(again[i].penetration == r.objects[i].penetration);
      CHECK(again[i].support_gap == r.objects[i].support_gap);
    }
    CHECK(r.cost_trace.back() == scene_cost(final_scene, gradient_options(config)));

    const RefinementReport twice = refine_scene(ss.scene, config);
    CHECK(twice.cost_trace == r.cost_trace);
    for (std::size_t i = 0; i < r.objects.size(); ++i) {
      CHECK(twice.objects[i].pose.translation == r.objects[i].pose.translation);
      CHECK(twice.objects[i].pose.rotation == r.objects[i].pose.rotation);
    }
  }
}

TEST_CASE("smoothed refinement is deterministic across thread counts") {
  const SyntheticScene ss = generate_synthetic_scene(7, 5);
  OptimizerConfig config;
  config.collision_gradient_mode = GradientMode::Smoothed;
  config.seed = 42;
  config.max_iterations = 40;
  const RefinementReport a = refine_scene(ss.scene, config);
  config.threads = 3;
  const RefinementReport b = refine_scene(ss.scene, config);
  CHECK(a.cost_trace == b.cost_trace);
  CHECK(a.iterations == b.iterations);
  for (std::size_t i = 0; i < a.objects.size(); ++i) {
    CHECK(a.objects[i].pose.translation == b.objects[i].pose.translation);
    CHECK(a.objects[i].pose.rotation == b.objects[i].pose.rotation);
  }
}

TEST_CASE("objects with only a pose cost never move") {
  Scene s = single_box(0.0);
  // A second box far from everything, resting on the table.
  s.movables.push_back(fixture::movable("far", {kBox}, fixture::cube_on_table(0.1, 0.0, 0.6)));
  // The first box is pushed into the table so the scene does work.
  s.movables[0].body.pose = fixture::cube_on_table(0.1, -0.01);
  s.movables[0].prior = build_covariance(s.movables[0].body.pose, {});
  const RefinementReport r = refine_scene(s, {});
  CHECK(r.iterations > 0);
  CHECK(r.objects[1].pose.translation == s.movables[1].body.pose.translation);
  CHECK(r.objects[1].pose.rotation == s.movables[1].body.pose.rotation);
}

TEST_CASE("a box stacked on a movable box is not pulled through it") {
  Scene s = fixture::table_scene();
  const ConvexPart small = make_box(Vec3(0.06, 0.06, 0.06));
  s.movables.push_back(fixture::movable("bottom", {kBox}, fixture::cube_on_table(0.1, 0.0)));
  // Top box in contact with the bottom box, 0.5 mm into it.
  s.movables.push_back(fixture::movable("top", {small}, fixture::cube_on_table(0.06, 0.0995)));
  CHECK(support_indicator(1, s, s.contact_tolerance) == 0);
  const Vec3 start = s.movables[1].body.pose.translation;
  const RefinementReport r = refine_scene(s, {});
  CHECK(r.objects[1].penetration <= 1e-3);
  CHECK(r.objects[0].penetration <= 1e-3);
  CHECK((r.objects[1].pose.translation - start).norm() <= 2e-3);
}
