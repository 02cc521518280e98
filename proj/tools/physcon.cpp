// Command-line front end. Exit codes: 0 success, 1 input error, 2 numerical
// failure.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <json.hpp>

#include "physcon/data_io.hpp"
#include "physcon/error.hpp"
#include "physcon/metrics.hpp"
#include "physcon/optimizer.hpp"
#include "physcon/scene_io.hpp"
#include "physcon/scenegeom.hpp"
#include "physcon/synthetic.hpp"

namespace {

using namespace physcon;

constexpr int kInputError = 1;
constexpr int kNumericalError = 2;

struct RefineArgs {
  std::string scene;
  std::string out;
  std::string scene_out;
  int max_iters = -1;
  double step = -1.0;
  std::uint64_t seed = 0;
  bool smoothed = false;
  int threads = 0;
};

int run_refine(const RefineArgs& args, bool seed_given) {
  LoadedScene loaded = load_scene(args.scene);
  for (const auto& w : loaded.warnings) std::cerr << "warning: " << w << "\n";
  OptimizerConfig config = loaded.optimizer;
  if (args.max_iters >= 0) config.max_iterations = args.max_iters;
  if (args.step > 0.0) config.step_size = args.step;
  if (seed_given) config.seed = args.seed;
  if (args.smoothed) config.collision_gradient_mode = GradientMode::Smoothed;
  if (args.threads > 0) config.threads = args.threads;

  const RefinementReport report = refine_scene(loaded.scene, config);
  write_report(args.out, report);
  if (!args.scene_out.empty()) {
    Scene refined = loaded.scene;
    apply_poses(refined, report);
    write_scene(args.scene_out, refined, config);
  }
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  std::cerr << "refine: " << report.iterations << " iterations, cost "
            << report.cost_trace.front() << " -> " << report.cost_trace.back() << " ("
            << to_string(report.termination) << ")\n";
  return report.termination == Termination::NonFiniteCost ? kNumericalError : 0;
}

struct GeomArgs {
  std::string cloud;
  std::string corr;
  std::string out;
  int scale_iters = 1000;
  int plane_iters = 2000;
  double inlier_mm = 5.0;
  double confidence_min = 0.0;
  std::uint64_t seed = 0;
  int threads = 1;
};

int run_scene_geom(const GeomArgs& args) {
  const PointCloud cloud = load_point_cloud(args.cloud);
  const std::vector<CorrespondencePair> pairs = load_correspondences(args.corr);

  ScaleRansacOptions scale_options;
  scale_options.iterations = args.scale_iters;
  scale_options.seed = args.seed;
  scale_options.threads = args.threads;
  const double scale = estimate_scale_ransac(pairs, scale_options);

  FilterOptions filter;
  filter.confidence_min = args.confidence_min;
  const PointCloud metric = filter_cloud(scale_cloud(cloud, scale), filter);

  PlaneRansacOptions plane_options;
  plane_options.iterations = args.plane_iters;
  plane_options.inlier_threshold = args.inlier_mm * 1e-3;
  plane_options.seed = args.seed;
  plane_options.threads = args.threads;
  const PlaneModel plane = fit_plane_ransac(metric, plane_options);

  auto vec = [](const Vec3& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); };
  const nlohmann::json doc = {
      {"scale", scale},
      {"plane", {{"normal", vec(plane.normal)}, {"offset", plane.offset}, {"center", vec(plane.center)}}},
      {"inlier_count", plane.inlier_count},
      {"inlier_rms", plane.inlier_rms},
      {"point_count", metric.size()},
      {"gravity", vec(gravity_from_plane(plane))}};
  write_file_atomic(args.out, doc.dump(1) + "\n");
  std::cerr << "scene-geom: scale " << scale << ", " << plane.inlier_count << "/" << metric.size()
            << " plane inliers\n";
  return 0;
}

struct EvalArgs {
  std::string scene;
  std::string gt;
  std::string symmetries;
  std::string report;
  std::string out;
};

int run_eval(const EvalArgs& args) {
  LoadedScene loaded = load_scene(args.scene);
  const auto gt = load_poses(args.gt);
  std::map<std::string, SymmetrySet> symmetries;
  if (!args.symmetries.empty()) symmetries = load_symmetries(args.symmetries);
  std::map<std::string, Pose> estimates;
  if (!args.report.empty()) estimates = load_poses(args.report);

  std::vector<EvalRecord> records;
  for (const auto& m : loaded.scene.movables) {
    const auto g = gt.find(m.body.id);
    if (g == gt.end()) {
      throw Error(ErrorKind::ParseError, "no ground-truth pose for object '" + m.body.id + "'");
    }
    Pose estimate = m.body.pose;
    if (!args.report.empty()) {
      const auto e = estimates.find(m.body.id);
      if (e == estimates.end()) {
        throw Error(ErrorKind::ParseError, "report has no pose for object '" + m.body.id + "'");
      }
      estimate = e->second;
    }
    const auto s = symmetries.find(m.body.id);
    const SymmetrySet sym = s == symmetries.end() ? SymmetrySet{} : s->second;
    const auto vertices = evaluation_vertices(m);
    records.push_back({m.body.id, eval_mssd(estimate, g->second, vertices, sym),
                       eval_mspd(estimate, g->second, vertices, sym, loaded.scene.camera)});
  }
  write_file_atomic(args.out, eval_to_csv(records));
  return 0;
}

struct SynthArgs {
  std::uint64_t seed = 0;
  int objects = 4;
  std::string out;
  std::string gt;
  NoiseModel noise;
};

int run_synth(const SynthArgs& args) {
  const SyntheticScene synth = generate_synthetic_scene(args.seed, args.objects, args.noise);
  std::vector<std::string> ids;
  for (const auto& m : synth.scene.movables) ids.push_back(m.body.id);
  OptimizerConfig config;
  config.seed = args.seed;
  write_scene(args.out, synth.scene, config);
  write_poses(args.gt, ids, synth.ground_truth);
  return 0;
}

int run_collisions(const std::string& scene_path) {
  const LoadedScene loaded = load_scene(scene_path);
  for (const auto& w : loaded.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << format_collision_table(collision_report(loaded.scene));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Physically consistent refinement of multi-object pose estimates"};
  app.require_subcommand(1);

  RefineArgs refine;
  auto* refine_cmd = app.add_subcommand("refine", "Refine the poses of a scene file");
  refine_cmd->add_option("--scene", refine.scene, "Scene JSON")->required()->check(CLI::ExistingFile);
  refine_cmd->add_option("--out", refine.out, "Report JSON")->required();
  refine_cmd->add_option("--scene-out", refine.scene_out, "Also write the refined scene");
  refine_cmd->add_option("--max-iters", refine.max_iters, "Iteration limit")->check(CLI::NonNegativeNumber);
  refine_cmd->add_option("--step", refine.step, "Initial step size")->check(CLI::PositiveNumber);
  auto* seed_opt = refine_cmd->add_option("--seed", refine.seed, "Seed for smoothing noise");
  refine_cmd->add_flag("--smoothed-collisions", refine.smoothed, "Randomized-smoothing collision gradients");
  refine_cmd->add_option("--threads", refine.threads, "Worker threads")->check(CLI::PositiveNumber);

  GeomArgs geom;
  auto* geom_cmd = app.add_subcommand("scene-geom", "Metric scale, table plane and gravity");
  geom_cmd->add_option("--cloud", geom.cloud, "Point cloud PLY")->required()->check(CLI::ExistingFile);
  geom_cmd->add_option("--corr", geom.corr, "Correspondence CSV")->required()->check(CLI::ExistingFile);
  geom_cmd->add_option("--out", geom.out, "Plane JSON")->required();
  geom_cmd->add_option("--scale-iters", geom.scale_iters, "Scale RANSAC iterations")->check(CLI::PositiveNumber);
  geom_cmd->add_option("--plane-iters", geom.plane_iters, "Plane RANSAC iterations")->check(CLI::PositiveNumber);
  geom_cmd->add_option("--inlier-mm", geom.inlier_mm, "Plane inlier threshold in mm")->check(CLI::PositiveNumber);
  geom_cmd->add_option("--confidence-min", geom.confidence_min, "Drop points below this confidence")
      ->check(CLI::Range(0.0, 1.0));
  geom_cmd->add_option("--seed", geom.seed, "RANSAC seed");
  geom_cmd->add_option("--threads", geom.threads, "Worker threads")->check(CLI::PositiveNumber);

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "MSSD / MSPD of the scene poses against ground truth");
  eval_cmd->add_option("--scene", eval.scene, "Scene JSON")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--gt", eval.gt, "Ground-truth poses JSON")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--symmetries", eval.symmetries, "Symmetry JSON")->check(CLI::ExistingFile);
  eval_cmd->add_option("--report", eval.report, "Take estimates from a refinement report")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--out", eval.out, "CSV output")->required();

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic tabletop scene");
  synth_cmd->add_option("--seed", synth.seed, "Seed")->required();
  synth_cmd->add_option("--objects", synth.objects, "Number of objects")->check(CLI::Range(1, 64));
  synth_cmd->add_option("--out", synth.out, "Scene JSON")->required();
  synth_cmd->add_option("--gt", synth.gt, "Ground-truth poses JSON")->required();
  synth_cmd->add_option("--sigma-z", synth.noise.sigma_z, "Noise along the camera ray (m)")
      ->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--sigma-xy", synth.noise.sigma_xy, "Noise across the ray (m)")
      ->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--sigma-theta", synth.noise.sigma_theta, "Rotation noise (rad)")
      ->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--penetration-fraction", synth.noise.penetration_fraction,
                        "Fraction of objects pushed into the table")
      ->check(CLI::Range(0.0, 1.0));

  std::string collisions_scene;
  auto* coll_cmd = app.add_subcommand("collisions", "Print penetrating part pairs");
  coll_cmd->add_option("--scene", collisions_scene, "Scene JSON")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  try {
    if (*refine_cmd) return run_refine(refine, seed_opt->count() > 0);
    if (*geom_cmd) return run_scene_geom(geom);
    if (*eval_cmd) return run_eval(eval);
    if (*synth_cmd) return run_synth(synth);
    if (*coll_cmd) return run_collisions(collisions_scene);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_numerical(e.kind()) ? kNumericalError : kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
