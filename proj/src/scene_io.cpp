#include "physcon/scene_io.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <set>

#include "physcon/costs.hpp"
#include "physcon/data_io.hpp"
#include "physcon/error.hpp"
#include "physcon/scenegeom.hpp"

namespace physcon {

namespace {

using nlohmann::json;

constexpr double kQuaternionTolerance = 1e-6;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::ParseError, where + ": " + what);
}

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(where, "expected an object");
  for (const auto& [key, value] : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* a) { return key == a; });
    if (!known) fail(where, "unknown field '" + key + "'");
  }
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(where, "expected a finite number");
  return v;
}

double number_or(const json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? number(j.at(key), where + "." + key) : fallback;
}

double positive_or(const json& j, const char* key, double fallback, const std::string& where) {
  const double v = number_or(j, key, fallback, where);
  if (!(v > 0.0)) fail(where + "." + key, "must be positive");
  return v;
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<int>();
}

std::string text(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

std::vector<double> numbers(const json& j, std::size_t n, const std::string& where) {
  if (!j.is_array() || j.size() != n) fail(where, "expected an array of " + std::to_string(n) + " numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

Vec3 vec3(const json& j, const std::string& where) {
  const auto v = numbers(j, 3, where);
  return {v[0], v[1], v[2]};
}

json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json pose_to_json(const Pose& pose) {
  const Eigen::Vector4d q = quaternion_from_rotation(pose.rotation);
  json r = json::array();
  for (int row = 0; row < 3; ++row)
    for (int col = 0; col < 3; ++col) r.push_back(pose.rotation(row, col));
  return {{"t", to_json(pose.translation)}, {"q", json::array({q[0], q[1], q[2], q[3]})}, {"R", r}};
}

Pose parse_pose(const json& j, const std::string& where, std::vector<std::string>* warnings) {
  check_keys(j, where, {"t", "q", "R"});
  Pose pose;
  if (!j.contains("t")) fail(where, "missing translation 't'");
  pose.translation = vec3(j.at("t"), where + ".t");
  if (j.contains("R")) {
    const auto v = numbers(j.at("R"), 9, where + ".R");
    for (int row = 0; row < 3; ++row)
      for (int col = 0; col < 3; ++col) pose.rotation(row, col) = v[3 * row + col];
    if (!is_rotation(pose.rotation, 1e-9)) {
      throw Error(ErrorKind::InvalidRotation, where + ".R: not a rotation matrix");
    }
    return pose;
  }
  if (!j.contains("q")) fail(where, "missing rotation 'q' (w, x, y, z)");
  const auto v = numbers(j.at("q"), 4, where + ".q");
  const Eigen::Vector4d q(v[0], v[1], v[2], v[3]);
  const double norm = q.norm();
  if (!(norm > 1e-12)) throw Error(ErrorKind::InvalidQuaternion, where + ".q: zero quaternion");
  if (std::abs(norm - 1.0) > kQuaternionTolerance && warnings != nullptr) {
    warnings->push_back(where + ".q has norm " + std::to_string(norm) + "; renormalized");
  }
  pose.rotation = rotation_from_quaternion(q / norm);
  return pose;
}

CovarianceParams parse_covariance(const json& j, const CovarianceParams& base, const std::string& where) {
  check_keys(j, where, {"sigma_xy", "sigma_z", "sigma_theta"});
  CovarianceParams c = base;
  c.sigma_xy = positive_or(j, "sigma_xy", c.sigma_xy, where);
  c.sigma_z = positive_or(j, "sigma_z", c.sigma_z, where);
  c.sigma_theta = positive_or(j, "sigma_theta", c.sigma_theta, where);
  return c;
}

json covariance_to_json(const CovarianceParams& c) {
  return {{"sigma_xy", c.sigma_xy}, {"sigma_z", c.sigma_z}, {"sigma_theta", c.sigma_theta}};
}

PlaneModel parse_plane(const json& j, const std::string& where, double& extent, double& thickness) {
  check_keys(j, where, {"normal", "offset", "center", "extent", "thickness"});
  if (!j.contains("normal") || !j.contains("offset")) fail(where, "plane needs 'normal' and 'offset'");
  PlaneModel plane;
  plane.normal = vec3(j.at("normal"), where + ".normal");
  if (!(plane.normal.norm() > 1e-12)) fail(where + ".normal", "zero vector");
  const double scale = plane.normal.norm();
  plane.normal /= scale;
  plane.offset = number(j.at("offset"), where + ".offset") / scale;
  plane.center = j.contains("center") ? vec3(j.at("center"), where + ".center")
                                      : Vec3(plane.offset * plane.normal);
  extent = positive_or(j, "extent", 1.0, where);
  thickness = positive_or(j, "thickness", 0.05, where);
  return plane;
}

class GeometryLoader {
 public:
  explicit GeometryLoader(std::filesystem::path base) : base_(std::move(base)) {}

  const Mesh& mesh(const std::string& file, const std::string& where) {
    std::filesystem::path p(file);
    if (p.is_relative()) p = base_ / p;
    const std::string key = p.lexically_normal().string();
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    if (!std::filesystem::is_regular_file(p)) {
      throw Error(ErrorKind::MissingMesh, where + ": mesh file not found: " + p.string());
    }
    return cache_.emplace(key, load_mesh(p)).first->second;
  }

  ConvexPart hull(std::span<const Vec3> points, const std::string& where) {
    try {
      return convex_hull(points);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::DegenerateInput) fail(where, e.what());
      throw;
    }
  }

  // Parts of a movable or static entry; also fills the mesh surface if any.
  std::vector<ConvexPart> parts(const json& entry, const std::string& where,
                                std::vector<Vec3>* surface) {
    std::vector<ConvexPart> out;
    const Mesh* m = nullptr;
    if (entry.contains("mesh")) {
      m = &mesh(text(entry.at("mesh"), where + ".mesh"), where + ".mesh");
      if (surface != nullptr) *surface = m->vertices;
    }
    const bool hull_flag = entry.contains("hull") && entry.at("hull").is_boolean() &&
                           entry.at("hull").get<bool>();
    if (entry.contains("hull") && !entry.at("hull").is_boolean()) fail(where + ".hull", "expected a boolean");

    if (entry.contains("shape")) {
      out.push_back(shape(entry.at("shape"), where + ".shape"));
    } else if (entry.contains("parts") && !hull_flag) {
      const json& list = entry.at("parts");
      if (!list.is_array() || list.empty()) fail(where + ".parts", "expected a non-empty array");
      for (std::size_t k = 0; k < list.size(); ++k) {
        const std::string pw = where + ".parts[" + std::to_string(k) + "]";
        if (list[k].is_string()) {
          const Mesh& pm = mesh(list[k].get<std::string>(), pw);
          out.push_back(hull(pm.vertices, pw));
        } else {
          check_keys(list[k], pw, {"vertices"});
          if (!list[k].contains("vertices") || !list[k].at("vertices").is_array())
            fail(pw, "expected a mesh path or {\"vertices\": [...]}");
          std::vector<Vec3> pts;
          const json& vs = list[k].at("vertices");
          for (std::size_t i = 0; i < vs.size(); ++i)
            pts.push_back(vec3(vs[i], pw + ".vertices[" + std::to_string(i) + "]"));
          out.push_back(hull(pts, pw));
        }
      }
    } else if (m != nullptr) {
      out.push_back(hull(m->vertices, where + ".mesh"));
    } else {
      fail(where, "needs one of 'shape', 'parts' or 'mesh'");
    }
    return out;
  }

  ConvexPart shape(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("type")) fail(where, "expected an object with 'type'");
    const std::string type = text(j.at("type"), where + ".type");
    if (type == "box") {
      check_keys(j, where, {"type", "size", "center"});
      if (!j.contains("size")) fail(where, "box needs 'size'");
      const Vec3 size = vec3(j.at("size"), where + ".size");
      if (!(size.minCoeff() > 0.0)) fail(where + ".size", "must be positive");
      const Vec3 center = j.contains("center") ? vec3(j.at("center"), where + ".center") : Vec3::Zero();
      return make_box(size, center);
    }
    if (type == "cylinder") {
      check_keys(j, where, {"type", "radius", "height", "segments"});
      const double r = positive_or(j, "radius", 0.0, where);
      const double h = positive_or(j, "height", 0.0, where);
      const int segments = j.contains("segments") ? integer(j.at("segments"), where + ".segments") : 16;
      if (segments < 3) fail(where + ".segments", "must be at least 3");
      return make_cylinder(r, h, segments);
    }
    if (type == "sphere") {
      check_keys(j, where, {"type", "radius", "subdivisions"});
      const double r = positive_or(j, "radius", 0.0, where);
      const int sub = j.contains("subdivisions") ? integer(j.at("subdivisions"), where + ".subdivisions") : 2;
      if (sub < 0 || sub > 5) fail(where + ".subdivisions", "must be in [0, 5]");
      return make_icosphere(r, sub);
    }
    fail(where + ".type", "unknown shape '" + type + "'");
  }

 private:
  std::filesystem::path base_;
  std::map<std::string, Mesh> cache_;
};

json parts_to_json(const std::vector<ConvexPart>& parts) {
  json out = json::array();
  for (const auto& part : parts) {
    json verts = json::array();
    for (const auto& v : part.vertices()) verts.push_back(to_json(v));
    out.push_back({{"vertices", verts}});
  }
  return out;
}

bool same_pose(const Pose& a, const Pose& b) {
  return a.rotation == b.rotation && a.translation == b.translation;
}

void parse_optimizer(const json& j, OptimizerConfig& c) {
  const std::string where = "optimizer";
  check_keys(j, where, {"step_size", "max_iterations", "cost_tolerance", "gradient_tolerance",
                        "smoothed_collisions", "smoothing_noise", "smoothing_samples", "seed", "threads"});
  c.step_size = number_or(j, "step_size", c.step_size, where);
  if (j.contains("max_iterations")) c.max_iterations = integer(j.at("max_iterations"), where + ".max_iterations");
  c.cost_tolerance = number_or(j, "cost_tolerance", c.cost_tolerance, where);
  c.gradient_tolerance = number_or(j, "gradient_tolerance", c.gradient_tolerance, where);
  if (j.contains("smoothed_collisions")) {
    if (!j.at("smoothed_collisions").is_boolean()) fail(where + ".smoothed_collisions", "expected a boolean");
    c.collision_gradient_mode =
        j.at("smoothed_collisions").get<bool>() ? GradientMode::Smoothed : GradientMode::Deterministic;
  }
  c.smoothing_noise = number_or(j, "smoothing_noise", c.smoothing_noise, where);
  if (j.contains("smoothing_samples")) c.smoothing_samples = integer(j.at("smoothing_samples"), where + ".smoothing_samples");
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) fail(where + ".seed", "expected a non-negative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("threads")) c.threads = integer(j.at("threads"), where + ".threads");
  try {
    validate(c);
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

json optimizer_to_json(const OptimizerConfig& c) {
  return {{"step_size", c.step_size},
          {"max_iterations", c.max_iterations},
          {"cost_tolerance", c.cost_tolerance},
          {"gradient_tolerance", c.gradient_tolerance},
          {"smoothed_collisions", c.collision_gradient_mode == GradientMode::Smoothed},
          {"smoothing_noise", c.smoothing_noise},
          {"smoothing_samples", c.smoothing_samples},
          {"seed", c.seed},
          {"threads", c.threads}};
}

json parse_document(const std::string& text_in, const std::string& name) {
  try {
    return json::parse(text_in);
  } catch (const json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte, text_in.size());
    const std::size_t line = 1 + static_cast<std::size_t>(
                                     std::count(text_in.begin(), text_in.begin() + byte, '\n'));
    throw Error(ErrorKind::ParseError, name + " line " + std::to_string(line) + ": " + e.what());
  }
}

}  // namespace

LoadedScene parse_scene(const std::string& source, const std::filesystem::path& base_dir) {
  const json doc = parse_document(source, "scene");
  check_keys(doc, "scene", {"camera", "gravity", "plane", "weights", "covariance", "contact_tolerance",
                            "activation_margin", "optimizer", "movables", "statics"});
  LoadedScene out;
  Scene& scene = out.scene;
  GeometryLoader geometry(base_dir);

  if (doc.contains("camera")) {
    const json& c = doc.at("camera");
    check_keys(c, "camera", {"fx", "fy", "cx", "cy"});
    scene.camera.fx = positive_or(c, "fx", scene.camera.fx, "camera");
    scene.camera.fy = positive_or(c, "fy", scene.camera.fy, "camera");
    scene.camera.cx = number_or(c, "cx", scene.camera.cx, "camera");
    scene.camera.cy = number_or(c, "cy", scene.camera.cy, "camera");
  }
  if (doc.contains("weights")) {
    const json& w = doc.at("weights");
    check_keys(w, "weights", {"pose", "collision", "gravity"});
    scene.weights.pose = number_or(w, "pose", scene.weights.pose, "weights");
    scene.weights.collision = number_or(w, "collision", scene.weights.collision, "weights");
    scene.weights.gravity = number_or(w, "gravity", scene.weights.gravity, "weights");
    if (scene.weights.pose < 0 || scene.weights.collision < 0 || scene.weights.gravity < 0)
      fail("weights", "must be non-negative");
  }
  scene.contact_tolerance = positive_or(doc, "contact_tolerance", scene.contact_tolerance, "scene");
  scene.activation_margin = number_or(doc, "activation_margin", scene.activation_margin, "scene");
  if (scene.activation_margin < 0) fail("scene.activation_margin", "must be non-negative");
  CovarianceParams defaults;
  if (doc.contains("covariance")) defaults = parse_covariance(doc.at("covariance"), defaults, "covariance");
  if (doc.contains("optimizer")) parse_optimizer(doc.at("optimizer"), out.optimizer);

  std::optional<PlaneModel> plane;
  if (doc.contains("plane")) {
    double extent = 0, thickness = 0;
    plane = parse_plane(doc.at("plane"), "plane", extent, thickness);
  }

  std::set<std::string> ids;
  auto claim_id = [&](const json& entry, const std::string& where, const std::string& fallback) {
    std::string id = entry.contains("id") ? text(entry.at("id"), where + ".id") : fallback;
    if (!ids.insert(id).second) fail(where + ".id", "duplicate object id '" + id + "'");
    return id;
  };

  if (doc.contains("statics")) {
    const json& list = doc.at("statics");
    if (!list.is_array()) fail("statics", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string where = "statics[" + std::to_string(i) + "]";
      const json& e = list[i];
      check_keys(e, where, {"id", "mesh", "parts", "hull", "shape", "pose", "plane"});
      const std::string id = claim_id(e, where, "static" + std::to_string(i));
      if (e.contains("plane")) {
        double extent = 0, thickness = 0;
        const PlaneModel p = parse_plane(e.at("plane"), where + ".plane", extent, thickness);
        if (!plane) plane = p;
        scene.statics.push_back(plane_to_static_object(p, extent, thickness, id));
        continue;
      }
      Body body;
      body.id = id;
      body.parts = geometry.parts(e, where, nullptr);
      if (e.contains("pose")) body.pose = parse_pose(e.at("pose"), where + ".pose", &out.warnings);
      scene.statics.push_back(std::move(body));
    }
  }

  if (doc.contains("gravity")) {
    const json& g = doc.at("gravity");
    if (g.is_string()) {
      if (g.get<std::string>() != "from-plane") fail("gravity", "expected a vector or \"from-plane\"");
      if (!plane) fail("gravity", "\"from-plane\" requires a plane");
      scene.gravity = gravity_from_plane(*plane);
    } else {
      const Vec3 v = vec3(g, "gravity");
      if (!(v.norm() > 1e-12)) fail("gravity", "zero vector");
      scene.gravity = v.normalized();
    }
  }

  if (!doc.contains("movables") || !doc.at("movables").is_array()) fail("movables", "expected an array");
  const json& list = doc.at("movables");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string where = "movables[" + std::to_string(i) + "]";
    const json& e = list[i];
    check_keys(e, where, {"id", "mesh", "parts", "hull", "shape", "pose", "estimate", "covariance",
                          "surface_vertices"});
    MovableObject m;
    m.body.id = claim_id(e, where, "object" + std::to_string(i));
    m.body.parts = geometry.parts(e, where, &m.surface_vertices);
    if (e.contains("surface_vertices")) {
      const json& vs = e.at("surface_vertices");
      if (!vs.is_array()) fail(where + ".surface_vertices", "expected an array");
      m.surface_vertices.clear();
      for (std::size_t k = 0; k < vs.size(); ++k)
        m.surface_vertices.push_back(vec3(vs[k], where + ".surface_vertices[" + std::to_string(k) + "]"));
    }
    if (!e.contains("pose")) fail(where, "missing 'pose'");
    m.body.pose = parse_pose(e.at("pose"), where + ".pose", &out.warnings);
    m.prior.estimate = e.contains("estimate")
                           ? parse_pose(e.at("estimate"), where + ".estimate", &out.warnings)
                           : m.body.pose;
    m.covariance = e.contains("covariance")
                       ? parse_covariance(e.at("covariance"), defaults, where + ".covariance")
                       : defaults;
    scene.movables.push_back(std::move(m));
  }
  rebuild_priors(scene);
  return out;
}

LoadedScene load_scene(const std::filesystem::path& path) {
  return parse_scene(read_file(path), path.parent_path());
}

std::string scene_to_json(const Scene& scene, const OptimizerConfig& optimizer) {
  json doc;
  doc["camera"] = {{"fx", scene.camera.fx}, {"fy", scene.camera.fy}, {"cx", scene.camera.cx},
                   {"cy", scene.camera.cy}};
  doc["gravity"] = to_json(scene.gravity);
  doc["weights"] = {{"pose", scene.weights.pose},
                    {"collision", scene.weights.collision},
                    {"gravity", scene.weights.gravity}};
  doc["contact_tolerance"] = scene.contact_tolerance;
  doc["activation_margin"] = scene.activation_margin;
  doc["optimizer"] = optimizer_to_json(optimizer);
  json statics = json::array();
  for (const auto& s : scene.statics)
    statics.push_back({{"id", s.id}, {"parts", parts_to_json(s.parts)}, {"pose", pose_to_json(s.pose)}});
  doc["statics"] = statics;
  json movables = json::array();
  for (const auto& m : scene.movables) {
    json e = {{"id", m.body.id},
              {"parts", parts_to_json(m.body.parts)},
              {"pose", pose_to_json(m.body.pose)},
              {"covariance", covariance_to_json(m.covariance)}};
    if (!same_pose(m.prior.estimate, m.body.pose)) e["estimate"] = pose_to_json(m.prior.estimate);
    if (!m.surface_vertices.empty()) {
      json vs = json::array();
      for (const auto& v : m.surface_vertices) vs.push_back(to_json(v));
      e["surface_vertices"] = vs;
    }
    movables.push_back(e);
  }
  doc["movables"] = movables;
  return doc.dump(1) + "\n";
}

void write_scene(const std::filesystem::path& path, const Scene& scene,
                 const OptimizerConfig& optimizer) {
  write_file_atomic(path, scene_to_json(scene, optimizer));
}

std::map<std::string, Pose> load_poses(const std::filesystem::path& path) {
  const json doc = parse_document(read_file(path), path.filename().string());
  if (!doc.is_object() || !doc.contains("objects") || !doc.at("objects").is_array())
    fail(path.filename().string(), "expected {\"objects\": [...]}");
  std::map<std::string, Pose> out;
  const json& list = doc.at("objects");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string where = "objects[" + std::to_string(i) + "]";
    if (!list[i].is_object() || !list[i].contains("id") || !list[i].contains("pose"))
      fail(where, "expected an object with 'id' and 'pose'");
    const std::string id = text(list[i].at("id"), where + ".id");
    if (!out.emplace(id, parse_pose(list[i].at("pose"), where + ".pose", nullptr)).second)
      fail(where + ".id", "duplicate id '" + id + "'");
  }
  return out;
}

void write_poses(const std::filesystem::path& path, const std::vector<std::string>& ids,
                 const std::vector<Pose>& poses) {
  if (ids.size() != poses.size()) throw Error(ErrorKind::PreconditionViolated, "ids and poses differ in length");
  json list = json::array();
  for (std::size_t i = 0; i < ids.size(); ++i) list.push_back({{"id", ids[i]}, {"pose", pose_to_json(poses[i])}});
  write_file_atomic(path, json{{"objects", list}}.dump(1) + "\n");
}

std::map<std::string, SymmetrySet> load_symmetries(const std::filesystem::path& path) {
  const json doc = parse_document(read_file(path), path.filename().string());
  if (!doc.is_object() || !doc.contains("objects") || !doc.at("objects").is_object())
    fail(path.filename().string(), "expected {\"objects\": {...}}");
  std::map<std::string, SymmetrySet> out;
  for (const auto& [id, entry] : doc.at("objects").items()) {
    const std::string where = "objects." + id;
    check_keys(entry, where, {"discrete", "continuous"});
    SymmetrySet set;
    if (entry.contains("discrete")) {
      const json& list = entry.at("discrete");
      if (!list.is_array()) fail(where + ".discrete", "expected an array");
      for (std::size_t i = 0; i < list.size(); ++i)
        set.discrete.push_back(parse_pose(list[i], where + ".discrete[" + std::to_string(i) + "]", nullptr));
    }
    if (entry.contains("continuous")) {
      const json& c = entry.at("continuous");
      check_keys(c, where + ".continuous", {"axis", "samples"});
      ContinuousSymmetry cs;
      if (c.contains("axis")) cs.axis = vec3(c.at("axis"), where + ".continuous.axis");
      if (!(cs.axis.norm() > 1e-12)) fail(where + ".continuous.axis", "zero vector");
      if (c.contains("samples")) cs.samples = integer(c.at("samples"), where + ".continuous.samples");
      if (cs.samples < 1) fail(where + ".continuous.samples", "must be positive");
      set.continuous = cs;
    }
    out.emplace(id, std::move(set));
  }
  return out;
}

std::string report_to_json(const RefinementReport& report) {
  json objects = json::array();
  for (const auto& o : report.objects) {
    objects.push_back({{"id", o.id},
                       {"pose", pose_to_json(o.pose)},
                       {"penetration", o.penetration},
                       {"support_gap", o.support_gap},
                       {"no_support_below", o.no_support_below}});
  }
  json doc = {{"termination", to_string(report.termination)},
              {"iterations", report.iterations},
              {"initial_cost", report.cost_trace.empty() ? 0.0 : report.cost_trace.front()},
              {"final_cost", report.cost_trace.empty() ? 0.0 : report.cost_trace.back()},
              {"cost_trace", report.cost_trace},
              {"objects", objects},
              {"warnings", report.warnings}};
  return doc.dump(1) + "\n";
}

void write_report(const std::filesystem::path& path, const RefinementReport& report) {
  write_file_atomic(path, report_to_json(report));
}

std::vector<CollisionRow> collision_report(const Scene& scene) {
  std::vector<CollisionRow> rows;
  auto check = [&](const Body& a, const Body& b) {
    for (std::size_t pa = 0; pa < a.parts.size(); ++pa) {
      for (std::size_t pb = 0; pb < b.parts.size(); ++pb) {
        if (spheres_separated(a.parts[pa], a.pose, b.parts[pb], b.pose, 0.0)) continue;
        const double d = signed_distance(a.parts[pa], a.pose, b.parts[pb], b.pose).signed_distance;
        if (d < -kPenetrationFloor) rows.push_back({a.id, pa, b.id, pb, -d});
      }
    }
  };
  for (std::size_t i = 0; i < scene.movables.size(); ++i) {
    for (std::size_t j = i + 1; j < scene.movables.size(); ++j)
      check(scene.movables[i].body, scene.movables[j].body);
    for (const auto& s : scene.statics) check(scene.movables[i].body, s);
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const CollisionRow& x, const CollisionRow& y) { return x.depth > y.depth; });
  return rows;
}

std::string format_collision_table(const std::vector<CollisionRow>& rows) {
  if (rows.empty()) return "no penetrating part pairs\n";
  std::string out = "object_a\tpart_a\tobject_b\tpart_b\tdepth_m\n";
  char buf[32];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.6f", r.depth);
    out += r.object_a + "\t" + std::to_string(r.part_a) + "\t" + r.object_b + "\t" +
           std::to_string(r.part_b) + "\t" + buf + "\n";
  }
  return out;
}

std::string eval_to_csv(const std::vector<EvalRecord>& records) {
  std::string out = "object_id,mssd_m,mspd_px\n";
  for (const auto& r : records) {
    out += r.object_id + "," + json(r.mssd).dump() + "," + json(r.mspd).dump() + "\n";
  }
  return out;
}

}  // namespace physcon
