#pragma once

// JSON scene files, ground-truth pose files, symmetry files and reports.
//
// Poses are written as {"t": [x, y, z], "q": [w, x, y, z], "R": [9 values,
// row-major]}. On load "R" takes precedence when present so that written
// poses read back bit-exactly; otherwise the quaternion is used.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "physcon/metrics.hpp"
#include "physcon/optimizer.hpp"
#include "physcon/scene.hpp"

namespace physcon {

struct LoadedScene {
  Scene scene;
  OptimizerConfig optimizer;
  std::vector<std::string> warnings;
};

/// Throws ParseError (with the offending field or line), MissingMesh,
/// InvalidQuaternion or IoError. Relative mesh paths resolve against the
/// directory of the scene file.
LoadedScene load_scene(const std::filesystem::path& path);
LoadedScene parse_scene(const std::string& text, const std::filesystem::path& base_dir = {});

/// Part geometry is written inline as hull vertices, so the output does not
/// depend on the original mesh files.
std::string scene_to_json(const Scene& scene, const OptimizerConfig& optimizer = {});
void write_scene(const std::filesystem::path& path, const Scene& scene,
                 const OptimizerConfig& optimizer = {});

/// {"objects": [{"id": ..., "pose": {...}}, ...]}. Reports are accepted too.
std::map<std::string, Pose> load_poses(const std::filesystem::path& path);
void write_poses(const std::filesystem::path& path, const std::vector<std::string>& ids,
                 const std::vector<Pose>& poses);

/// {"objects": {"<id>": {"discrete": [pose, ...], "continuous": {"axis":
/// [x, y, z], "samples": n}}}}. Objects not listed only have the identity.
std::map<std::string, SymmetrySet> load_symmetries(const std::filesystem::path& path);

/// Machine-readable refinement outcome. Contains no timing information, so
/// identical runs produce identical files.
std::string report_to_json(const RefinementReport& report);
void write_report(const std::filesystem::path& path, const RefinementReport& report);

struct CollisionRow {
  std::string object_a;
  std::size_t part_a = 0;
  std::string object_b;
  std::size_t part_b = 0;
  double depth = 0.0;
};

/// Every movable-movable and movable-static part pair that penetrates,
/// deepest first; ties ordered by object and part indices.
std::vector<CollisionRow> collision_report(const Scene& scene);
std::string format_collision_table(const std::vector<CollisionRow>& rows);

std::string eval_to_csv(const std::vector<EvalRecord>& records);

}  // namespace physcon
