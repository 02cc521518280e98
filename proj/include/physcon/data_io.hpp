#pragma once

// File formats: PLY (ascii and binary little-endian), OBJ, point clouds and
// correspondence tables.

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "physcon/scenegeom.hpp"
#include "physcon/se3.hpp"

namespace physcon {

enum class PlyType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::Float64;
  bool is_list = false;
  PlyType count_type = PlyType::UInt8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
  /// One column per scalar property, one row per list property.
  std::map<std::string, std::vector<double>> scalars;
  std::map<std::string, std::vector<std::vector<double>>> lists;

  bool has(const std::string& property) const;
};

struct PlyFile {
  std::vector<PlyElement> elements;

  const PlyElement* find(const std::string& name) const;
};

enum class PlyFormat { Ascii, BinaryLittleEndian };

/// Throws ParseError on malformed or truncated input, IoError if unreadable.
PlyFile read_ply(const std::filesystem::path& path);
PlyFile parse_ply(const std::string& bytes);
void write_ply(const std::filesystem::path& path, const PlyFile& ply, PlyFormat format);

struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
};

/// OBJ or PLY by extension. Polygons are fan-triangulated.
Mesh load_mesh(const std::filesystem::path& path);
Mesh load_obj(const std::filesystem::path& path);
Mesh load_ply_mesh(const std::filesystem::path& path);
void write_obj(const std::filesystem::path& path, const Mesh& mesh);
void write_ply_mesh(const std::filesystem::path& path, const Mesh& mesh, PlyFormat format);

/// Vertex element with x, y, z and optional confidence (default 1), label
/// (0 unknown, 1 background, 2 object) and in_bbox properties.
PointCloud load_point_cloud(const std::filesystem::path& path);
void write_point_cloud(const std::filesystem::path& path, const PointCloud& cloud,
                       PlyFormat format = PlyFormat::BinaryLittleEndian);

/// CSV with header object_id,cloud_x,cloud_y,cloud_z,metric_x,metric_y,metric_z.
std::vector<CorrespondencePair> load_correspondences(const std::filesystem::path& path);
void write_correspondences(const std::filesystem::path& path,
                           const std::vector<CorrespondencePair>& pairs);

/// Writes to a sibling temporary file and renames it over `path`.
/// Throws IoError.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace physcon
