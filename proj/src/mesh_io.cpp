#include <unistd.h>

#include <charconv>
#include <fstream>
#include <sstream>

#include "physcon/data_io.hpp"
#include "physcon/error.hpp"

namespace physcon {

namespace {

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

double parse_number(std::string_view token, const std::string& where) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || first == last) {
    throw Error(ErrorKind::ParseError, where + ": bad number '" + std::string(token) + "'");
  }
  return v;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

void append_fan(Mesh& mesh, const std::vector<int>& polygon, const std::string& where) {
  if (polygon.size() < 3) throw Error(ErrorKind::ParseError, where + ": face with fewer than 3 vertices");
  for (std::size_t k = 1; k + 1 < polygon.size(); ++k)
    mesh.triangles.push_back({polygon[0], polygon[k], polygon[k + 1]});
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::IoError, "failed reading " + path.string());
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw Error(ErrorKind::IoError, "failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw Error(ErrorKind::IoError, "cannot move " + tmp.string() + " to " + path.string() + ": " +
                                        ec.message());
  }
}

Mesh load_obj(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  Mesh mesh;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  std::vector<std::vector<int>> faces;
  std::vector<int> face_lines;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = path.filename().string() + ":" + std::to_string(line_no);
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      std::string x, y, z;
      ls >> x >> y >> z;
      if (z.empty()) throw Error(ErrorKind::ParseError, where + ": vertex needs three coordinates");
      mesh.vertices.emplace_back(parse_number(x, where), parse_number(y, where),
                                 parse_number(z, where));
    } else if (tag == "f") {
      std::vector<int> polygon;
      std::string token;
      while (ls >> token) {
        const std::string index = token.substr(0, token.find('/'));
        const double raw = parse_number(index, where);
        if (raw != static_cast<int>(raw) || raw == 0) {
          throw Error(ErrorKind::ParseError, where + ": invalid face index '" + token + "'");
        }
        // Negative indices count back from the vertices read so far.
        const int idx = raw > 0 ? static_cast<int>(raw) - 1
                                : static_cast<int>(mesh.vertices.size()) + static_cast<int>(raw);
        polygon.push_back(idx);
      }
      faces.push_back(std::move(polygon));
      face_lines.push_back(line_no);
    }
  }
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const std::string where = path.filename().string() + ":" + std::to_string(face_lines[f]);
    for (int idx : faces[f])
      if (idx < 0 || idx >= static_cast<int>(mesh.vertices.size()))
        throw Error(ErrorKind::ParseError, where + ": face index out of range");
    append_fan(mesh, faces[f], where);
  }
  if (mesh.vertices.empty()) {
    throw Error(ErrorKind::ParseError, path.filename().string() + ": no vertices");
  }
  return mesh;
}

Mesh load_ply_mesh(const std::filesystem::path& path) {
  const PlyFile ply = read_ply(path);
  const PlyElement* vertex = ply.find("vertex");
  const std::string name = path.filename().string();
  if (vertex == nullptr || !vertex->scalars.count("x") || !vertex->scalars.count("y") ||
      !vertex->scalars.count("z")) {
    throw Error(ErrorKind::ParseError, name + ": missing vertex x/y/z");
  }
  Mesh mesh;
  const auto& xs = vertex->scalars.at("x");
  const auto& ys = vertex->scalars.at("y");
  const auto& zs = vertex->scalars.at("z");
  for (std::size_t i = 0; i < vertex->count; ++i) mesh.vertices.emplace_back(xs[i], ys[i], zs[i]);
  if (const PlyElement* face = ply.find("face")) {
    const std::vector<std::vector<double>>* indices = nullptr;
    for (const char* key : {"vertex_indices", "vertex_index"})
      if (auto it = face->lists.find(key); it != face->lists.end()) indices = &it->second;
    if (indices == nullptr && face->count > 0) {
      throw Error(ErrorKind::ParseError, name + ": face element without vertex_indices");
    }
    for (std::size_t f = 0; indices != nullptr && f < indices->size(); ++f) {
      std::vector<int> polygon;
      for (double v : (*indices)[f]) {
        if (v < 0 || v >= static_cast<double>(mesh.vertices.size())) {
          throw Error(ErrorKind::ParseError, name + ": face " + std::to_string(f) +
                                                 " index out of range");
        }
        polygon.push_back(static_cast<int>(v));
      }
      append_fan(mesh, polygon, name + " face " + std::to_string(f));
    }
  }
  if (mesh.vertices.empty()) throw Error(ErrorKind::ParseError, name + ": no vertices");
  return mesh;
}

Mesh load_mesh(const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".obj") return load_obj(path);
  if (ext == ".ply") return load_ply_mesh(path);
  throw Error(ErrorKind::ParseError, "unsupported mesh format '" + ext + "' for " + path.string());
}

void write_obj(const std::filesystem::path& path, const Mesh& mesh) {
  std::string out;
  char buf[64];
  for (const auto& v : mesh.vertices) {
    out += "v";
    for (int k = 0; k < 3; ++k) {
      const auto r = std::to_chars(buf, buf + sizeof(buf), v[k]);
      out += ' ';
      out.append(buf, r.ptr);
    }
    out += '\n';
  }
  for (const auto& t : mesh.triangles)
    out += "f " + std::to_string(t[0] + 1) + " " + std::to_string(t[1] + 1) + " " +
           std::to_string(t[2] + 1) + "\n";
  write_file_atomic(path, out);
}

void write_ply_mesh(const std::filesystem::path& path, const Mesh& mesh, PlyFormat format) {
  PlyFile ply;
  PlyElement vertex;
  vertex.name = "vertex";
  vertex.count = mesh.vertices.size();
  for (int k = 0; k < 3; ++k) {
    const std::string axis(1, "xyz"[k]);
    vertex.properties.push_back({axis, PlyType::Float64, false, PlyType::UInt8});
    auto& col = vertex.scalars[axis];
    for (const auto& v : mesh.vertices) col.push_back(v[k]);
  }
  PlyElement face;
  face.name = "face";
  face.count = mesh.triangles.size();
  face.properties.push_back({"vertex_indices", PlyType::Int32, true, PlyType::UInt8});
  auto& rows = face.lists["vertex_indices"];
  for (const auto& t : mesh.triangles) rows.push_back({double(t[0]), double(t[1]), double(t[2])});
  ply.elements = {std::move(vertex), std::move(face)};
  write_ply(path, ply, format);
}

PointCloud load_point_cloud(const std::filesystem::path& path) {
  const PlyFile ply = read_ply(path);
  const PlyElement* vertex = ply.find("vertex");
  const std::string name = path.filename().string();
  if (vertex == nullptr || !vertex->scalars.count("x") || !vertex->scalars.count("y") ||
      !vertex->scalars.count("z")) {
    throw Error(ErrorKind::ParseError, name + ": point cloud needs vertex x/y/z");
  }
  PointCloud cloud;
  const auto& xs = vertex->scalars.at("x");
  const auto& ys = vertex->scalars.at("y");
  const auto& zs = vertex->scalars.at("z");
  const std::vector<double>* conf = nullptr;
  for (const char* key : {"confidence", "conf"})
    if (auto it = vertex->scalars.find(key); it != vertex->scalars.end()) conf = &it->second;
  const auto label = vertex->scalars.find("label");
  const auto bbox = vertex->scalars.find("in_bbox");
  for (std::size_t i = 0; i < vertex->count; ++i) {
    cloud.points.emplace_back(xs[i], ys[i], zs[i]);
    cloud.confidence.push_back(conf ? (*conf)[i] : 1.0);
    if (label != vertex->scalars.end()) {
      const double l = label->second[i];
      if (l != 0.0 && l != 1.0 && l != 2.0) {
        throw Error(ErrorKind::ParseError, name + ": vertex " + std::to_string(i) +
                                               " has unknown label " + std::to_string(l));
      }
      cloud.labels.push_back(static_cast<PointLabel>(static_cast<int>(l)));
    }
    if (bbox != vertex->scalars.end()) cloud.in_bbox.push_back(bbox->second[i] != 0.0 ? 1 : 0);
  }
  try {
    cloud.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::ParseError, name + ": " + e.what());
  }
  return cloud;
}

void write_point_cloud(const std::filesystem::path& path, const PointCloud& cloud,
                       PlyFormat format) {
  cloud.validate();
  PlyElement vertex;
  vertex.name = "vertex";
  vertex.count = cloud.size();
  for (int k = 0; k < 3; ++k) {
    const std::string axis(1, "xyz"[k]);
    vertex.properties.push_back({axis, PlyType::Float64, false, PlyType::UInt8});
    auto& col = vertex.scalars[axis];
    for (const auto& p : cloud.points) col.push_back(p[k]);
  }
  vertex.properties.push_back({"confidence", PlyType::Float32, false, PlyType::UInt8});
  vertex.scalars["confidence"] = cloud.confidence;
  if (!cloud.labels.empty()) {
    vertex.properties.push_back({"label", PlyType::UInt8, false, PlyType::UInt8});
    auto& col = vertex.scalars["label"];
    for (auto l : cloud.labels) col.push_back(static_cast<double>(l));
  }
  if (!cloud.in_bbox.empty()) {
    vertex.properties.push_back({"in_bbox", PlyType::UInt8, false, PlyType::UInt8});
    auto& col = vertex.scalars["in_bbox"];
    for (auto b : cloud.in_bbox) col.push_back(b);
  }
  PlyFile ply;
  ply.elements.push_back(std::move(vertex));
  write_ply(path, ply, format);
}

std::vector<CorrespondencePair> load_correspondences(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  std::vector<CorrespondencePair> out;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(trim(f));
    if (line.back() == ',') fields.emplace_back();
    const std::string where = path.filename().string() + ":" + std::to_string(line_no);
    if (fields.size() != 7) {
      throw Error(ErrorKind::ParseError, where + ": expected 7 columns, got " +
                                             std::to_string(fields.size()));
    }
    if (out.empty() && fields[0] == "object_id") continue;
    CorrespondencePair p;
    p.object_id = fields[0];
    for (int k = 0; k < 3; ++k) {
      p.cloud_xyz[k] = parse_number(fields[1 + k], where);
      p.metric_xyz[k] = parse_number(fields[4 + k], where);
    }
    out.push_back(std::move(p));
  }
  return out;
}

void write_correspondences(const std::filesystem::path& path,
                           const std::vector<CorrespondencePair>& pairs) {
  std::string out = "object_id,cloud_x,cloud_y,cloud_z,metric_x,metric_y,metric_z\n";
  char buf[64];
  for (const auto& p : pairs) {
    out += p.object_id;
    for (const Vec3* v : {&p.cloud_xyz, &p.metric_xyz}) {
      for (int k = 0; k < 3; ++k) {
        const auto r = std::to_chars(buf, buf + sizeof(buf), (*v)[k]);
        out += ',';
        out.append(buf, r.ptr);
      }
    }
    out += '\n';
  }
  write_file_atomic(path, out);
}

}  // namespace physcon
