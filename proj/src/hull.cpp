#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include <Eigen/SVD>

#include "physcon/collision.hpp"
#include "physcon/error.hpp"

namespace physcon {

namespace {

struct HullFace {
  std::array<int, 3> v;
  Vec3 normal;
  double offset;
  bool alive = true;
};

std::uint64_t edge_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

// Incremental hull. Returns alive triangles indexing into `points`.
std::vector<HullFace> build_hull(std::span<const Vec3> points) {
  const int n = static_cast<int>(points.size());
  if (n < 4) throw Error(ErrorKind::DegenerateInput, "convex hull needs at least 4 points");

  Vec3 lo = points[0], hi = points[0];
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double scale = std::max((hi - lo).norm(), 1e-300);
  const double degenerate_eps = 1e-10 * scale;
  const double visible_eps = 1e-12 * scale;

  int i0 = 0;
  for (int i = 1; i < n; ++i)
    if (points[i].x() < points[i0].x()) i0 = i;
  int i1 = i0;
  double best = 0.0;
  for (int i = 0; i < n; ++i) {
    const double dist = (points[i] - points[i0]).squaredNorm();
    if (dist > best) best = dist, i1 = i;
  }
  if (std::sqrt(best) <= degenerate_eps)
    throw Error(ErrorKind::DegenerateInput, "all points coincide");
  const Vec3 line_dir = (points[i1] - points[i0]).normalized();
  int i2 = i0;
  best = 0.0;
  for (int i = 0; i < n; ++i) {
    const double dist = line_dir.cross(points[i] - points[i0]).norm();
    if (dist > best) best = dist, i2 = i;
  }
  if (best <= degenerate_eps) throw Error(ErrorKind::DegenerateInput, "points are collinear");
  const Vec3 plane_n = (points[i1] - points[i0]).cross(points[i2] - points[i0]).normalized();
  int i3 = i0;
  best = 0.0;
  for (int i = 0; i < n; ++i) {
    const double dist = std::abs(plane_n.dot(points[i] - points[i0]));
    if (dist > best) best = dist, i3 = i;
  }
  if (best <= degenerate_eps) throw Error(ErrorKind::DegenerateInput, "points are coplanar");

  const Vec3 interior = 0.25 * (points[i0] + points[i1] + points[i2] + points[i3]);
  std::vector<HullFace> faces;
  std::unordered_map<std::uint64_t, int> edge_face;

  auto add_face = [&](int a, int b, int c, const Vec3* fallback_normal) {
    Vec3 normal = (points[b] - points[a]).cross(points[c] - points[a]);
    const double len = normal.norm();
    if (len > 1e-14 * scale * scale || fallback_normal == nullptr) {
      normal /= len;
    } else {
      normal = *fallback_normal;
    }
    const int index = static_cast<int>(faces.size());
    faces.push_back({{a, b, c}, normal, normal.dot(points[a])});
    edge_face[edge_key(a, b)] = index;
    edge_face[edge_key(b, c)] = index;
    edge_face[edge_key(c, a)] = index;
  };

  {
    std::array<int, 4> t{i0, i1, i2, i3};
    const std::array<std::array<int, 3>, 4> tris{{{0, 1, 2}, {0, 3, 1}, {1, 3, 2}, {2, 3, 0}}};
    // Flip the winding if the first face points inward.
    const Vec3 n012 = (points[i1] - points[i0]).cross(points[i2] - points[i0]);
    const bool flip = n012.dot(points[i0] - interior) < 0.0;
    for (auto tri : tris) {
      if (flip) std::swap(tri[1], tri[2]);
      add_face(t[tri[0]], t[tri[1]], t[tri[2]], nullptr);
    }
  }

  std::vector<int> order;
  order.reserve(n);
  for (int i = 0; i < n; ++i)
    if (i != i0 && i != i1 && i != i2 && i != i3) order.push_back(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return (points[a] - interior).squaredNorm() > (points[b] - interior).squaredNorm();
  });

  std::vector<int> visible;
  std::vector<std::pair<int, int>> horizon;
  for (int p : order) {
    visible.clear();
    for (int f = 0; f < static_cast<int>(faces.size()); ++f) {
      const auto& face = faces[f];
      if (face.alive && face.normal.dot(points[p]) - face.offset > visible_eps) visible.push_back(f);
    }
    if (visible.empty()) continue;

    horizon.clear();
    std::vector<Vec3> horizon_normals;
    for (int f : visible) {
      const auto& v = faces[f].v;
      for (int e = 0; e < 3; ++e) {
        const int a = v[e], b = v[(e + 1) % 3];
        const auto it = edge_face.find(edge_key(b, a));
        const bool neighbour_visible =
            it != edge_face.end() &&
            std::find(visible.begin(), visible.end(), it->second) != visible.end();
        if (!neighbour_visible) {
          horizon.emplace_back(a, b);
          horizon_normals.push_back(faces[f].normal);
        }
      }
    }
    for (int f : visible) {
      auto& face = faces[f];
      face.alive = false;
      for (int e = 0; e < 3; ++e) edge_face.erase(edge_key(face.v[e], face.v[(e + 1) % 3]));
    }
    for (std::size_t h = 0; h < horizon.size(); ++h) {
      add_face(horizon[h].first, horizon[h].second, p, &horizon_normals[h]);
    }
  }

  std::vector<HullFace> alive;
  for (const auto& f : faces)
    if (f.alive) alive.push_back(f);
  return alive;
}

// A hull vertex whose incident face normals span at most a plane lies inside
// a flat face or along an edge and is not extreme.
std::vector<int> extreme_vertices(const std::vector<HullFace>& faces, int point_count) {
  std::vector<std::vector<Vec3>> incident(point_count);
  for (const auto& f : faces)
    for (int v : f.v) incident[v].push_back(f.normal);
  std::vector<int> keep;
  for (int i = 0; i < point_count; ++i) {
    if (incident[i].empty()) continue;
    Eigen::MatrixXd normals(incident[i].size(), 3);
    for (std::size_t k = 0; k < incident[i].size(); ++k) normals.row(k) = incident[i][k].transpose();
    if (normals.rows() >= 3) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(normals);
      if (svd.singularValues()[2] < 1e-9) continue;
    } else {
      continue;
    }
    keep.push_back(i);
  }
  return keep;
}

}  // namespace

const Vec3& ConvexPart::support(const Vec3& direction) const {
  std::size_t best = 0;
  double best_dot = vertices_[0].dot(direction);
  for (std::size_t i = 1; i < vertices_.size(); ++i) {
    const double d = vertices_[i].dot(direction);
    if (d > best_dot) {
      best_dot = d;
      best = i;
    }
  }
  return vertices_[best];
}

ConvexPart ConvexPart::scaled(double factor) const {
  ConvexPart out = *this;
  for (auto& v : out.vertices_) v *= factor;
  for (auto& p : out.planes_) p.offset *= factor;
  out.centroid_ *= factor;
  out.radius_ *= std::abs(factor);
  return out;
}

ConvexPart convex_hull(std::span<const Vec3> points) {
  for (const auto& p : points)
    if (!p.allFinite()) throw Error(ErrorKind::DegenerateInput, "non-finite hull input");

  std::vector<Vec3> current(points.begin(), points.end());
  std::vector<HullFace> faces = build_hull(current);
  for (int pass = 0; pass < 4; ++pass) {
    const std::vector<int> keep = extreme_vertices(faces, static_cast<int>(current.size()));
    std::vector<bool> used(current.size(), false);
    for (const auto& f : faces)
      for (int v : f.v) used[v] = true;
    const auto used_count = std::count(used.begin(), used.end(), true);
    if (static_cast<std::ptrdiff_t>(keep.size()) == used_count) break;
    std::vector<Vec3> next;
    next.reserve(keep.size());
    for (int k : keep) next.push_back(current[k]);
    current = std::move(next);
    faces = build_hull(current);
  }

  ConvexPart part;
  std::vector<int> remap(current.size(), -1);
  for (const auto& f : faces) {
    std::array<int, 3> tri{};
    for (int e = 0; e < 3; ++e) {
      int& slot = remap[f.v[e]];
      if (slot < 0) {
        slot = static_cast<int>(part.vertices_.size());
        part.vertices_.push_back(current[f.v[e]]);
      }
      tri[e] = slot;
    }
    part.triangles_.push_back(tri);
    part.planes_.push_back({f.normal, f.offset});
  }
  part.centroid_ = Vec3::Zero();
  for (const auto& v : part.vertices_) part.centroid_ += v;
  part.centroid_ /= static_cast<double>(part.vertices_.size());
  for (const auto& v : part.vertices_)
    part.radius_ = std::max(part.radius_, (v - part.centroid_).norm());
  return part;
}

ConvexPart make_box(const Vec3& size, const Vec3& center) {
  std::vector<Vec3> corners;
  for (int i = 0; i < 8; ++i) {
    const Vec3 sign((i & 1) ? 0.5 : -0.5, (i & 2) ? 0.5 : -0.5, (i & 4) ? 0.5 : -0.5);
    corners.push_back(center + sign.cwiseProduct(size));
  }
  return convex_hull(corners);
}

ConvexPart make_cylinder(double radius, double height, int segments) {
  std::vector<Vec3> pts;
  for (int i = 0; i < segments; ++i) {
    const double angle = 2.0 * M_PI * i / segments;
    const double x = radius * std::cos(angle), y = radius * std::sin(angle);
    pts.emplace_back(x, y, -0.5 * height);
    pts.emplace_back(x, y, 0.5 * height);
  }
  return convex_hull(pts);
}

ConvexPart make_icosphere(double radius, int subdivisions) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> verts = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
                             {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
                             {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  std::vector<std::array<int, 3>> tris = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
      {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (auto& v : verts) v.normalize();
  for (int s = 0; s < subdivisions; ++s) {
    std::unordered_map<std::uint64_t, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = edge_key(std::min(a, b), std::max(a, b));
      if (auto it = midpoint.find(key); it != midpoint.end()) return it->second;
      verts.push_back((verts[a] + verts[b]).normalized());
      return midpoint[key] = static_cast<int>(verts.size()) - 1;
    };
    std::vector<std::array<int, 3>> next;
    for (const auto& tri : tris) {
      const int ab = mid(tri[0], tri[1]), bc = mid(tri[1], tri[2]), ca = mid(tri[2], tri[0]);
      next.push_back({tri[0], ab, ca});
      next.push_back({tri[1], bc, ab});
      next.push_back({tri[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    tris = std::move(next);
  }
  for (auto& v : verts) v *= radius;
  return convex_hull(verts);
}

}  // namespace physcon
