#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include "gjk_internal.hpp"
#include "physcon/error.hpp"

namespace physcon {

namespace {

using detail::MinkowskiDifference;
using detail::Simplex;
using detail::SupportPoint;

struct EpaFace {
  std::array<int, 3> v;
  Vec3 normal;
  double distance;
};

// Grows a GJK termination simplex into a tetrahedron. Returns false when the
// Minkowski difference is flat around the origin (touching contact).
bool expand_to_tetrahedron(const MinkowskiDifference& md, std::vector<SupportPoint>& pts,
                           double eps) {
  if (pts.size() == 1) {
    const std::array<Vec3, 6> dirs{Vec3::UnitX(), -Vec3::UnitX(), Vec3::UnitY(),
                                   -Vec3::UnitY(), Vec3::UnitZ(), -Vec3::UnitZ()};
    for (const auto& d : dirs) {
      const SupportPoint sp = md.support(d);
      if ((sp.w - pts[0].w).norm() > eps) {
        pts.push_back(sp);
        break;
      }
    }
    if (pts.size() == 1) return false;
  }
  if (pts.size() == 2) {
    const Vec3 line = (pts[1].w - pts[0].w).normalized();
    Vec3 axis = Vec3::UnitX();
    if (std::abs(line.x()) > std::abs(line.y())) axis = Vec3::UnitY();
    if (std::abs(line.dot(axis)) > std::abs(line.z())) axis = Vec3::UnitZ();
    const Vec3 perp = line.cross(axis).normalized();
    for (int k = 0; k < 6 && pts.size() == 2; ++k) {
      const Vec3 d = Eigen::AngleAxisd(k * M_PI / 3.0, line) * perp;
      const SupportPoint sp = md.support(d);
      if (line.cross(sp.w - pts[0].w).norm() > eps) pts.push_back(sp);
    }
    if (pts.size() == 2) return false;
  }
  if (pts.size() == 3) {
    const Vec3 n = (pts[1].w - pts[0].w).cross(pts[2].w - pts[0].w).normalized();
    SupportPoint sp = md.support(n);
    if (std::abs(n.dot(sp.w - pts[0].w)) <= eps) sp = md.support(-n);
    if (std::abs(n.dot(sp.w - pts[0].w)) <= eps) return false;
    pts.push_back(sp);
  }
  return true;
}

Vec3 barycentric(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 v0 = b - a, v1 = c - a, v2 = p - a;
  const double d00 = v0.dot(v0), d01 = v0.dot(v1), d11 = v1.dot(v1);
  const double d20 = v2.dot(v0), d21 = v2.dot(v1);
  const double denom = d00 * d11 - d01 * d01;
  if (!(std::abs(denom) > 0.0)) return {1.0, 0.0, 0.0};
  const double v = (d11 * d20 - d01 * d21) / denom;
  const double w = (d00 * d21 - d01 * d20) / denom;
  return {1.0 - v - w, v, w};
}

DistanceResult touching_result(const MinkowskiDifference& md, const Simplex& simplex) {
  DistanceResult out;
  out.signed_distance = 0.0;
  out.witness_a = simplex.witness_a();
  out.witness_b = simplex.witness_b();
  const Vec3 dir = -md.centroid_difference();
  out.axis = dir.squaredNorm() > 0.0 ? Vec3(dir.normalized()) : Vec3::UnitX();
  return out;
}

DistanceResult run_epa(const MinkowskiDifference& md, const Simplex& simplex) {
  const double scale = std::max(md.scale(), 1e-300);
  const double eps = 1e-10 * scale;
  const double converge_tol = 1e-12 * scale;

  std::vector<SupportPoint> pts(simplex.points.begin(), simplex.points.begin() + simplex.size);
  if (!expand_to_tetrahedron(md, pts, eps)) return touching_result(md, simplex);

  const Vec3 interior = 0.25 * (pts[0].w + pts[1].w + pts[2].w + pts[3].w);
  const double volume =
      std::abs((pts[1].w - pts[0].w).cross(pts[2].w - pts[0].w).dot(pts[3].w - pts[0].w));
  if (volume <= 1e-12 * scale * scale * scale) return touching_result(md, simplex);

  std::vector<EpaFace> faces;
  auto make_face = [&](int a, int b, int c, const Vec3* fallback) -> EpaFace {
    Vec3 n = (pts[b].w - pts[a].w).cross(pts[c].w - pts[a].w);
    const double len = n.norm();
    if (len > 1e-14 * scale * scale || fallback == nullptr) {
      n /= len;
    } else {
      n = *fallback;
    }
    return {{a, b, c}, n, n.dot(pts[a].w)};
  };
  {
    const std::array<std::array<int, 3>, 4> tris{{{0, 1, 2}, {0, 3, 1}, {1, 3, 2}, {2, 3, 0}}};
    const Vec3 n012 = (pts[1].w - pts[0].w).cross(pts[2].w - pts[0].w);
    const bool flip = n012.dot(pts[0].w - interior) < 0.0;
    for (auto tri : tris) {
      if (flip) std::swap(tri[1], tri[2]);
      faces.push_back(make_face(tri[0], tri[1], tri[2], nullptr));
    }
  }

  for (int iter = 0; iter < kEpaMaxIterations; ++iter) {
    std::size_t best = 0;
    for (std::size_t f = 1; f < faces.size(); ++f)
      if (faces[f].distance < faces[best].distance) best = f;
    const EpaFace closest = faces[best];

    const SupportPoint sp = md.support(closest.normal);
    const double gap = closest.normal.dot(sp.w) - closest.distance;
    bool duplicate = false;
    for (const auto& p : pts)
      if ((p.w - sp.w).norm() <= eps) duplicate = true;

    if (gap <= converge_tol || duplicate) {
      const double depth = std::max(closest.distance, 0.0);
      const Vec3 projected = closest.distance * closest.normal;
      const Vec3 bc = barycentric(projected, pts[closest.v[0]].w, pts[closest.v[1]].w,
                                  pts[closest.v[2]].w);
      DistanceResult out;
      out.signed_distance = -depth;
      out.axis = closest.normal;
      out.witness_a = Vec3::Zero();
      out.witness_b = Vec3::Zero();
      for (int k = 0; k < 3; ++k) {
        out.witness_a += bc[k] * pts[closest.v[k]].a;
        out.witness_b += bc[k] * pts[closest.v[k]].b;
      }
      return out;
    }

    const int new_index = static_cast<int>(pts.size());
    pts.push_back(sp);

    std::set<std::pair<int, int>> visible_edges;
    std::vector<Vec3> visible_normals;
    std::vector<EpaFace> kept;
    kept.reserve(faces.size());
    std::vector<std::pair<std::pair<int, int>, Vec3>> edges_with_normal;
    for (const auto& f : faces) {
      const bool visible = f.normal.dot(sp.w - pts[f.v[0]].w) > eps * 1e-2;
      if (!visible) {
        kept.push_back(f);
        continue;
      }
      for (int e = 0; e < 3; ++e) {
        const std::pair<int, int> edge{f.v[e], f.v[(e + 1) % 3]};
        visible_edges.insert(edge);
        edges_with_normal.emplace_back(edge, f.normal);
      }
    }
    faces = std::move(kept);
    for (const auto& [edge, normal] : edges_with_normal) {
      if (visible_edges.count({edge.second, edge.first})) continue;
      faces.push_back(make_face(edge.first, edge.second, new_index, &normal));
    }
  }
  throw Error(ErrorKind::IterationLimit, "EPA exceeded its face-expansion budget");
}

}  // namespace

DistanceResult epa_penetration(const ConvexPart& a, const Pose& pose_a, const ConvexPart& b,
                               const Pose& pose_b) {
  const detail::MinkowskiDifference md(a, pose_a, b, pose_b);
  Simplex simplex;
  const GjkResult gjk = detail::run_gjk(md, simplex);
  if (!gjk.overlap) {
    // Precondition violated; report the separation unchanged.
    return gjk.distance;
  }
  return run_epa(md, simplex);
}

DistanceResult signed_distance(const ConvexPart& a, const Pose& pose_a, const ConvexPart& b,
                               const Pose& pose_b) {
  const detail::MinkowskiDifference md(a, pose_a, b, pose_b);
  Simplex simplex;
  const GjkResult gjk = detail::run_gjk(md, simplex);
  if (!gjk.overlap) return gjk.distance;
  return run_epa(md, simplex);
}

}  // namespace physcon
