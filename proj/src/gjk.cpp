#include "gjk_internal.hpp"

#include <cmath>
#include <limits>

#include "physcon/error.hpp"

namespace physcon::detail {

namespace {

// Closest point to the origin on segment / triangle / tetrahedron. Each
// routine reduces the simplex to the support of the closest point and writes
// matching barycentric weights.

Vec3 closest_on_segment(Simplex& s) {
  const Vec3& a = s.points[0].w;
  const Vec3& b = s.points[1].w;
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? -a.dot(ab) / len2 : 0.0;
  if (t <= 0.0) {
    s.size = 1;
    s.weights[0] = 1.0;
    return a;
  }
  if (t >= 1.0) {
    s.points[0] = s.points[1];
    s.size = 1;
    s.weights[0] = 1.0;
    return b;
  }
  s.weights[0] = 1.0 - t;
  s.weights[1] = t;
  return a + t * ab;
}

Vec3 closest_on_triangle(Simplex& s) {
  const SupportPoint pa = s.points[0], pb = s.points[1], pc = s.points[2];
  const Vec3 &a = pa.w, &b = pb.w, &c = pc.w;
  const Vec3 ab = b - a, ac = c - a;

  auto keep_vertex = [&](const SupportPoint& p) {
    s.points[0] = p;
    s.size = 1;
    s.weights[0] = 1.0;
    return p.w;
  };
  auto keep_edge = [&](const SupportPoint& p, const SupportPoint& q, double t) {
    s.points[0] = p;
    s.points[1] = q;
    s.size = 2;
    s.weights[0] = 1.0 - t;
    s.weights[1] = t;
    return Vec3(p.w + t * (q.w - p.w));
  };

  const Vec3 ap = -a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return keep_vertex(pa);

  const Vec3 bp = -b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return keep_vertex(pb);

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return keep_edge(pa, pb, d1 / (d1 - d3));

  const Vec3 cp = -c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return keep_vertex(pc);

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return keep_edge(pa, pc, d2 / (d2 - d6));

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
    return keep_edge(pb, pc, (d4 - d3) / ((d4 - d3) + (d5 - d6)));

  const double sum = va + vb + vc;
  if (!(sum > 0.0)) {
    // Collinear triangle: best of the three edges.
    Simplex best;
    Vec3 best_v;
    double best_d = std::numeric_limits<double>::infinity();
    const std::array<std::array<int, 2>, 3> edges{{{0, 1}, {0, 2}, {1, 2}}};
    const std::array<SupportPoint, 3> pts{pa, pb, pc};
    for (const auto& e : edges) {
      Simplex trial;
      trial.points[0] = pts[e[0]];
      trial.points[1] = pts[e[1]];
      trial.size = 2;
      const Vec3 v = closest_on_segment(trial);
      if (v.squaredNorm() < best_d) {
        best_d = v.squaredNorm();
        best = trial;
        best_v = v;
      }
    }
    s = best;
    return best_v;
  }
  const double v = vb / sum, w = vc / sum;
  s.weights[0] = 1.0 - v - w;
  s.weights[1] = v;
  s.weights[2] = w;
  return a + v * ab + w * ac;
}

// Returns true if the origin is inside the tetrahedron.
bool closest_on_tetrahedron(Simplex& s, Vec3& closest) {
  const std::array<SupportPoint, 4> p{s.points[0], s.points[1], s.points[2], s.points[3]};
  // Face (i, j, k) with opposite vertex l.
  const std::array<std::array<int, 4>, 4> faces{{{0, 1, 2, 3}, {0, 2, 3, 1}, {0, 3, 1, 2},
                                                 {1, 3, 2, 0}}};
  const double volume =
      std::abs((p[1].w - p[0].w).cross(p[2].w - p[0].w).dot(p[3].w - p[0].w));
  double scale = 0.0;
  for (const auto& q : p) scale = std::max(scale, q.w.norm());
  const bool flat = volume <= 1e-14 * scale * scale * scale;

  bool inside = true;
  double best_d = std::numeric_limits<double>::infinity();
  Simplex best;
  for (const auto& f : faces) {
    const Vec3 n = (p[f[1]].w - p[f[0]].w).cross(p[f[2]].w - p[f[0]].w);
    const double sign_origin = -p[f[0]].w.dot(n);
    const double sign_opposite = (p[f[3]].w - p[f[0]].w).dot(n);
    const bool outside = flat || sign_origin * sign_opposite < 0.0;
    if (!outside) continue;
    inside = false;
    Simplex trial;
    trial.points[0] = p[f[0]];
    trial.points[1] = p[f[1]];
    trial.points[2] = p[f[2]];
    trial.size = 3;
    const Vec3 v = closest_on_triangle(trial);
    if (v.squaredNorm() < best_d) {
      best_d = v.squaredNorm();
      best = trial;
      closest = v;
    }
  }
  if (inside) {
    closest = Vec3::Zero();
    return true;
  }
  s = best;
  return false;
}

}  // namespace

Vec3 Simplex::witness_a() const {
  Vec3 out = Vec3::Zero();
  for (int i = 0; i < size; ++i) out += weights[i] * points[i].a;
  return out;
}

Vec3 Simplex::witness_b() const {
  Vec3 out = Vec3::Zero();
  for (int i = 0; i < size; ++i) out += weights[i] * points[i].b;
  return out;
}

GjkResult run_gjk(const MinkowskiDifference& md, Simplex& simplex) {
  const double scale = std::max(md.scale(), 1e-300);
  const double touch_tolerance = 1e-10 * scale;
  const double abs_tolerance = 1e-14 * scale * scale;

  Vec3 v = md.centroid_difference();
  if (v.squaredNorm() == 0.0) v = Vec3::UnitX();
  simplex.size = 0;

  for (int iter = 0; iter < kGjkMaxIterations; ++iter) {
    const SupportPoint sp = md.support(-v);
    const double dist2 = v.squaredNorm();
    if (simplex.size > 0) {
      bool duplicate = false;
      for (int i = 0; i < simplex.size; ++i)
        if ((simplex.points[i].w - sp.w).squaredNorm() <= abs_tolerance) duplicate = true;
      if (duplicate || dist2 - v.dot(sp.w) <= std::max(1e-12 * dist2, abs_tolerance)) {
        GjkResult out;
        out.distance.witness_a = simplex.witness_a();
        out.distance.witness_b = simplex.witness_b();
        out.distance.signed_distance = std::sqrt(dist2);
        out.distance.axis = (-v).normalized();
        return out;
      }
    }

    simplex.points[simplex.size] = sp;
    simplex.weights[simplex.size] = 0.0;
    ++simplex.size;

    Vec3 next;
    switch (simplex.size) {
      case 1:
        simplex.weights[0] = 1.0;
        next = sp.w;
        break;
      case 2:
        next = closest_on_segment(simplex);
        break;
      case 3:
        next = closest_on_triangle(simplex);
        break;
      default:
        if (closest_on_tetrahedron(simplex, next)) return {true, {}};
        break;
    }
    if (next.norm() <= touch_tolerance) return {true, {}};
    if (simplex.size > 0 && iter > 0 && next.squaredNorm() >= dist2) {
      // No progress: the previous estimate is already optimal to rounding.
      GjkResult out;
      out.distance.witness_a = simplex.witness_a();
      out.distance.witness_b = simplex.witness_b();
      out.distance.signed_distance = next.norm();
      out.distance.axis = (-next).normalized();
      return out;
    }
    v = next;
  }
  throw Error(ErrorKind::IterationLimit, "GJK exceeded its iteration budget");
}

}  // namespace physcon::detail

namespace physcon {

GjkResult gjk_distance(const ConvexPart& a, const Pose& pose_a, const ConvexPart& b,
                       const Pose& pose_b) {
  const detail::MinkowskiDifference md(a, pose_a, b, pose_b);
  detail::Simplex simplex;
  return detail::run_gjk(md, simplex);
}

bool spheres_separated(const ConvexPart& a, const Pose& pose_a, const ConvexPart& b,
                       const Pose& pose_b, double margin) {
  const double centers = (pose_a * a.centroid() - pose_b * b.centroid()).norm();
  return centers - a.radius() - b.radius() > margin;
}

}  // namespace physcon
