#pragma once

// Reference computations for the tests. Deliberately naive and independent
// of the library's algorithms: brute force over vertex triples, closed-form
// box formulas, power series and finite differences.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "physcon/se3.hpp"

namespace oracle {

using physcon::Mat3;
using physcon::Pose;
using physcon::Tangent;
using physcon::Vec3;

inline Mat3 hat(const Vec3& v) {
  Mat3 s;
  s << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return s;
}

/// Matrix exponential by truncated power series.
template <typename M>
M expm_series(const M& a, int terms = 40) {
  M sum = M::Identity();
  M term = M::Identity();
  for (int k = 1; k < terms; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
  }
  return sum;
}

/// Right Jacobian of SO(3) as the series sum_k (-1)^k / (k+1)! hat(phi)^k.
inline Mat3 right_jacobian_series(const Vec3& phi, int terms = 40) {
  Mat3 sum = Mat3::Zero();
  Mat3 power = Mat3::Identity();
  double factorial = 1.0;
  for (int k = 0; k < terms; ++k) {
    factorial *= (k + 1);
    sum += ((k % 2 == 0) ? 1.0 : -1.0) / factorial * power;
    power = power * hat(phi);
  }
  return sum;
}

/// 4x4 homogeneous exponential of (rho, phi).
inline Pose exp_se3_series(const Tangent& xi) {
  Eigen::Matrix4d a = Eigen::Matrix4d::Zero();
  a.topLeftCorner<3, 3>() = hat(xi.tail<3>());
  a.topRightCorner<3, 1>() = xi.head<3>();
  const Eigen::Matrix4d e = expm_series(a);
  return {e.topLeftCorner<3, 3>(), e.topRightCorner<3, 1>()};
}

inline double point_segment(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (a + t * ab - p).norm();
}

inline double point_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 n = (b - a).cross(c - a);
  double best = std::min({point_segment(p, a, b), point_segment(p, b, c), point_segment(p, c, a)});
  const double n2 = n.squaredNorm();
  if (n2 < 1e-30) return best;
  // Project onto the plane and test inside with signed areas.
  const Vec3 q = p - n * ((p - a).dot(n) / n2);
  const double s1 = (b - a).cross(q - a).dot(n);
  const double s2 = (c - b).cross(q - b).dot(n);
  const double s3 = (a - c).cross(q - c).dot(n);
  if ((s1 >= 0 && s2 >= 0 && s3 >= 0) || (s1 <= 0 && s2 <= 0 && s3 <= 0))
    best = std::min(best, (p - q).norm());
  return best;
}

/// Distance between segments by ternary search on the convex function
/// s -> dist(a(s), segment c-d).
inline double segment_segment(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  double lo = 0.0, hi = 1.0;
  auto f = [&](double s) { return point_segment(a + s * (b - a), c, d); };
  for (int i = 0; i < 200; ++i) {
    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (f(m1) < f(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  return std::min({f(0.5 * (lo + hi)), f(0.0), f(1.0)});
}

inline std::vector<Vec3> transformed(const std::vector<Vec3>& pts, const Pose& pose) {
  std::vector<Vec3> out;
  for (const auto& p : pts) out.push_back(pose * p);
  return out;
}

/// Distance between the convex hulls of two separated point sets: minimum
/// over all vertex/vertex-triple and vertex-pair/vertex-pair combinations.
inline double hull_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  double best = std::numeric_limits<double>::infinity();
  auto vertex_triples = [&](const std::vector<Vec3>& pts, const std::vector<Vec3>& tris) {
    for (const auto& p : pts)
      for (std::size_t i = 0; i < tris.size(); ++i)
        for (std::size_t j = i + 1; j < tris.size(); ++j)
          for (std::size_t k = j + 1; k < tris.size(); ++k)
            best = std::min(best, point_triangle(p, tris[i], tris[j], tris[k]));
  };
  vertex_triples(a, b);
  vertex_triples(b, a);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j)
      for (std::size_t k = 0; k < b.size(); ++k)
        for (std::size_t l = k + 1; l < b.size(); ++l)
          best = std::min(best, segment_segment(a[i], a[j], b[k], b[l]));
  return best;
}

struct SatDepth {
  double best = std::numeric_limits<double>::infinity();
  /// Smallest overlap along an axis not parallel to the best one.
  double runner_up = std::numeric_limits<double>::infinity();
};

inline SatDepth sat_depths(const std::vector<Vec3>& a, const std::vector<Vec3>& b);

/// Separating-axis penetration depth of two overlapping convex hulls: the
/// minimum over candidate axes (normals of all vertex triples and cross
/// products of all vertex-pair directions) of the interval overlap.
inline double sat_depth(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  return sat_depths(a, b).best;
}

inline SatDepth sat_depths(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  std::vector<Vec3> axes;
  auto add_triples = [&](const std::vector<Vec3>& pts) {
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j)
        for (std::size_t k = j + 1; k < pts.size(); ++k) {
          const Vec3 n = (pts[j] - pts[i]).cross(pts[k] - pts[i]);
          if (n.norm() > 1e-9) axes.push_back(n.normalized());
        }
  };
  add_triples(a);
  add_triples(b);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j)
      for (std::size_t k = 0; k < b.size(); ++k)
        for (std::size_t l = k + 1; l < b.size(); ++l) {
          const Vec3 n = (a[j] - a[i]).cross(b[l] - b[k]);
          if (n.norm() > 1e-9) axes.push_back(n.normalized());
        }
  std::vector<std::pair<double, Vec3>> overlaps;
  for (const auto& n : axes) {
    double amin = 1e300, amax = -1e300, bmin = 1e300, bmax = -1e300;
    for (const auto& p : a) {
      amin = std::min(amin, n.dot(p));
      amax = std::max(amax, n.dot(p));
    }
    for (const auto& p : b) {
      bmin = std::min(bmin, n.dot(p));
      bmax = std::max(bmax, n.dot(p));
    }
    overlaps.emplace_back(std::min(amax - bmin, bmax - amin), n);
  }
  SatDepth out;
  Vec3 best_axis = Vec3::Zero();
  for (const auto& [depth, n] : overlaps) {
    if (depth < out.best) {
      out.best = depth;
      best_axis = n;
    }
  }
  for (const auto& [depth, n] : overlaps)
    if (std::abs(n.dot(best_axis)) < 1.0 - 1e-9) out.runner_up = std::min(out.runner_up, depth);
  return out;
}

/// Signed distance between boxes sharing an orientation: half extents ha, hb
/// and center offset delta expressed in the common box frame.
inline double aligned_box_signed_distance(const Vec3& ha, const Vec3& hb, const Vec3& delta) {
  const Vec3 gap = delta.cwiseAbs() - (ha + hb);
  if (gap.maxCoeff() > 0.0) return gap.cwiseMax(0.0).norm();
  return gap.maxCoeff();  // minus the smallest overlap
}

inline std::vector<Vec3> box_corners(const Vec3& size, const Vec3& center = Vec3::Zero()) {
  std::vector<Vec3> out;
  for (int i = 0; i < 8; ++i)
    out.emplace_back(center.x() + ((i & 1) ? 0.5 : -0.5) * size.x(),
                     center.y() + ((i & 2) ? 0.5 : -0.5) * size.y(),
                     center.z() + ((i & 4) ? 0.5 : -0.5) * size.z());
  return out;
}

/// Central finite difference of f(T exp(h e_k)) for every tangent direction.
inline Tangent fd_gradient(const std::function<double(const Pose&)>& f, const Pose& pose,
                           double h = 1e-6) {
  Tangent g;
  for (int k = 0; k < 6; ++k) {
    Tangent e = Tangent::Zero();
    e[k] = h;
    const Pose plus = pose * exp_se3_series(e);
    const Pose minus = pose * exp_se3_series(-e);
    g[k] = (f(plus) - f(minus)) / (2.0 * h);
  }
  return g;
}

inline Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q.toRotationMatrix();
}

inline Vec3 random_vec(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return {u(rng), u(rng), u(rng)};
}

/// max(|a - b|) / max(|b|, floor)
inline double relative_error(const Tangent& a, const Tangent& b, double floor = 1e-6) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(b.cwiseAbs().maxCoeff(), floor);
}

}  // namespace oracle
