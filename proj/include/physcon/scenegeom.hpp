#pragma once

// Metric onboarding of the support surface: recovers the scale of an
// up-to-scale reconstruction from object correspondences, filters the cloud
// and fits the table plane, from which gravity and a static box are derived.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "physcon/scene.hpp"

namespace physcon {

enum class PointLabel : std::uint8_t { Unknown = 0, Background = 1, Object = 2 };

/// Parallel arrays; `labels` and `in_bbox` are either empty or sized like
/// `points`.
struct PointCloud {
  std::vector<Vec3> points;
  std::vector<double> confidence;
  std::vector<PointLabel> labels;
  std::vector<std::uint8_t> in_bbox;

  std::size_t size() const { return points.size(); }
  /// Throws PreconditionViolated when the arrays disagree or a confidence
  /// is outside [0, 1].
  void validate() const;
};

struct CorrespondencePair {
  std::string object_id;
  Vec3 cloud_xyz;   // reconstruction units
  Vec3 metric_xyz;  // meters, from the rendered template depth
};

struct PlaneModel {
  Vec3 normal = Vec3::UnitZ();
  double offset = 0.0;  // plane = {x : normal . x = offset}
  std::size_t inlier_count = 0;
  double inlier_rms = 0.0;
  /// Mean of the inliers, a point on the supporting surface.
  Vec3 center = Vec3::Zero();
};

struct ScaleRansacOptions {
  int iterations = 1000;
  double inlier_ratio_tolerance = 0.05;
  std::uint64_t seed = 0;
  int threads = 1;
};

/// Metric-over-cloud distance ratio from same-object correspondence pairs.
/// The consensus of a hypothesis s is the set of same-object pair ratios r
/// with |r / s - 1| <= tolerance; the result is the median ratio of the
/// largest consensus (ties go to the earliest iteration).
double estimate_scale_ransac(std::span<const CorrespondencePair> pairs,
                             const ScaleRansacOptions& options = {});

struct FilterOptions {
  double confidence_min = 0.0;
  bool remove_object_pixels = true;
  bool require_bbox = false;
  std::size_t min_points = 50;
};

/// Order-preserving filter. Throws EmptyResult if fewer than
/// options.min_points survive.
PointCloud filter_cloud(const PointCloud& cloud, const FilterOptions& options = {});

PointCloud scale_cloud(const PointCloud& cloud, double scale);

struct PlaneRansacOptions {
  int iterations = 2000;
  double inlier_threshold = 0.005;
  double min_inlier_fraction = 0.1;
  std::uint64_t seed = 0;
  int threads = 1;
};

/// Three-point RANSAC refined by least squares over the inliers. The normal
/// is oriented so that the camera origin is on its positive side.
PlaneModel fit_plane_ransac(std::span<const Vec3> points, const PlaneRansacOptions& options = {});
PlaneModel fit_plane_ransac(const PointCloud& cloud, const PlaneRansacOptions& options = {});

/// Gravity points from the camera side into the table: -normal.
Vec3 gravity_from_plane(const PlaneModel& plane);

/// Box of the given lateral extent and thickness whose top face lies in the
/// plane, centered under `anchor` (default: plane.center projected).
Body plane_to_static_object(const PlaneModel& plane, double extent, double thickness,
                            std::string id = "table", std::optional<Vec3> anchor = std::nullopt);

}  // namespace physcon
