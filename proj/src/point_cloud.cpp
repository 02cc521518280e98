#include "physcon/error.hpp"
#include "physcon/scenegeom.hpp"

namespace physcon {

void PointCloud::validate() const {
  const std::size_t n = points.size();
  if (confidence.size() != n || (!labels.empty() && labels.size() != n) ||
      (!in_bbox.empty() && in_bbox.size() != n)) {
    throw Error(ErrorKind::PreconditionViolated, "point cloud arrays have mismatched lengths");
  }
  for (double c : confidence)
    if (!(c >= 0.0 && c <= 1.0))
      throw Error(ErrorKind::PreconditionViolated, "confidence outside [0, 1]");
}

PointCloud filter_cloud(const PointCloud& cloud, const FilterOptions& options) {
  cloud.validate();
  PointCloud out;
  const bool has_labels = !cloud.labels.empty();
  const bool has_bbox = !cloud.in_bbox.empty();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (cloud.confidence[i] < options.confidence_min) continue;
    if (!cloud.points[i].allFinite()) continue;
    if (options.remove_object_pixels && has_labels && cloud.labels[i] == PointLabel::Object) continue;
    if (options.require_bbox && has_bbox && cloud.in_bbox[i] == 0) continue;
    out.points.push_back(cloud.points[i]);
    out.confidence.push_back(cloud.confidence[i]);
    if (has_labels) out.labels.push_back(cloud.labels[i]);
    if (has_bbox) out.in_bbox.push_back(cloud.in_bbox[i]);
  }
  if (out.size() < options.min_points) {
    throw Error(ErrorKind::EmptyResult, "only " + std::to_string(out.size()) +
                                            " points survive filtering");
  }
  return out;
}

PointCloud scale_cloud(const PointCloud& cloud, double scale) {
  if (!(scale > 0.0)) throw Error(ErrorKind::PreconditionViolated, "scale must be positive");
  PointCloud out = cloud;
  for (auto& p : out.points) p *= scale;
  return out;
}

}  // namespace physcon
