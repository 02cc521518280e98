#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "parallel.hpp"
#include "physcon/costs.hpp"
#include "physcon/error.hpp"
#include "physcon/scenegeom.hpp"

namespace physcon {

namespace {

constexpr double kMinCloudDistance = 1e-6;

struct Hypothesis {
  bool valid = false;
  double scale = 0.0;
  std::size_t support = 0;
};

}  // namespace

double estimate_scale_ransac(std::span<const CorrespondencePair> pairs,
                             const ScaleRansacOptions& options) {
  if (options.iterations < 1 || !(options.inlier_ratio_tolerance >= 0.0)) {
    throw Error(ErrorKind::PreconditionViolated, "invalid scale RANSAC options");
  }
  std::map<std::string, std::vector<std::size_t>> by_object;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!pairs[i].cloud_xyz.allFinite() || !pairs[i].metric_xyz.allFinite())
      throw Error(ErrorKind::PreconditionViolated, "non-finite correspondence");
    by_object[pairs[i].object_id].push_back(i);
  }

  // Candidates for the first sample, and every same-object distance ratio.
  std::vector<std::size_t> sampleable;
  std::vector<const std::vector<std::size_t>*> group_of(pairs.size(), nullptr);
  std::vector<double> ratios;
  for (const auto& [id, members] : by_object) {
    if (members.size() < 2) continue;
    for (std::size_t a = 0; a < members.size(); ++a) {
      sampleable.push_back(members[a]);
      group_of[members[a]] = &members;
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        const auto& p = pairs[members[a]];
        const auto& q = pairs[members[b]];
        const double cloud = (p.cloud_xyz - q.cloud_xyz).norm();
        if (cloud > kMinCloudDistance) ratios.push_back((p.metric_xyz - q.metric_xyz).norm() / cloud);
      }
    }
  }
  if (sampleable.empty()) {
    throw Error(ErrorKind::InsufficientPairs, "need at least two correspondences on one object");
  }
  if (ratios.empty()) {
    throw Error(ErrorKind::InsufficientPairs, "all same-object correspondences coincide");
  }
  std::sort(ratios.begin(), ratios.end());
  std::sort(sampleable.begin(), sampleable.end());

  const double tol = options.inlier_ratio_tolerance;
  auto consensus = [&](double s) {
    const auto lo = std::lower_bound(ratios.begin(), ratios.end(), s * (1.0 - tol));
    const auto hi = std::upper_bound(ratios.begin(), ratios.end(), s * (1.0 + tol));
    return std::make_pair(lo, hi);
  };

  std::vector<Hypothesis> hypotheses(static_cast<std::size_t>(options.iterations));
  detail::parallel_for(hypotheses.size(), options.threads, [&](std::size_t k) {
    std::mt19937_64 rng(mix_seed(options.seed, k));
    std::uniform_int_distribution<std::size_t> pick_first(0, sampleable.size() - 1);
    const std::size_t i = sampleable[pick_first(rng)];
    const auto& group = *group_of[i];
    std::uniform_int_distribution<std::size_t> pick_second(0, group.size() - 2);
    std::size_t j = group[pick_second(rng)];
    if (j == i) j = group.back();
    const double cloud = (pairs[i].cloud_xyz - pairs[j].cloud_xyz).norm();
    if (!(cloud > kMinCloudDistance)) return;  // degenerate sample, iteration spent
    const double s = (pairs[i].metric_xyz - pairs[j].metric_xyz).norm() / cloud;
    if (!(s > 0.0) || !std::isfinite(s)) return;
    const auto [lo, hi] = consensus(s);
    hypotheses[k] = {true, s, static_cast<std::size_t>(hi - lo)};
  });

  const Hypothesis* best = nullptr;
  for (const auto& h : hypotheses)
    if (h.valid && (best == nullptr || h.support > best->support)) best = &h;
  if (best == nullptr) {
    throw Error(ErrorKind::NoConsensus, "every sampled correspondence pair was degenerate");
  }

  const auto [lo, hi] = consensus(best->scale);
  const std::size_t count = static_cast<std::size_t>(hi - lo);
  // The inlier range is already sorted.
  const double median = count % 2 == 1 ? *(lo + count / 2)
                                       : 0.5 * (*(lo + count / 2 - 1) + *(lo + count / 2));
  return median;
}

}  // namespace physcon
