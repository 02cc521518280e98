#pragma once

#include <array>

#include "minkowski.hpp"

namespace physcon::detail {

struct Simplex {
  std::array<SupportPoint, 4> points;
  std::array<double, 4> weights{};
  int size = 0;

  Vec3 witness_a() const;
  Vec3 witness_b() const;
};

/// GJK on the Minkowski difference. On overlap the simplex holds the final
/// (possibly lower-dimensional) simplex for EPA initialisation.
GjkResult run_gjk(const MinkowskiDifference& md, Simplex& simplex);

}  // namespace physcon::detail
