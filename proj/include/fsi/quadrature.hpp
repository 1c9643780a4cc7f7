#pragma once

#include <vector>

#include "fsi/types.hpp"

namespace fsi {

/// Symmetric rule on the reference triangle. Points are barycentric; weights sum to 1/2.
struct QuadRule {
  std::vector<Vec3<Real>> points;
  std::vector<Real> weights;
  int degree = 0;

  int size() const { return static_cast<int>(points.size()); }
};

/// Smallest positive-weight rule in the table exact to at least `degree` (1 <= degree <= 6).
const QuadRule& triangle_rule(int degree);

}  // namespace fsi
