#pragma once

// Frechet (Karcher) mean by intrinsic gradient descent with unit step on the
// averaged log field.

#include "rcons/geometry.hpp"

#include <optional>
#include <vector>

namespace rcons {

struct FrechetConfig {
  int max_iter = 1000;
  double tol = 1e-12;
  /// Starting point; the first input point when empty.
  std::optional<Point> init;
};

struct FrechetResult {
  Point mean;
  int iterations = 0;
  /// Final norm of (1/N) sum log_mean(u_i).
  double gradient_norm = 0.0;
  bool converged = false;
  /// All points lay within r* of the starting point, the regime where the
  /// minimizer is unique.
  bool certified = false;
};

/// Throws CutLocusError if an iterate reaches the cut locus of some point and
/// ContractError on an empty or mixed input.
FrechetResult frechet_mean(const std::vector<Point>& points, const FrechetConfig& cfg = {});

/// Sum of squared distances from `center` to every point.
double frechet_variance(const std::vector<Point>& points, const Point& center);

}  // namespace rcons
