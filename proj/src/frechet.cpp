#include "rcons/frechet.hpp"

#include <algorithm>

namespace rcons {

FrechetResult frechet_mean(const std::vector<Point>& points, const FrechetConfig& cfg) {
  if (points.empty()) throw ContractError("Frechet mean of an empty set");
  if (cfg.tol <= 0.0) throw ContractError("Frechet tolerance must be positive");
  const Manifold& m = points.front().manifold;
  for (const auto& u : points)
    if (!(u.manifold == m)) throw ContractError("Frechet mean over mixed manifolds");

  Point x = cfg.init.value_or(points.front());
  const double r_star = m.r_star();
  bool certified = true;
  for (const auto& u : points) certified = certified && dist(x, u) < r_star;

  const double inv_n = 1.0 / static_cast<double>(points.size());
  FrechetResult result{x, 0, 0.0, false, certified};
  for (int it = 0;; ++it) {
    Tangent w = zero_tangent(x);
    for (const auto& u : points) w += log(x, u);
    w *= inv_n;
    const double g = norm(x, w);
    result.iterations = it;
    result.gradient_norm = g;
    if (g < cfg.tol) {
      result.converged = true;
      break;
    }
    if (it >= cfg.max_iter) break;
    x = exp(x, w);
  }
  result.mean = std::move(x);
  return result;
}

double frechet_variance(const std::vector<Point>& points, const Point& center) {
  double total = 0.0;
  for (const auto& u : points) {
    const double d = dist(center, u);
    total += d * d;
  }
  return total;
}

}  // namespace rcons
