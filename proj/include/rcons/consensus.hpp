#pragma once

// Riemannian consensus: each node moves along the geodesic that decreases the
// sum of squared distances to its neighbors,
//
//   x_i <- exp_{x_i}(eps * sum_{j in N_i} log_{x_i}(x_j)),
//
// with all gradients taken from the same iteration snapshot. The step size
// calculus bounds the Hessian of the pairwise cost by mu_max^d and the
// Hessian of the network cost by mu_max = mu_max^d * deg(G).

#include "rcons/geometry.hpp"
#include "rcons/network.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rcons {

struct NetworkState {
  Manifold manifold;
  std::vector<Point> states;
  std::vector<Point> measurements;
  int iteration = 0;

  /// Initial state x_i(0) = u_i.
  static NetworkState from_measurements(std::vector<Point> measurements);

  int size() const { return static_cast<int>(states.size()); }
};

enum class StepMode { Explicit, AutoDescent, AutoPointConvergence };

struct StepSizePolicy {
  StepMode mode = StepMode::AutoDescent;
  /// Used by StepMode::Explicit only.
  double epsilon = 0.0;
  /// Largest neighbor distance the Hessian bound must cover; 2 r* when unset.
  std::optional<double> d_max;
  double safety = 1.0;

  static StepSizePolicy explicit_step(double eps) {
    return {StepMode::Explicit, eps, std::nullopt, 1.0};
  }
};

struct StepSize {
  double epsilon = 0.0;
  double mu_max = 0.0;
  /// Explicit eps at or above 2 / mu_max, where descent is no longer certified.
  bool exceeds_descent_bound = false;
};

/// phi = 1/2 sum over edges of d^2(x_i, x_j).
double cost(const Graph& g, const NetworkState& s);

/// grad_{x_i} phi = -sum_{j in N_i} log_{x_i}(x_j).
Tangent grad_node(const Graph& g, const NetworkState& s, int i);

/// All node gradients evaluated on one snapshot.
std::vector<Tangent> node_gradients(const Graph& g, const std::vector<Point>& states);

/// Norm of the gradient under the product metric.
double full_gradient_norm(const Graph& g, const NetworkState& s);

/// Pairwise Hessian bound max{2, d (C_delta(d)/S_delta(d) + 1/S_Delta(d))}.
/// Constant non-negative curvature returns exactly 2. Throws DomainError when
/// S_Delta(d_max) <= 0 or d_max is not positive.
double mu_max_d(double d_max, double delta, double Delta);

StepSize admissible_step(const Graph& g, const Manifold& m, const StepSizePolicy& policy);

/// One synchronous update. Throws CutLocusError.
NetworkState step(const Graph& g, const NetworkState& s, double eps);

double max_pairwise_distance(const std::vector<Point>& points);
double max_edge_distance(const Graph& g, const std::vector<Point>& states);

// Certificates ---------------------------------------------------------------

enum class Certificate { CertifiedYes, Unknown };

/// A center y with max_i d(x_i, y) < r*, searched among `hint`, the Frechet
/// mean of the states and the states themselves. A sufficient test for
/// membership in the tube around the consensus diagonal.
std::optional<Point> certify_S(const std::vector<Point>& states,
                               const std::optional<Point>& hint = std::nullopt);
Certificate in_set_S(const NetworkState& s);

/// phi(x) < r*^2 / (2 diam(G)); always true when r* is infinite.
bool in_S_conv(const Graph& g, const NetworkState& s);

// Runs -----------------------------------------------------------------------

struct RunOptions {
  int max_iter = 150;
  double grad_tol = 1e-10;
  double consensus_tol = 1e-6;
  /// Compute the Frechet mean of the states every iteration.
  bool track_frechet_gap = true;
  /// Evaluate the S certificate every iteration (always at iteration 0).
  bool track_certificates = true;
};

struct IterationRecord {
  int iter = 0;
  double cost = 0.0;
  double grad_norm = 0.0;
  double max_pair_dist = 0.0;
  double max_edge_dist = 0.0;
  bool edge_exceeds_d_max = false;
  bool in_S = false;
  bool in_S_conv = false;
  /// d(x_i, u_bar) per node; NaN when u_bar is unavailable.
  std::vector<double> dist_to_frechet;
  /// d(frechet(x), u_bar); NaN when not tracked.
  double frechet_gap = 0.0;
};

struct RunTrace {
  std::vector<IterationRecord> records;
  double epsilon = 0.0;
  double mu_max = 0.0;
  double d_max = 0.0;
  bool converged = false;
  int iterations = 0;
  double final_max_pair_dist = 0.0;
  double final_grad_norm = 0.0;
  /// d(frechet(final states), frechet(measurements)).
  double frechet_gap = 0.0;
  bool measurement_mean_certified = false;
  bool in_S_initial = false;
  bool in_S_conv_initial = false;
  bool error = false;
  std::string error_message;
  std::vector<Point> final_states;
  std::optional<Point> measurement_mean;
};

RunTrace run(const Graph& g, const NetworkState& s0, const StepSizePolicy& policy,
             const RunOptions& options = {});

/// iter, cost, grad_norm, max_pair_dist, max_edge_dist, in_S, in_S_conv,
/// dist_node_1_to_frechet ... dist_node_N_to_frechet, frechet_gap.
void write_trace_csv(std::ostream& os, const RunTrace& trace);

/// Single-row summary: seed, epsilon, converged, frechet_gap, then run
/// bookkeeping and the initial certificates.
void write_summary_csv(std::ostream& os, const RunTrace& trace, std::uint64_t seed);

}  // namespace rcons
