#pragma once

// Independent numerical oracles: finite differences, closed-form triangle
// laws and a dense Laplacian iteration. Nothing here calls into the consensus
// update path; the verification suite compares the two.

#include "rcons/geometry.hpp"
#include "rcons/network.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace rcons::checks {

using ScalarField = std::function<double(const Point&)>;

/// (f(exp_x(h v)) - f(exp_x(-h v))) / (2 h).
double finite_diff_gradient(const ScalarField& f, const Point& x, const Tangent& v, double h = 1e-5);

/// Central second difference at t = 0 of t -> 1/2 d^2(gamma_1(t), gamma_2(t))
/// with gamma_1(t) = exp_y(t v1) and gamma_2(t) = exp_{x2}(t v2), where x2 is
/// the base point of v2. The hinge separation is d(y, x2).
double second_derivative_along_hinge(const Point& y, const Tangent& v1, const Tangent& v2,
                                     double h = 1e-4);

/// Third side of a geodesic triangle with sides l1, l2 enclosing angle beta on
/// a space of constant curvature kappa. Throws DomainError for kappa > 0 and a
/// side at or beyond pi / sqrt(kappa).
double cosine_law_third_side(double kappa, double l1, double l2, double beta);

/// Dense iteration x <- (I - eps L) x. Rows of x0 are nodes; columns are
/// coordinates.
Eigen::MatrixXd laplacian_consensus_oracle(const Graph& g, const Eigen::MatrixXd& x0, double eps,
                                           int iters);

Eigen::MatrixXd laplacian(const Graph& g);

// Verification suite ---------------------------------------------------------

struct Violation {
  std::string check;
  std::string manifold;
  int case_index = 0;
  double observed = 0.0;
  double limit = 0.0;
};

struct CheckResult {
  std::string name;
  std::string manifold;
  int cases = 0;
  /// Largest observed - limit; negative when every case passed.
  double worst_margin = 0.0;
  double tolerance = 0.0;
  std::vector<Violation> violations;
  bool passed() const { return violations.empty(); }
};

struct SuiteOptions {
  std::uint64_t seed = 1;
  int round_trip_cases = 1000;
  int triangle_cases = 500;
  int hinge_cases = 500;
  int gradient_cases = 100;
};

std::vector<Manifold> verification_manifolds();

CheckResult check_exp_log_round_trip(const Manifold& m, const SuiteOptions& opt);
CheckResult check_dist_equals_log_norm(const Manifold& m, const SuiteOptions& opt);
CheckResult check_gradient_identity(const Manifold& m, const SuiteOptions& opt);
CheckResult check_law_of_cosines(const Manifold& m, double kappa, const SuiteOptions& opt);
CheckResult check_hessian_bound(const Manifold& m, const SuiteOptions& opt);

/// Every check over every verification manifold.
std::vector<CheckResult> run_verification_suite(const SuiteOptions& opt = {});

void write_report(std::ostream& os, const std::vector<CheckResult>& results);
void write_violations_csv(std::ostream& os, const std::vector<CheckResult>& results);

}  // namespace rcons::checks
