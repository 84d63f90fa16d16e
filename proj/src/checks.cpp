#include "rcons/checks.hpp"

#include "rcons/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

namespace rcons::checks {

namespace {

constexpr double kPi = std::numbers::pi;

double half_sq_dist(const Point& a, const Point& b) {
  const double d = dist(a, b);
  return 0.5 * d * d;
}

// Largest tangent length the samplers use: a margin inside the injectivity
// radius, or a fixed box for flat space.
double sampling_radius(const Manifold& m, double fraction) {
  const double inj = m.injectivity_radius();
  return std::isinf(inj) ? 5.0 : fraction * inj;
}

Point random_point(const Manifold& m, std::mt19937_64& rng) {
  return random_point_near(base_point(m), 1.0, rng);
}

Tangent random_tangent_of_length(const Point& x, double length, std::mt19937_64& rng) {
  return length * random_unit_tangent(x, rng);
}

void record(CheckResult& r, const Manifold& m, int index, double observed, double limit) {
  r.worst_margin = std::max(r.worst_margin, observed - limit);
  if (!(observed <= limit)) r.violations.push_back({r.name, m.name(), index, observed, limit});
}

}  // namespace

double finite_diff_gradient(const ScalarField& f, const Point& x, const Tangent& v, double h) {
  if (!(h > 0.0)) throw ContractError("finite-difference step must be positive");
  return (f(exp(x, h * v)) - f(exp(x, -h * v))) / (2.0 * h);
}

double second_derivative_along_hinge(const Point& y, const Tangent& v1, const Tangent& v2, double h) {
  if (!(h > 0.0)) throw ContractError("finite-difference step must be positive");
  const Point& x2 = v2.base;
  auto phi = [&](double t) { return half_sq_dist(exp(y, t * v1), exp(x2, t * v2)); };
  return (phi(h) - 2.0 * phi(0.0) + phi(-h)) / (h * h);
}

double cosine_law_third_side(double kappa, double l1, double l2, double beta) {
  if (l1 < 0.0 || l2 < 0.0) throw DomainError("triangle sides must be non-negative");
  if (kappa == 0.0) {
    const double sq = l1 * l1 + l2 * l2 - 2.0 * l1 * l2 * std::cos(beta);
    return std::sqrt(std::max(0.0, sq));
  }
  if (kappa > 0.0) {
    const double r = std::sqrt(kappa);
    if (l1 >= kPi / r || l2 >= kPi / r) throw DomainError("hinge side beyond pi / sqrt(kappa)");
    const double a = r * l1;
    const double b = r * l2;
    // cos c = cos a cos b + sin a sin b cos beta, in haversine form so that
    // short third sides keep full precision.
    const double s_half_diff = std::sin(0.5 * (a - b));
    const double s_half_beta = std::sin(0.5 * beta);
    const double hav = s_half_diff * s_half_diff + std::sin(a) * std::sin(b) * s_half_beta * s_half_beta;
    return 2.0 * std::asin(std::sqrt(std::clamp(hav, 0.0, 1.0))) / r;
  }
  const double r = std::sqrt(-kappa);
  const double a = r * l1;
  const double b = r * l2;
  const double ch = std::cosh(a) * std::cosh(b) - std::sinh(a) * std::sinh(b) * std::cos(beta);
  return std::acosh(std::max(1.0, ch)) / r;
}

Eigen::MatrixXd laplacian(const Graph& g) {
  const int n = g.n_vertices();
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (auto [i, j] : g.edges()) {
    lap(i, j) -= 1.0;
    lap(j, i) -= 1.0;
    lap(i, i) += 1.0;
    lap(j, j) += 1.0;
  }
  return lap;
}

Eigen::MatrixXd laplacian_consensus_oracle(const Graph& g, const Eigen::MatrixXd& x0, double eps,
                                           int iters) {
  if (x0.rows() != g.n_vertices()) throw ContractError("oracle state has the wrong node count");
  const Eigen::MatrixXd update =
      Eigen::MatrixXd::Identity(g.n_vertices(), g.n_vertices()) - eps * laplacian(g);
  Eigen::MatrixXd x = x0;
  for (int k = 0; k < iters; ++k) x = update * x;
  return x;
}

// Verification suite ---------------------------------------------------------

std::vector<Manifold> verification_manifolds() {
  return {Manifold::euclidean(3),          Manifold::sphere(2),      Manifold::sphere(6),
          Manifold::special_orthogonal(3), Manifold::special_orthogonal(4),
          Manifold::special_orthogonal(7), Manifold::grassmann(4, 2), Manifold::grassmann(7, 3)};
}

CheckResult check_exp_log_round_trip(const Manifold& m, const SuiteOptions& opt) {
  CheckResult r{"exp_log_round_trip", m.name(), opt.round_trip_cases, -kInfinity, 1e-8, {}};
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double radius = sampling_radius(m, 0.9);
  for (int k = 0; k < opt.round_trip_cases; ++k) {
    const Point x = random_point(m, rng);
    const Tangent v = random_tangent_of_length(x, radius * unit(rng), rng);
    const Tangent back = log(x, exp(x, v));
    Tangent diff = back;
    diff.value -= v.value;
    record(r, m, k, norm(x, diff), r.tolerance);
  }
  return r;
}

CheckResult check_dist_equals_log_norm(const Manifold& m, const SuiteOptions& opt) {
  CheckResult r{"dist_equals_log_norm", m.name(), opt.round_trip_cases, -kInfinity, 1e-10, {}};
  std::mt19937_64 rng(opt.seed + 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double radius = sampling_radius(m, 0.9);
  for (int k = 0; k < opt.round_trip_cases; ++k) {
    const Point x = random_point(m, rng);
    const Point y = exp(x, random_tangent_of_length(x, radius * unit(rng), rng));
    record(r, m, k, std::abs(dist(x, y) - norm(log(x, y))), r.tolerance);
  }
  return r;
}

CheckResult check_gradient_identity(const Manifold& m, const SuiteOptions& opt) {
  CheckResult r{"gradient_identity", m.name(), opt.gradient_cases, -kInfinity, 1e-5, {}};
  std::mt19937_64 rng(opt.seed + 2);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  const double radius = std::isinf(m.r_star()) ? 3.0 : 0.9 * m.r_star();
  for (int k = 0; k < opt.gradient_cases; ++k) {
    const Point x = random_point(m, rng);
    const Point y = exp(x, random_tangent_of_length(x, radius * unit(rng), rng));
    const Tangent v = random_unit_tangent(x, rng);
    const Tangent grad = -log(x, y);
    const double analytic = inner(x, grad, v);
    const double numeric = finite_diff_gradient([&](const Point& p) { return half_sq_dist(p, y); }, x, v);
    const double scale = std::max(norm(x, grad), 1e-12);
    record(r, m, k, std::abs(numeric - analytic) / scale, r.tolerance);
  }
  return r;
}

CheckResult check_law_of_cosines(const Manifold& m, double kappa, const SuiteOptions& opt) {
  CheckResult r{"law_of_cosines", m.name(), opt.triangle_cases, -kInfinity, 1e-8, {}};
  std::mt19937_64 rng(opt.seed + 3);
  // Both sides below 0.45 inj keep the third side inside the injectivity radius.
  std::uniform_real_distribution<double> side(0.1, 0.45 * m.injectivity_radius());
  std::uniform_real_distribution<double> angle(0.05, kPi - 0.05);
  for (int k = 0; k < opt.triangle_cases; ++k) {
    const Point y = random_point(m, rng);
    const Tangent e1 = random_unit_tangent(y, rng);
    Tangent e2 = random_unit_tangent(y, rng);
    e2.value -= inner(y, e1, e2) * e1.value;
    e2 *= 1.0 / norm(y, e2);
    const double l1 = side(rng);
    const double l2 = side(rng);
    const double beta = angle(rng);
    const Point x1 = exp(y, l1 * e1);
    Tangent dir = std::cos(beta) * e1;
    dir.value += std::sin(beta) * e2.value;
    const Point x2 = exp(y, l2 * dir);
    record(r, m, k, std::abs(dist(x1, x2) - cosine_law_third_side(kappa, l1, l2, beta)), r.tolerance);
  }
  return r;
}

CheckResult check_hessian_bound(const Manifold& m, const SuiteOptions& opt) {
  CheckResult r{"hessian_bound", m.name(), opt.hinge_cases, -kInfinity, 1e-6, {}};
  std::mt19937_64 rng(opt.seed + 4);
  const double d_max = std::isinf(m.r_star()) ? 3.0 : 0.95 * 2.0 * m.r_star();
  std::uniform_real_distribution<double> separation(0.05, d_max);
  std::uniform_real_distribution<double> speed(0.1, 1.0);
  for (int k = 0; k < opt.hinge_cases; ++k) {
    const Point y = random_point(m, rng);
    const double l = separation(rng);
    const Point x2 = exp(y, random_tangent_of_length(y, l, rng));
    const Tangent v1 = random_tangent_of_length(y, speed(rng), rng);
    const Tangent v2 = random_tangent_of_length(x2, speed(rng), rng);
    const double second = second_derivative_along_hinge(y, v1, v2);
    const double energy = inner(y, v1, v1) + inner(x2, v2, v2);
    const double bound = mu_max_d(dist(y, x2), m.delta(), m.Delta()) * energy;
    record(r, m, k, second, bound + r.tolerance);
  }
  return r;
}

std::vector<CheckResult> run_verification_suite(const SuiteOptions& opt) {
  std::vector<CheckResult> out;
  for (const auto& m : verification_manifolds()) {
    out.push_back(check_exp_log_round_trip(m, opt));
    out.push_back(check_dist_equals_log_norm(m, opt));
    out.push_back(check_gradient_identity(m, opt));
    out.push_back(check_hessian_bound(m, opt));
    if (m.kind() == ManifoldKind::Sphere) out.push_back(check_law_of_cosines(m, 1.0, opt));
    if (m.kind() == ManifoldKind::SpecialOrthogonal && m.n() == 3)
      out.push_back(check_law_of_cosines(m, 0.25, opt));
  }
  return out;
}

void write_report(std::ostream& os, const std::vector<CheckResult>& results) {
  for (const auto& r : results) {
    char line[256];
    std::snprintf(line, sizeof line, "%-4s %-22s %-12s cases=%-5d worst_margin=%-12.3e violations=%zu\n",
                  r.passed() ? "PASS" : "FAIL", r.name.c_str(), r.manifold.c_str(), r.cases, r.worst_margin, r.violations.size());
    os << line;
  }
}

void write_violations_csv(std::ostream& os, const std::vector<CheckResult>& results) {
  os << "check,manifold,case,observed,limit\n";
  for (const auto& r : results)
    for (const auto& v : r.violations) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g,%.17g", v.observed, v.limit);
      os << v.check << ',' << v.manifold << ',' << v.case_index << ',' << buf << '\n';
    }
}

}  // namespace rcons::checks
