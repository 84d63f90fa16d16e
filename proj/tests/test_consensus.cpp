#include "rcons/checks.hpp"
#include "rcons/consensus.hpp"
#include "rcons/frechet.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace rcons;
using rcons::testing::column;

namespace {

constexpr double kPi = std::numbers::pi;

NetworkState line_state(std::initializer_list<double> xs) {
  const auto r1 = Manifold::euclidean(1);
  std::vector<Point> pts;
  for (double x : xs) pts.push_back(make_point(r1, column({x})));
  return NetworkState::from_measurements(pts);
}

NetworkState sphere_pair() {
  const auto s2 = Manifold::sphere(2);
  return NetworkState::from_measurements(
      {make_point(s2, column({1, 0, 0})), make_point(s2, column({0, 1, 0}))});
}

}  // namespace

TEST_CASE("cost") {
  const auto line3 = make_topology(topology::Line{3});
  CHECK(cost(line3, line_state({2, 2, 2})) == 0.0);
  CHECK(cost(line3, line_state({0, 1, 3})) == doctest::Approx(2.5).epsilon(1e-15));
  const Graph pair(2, {{0, 1}});
  CHECK(cost(pair, sphere_pair()) == doctest::Approx(0.5 * (kPi / 2) * (kPi / 2)));
  CHECK(cost(pair, sphere_pair()) == doctest::Approx(1.2337).epsilon(1e-4));
}

TEST_CASE("grad_node") {
  const auto line3 = make_topology(topology::Line{3});
  const auto consensus = line_state({4, 4, 4});
  for (int i = 0; i < 3; ++i) CHECK(grad_node(line3, consensus, i).value.norm() == 0.0);

  const auto s = line_state({-1, 0, 2});
  CHECK(grad_node(line3, s, 1).value(0, 0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(grad_node(line3, s, 1).base.value(0, 0) == 0.0);

  const Graph pair(2, {{0, 1}});
  const auto sp = sphere_pair();
  CHECK(norm(grad_node(pair, sp, 0)) == doctest::Approx(kPi / 2));
  CHECK(norm(grad_node(pair, sp, 1)) == doctest::Approx(kPi / 2));
}

TEST_CASE("full_gradient_norm") {
  const Graph pair(2, {{0, 1}});
  CHECK(full_gradient_norm(pair, sphere_pair()) == doctest::Approx(std::sqrt(2.0) * kPi / 2));
  CHECK(full_gradient_norm(make_topology(topology::Ring{4}), line_state({1, 1, 1, 1})) == 0.0);

  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  for (int k = 0; k < 20; ++k) {
    const auto g = make_topology(topology::Tree{8, static_cast<std::uint64_t>(k + 1)});
    Eigen::MatrixXd x(8, 3);
    std::vector<Point> pts;
    const auto r3 = Manifold::euclidean(3);
    for (int i = 0; i < 8; ++i) {
      for (int c = 0; c < 3; ++c) x(i, c) = normal(rng);
      pts.push_back(make_point(r3, x.row(i).transpose()));
    }
    const double oracle = (checks::laplacian(g) * x).norm();
    CHECK(full_gradient_norm(g, NetworkState::from_measurements(pts)) == doctest::Approx(oracle).epsilon(1e-12));
  }
}

TEST_CASE("mu_max_d") {
  for (double d : {0.1, 1.0, 7.0}) CHECK(mu_max_d(d, 0.0, 0.0) == 2.0);
  CHECK(mu_max_d(kPi, 1.0, 1.0) == 2.0);
  CHECK(mu_max_d(kPi, 0.25, 0.25) == 2.0);

  const double grass = mu_max_d(2 * Manifold::grassmann(7, 3).r_star(), 0.0, 2.0);
  const double so = mu_max_d(2 * Manifold::special_orthogonal(7).r_star(), 0.0, 0.5);
  CHECK(std::abs(grass - 3.792) < 1e-3);
  CHECK(std::abs(so - 3.792) < 1e-3);
  const double closed_form = kPi * (1.0 / kPi + 1.0 / (std::sqrt(2.0) * std::sin(kPi / std::sqrt(2.0))));
  CHECK(so == doctest::Approx(closed_form).epsilon(1e-14));
  CHECK(grass == doctest::Approx(closed_form).epsilon(1e-14));

  CHECK_THROWS_AS(mu_max_d(0.0, 0.0, 0.0), DomainError);
  CHECK_THROWS_AS(mu_max_d(kPi / std::sqrt(2.0), 0.0, 2.0), DomainError);
  CHECK_THROWS_AS(mu_max_d(3.0, 0.0, 2.0), DomainError);
}

TEST_CASE("admissible_step") {
  const auto circ = make_topology(topology::Circulant{15, {1, 2}});
  StepSizePolicy point;
  point.mode = StepMode::AutoPointConvergence;
  CHECK(admissible_step(circ, Manifold::sphere(6), point).epsilon == 0.125);
  CHECK(admissible_step(circ, Manifold::special_orthogonal(3), point).epsilon == 0.125);

  const auto ring = make_topology(topology::Ring{5});
  const double eps = admissible_step(ring, Manifold::euclidean(2), StepSizePolicy{}).epsilon;
  CHECK(eps < 0.5);
  CHECK(eps > 0.5 * (1 - 1e-8));

  const auto grass = admissible_step(circ, Manifold::grassmann(7, 3), StepSizePolicy{});
  CHECK(grass.epsilon == doctest::Approx(2.0 / (4 * 3.792)).epsilon(1e-3));
  CHECK(grass.epsilon < 2.0 / grass.mu_max);

  StepSizePolicy half;
  half.safety = 0.5;
  CHECK(admissible_step(ring, Manifold::euclidean(2), half).epsilon == doctest::Approx(eps / 2));

  const auto big = admissible_step(ring, Manifold::euclidean(2), StepSizePolicy::explicit_step(0.6));
  CHECK(big.epsilon == 0.6);
  CHECK(big.exceeds_descent_bound);
  CHECK_FALSE(admissible_step(ring, Manifold::euclidean(2), StepSizePolicy::explicit_step(0.3)).exceeds_descent_bound);

  CHECK_THROWS_AS(admissible_step(ring, Manifold::euclidean(2), StepSizePolicy::explicit_step(0.0)), ContractError);
  StepSizePolicy wide;
  wide.d_max = 4.0;
  CHECK_THROWS_AS(admissible_step(ring, Manifold::sphere(2), wide), ContractError);
  StepSizePolicy bad_safety;
  bad_safety.safety = 1.5;
  CHECK_THROWS_AS(admissible_step(ring, Manifold::sphere(2), bad_safety), ContractError);
}

TEST_CASE("step") {
  const auto ring = make_topology(topology::Ring{4});
  const auto fixed = line_state({3, 3, 3, 3});
  const auto after = step(ring, fixed, 0.2);
  for (int i = 0; i < 4; ++i) CHECK(after.states[i].value(0, 0) == 3.0);
  CHECK(after.iteration == 1);

  // x_i + eps * sum_j (x_j - x_i) on a line with ends 0 and 3.
  const auto line3 = make_topology(topology::Line{3});
  const auto s = line_state({0, 1, 3});
  const auto next = step(line3, s, 0.25);
  CHECK(next.states[0].value(0, 0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(next.states[1].value(0, 0) == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(next.states[2].value(0, 0) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(next.measurements[2].value(0, 0) == 3.0);
  CHECK((next.states[0].value(0, 0) + next.states[1].value(0, 0) + next.states[2].value(0, 0)) / 3 ==
        doctest::Approx(4.0 / 3).epsilon(1e-15));

  CHECK_THROWS_AS(step(line3, s, 0.0), ContractError);
}

TEST_CASE("step is synchronous") {
  // A sequential sweep would let node 1 see node 0's new value.
  const auto line3 = make_topology(topology::Line{3});
  const auto s = line_state({0, 1, 3});
  const auto next = step(line3, s, 0.5);
  CHECK(next.states[1].value(0, 0) == doctest::Approx(1.5));
}

TEST_CASE("step raises at the cut locus") {
  const Graph pair(2, {{0, 1}});
  const auto s2 = Manifold::sphere(2);
  const auto s = NetworkState::from_measurements(
      {make_point(s2, column({1, 0, 0})), make_point(s2, column({-1, 0, 0}))});
  CHECK_THROWS_AS(step(pair, s, 0.1), CutLocusError);
  const auto trace = run(pair, s, StepSizePolicy{});
  CHECK(trace.error);
  CHECK_FALSE(trace.converged);
}

TEST_CASE("run: two nodes meet at the midpoint") {
  std::mt19937_64 rng(8);
  const Graph pair(2, {{0, 1}});
  StepSizePolicy policy;
  policy.mode = StepMode::AutoPointConvergence;
  for (const auto& m : rcons::testing::all_manifolds()) {
    CAPTURE(m.name());
    const auto c = rcons::testing::random_point(m, rng);
    const auto u = rcons::testing::points_in_ball(c, 2, 0.9, rng);
    const auto trace = run(pair, NetworkState::from_measurements(u), policy);
    REQUIRE_FALSE(trace.error);
    CHECK(trace.converged);
    const auto& limit = trace.final_states[0];
    const double d = dist(u[0], u[1]);
    if (m.constant_curvature() || m.kind() == ManifoldKind::Euclidean) {
      CHECK(std::abs(dist(limit, u[0]) - d / 2) < 1e-9);
      CHECK(std::abs(dist(limit, u[1]) - d / 2) < 1e-9);
      CHECK(dist(limit, frechet_mean(u).mean) < 1e-9);
    }
  }
}

TEST_CASE("run: Euclidean line converges to the average") {
  const auto line5 = make_topology(topology::Line{5});
  RunOptions opt;
  opt.max_iter = 2000;
  opt.grad_tol = 1e-13;
  const auto trace = run(line5, line_state({0, 1, 2, 3, 4}), StepSizePolicy{}, opt);
  CHECK(trace.converged);
  for (const auto& x : trace.final_states) CHECK(std::abs(x.value(0, 0) - 2.0) < 1e-10);
  CHECK(trace.frechet_gap < 1e-10);
}

TEST_CASE("run: circle ring gets trapped") {
  const auto circle = Manifold::sphere(1);
  std::vector<Point> u;
  for (double deg : {0.0, 80.0, 170.0, 230.0, 300.0}) {
    const double a = deg * kPi / 180.0;
    u.push_back(make_point(circle, column({std::cos(a), std::sin(a)})));
  }
  const auto s0 = NetworkState::from_measurements(u);
  const auto ring = run(make_topology(topology::Ring{5}), s0, StepSizePolicy{});
  CHECK_FALSE(ring.error);
  CHECK(ring.final_grad_norm < 1e-9);
  CHECK(ring.final_max_pair_dist > 1.0);
  CHECK_FALSE(ring.converged);
  CHECK(in_set_S(s0) == Certificate::Unknown);

  const auto line = run(make_topology(topology::Line{5}), s0, StepSizePolicy{});
  CHECK(line.converged);
}

TEST_CASE("run records and stopping rule") {
  const auto line3 = make_topology(topology::Line{3});
  RunOptions opt;
  opt.max_iter = 7;
  opt.grad_tol = 0.0;
  const auto trace = run(line3, line_state({0, 1, 3}), StepSizePolicy{}, opt);
  CHECK(trace.iterations == 7);
  CHECK(trace.records.size() == 8);
  CHECK(trace.records.front().iter == 0);
  CHECK(trace.records.front().cost == doctest::Approx(2.5));
  CHECK(trace.in_S_initial);
  CHECK(trace.in_S_conv_initial);

  const auto still = run(line3, line_state({1, 1, 1}), StepSizePolicy{});
  CHECK(still.iterations == 0);
  CHECK(still.converged);

  CHECK_THROWS_AS(run(Graph(4, {{0, 1}, {2, 3}}), line_state({0, 1, 2, 3}), StepSizePolicy{}),
                  DisconnectedGraphError);
}

TEST_CASE("in_set_S") {
  std::mt19937_64 rng(9);
  const auto s2 = Manifold::sphere(2);
  const auto x = rcons::testing::random_point(s2, rng);
  CHECK(in_set_S(NetworkState::from_measurements({x, x, x})) == Certificate::CertifiedYes);

  // Three points on a great circle 120 degrees apart: every center is at
  // least r* from one of them.
  std::vector<Point> spread;
  for (int k = 0; k < 3; ++k) {
    const double a = 2 * kPi * k / 3;
    spread.push_back(make_point(s2, column({std::cos(a), std::sin(a), 0})));
  }
  CHECK(in_set_S(NetworkState::from_measurements(spread)) == Certificate::Unknown);

  CHECK(in_set_S(line_state({-1e6, 0, 1e6})) == Certificate::CertifiedYes);
}

TEST_CASE("in_S_conv") {
  const auto line3 = make_topology(topology::Line{3});
  CHECK(in_S_conv(line3, line_state({5, 5, 5})));
  CHECK(in_S_conv(line3, line_state({-1e6, 0, 1e6})));

  const auto s2 = Manifold::sphere(2);
  const Graph pair(2, {{0, 1}});
  const double r_star = s2.r_star();
  const auto x = make_point(s2, column({1, 0, 0}));
  const auto y = make_point(s2, column({std::cos(r_star), std::sin(r_star), 0}));
  const auto s = NetworkState::from_measurements({x, y});
  CHECK(std::abs(cost(pair, s) - r_star * r_star / 2) < 1e-15);
  CHECK_FALSE(in_S_conv(pair, s));
  const auto closer = make_point(s2, column({std::cos(0.99 * r_star), std::sin(0.99 * r_star), 0}));
  CHECK(in_S_conv(pair, NetworkState::from_measurements({x, closer})));
}

TEST_CASE("trace and summary CSV layout") {
  const auto line3 = make_topology(topology::Line{3});
  RunOptions opt;
  opt.max_iter = 2;
  opt.grad_tol = 0.0;
  const auto trace = run(line3, line_state({0, 1, 3}), StepSizePolicy{}, opt);
  std::ostringstream os;
  write_trace_csv(os, trace);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  CHECK(header ==
        "iter,cost,grad_norm,max_pair_dist,max_edge_dist,in_S,in_S_conv,dist_node_1_to_frechet,"
        "dist_node_2_to_frechet,dist_node_3_to_frechet,frechet_gap");
  int rows = 0;
  for (std::string line; std::getline(is, line);) ++rows;
  CHECK(rows == 3);

  std::ostringstream summary;
  write_summary_csv(summary, trace, 42);
  CHECK(summary.str().rfind("seed,epsilon,converged,frechet_gap", 0) == 0);
  CHECK(summary.str().find("\n42,") != std::string::npos);
}
