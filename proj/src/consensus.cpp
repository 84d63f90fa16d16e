#include "rcons/consensus.hpp"

#include "rcons/frechet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace rcons {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Keeps the automatic descent step strictly inside the open interval (0, 2/mu_max).
constexpr double kOpenIntervalMargin = 1e-9;

void require_state(const Graph& g, const std::vector<Point>& states) {
  if (static_cast<int>(states.size()) != g.n_vertices())
    throw ContractError("state count does not match the graph");
}

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

NetworkState NetworkState::from_measurements(std::vector<Point> measurements) {
  if (measurements.empty()) throw ContractError("network needs at least one node");
  const Manifold m = measurements.front().manifold;
  for (const auto& u : measurements)
    if (!(u.manifold == m)) throw ContractError("measurements on different manifolds");
  NetworkState s{m, measurements, std::move(measurements), 0};
  return s;
}

double cost(const Graph& g, const NetworkState& s) {
  require_state(g, s.states);
  double phi = 0.0;
  for (auto [i, j] : g.edges()) {
    const double d = dist(s.states[static_cast<std::size_t>(i)], s.states[static_cast<std::size_t>(j)]);
    phi += d * d;
  }
  return 0.5 * phi;
}

namespace {

Tangent gradient_at(const Graph& g, const std::vector<Point>& states, int i) {
  const Point& xi = states[static_cast<std::size_t>(i)];
  Tangent grad = zero_tangent(xi);
  for (int j : g.neighbors(i)) grad += log(xi, states[static_cast<std::size_t>(j)]);
  grad *= -1.0;
  return grad;
}

double product_norm(const std::vector<Tangent>& grads) {
  double total = 0.0;
  for (const auto& v : grads) {
    const double n = norm(v);
    total += n * n;
  }
  return std::sqrt(total);
}

std::vector<Point> apply_step(const std::vector<Point>& states, const std::vector<Tangent>& grads,
                              double eps) {
  std::vector<Point> next;
  next.reserve(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) next.push_back(exp(states[i], -eps * grads[i]));
  return next;
}

}  // namespace

Tangent grad_node(const Graph& g, const NetworkState& s, int i) {
  require_state(g, s.states);
  return gradient_at(g, s.states, i);
}

std::vector<Tangent> node_gradients(const Graph& g, const std::vector<Point>& states) {
  require_state(g, states);
  std::vector<Tangent> grads;
  grads.reserve(states.size());
  for (int i = 0; i < g.n_vertices(); ++i) grads.push_back(gradient_at(g, states, i));
  return grads;
}

double full_gradient_norm(const Graph& g, const NetworkState& s) {
  return product_norm(node_gradients(g, s.states));
}

// Step size calculus --------------------------------------------------------

double mu_max_d(double d_max, double delta, double Delta) {
  if (!(d_max > 0.0)) throw DomainError("d_max must be positive");
  if (delta > Delta) throw DomainError("curvature bounds require delta <= Delta");
  // For constant curvature kappa >= 0 the bracket is d * sqrt(kappa) *
  // cot(sqrt(kappa) d / 2) <= 2, so the maximum is attained by the constant.
  if (delta == Delta && Delta >= 0.0) return 2.0;
  if (std::isinf(d_max)) throw DomainError("d_max must be finite for non-constant curvature");
  const double s_upper = s_kappa(Delta, d_max);
  if (s_upper <= 0.0) throw DomainError("S_Delta(d_max) <= 0: d_max beyond pi / sqrt(Delta)");
  const double bracket = d_max * (c_kappa(delta, d_max) / s_kappa(delta, d_max) + 1.0 / s_upper);
  return std::max(2.0, bracket);
}

StepSize admissible_step(const Graph& g, const Manifold& m, const StepSizePolicy& policy) {
  if (!(policy.safety > 0.0 && policy.safety <= 1.0))
    throw ContractError("step safety factor must lie in (0, 1]");
  const double two_r_star = 2.0 * m.r_star();
  const double d_max = policy.d_max.value_or(two_r_star);
  if (d_max > two_r_star) throw ContractError("d_max exceeds 2 r*");
  const double mu_max = mu_max_d(d_max, m.delta(), m.Delta()) * max_degree(g);
  StepSize out;
  out.mu_max = mu_max;
  switch (policy.mode) {
    case StepMode::Explicit:
      if (!(policy.epsilon > 0.0)) throw ContractError("explicit step size must be positive");
      out.epsilon = policy.epsilon;
      out.exceeds_descent_bound = policy.epsilon >= 2.0 / mu_max;
      break;
    case StepMode::AutoDescent:
      out.epsilon = policy.safety * (2.0 / mu_max) * (1.0 - kOpenIntervalMargin);
      break;
    case StepMode::AutoPointConvergence:
      out.epsilon = policy.safety / mu_max;
      break;
  }
  return out;
}

NetworkState step(const Graph& g, const NetworkState& s, double eps) {
  if (!(eps > 0.0)) throw ContractError("step size must be positive");
  const auto grads = node_gradients(g, s.states);
  NetworkState next{s.manifold, apply_step(s.states, grads, eps), s.measurements, s.iteration + 1};
  return next;
}

double max_pairwise_distance(const std::vector<Point>& points) {
  double best = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j) best = std::max(best, dist(points[i], points[j]));
  return best;
}

double max_edge_distance(const Graph& g, const std::vector<Point>& states) {
  require_state(g, states);
  double best = 0.0;
  for (auto [i, j] : g.edges())
    best = std::max(best, dist(states[static_cast<std::size_t>(i)], states[static_cast<std::size_t>(j)]));
  return best;
}

// Certificates ----------------------------------------------------------------

namespace {

bool is_center(const std::vector<Point>& states, const Point& y, double r_star) {
  return std::all_of(states.begin(), states.end(),
                     [&](const Point& x) { return dist(x, y) < r_star; });
}

}  // namespace

std::optional<Point> certify_S(const std::vector<Point>& states, const std::optional<Point>& hint) {
  if (states.empty()) return std::nullopt;
  const double r_star = states.front().manifold.r_star();
  if (std::isinf(r_star)) return states.front();
  if (hint && is_center(states, *hint, r_star)) return hint;
  try {
    FrechetConfig cfg;
    cfg.max_iter = 200;
    cfg.tol = 1e-10;
    const auto fm = frechet_mean(states, cfg);
    if (is_center(states, fm.mean, r_star)) return fm.mean;
  } catch (const CutLocusError&) {
    // Fall through to the node candidates.
  }
  for (const auto& y : states)
    if (is_center(states, y, r_star)) return y;
  return std::nullopt;
}

Certificate in_set_S(const NetworkState& s) {
  return certify_S(s.states) ? Certificate::CertifiedYes : Certificate::Unknown;
}

namespace {

bool in_S_conv_with(double phi, double r_star, int diam) {
  if (std::isinf(r_star)) return true;
  return phi < r_star * r_star / (2.0 * diam);
}

}  // namespace

bool in_S_conv(const Graph& g, const NetworkState& s) {
  const double r_star = s.manifold.r_star();
  if (std::isinf(r_star)) return true;
  return in_S_conv_with(cost(g, s), r_star, diameter(g));
}

// Runs -----------------------------------------------------------------------

RunTrace run(const Graph& g, const NetworkState& s0, const StepSizePolicy& policy,
             const RunOptions& options) {
  require_state(g, s0.states);
  if (!is_connected(g)) throw DisconnectedGraphError("consensus run on a disconnected graph");

  const StepSize step_size = admissible_step(g, s0.manifold, policy);
  const double r_star = s0.manifold.r_star();
  const int diam = diameter(g);
  const std::size_t n = s0.states.size();

  RunTrace trace;
  trace.epsilon = step_size.epsilon;
  trace.mu_max = step_size.mu_max;
  trace.d_max = policy.d_max.value_or(2.0 * r_star);

  try {
    const auto fm = frechet_mean(s0.measurements);
    trace.measurement_mean = fm.mean;
    trace.measurement_mean_certified = fm.certified && fm.converged;
  } catch (const CutLocusError&) {
    trace.measurement_mean.reset();
  }

  std::vector<Point> states = s0.states;
  std::optional<Point> states_mean;
  int iter = s0.iteration;
  for (;;) {
    IterationRecord rec;
    rec.iter = iter;
    std::vector<Tangent> grads;
    try {
      grads = node_gradients(g, states);
      rec.grad_norm = product_norm(grads);
      NetworkState snapshot{s0.manifold, states, s0.measurements, iter};
      rec.cost = cost(g, snapshot);
      rec.max_pair_dist = max_pairwise_distance(states);
      rec.max_edge_dist = max_edge_distance(g, states);
    } catch (const CutLocusError& e) {
      trace.error = true;
      trace.error_message = e.what();
      break;
    }
    rec.edge_exceeds_d_max = rec.max_edge_dist > trace.d_max;
    rec.in_S_conv = in_S_conv_with(rec.cost, r_star, diam);

    rec.frechet_gap = kNaN;
    if (options.track_frechet_gap) {
      try {
        FrechetConfig cfg;
        cfg.init = states_mean.value_or(states.front());
        states_mean = frechet_mean(states, cfg).mean;
        if (trace.measurement_mean) rec.frechet_gap = dist(*states_mean, *trace.measurement_mean);
      } catch (const CutLocusError&) {
        states_mean.reset();
      }
    }
    if (options.track_certificates || trace.records.empty())
      rec.in_S = certify_S(states, states_mean).has_value();

    rec.dist_to_frechet.assign(n, kNaN);
    if (trace.measurement_mean)
      for (std::size_t i = 0; i < n; ++i) rec.dist_to_frechet[i] = dist(states[i], *trace.measurement_mean);

    if (trace.records.empty()) {
      trace.in_S_initial = rec.in_S;
      trace.in_S_conv_initial = rec.in_S_conv;
    }
    trace.final_grad_norm = rec.grad_norm;
    trace.final_max_pair_dist = rec.max_pair_dist;
    trace.iterations = iter - s0.iteration;
    trace.records.push_back(std::move(rec));

    if (trace.final_grad_norm < options.grad_tol) break;
    if (iter - s0.iteration >= options.max_iter) break;

    try {
      states = apply_step(states, grads, step_size.epsilon);
    } catch (const CutLocusError& e) {
      trace.error = true;
      trace.error_message = e.what();
      break;
    }
    ++iter;
  }

  trace.converged = !trace.error && !trace.records.empty() &&
                    trace.final_max_pair_dist < options.consensus_tol;
  trace.frechet_gap = kNaN;
  if (trace.measurement_mean) {
    try {
      FrechetConfig cfg;
      cfg.init = states_mean.value_or(states.front());
      trace.frechet_gap = dist(frechet_mean(states, cfg).mean, *trace.measurement_mean);
    } catch (const CutLocusError&) {
    }
  }
  trace.final_states = std::move(states);
  return trace;
}

void write_trace_csv(std::ostream& os, const RunTrace& trace) {
  const std::size_t n = trace.final_states.size();
  os << "iter,cost,grad_norm,max_pair_dist,max_edge_dist,in_S,in_S_conv";
  for (std::size_t i = 0; i < n; ++i) os << ",dist_node_" << i + 1 << "_to_frechet";
  os << ",frechet_gap\n";
  for (const auto& r : trace.records) {
    os << r.iter << ',' << fmt_double(r.cost) << ',' << fmt_double(r.grad_norm) << ','
       << fmt_double(r.max_pair_dist) << ',' << fmt_double(r.max_edge_dist) << ',' << (r.in_S ? 1 : 0)
       << ',' << (r.in_S_conv ? 1 : 0);
    for (double d : r.dist_to_frechet) os << ',' << fmt_double(d);
    os << ',' << fmt_double(r.frechet_gap) << '\n';
  }
}

void write_summary_csv(std::ostream& os, const RunTrace& trace, std::uint64_t seed) {
  os << "seed,epsilon,converged,frechet_gap,iterations,final_max_pair_dist,final_grad_norm,"
        "mu_max,in_S_initial,in_S_conv_initial,error\n";
  os << seed << ',' << fmt_double(trace.epsilon) << ',' << (trace.converged ? 1 : 0) << ','
     << fmt_double(trace.frechet_gap) << ',' << trace.iterations << ','
     << fmt_double(trace.final_max_pair_dist) << ',' << fmt_double(trace.final_grad_norm) << ','
     << fmt_double(trace.mu_max) << ',' << (trace.in_S_initial ? 1 : 0) << ','
     << (trace.in_S_conv_initial ? 1 : 0) << ',' << (trace.error ? 1 : 0) << '\n';
}

}  // namespace rcons
