#include "rcons/harness.hpp"

#include "rcons/svg.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <numbers>
#include <sstream>

namespace rcons::harness {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream is(value);
  T out{};
  if (!(is >> out) || !(is >> std::ws).eof())
    throw ConfigError("bad value '" + value + "' for key '" + key + "'");
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << text;
}

template <class F>
void write_stream(const std::filesystem::path& path, F&& body) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  body(os);
}

std::vector<double> iteration_axis(const RunTrace& trace) {
  std::vector<double> x;
  for (const auto& r : trace.records) x.push_back(r.iter);
  return x;
}

svg::Chart distance_chart(const RunTrace& trace, const std::string& title) {
  svg::Chart chart{title, "iteration", "distance to Frechet mean of measurements", true, {}};
  const auto x = iteration_axis(trace);
  const std::size_t n = trace.final_states.size();
  for (std::size_t i = 0; i < n; ++i) {
    svg::Series s{"node " + std::to_string(i + 1), x, {}};
    for (const auto& r : trace.records) s.y.push_back(r.dist_to_frechet[i]);
    chart.series.push_back(std::move(s));
  }
  return chart;
}

svg::Chart gap_chart(const RunTrace& trace, const std::string& title) {
  svg::Chart chart{title, "iteration", "distance between Frechet means", true, {}};
  svg::Series s{"frechet gap", iteration_axis(trace), {}};
  for (const auto& r : trace.records) s.y.push_back(r.frechet_gap);
  chart.series.push_back(std::move(s));
  return chart;
}

void write_run_files(const std::filesystem::path& dir, const std::string& prefix, const RunTrace& trace,
                     std::uint64_t seed) {
  write_stream(dir / (prefix + "trace.csv"), [&](std::ostream& os) { write_trace_csv(os, trace); });
  write_stream(dir / (prefix + "summary.csv"), [&](std::ostream& os) { write_summary_csv(os, trace, seed); });
}

}  // namespace

// Configuration ---------------------------------------------------------------

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (key == "manifold") {
    if (value != "euclidean" && value != "sphere" && value != "so" && value != "grassmann")
      throw ConfigError("unknown manifold '" + value + "' (euclidean, sphere, so, grassmann)");
    cfg.manifold = value;
  } else if (key == "n") {
    cfg.n = parse_number<int>(key, value);
  } else if (key == "p") {
    cfg.p = parse_number<int>(key, value);
  } else if (key == "topology") {
    cfg.topology = value;
  } else if (key == "nodes") {
    cfg.nodes = parse_number<int>(key, value);
  } else if (key == "sigma") {
    cfg.sigma = parse_number<double>(key, value);
    if (cfg.sigma < 0.0) throw ConfigError("sigma must be non-negative");
  } else if (key == "noise") {
    if (value != "total" && value != "per-coordinate")
      throw ConfigError("unknown noise convention '" + value + "' (total, per-coordinate)");
    cfg.noise = value;
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "iterations" || key == "iters") {
    cfg.iterations = parse_number<int>(key, value);
    if (cfg.iterations < 0) throw ConfigError("iterations must be non-negative");
  } else if (key == "step") {
    if (value != "auto-descent" && value != "auto-point" && value != "explicit")
      throw ConfigError("unknown step policy '" + value + "' (auto-descent, auto-point, explicit)");
    cfg.step = value;
  } else if (key == "epsilon") {
    cfg.epsilon = parse_number<double>(key, value);
  } else if (key == "safety") {
    cfg.safety = parse_number<double>(key, value);
  } else if (key == "d_max") {
    if (value.empty() || value == "auto")
      cfg.d_max.reset();
    else
      cfg.d_max = parse_number<double>(key, value);
  } else if (key == "grad_tol") {
    cfg.grad_tol = parse_number<double>(key, value);
  } else if (key == "consensus_tol") {
    cfg.consensus_tol = parse_number<double>(key, value);
  } else if (key == "out") {
    cfg.out = value;
  } else if (key == "name") {
    cfg.name = value;
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

std::map<std::string, std::string> parse_config(std::istream& is) {
  std::map<std::string, std::string> out;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file " + path.string());
  ExperimentConfig cfg;
  for (const auto& [k, v] : parse_config(is)) apply_setting(cfg, k, v);
  return cfg;
}

void write_config(std::ostream& os, const ExperimentConfig& cfg) {
  os << "manifold = " << cfg.manifold << '\n'
     << "n = " << cfg.n << '\n'
     << "p = " << cfg.p << '\n'
     << "topology = " << cfg.topology << '\n'
     << "nodes = " << cfg.nodes << '\n'
     << "sigma = " << fmt(cfg.sigma) << '\n'
     << "noise = " << cfg.noise << '\n'
     << "seed = " << cfg.seed << '\n'
     << "iterations = " << cfg.iterations << '\n'
     << "step = " << cfg.step << '\n'
     << "epsilon = " << fmt(cfg.epsilon) << '\n'
     << "safety = " << fmt(cfg.safety) << '\n'
     << "d_max = " << (cfg.d_max ? fmt(*cfg.d_max) : std::string("auto")) << '\n'
     << "grad_tol = " << fmt(cfg.grad_tol) << '\n'
     << "consensus_tol = " << fmt(cfg.consensus_tol) << '\n'
     << "out = " << cfg.out.string() << '\n'
     << "name = " << cfg.name << '\n';
}

Manifold make_manifold(const ExperimentConfig& cfg) {
  try {
    if (cfg.manifold == "euclidean") return Manifold::euclidean(cfg.n);
    if (cfg.manifold == "sphere") return Manifold::sphere(cfg.n);
    if (cfg.manifold == "so") return Manifold::special_orthogonal(cfg.n);
    if (cfg.manifold == "grassmann") return Manifold::grassmann(cfg.n, cfg.p);
  } catch (const ContractError& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown manifold '" + cfg.manifold + "'");
}

Graph make_graph(const ExperimentConfig& cfg) {
  const std::string file_prefix = "file:";
  Graph g = [&] {
    if (cfg.topology.rfind(file_prefix, 0) == 0) {
      const std::string path = cfg.topology.substr(file_prefix.size());
      std::ifstream is(path);
      if (!is) throw ConfigError("cannot read edge list " + path);
      return read_edge_list(is);
    }
    return make_topology(parse_topology(cfg.topology));
  }();
  if (cfg.nodes != 0 && cfg.nodes != g.n_vertices())
    throw ConfigError("nodes = " + std::to_string(cfg.nodes) + " but topology has " +
                      std::to_string(g.n_vertices()) + " vertices");
  if (g.n_vertices() < 2) throw ConfigError("experiments need at least two nodes");
  if (!is_connected(g)) throw ConfigError("topology is not connected");
  return g;
}

StepSizePolicy make_policy(const ExperimentConfig& cfg) {
  StepSizePolicy policy;
  if (cfg.step == "explicit") {
    policy = StepSizePolicy::explicit_step(cfg.epsilon);
  } else {
    policy.mode = cfg.step == "auto-point" ? StepMode::AutoPointConvergence : StepMode::AutoDescent;
  }
  policy.d_max = cfg.d_max;
  policy.safety = cfg.safety;
  return policy;
}

std::vector<Point> generate_measurements(const ExperimentConfig& cfg) {
  const Manifold m = make_manifold(cfg);
  const int n_nodes = cfg.nodes != 0 ? cfg.nodes : make_graph(cfg).n_vertices();
  const Point x0 = base_point(m);
  const double coefficient_sigma =
      cfg.noise == "total" ? cfg.sigma / std::sqrt(static_cast<double>(m.intrinsic_dim())) : cfg.sigma;
  std::mt19937_64 rng(cfg.seed);
  std::vector<Point> u;
  u.reserve(static_cast<std::size_t>(n_nodes));
  for (int i = 0; i < n_nodes; ++i) u.push_back(exp(x0, random_tangent(x0, coefficient_sigma, rng)));
  return u;
}

// Experiments -------------------------------------------------------------------

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const Graph g = make_graph(cfg);
  ExperimentConfig resolved = cfg;
  resolved.nodes = g.n_vertices();
  const NetworkState s0 = NetworkState::from_measurements(generate_measurements(resolved));

  RunOptions options;
  options.max_iter = cfg.iterations;
  options.grad_tol = cfg.grad_tol;
  options.consensus_tol = cfg.consensus_tol;

  ExperimentResult result{resolved, {}, cfg.out / cfg.name};
  std::filesystem::create_directories(result.directory);
  write_stream(result.directory / "config.txt", [&](std::ostream& os) { write_config(os, resolved); });
  result.trace = run(g, s0, make_policy(cfg), options);

  write_run_files(result.directory, "", result.trace, cfg.seed);
  const std::string label = make_manifold(cfg).name();
  write_text(result.directory / "distances.svg",
             svg::render({distance_chart(result.trace, label + ": node distances to Frechet mean")}));
  write_text(result.directory / "frechet_gap.svg",
             svg::render({gap_chart(result.trace, label + ": Frechet mean of states vs measurements")}));
  return result;
}

std::vector<Point> circle_measurements(const std::vector<double>& angles_deg) {
  const Manifold circle = Manifold::sphere(1);
  std::vector<Point> u;
  for (double deg : angles_deg) {
    const double rad = deg * std::numbers::pi / 180.0;
    Eigen::MatrixXd v(2, 1);
    v << std::cos(rad), std::sin(rad);
    u.push_back(make_point(circle, v));
  }
  return u;
}

CircleSuiteReport run_circle_suite(const std::optional<std::filesystem::path>& out, int max_iter) {
  const auto u = circle_measurements(kCircleAnglesDeg);
  const NetworkState s0 = NetworkState::from_measurements(u);
  const int n = static_cast<int>(u.size());
  const Graph line = make_topology(topology::Line{n});
  const Graph ring = make_topology(topology::Ring{n});

  RunOptions options;
  options.max_iter = max_iter;
  StepSizePolicy policy;
  policy.mode = StepMode::AutoDescent;

  CircleSuiteReport report;
  report.line = run(line, s0, policy, options);
  report.ring = run(ring, s0, policy, options);
  report.ring_measurements_in_S = in_set_S(s0);

  if (out) {
    std::filesystem::create_directories(*out);
    write_run_files(*out, "line_", report.line, 0);
    write_run_files(*out, "ring_", report.ring, 0);
    auto spread_chart = [](const RunTrace& t, const std::string& title) {
      svg::Chart c{title, "iteration", "max pairwise distance / gradient norm", true, {}};
      svg::Series spread{"max pairwise distance", iteration_axis(t), {}};
      svg::Series grad{"gradient norm", iteration_axis(t), {}};
      for (const auto& r : t.records) {
        spread.y.push_back(r.max_pair_dist);
        grad.y.push_back(r.grad_norm);
      }
      c.series = {spread, grad};
      return c;
    };
    write_text(*out / "circle.svg", svg::render({spread_chart(report.line, "circle, line topology"),
                                                  spread_chart(report.ring, "circle, ring topology")}));
  }
  return report;
}

ExperimentConfig paper_config(const std::string& manifold, std::uint64_t seed, const std::filesystem::path& out) {
  ExperimentConfig cfg;
  cfg.topology = "circulant:15:1,2";
  cfg.sigma = 0.2;
  cfg.seed = seed;
  cfg.iterations = 150;
  cfg.out = out;
  if (manifold == "so") {
    cfg.manifold = "so";
    cfg.n = 7;
    cfg.name = "so7";
  } else if (manifold == "sphere") {
    cfg.manifold = "sphere";
    cfg.n = 6;
    cfg.name = "sphere6";
  } else if (manifold == "grassmann") {
    cfg.manifold = "grassmann";
    cfg.n = 7;
    cfg.p = 3;
    cfg.name = "grass7_3";
  } else {
    throw ConfigError("no figure experiment for manifold '" + manifold + "'");
  }
  return cfg;
}

PaperFiguresReport run_paper_figures(std::uint64_t seed, const std::filesystem::path& out) {
  std::vector<std::future<ExperimentResult>> jobs;
  for (const char* m : {"so", "sphere", "grassmann"})
    jobs.push_back(std::async(std::launch::async, run_experiment, paper_config(m, seed, out)));
  auto circle = std::async(std::launch::async, [&] { return run_circle_suite(out / "circle"); });

  PaperFiguresReport report;
  for (auto& j : jobs) report.experiments.push_back(j.get());
  report.circle = circle.get();
  return report;
}

}  // namespace rcons::harness
