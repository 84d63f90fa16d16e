// Command-line front end: single experiments, the figure suite, the
// numerical verification suite and a stand-alone Frechet-mean calculator.

#include "rcons/checks.hpp"
#include "rcons/frechet.hpp"
#include "rcons/harness.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace {

using rcons::harness::ConfigError;
using rcons::harness::ExperimentConfig;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

void print_run_summary(const rcons::harness::ExperimentResult& r) {
  const auto& t = r.trace;
  std::printf("%-12s eps=%.6g iters=%d converged=%d max_pair=%.3e grad=%.3e frechet_gap=%.3e in_S(0)=%d "
              "in_S_conv(0)=%d%s\n",
              rcons::harness::make_manifold(r.config).name().c_str(), t.epsilon, t.iterations,
              t.converged ? 1 : 0, t.final_max_pair_dist, t.final_grad_norm, t.frechet_gap, t.in_S_initial ? 1 : 0,
              t.in_S_conv_initial ? 1 : 0, t.error ? (" error: " + t.error_message).c_str() : "");
  std::printf("             -> %s\n", r.directory.string().c_str());
}

// Frechet input: first line "<kind> <n> [p]", then one point per line with
// its ambient matrix entries in row-major order.
int frechet_command(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read points file " + path);
  std::string line;
  std::optional<rcons::Manifold> manifold;
  std::vector<rcons::Point> points;
  while (std::getline(is, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    if (!manifold) {
      std::string kind;
      if (!(ls >> kind)) continue;
      ExperimentConfig cfg;
      cfg.manifold = kind;
      if (!(ls >> cfg.n)) throw ConfigError("points file: header needs '<kind> <n> [p]'");
      ls >> cfg.p;
      rcons::harness::apply_setting(cfg, "manifold", kind);
      manifold = rcons::harness::make_manifold(cfg);
      continue;
    }
    std::vector<double> values;
    double v = 0.0;
    while (ls >> v) values.push_back(v);
    if (values.empty()) continue;
    const int rows = manifold->ambient_rows();
    const int cols = manifold->ambient_cols();
    if (static_cast<int>(values.size()) != rows * cols)
      throw ConfigError("points file: expected " + std::to_string(rows * cols) + " numbers per point");
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) m(r, c) = values[static_cast<std::size_t>(r * cols + c)];
    points.push_back(rcons::nearest_point(*manifold, m));
  }
  if (points.empty()) throw ConfigError("points file contains no points");

  const auto result = rcons::frechet_mean(points);
  const auto& mean = result.mean.value;
  for (int r = 0; r < mean.rows(); ++r)
    for (int c = 0; c < mean.cols(); ++c) std::printf("%s%.17g", (r || c) ? " " : "", mean(r, c));
  std::printf("\n# iterations=%d gradient_norm=%.3e converged=%d certified=%d variance=%.17g\n", result.iterations,
              result.gradient_norm, result.converged ? 1 : 0, result.certified ? 1 : 0,
              rcons::frechet_variance(points, result.mean));
  return result.converged ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Riemannian consensus simulator"};
  app.require_subcommand(1);

  // run ---------------------------------------------------------------------
  auto* run_cmd = app.add_subcommand("run", "Run one consensus experiment");
  std::string config_path;
  run_cmd->add_option("--config", config_path, "flat key = value config file");
  const std::vector<std::pair<std::string, std::string>> keys = {
      {"manifold", "euclidean | sphere | so | grassmann"},
      {"n", "manifold dimension parameter"},
      {"p", "subspace dimension for grassmann"},
      {"topology", "line:N, ring:N, circulant:N:a,b, tree:N:seed, regular:N:k:seed, complete:N, file:path"},
      {"nodes", "node count (must match the topology)"},
      {"sigma", "measurement noise standard deviation"},
      {"noise", "total | per-coordinate measurement noise convention"},
      {"seed", "random seed"},
      {"iters", "maximum iterations"},
      {"step", "auto-descent | auto-point | explicit"},
      {"epsilon", "explicit step size"},
      {"safety", "safety factor in (0, 1] for automatic steps"},
      {"d_max", "maximum neighbor distance covered by the Hessian bound"},
      {"grad_tol", "gradient-norm stopping threshold"},
      {"consensus_tol", "max pairwise distance declaring consensus"},
      {"out", "output directory"},
      {"name", "experiment name (subdirectory)"},
  };
  std::map<std::string, std::string> overrides;
  for (const auto& [key, help] : keys) {
    std::string flag = "--" + key;
    for (auto& ch : flag)
      if (ch == '_') ch = '-';
    run_cmd->add_option_function<std::string>(
        flag, [&overrides, key = key](const std::string& v) { overrides[key] = v; }, help);
  }

  // paper-figures -----------------------------------------------------------
  auto* figures_cmd = app.add_subcommand("paper-figures", "SO(7), S^6, Grass(7,3) and circle experiments");
  std::uint64_t figures_seed = 1;
  std::string figures_out = "results";
  figures_cmd->add_option("--seed", figures_seed, "random seed");
  figures_cmd->add_option("--out", figures_out, "output directory");

  // verify ------------------------------------------------------------------
  auto* verify_cmd = app.add_subcommand("verify", "Numerical verification of geometry and bounds");
  rcons::checks::SuiteOptions suite;
  std::string violations_path;
  verify_cmd->add_option("--seed", suite.seed, "random seed");
  verify_cmd->add_option("--cases", suite.round_trip_cases, "exp/log round-trip cases per manifold");
  verify_cmd->add_option("--csv", violations_path, "write violations as CSV");

  // frechet -----------------------------------------------------------------
  auto* frechet_cmd = app.add_subcommand("frechet", "Frechet mean of points read from a file");
  std::string points_path;
  frechet_cmd->add_option("file", points_path, "points file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*run_cmd) {
      ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : rcons::harness::load_config(config_path);
      for (const auto& [k, v] : overrides) rcons::harness::apply_setting(cfg, k, v);
      const auto result = rcons::harness::run_experiment(cfg);
      print_run_summary(result);
      return result.trace.error ? kExitCheckFailed : kExitOk;
    }

    if (*figures_cmd) {
      const auto start = std::chrono::steady_clock::now();
      const auto report = rcons::harness::run_paper_figures(figures_seed, figures_out);
      const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      bool ok = true;
      for (const auto& r : report.experiments) {
        print_run_summary(r);
        ok = ok && r.trace.converged;
      }
      const auto& c = report.circle;
      std::printf("circle line: converged=%d max_pair=%.3e\n", c.line.converged ? 1 : 0, c.line.final_max_pair_dist);
      std::printf("circle ring: trapped=%d grad=%.3e max_pair=%.3f\n", c.ring_trapped() ? 1 : 0,
                  c.ring.final_grad_norm, c.ring.final_max_pair_dist);
      std::printf("elapsed %.2f s\n", seconds);
      ok = ok && c.line_reached_consensus() && c.ring_trapped();
      return ok ? kExitOk : kExitCheckFailed;
    }

    if (*verify_cmd) {
      const auto results = rcons::checks::run_verification_suite(suite);
      rcons::checks::write_report(std::cout, results);
      if (!violations_path.empty()) {
        std::ofstream os(violations_path);
        rcons::checks::write_violations_csv(os, results);
      }
      const bool ok = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed(); });
      std::printf("%s\n", ok ? "verify: all checks passed" : "verify: FAILED");
      return ok ? kExitOk : kExitCheckFailed;
    }

    if (*frechet_cmd) return frechet_command(points_path);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const rcons::InfeasibleTopologyError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitCheckFailed;
  }
  return kExitUsage;
}
