#pragma once

// Experiment configuration, measurement synthesis and result emission.

#include "rcons/consensus.hpp"
#include "rcons/geometry.hpp"
#include "rcons/network.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rcons::harness {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
  /// euclidean | sphere | so | grassmann
  std::string manifold = "so";
  int n = 7;
  int p = 3;
  /// Topology string accepted by parse_topology, or "file:<path>".
  std::string topology = "circulant:15:1,2";
  /// Node count; 0 takes it from the topology.
  int nodes = 0;
  double sigma = 0.2;
  /// total: the tangent vector as a whole has standard deviation sigma
  /// (sigma / sqrt(dim) per basis coefficient). per-coordinate: every basis
  /// coefficient has standard deviation sigma.
  std::string noise = "total";
  std::uint64_t seed = 1;
  int iterations = 150;
  /// auto-descent | auto-point | explicit
  std::string step = "auto-descent";
  double epsilon = 0.0;
  double safety = 1.0;
  std::optional<double> d_max;
  double grad_tol = 1e-10;
  double consensus_tol = 1e-6;
  std::filesystem::path out = "results";
  std::string name = "experiment";
};

/// Sets one `key = value` entry. Throws ConfigError on unknown keys or
/// unparsable values.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Flat `key = value` lines; `#` starts a comment.
std::map<std::string, std::string> parse_config(std::istream& is);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Writes every key so that load_config reproduces `cfg`.
void write_config(std::ostream& os, const ExperimentConfig& cfg);

Manifold make_manifold(const ExperimentConfig& cfg);
Graph make_graph(const ExperimentConfig& cfg);
StepSizePolicy make_policy(const ExperimentConfig& cfg);

/// u_i = exp_{x0}(v_i) with v_i isotropic Gaussian around the fixed base
/// point x0, scaled per cfg.noise. Deterministic in cfg.seed.
std::vector<Point> generate_measurements(const ExperimentConfig& cfg);

struct ExperimentResult {
  ExperimentConfig config;
  RunTrace trace;
  std::filesystem::path directory;
};

/// Runs one experiment and writes trace.csv, summary.csv, config.txt,
/// distances.svg and frechet_gap.svg into cfg.out / cfg.name.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Node placements on the unit circle, in degrees.
inline const std::vector<double> kCircleAnglesDeg = {0.0, 80.0, 170.0, 230.0, 300.0};

std::vector<Point> circle_measurements(const std::vector<double>& angles_deg);

struct CircleSuiteReport {
  RunTrace line;
  RunTrace ring;
  Certificate ring_measurements_in_S = Certificate::Unknown;
  bool line_reached_consensus() const { return line.converged; }
  /// Stationary with gradient below 1e-9 while the states stay spread out.
  bool ring_trapped() const {
    return !ring.error && ring.final_grad_norm < 1e-9 && ring.final_max_pair_dist > 1.0;
  }
};

/// Line(5) and Ring(5) runs on the circle. Writes into `out` when given.
CircleSuiteReport run_circle_suite(const std::optional<std::filesystem::path>& out = std::nullopt,
                                   int max_iter = 150);

/// Config of one manifold column of the figure suite.
ExperimentConfig paper_config(const std::string& manifold, std::uint64_t seed,
                              const std::filesystem::path& out);

struct PaperFiguresReport {
  std::vector<ExperimentResult> experiments;
  CircleSuiteReport circle;
};

/// SO(7), S^6 and Grass(7,3) experiments plus the circle suite, run in
/// parallel, each into its own subdirectory of `out`.
PaperFiguresReport run_paper_figures(std::uint64_t seed, const std::filesystem::path& out);

}  // namespace rcons::harness
