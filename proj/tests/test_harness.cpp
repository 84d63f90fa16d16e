#include "rcons/harness.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace rcons;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("rcons_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("config parsing") {
  std::istringstream is(
      "# comment line\n"
      "manifold = sphere\n"
      "n=6   # trailing comment\n"
      "\n"
      "  topology = ring:5 \n"
      "sigma = 0.1\n"
      "d_max = 1.5\n");
  const auto kv = harness::parse_config(is);
  CHECK(kv.at("manifold") == "sphere");
  CHECK(kv.at("n") == "6");
  CHECK(kv.at("topology") == "ring:5");

  harness::ExperimentConfig cfg;
  for (const auto& [k, v] : kv) harness::apply_setting(cfg, k, v);
  CHECK(cfg.manifold == "sphere");
  CHECK(cfg.n == 6);
  CHECK(cfg.sigma == 0.1);
  REQUIRE(cfg.d_max);
  CHECK(*cfg.d_max == 1.5);

  std::istringstream bad("just words\n");
  CHECK_THROWS_AS(harness::parse_config(bad), harness::ConfigError);
  CHECK_THROWS_AS(harness::apply_setting(cfg, "colour", "red"), harness::ConfigError);
  CHECK_THROWS_AS(harness::apply_setting(cfg, "n", "seven"), harness::ConfigError);
  CHECK_THROWS_AS(harness::apply_setting(cfg, "sigma", "-1"), harness::ConfigError);
  CHECK_THROWS_AS(harness::apply_setting(cfg, "step", "fast"), harness::ConfigError);
}

TEST_CASE("write_config round trips") {
  harness::ExperimentConfig cfg;
  cfg.manifold = "grassmann";
  cfg.n = 5;
  cfg.p = 2;
  cfg.topology = "regular:10:3:4";
  cfg.sigma = 0.125;
  cfg.seed = 77;
  cfg.step = "explicit";
  cfg.epsilon = 0.05;
  cfg.d_max = 0.7;
  cfg.name = "roundtrip";
  std::ostringstream os;
  harness::write_config(os, cfg);
  std::istringstream is(os.str());
  harness::ExperimentConfig back;
  for (const auto& [k, v] : harness::parse_config(is)) harness::apply_setting(back, k, v);
  std::ostringstream again;
  harness::write_config(again, back);
  CHECK(again.str() == os.str());
}

TEST_CASE("graph construction from config") {
  harness::ExperimentConfig cfg;
  cfg.topology = "line:4";
  cfg.nodes = 5;
  CHECK_THROWS_AS(harness::make_graph(cfg), harness::ConfigError);
  cfg.nodes = 4;
  CHECK(harness::make_graph(cfg).n_edges() == 3);

  const auto dir = scratch("edges");
  {
    std::ofstream os(dir / "g.txt");
    os << "4\n1 2\n2 3\n3 4\n4 1\n";
  }
  cfg.topology = "file:" + (dir / "g.txt").string();
  CHECK(harness::make_graph(cfg).n_edges() == 4);
  {
    std::ofstream os(dir / "split.txt");
    os << "4\n1 2\n3 4\n";
  }
  cfg.topology = "file:" + (dir / "split.txt").string();
  CHECK_THROWS_AS(harness::make_graph(cfg), harness::ConfigError);
}

TEST_CASE("generate_measurements") {
  harness::ExperimentConfig cfg;
  cfg.sigma = 0.0;
  const auto flat = harness::generate_measurements(cfg);
  CHECK(flat.size() == 15);
  const auto x0 = base_point(harness::make_manifold(cfg));
  for (const auto& u : flat) CHECK(u.value == x0.value);

  cfg.sigma = 0.2;
  const auto a = harness::generate_measurements(cfg);
  const auto b = harness::generate_measurements(cfg);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].value == b[i].value);
  cfg.seed = 2;
  CHECK(harness::generate_measurements(cfg)[0].value != a[0].value);

  cfg.manifold = "sphere";
  cfg.n = 6;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    cfg.seed = seed;
    const auto u = harness::generate_measurements(cfg);
    CHECK(certify_S(u).has_value());
    for (const auto& p : u) CHECK(dist(p, base_point(p.manifold)) < 5 * cfg.sigma * std::sqrt(6.0));
  }
}

TEST_CASE("run_experiment writes outputs deterministically") {
  const auto dir = scratch("experiment");
  harness::ExperimentConfig cfg;
  cfg.manifold = "sphere";
  cfg.n = 3;
  cfg.topology = "ring:6";
  cfg.iterations = 40;
  cfg.out = dir;
  cfg.name = "first";
  const auto r1 = harness::run_experiment(cfg);
  cfg.name = "second";
  const auto r2 = harness::run_experiment(cfg);
  for (const auto* f : {"trace.csv", "summary.csv", "config.txt", "distances.svg", "frechet_gap.svg"}) {
    CAPTURE(f);
    CHECK(fs::exists(r1.directory / f));
  }
  CHECK(slurp(r1.directory / "trace.csv") == slurp(r2.directory / "trace.csv"));
  CHECK(slurp(r1.directory / "summary.csv") == slurp(r2.directory / "summary.csv"));
  CHECK(slurp(r1.directory / "distances.svg").find("<svg") != std::string::npos);

  const auto reloaded = harness::load_config(r1.directory / "config.txt");
  CHECK(reloaded.topology == "ring:6");
  CHECK(reloaded.iterations == 40);
}

TEST_CASE("Euclidean experiment preserves the mean") {
  const auto dir = scratch("euclid");
  harness::ExperimentConfig cfg;
  cfg.manifold = "euclidean";
  cfg.n = 3;
  cfg.out = dir;
  const auto r = harness::run_experiment(cfg);
  CHECK(r.trace.converged);
  CHECK(r.trace.frechet_gap < 1e-10);
}

TEST_CASE("auto-selected steps give monotone cost traces") {
  const auto dir = scratch("monotone");
  for (const std::string m : {"so", "sphere", "grassmann"}) {
    auto cfg = harness::paper_config(m, 3, dir);
    cfg.iterations = 60;
    const auto r = harness::run_experiment(cfg);
    for (std::size_t k = 1; k < r.trace.records.size(); ++k)
      CHECK(r.trace.records[k].cost <= r.trace.records[k - 1].cost + 1e-12);
    CHECK(r.trace.in_S_initial);
  }
}

TEST_CASE("circle suite") {
  const auto dir = scratch("circle");
  const auto report = harness::run_circle_suite(dir);
  CHECK(report.line_reached_consensus());
  CHECK(report.ring_trapped());
  CHECK_FALSE(report.ring.converged);
  CHECK(report.ring_measurements_in_S == Certificate::Unknown);
  CHECK(fs::exists(dir / "circle.svg"));
}

TEST_CASE("paper_config") {
  const auto so = harness::paper_config("so", 4, "out");
  CHECK(so.n == 7);
  CHECK(so.topology == "circulant:15:1,2");
  CHECK(so.iterations == 150);
  CHECK(so.sigma == 0.2);
  CHECK(harness::paper_config("grassmann", 1, "out").p == 3);
  CHECK_THROWS_AS(harness::paper_config("torus", 1, "out"), harness::ConfigError);
}
