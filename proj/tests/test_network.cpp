#include "rcons/network.hpp"

#include <doctest.h>

#include <algorithm>
#include <sstream>

using namespace rcons;

namespace {

// All-pairs shortest paths by Floyd-Warshall, independent of the BFS code.
int floyd_diameter(const Graph& g) {
  const int n = g.n_vertices();
  const int inf = 1 << 20;
  std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
  for (int i = 0; i < n; ++i) d[i][i] = 0;
  for (const auto& [i, j] : g.edges()) d[i][j] = d[j][i] = 1;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  int best = 0;
  for (const auto& row : d) best = std::max(best, *std::max_element(row.begin(), row.end()));
  return best;
}

}  // namespace

TEST_CASE("max_degree") {
  CHECK(max_degree(make_topology(topology::Ring{5})) == 2);
  CHECK(max_degree(make_topology(topology::Line{5})) == 2);
  CHECK(max_degree(make_topology(topology::Circulant{15, {1, 2}})) == 4);
}

TEST_CASE("diameter") {
  CHECK(diameter(make_topology(topology::Complete{4})) == 1);
  CHECK(diameter(make_topology(topology::Line{5})) == 4);
  const auto c = make_topology(topology::Circulant{15, {1, 2}});
  CHECK(diameter(c) == 4);
  CHECK(floyd_diameter(c) == 4);
  CHECK_THROWS_AS(diameter(Graph(4, {{0, 1}, {2, 3}})), DisconnectedGraphError);
}

TEST_CASE("line, ring and ring diameters up to 50 nodes") {
  for (int n = 2; n <= 50; ++n) {
    const auto line = make_topology(topology::Line{n});
    CHECK(diameter(line) == n - 1);
    CHECK(floyd_diameter(line) == n - 1);
    if (n >= 3) {
      const auto ring = make_topology(topology::Ring{n});
      CHECK(diameter(ring) == n / 2);
      CHECK(floyd_diameter(ring) == n / 2);
    }
  }
}

TEST_CASE("make_topology families") {
  const auto line = make_topology(topology::Line{5});
  CHECK(line.edges() == std::vector<Edge>{{0, 1}, {1, 2}, {2, 3}, {3, 4}});

  const auto ring = make_topology(topology::Ring{5});
  CHECK(ring.n_edges() == 5);
  for (const auto& [i, j] : line.edges()) CHECK(ring.has_edge(i, j));
  CHECK(ring.has_edge(4, 0));

  const auto circ = make_topology(topology::Circulant{15, {1, 2}});
  CHECK(circ.n_edges() == 30);
  for (int i = 0; i < 15; ++i) CHECK(circ.degree(i) == 4);

  const auto k4 = make_topology(topology::Complete{4});
  CHECK(k4.n_edges() == 6);
}

TEST_CASE("connectivity and tree predicates") {
  const auto line = make_topology(topology::Line{5});
  CHECK(is_connected(line));
  CHECK(is_tree(line));
  const auto ring = make_topology(topology::Ring{5});
  CHECK(is_connected(ring));
  CHECK_FALSE(is_tree(ring));
  const Graph split(4, {{0, 1}, {2, 3}});
  CHECK_FALSE(is_connected(split));
  CHECK_FALSE(is_tree(split));
}

TEST_CASE("random generators are connected, regular and deterministic") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto tree = make_topology(topology::Tree{20, seed});
    CHECK(is_tree(tree));
    const auto reg = make_topology(topology::RandomRegular{15, 4, seed});
    CHECK(is_connected(reg));
    for (int i = 0; i < 15; ++i) CHECK(reg.degree(i) == 4);
    CHECK(make_topology(topology::RandomRegular{15, 4, seed}).edges() == reg.edges());
    CHECK(make_topology(topology::Tree{20, seed}).edges() == tree.edges());
  }
}

TEST_CASE("infeasible topologies") {
  CHECK_THROWS_AS(make_topology(topology::RandomRegular{5, 3, 1}), InfeasibleTopologyError);
  CHECK_THROWS_AS(make_topology(topology::RandomRegular{4, 4, 1}), InfeasibleTopologyError);
  CHECK_THROWS_AS(Graph(3, {{0, 0}}), InfeasibleTopologyError);
  CHECK_THROWS_AS(Graph(3, {{0, 1}, {1, 0}}), InfeasibleTopologyError);
  CHECK_THROWS_AS(Graph(3, {{0, 3}}), InfeasibleTopologyError);
  CHECK_THROWS_AS(parse_topology("hexagon:5"), InfeasibleTopologyError);
  CHECK_THROWS_AS(parse_topology("line:x"), InfeasibleTopologyError);
}

TEST_CASE("topology strings round trip") {
  for (const std::string text : {"line:5", "ring:7", "circulant:15:1,2", "tree:20:7", "regular:15:4:3", "complete:4"}) {
    CHECK(describe(parse_topology(text)) == text);
  }
  CHECK(make_topology(parse_topology("circulant:15:1,2")).edges() ==
        make_topology(topology::Circulant{15, {1, 2}}).edges());
}

TEST_CASE("edge list format is 1-indexed") {
  const auto g = make_topology(topology::Line{3});
  std::ostringstream os;
  write_edge_list(os, g);
  CHECK(os.str() == "3\n1 2\n2 3\n");
  std::istringstream is(os.str());
  CHECK(read_edge_list(is).edges() == g.edges());
}
