#pragma once

// Undirected communication graphs and the topology families used in the
// experiments. Vertices are 0-indexed in memory and 1-indexed in every
// human-facing format.

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace rcons {

class DisconnectedGraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InfeasibleTopologyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Edge = std::pair<int, int>;

/// Simple undirected graph. Immutable once built.
class Graph {
 public:
  /// Throws InfeasibleTopologyError on self-loops, duplicate edges or
  /// out-of-range endpoints.
  Graph(int n_vertices, const std::vector<Edge>& edges);

  int n_vertices() const { return static_cast<int>(adjacency_.size()); }
  int n_edges() const { return static_cast<int>(edges_.size()); }

  /// Edges with i < j, in insertion order.
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int i) const { return adjacency_.at(i); }
  int degree(int i) const { return static_cast<int>(adjacency_.at(i).size()); }
  bool has_edge(int i, int j) const;

 private:
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adjacency_;
};

int max_degree(const Graph& g);
bool is_connected(const Graph& g);
bool is_tree(const Graph& g);

/// Hop distances from `source`; -1 marks unreachable vertices.
std::vector<int> bfs_distances(const Graph& g, int source);

/// Largest BFS hop distance. Throws DisconnectedGraphError.
int diameter(const Graph& g);

namespace topology {

struct Line { int n; };
struct Ring { int n; };
struct Circulant { int n; std::vector<int> offsets; };
struct Tree { int n; std::uint64_t seed; };
struct RandomRegular { int n; int k; std::uint64_t seed; };
struct Complete { int n; };

}  // namespace topology

using TopologySpec = std::variant<topology::Line, topology::Ring, topology::Circulant,
                                  topology::Tree, topology::RandomRegular, topology::Complete>;

Graph make_topology(const TopologySpec& spec);

/// Parses "line:5", "ring:5", "circulant:15:1,2", "tree:20:7",
/// "regular:15:4:3", "complete:4". Throws InfeasibleTopologyError.
TopologySpec parse_topology(const std::string& text);

std::string describe(const TopologySpec& spec);

/// Edge-list text: first line N, then "i j" per edge, 1-indexed.
void write_edge_list(std::ostream& os, const Graph& g);
Graph read_edge_list(std::istream& is);

}  // namespace rcons
