#include "rcons/network.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <queue>
#include <random>
#include <set>
#include <sstream>

namespace rcons {

Graph::Graph(int n_vertices, const std::vector<Edge>& edges) {
  if (n_vertices < 1) throw InfeasibleTopologyError("graph needs at least one vertex");
  adjacency_.resize(static_cast<std::size_t>(n_vertices));
  std::set<Edge> seen;
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || a >= n_vertices || b >= n_vertices)
      throw InfeasibleTopologyError("edge endpoint out of range");
    if (a == b) throw InfeasibleTopologyError("self-loop in edge list");
    Edge e{std::min(a, b), std::max(a, b)};
    if (!seen.insert(e).second) throw InfeasibleTopologyError("duplicate edge in edge list");
    edges_.push_back(e);
    adjacency_[static_cast<std::size_t>(a)].push_back(b);
    adjacency_[static_cast<std::size_t>(b)].push_back(a);
  }
  for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
}

bool Graph::has_edge(int i, int j) const {
  const auto& nbrs = neighbors(i);
  return std::binary_search(nbrs.begin(), nbrs.end(), j);
}

int max_degree(const Graph& g) {
  int best = 0;
  for (int i = 0; i < g.n_vertices(); ++i) best = std::max(best, g.degree(i));
  return best;
}

std::vector<int> bfs_distances(const Graph& g, int source) {
  std::vector<int> hops(static_cast<std::size_t>(g.n_vertices()), -1);
  std::queue<int> frontier;
  hops[static_cast<std::size_t>(source)] = 0;
  frontier.push(source);
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop();
    for (int w : g.neighbors(v)) {
      if (hops[static_cast<std::size_t>(w)] < 0) {
        hops[static_cast<std::size_t>(w)] = hops[static_cast<std::size_t>(v)] + 1;
        frontier.push(w);
      }
    }
  }
  return hops;
}

bool is_connected(const Graph& g) {
  const auto hops = bfs_distances(g, 0);
  return std::none_of(hops.begin(), hops.end(), [](int h) { return h < 0; });
}

bool is_tree(const Graph& g) {
  return is_connected(g) && g.n_edges() == g.n_vertices() - 1;
}

int diameter(const Graph& g) {
  int best = 0;
  for (int s = 0; s < g.n_vertices(); ++s) {
    for (int h : bfs_distances(g, s)) {
      if (h < 0) throw DisconnectedGraphError("diameter of a disconnected graph");
      best = std::max(best, h);
    }
  }
  return best;
}

namespace {

void require_feasible(bool ok, const std::string& what) {
  if (!ok) throw InfeasibleTopologyError(what);
}

Graph make_line(int n) {
  require_feasible(n >= 1, "line needs n >= 1");
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return Graph(n, edges);
}

Graph make_ring(int n) {
  require_feasible(n >= 3, "ring needs n >= 3");
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  edges.emplace_back(n - 1, 0);
  return Graph(n, edges);
}

Graph make_circulant(int n, const std::vector<int>& offsets) {
  require_feasible(n >= 2, "circulant needs n >= 2");
  require_feasible(!offsets.empty(), "circulant needs at least one offset");
  std::set<Edge> edges;
  for (int k : offsets) {
    require_feasible(k >= 1 && k < n, "circulant offset out of range");
    for (int i = 0; i < n; ++i) {
      const int j = (i + k) % n;
      if (i != j) edges.insert({std::min(i, j), std::max(i, j)});
    }
  }
  Graph g(n, {edges.begin(), edges.end()});
  require_feasible(is_connected(g), "circulant offsets do not generate a connected graph");
  return g;
}

// Uniform random recursive tree with shuffled labels.
Graph make_tree(int n, std::uint64_t seed) {
  require_feasible(n >= 1, "tree needs n >= 1");
  std::mt19937_64 rng(seed);
  std::vector<int> label(static_cast<std::size_t>(n));
  std::iota(label.begin(), label.end(), 0);
  std::shuffle(label.begin(), label.end(), rng);
  std::vector<Edge> edges;
  for (int v = 1; v < n; ++v) {
    std::uniform_int_distribution<int> parent(0, v - 1);
    edges.emplace_back(label[static_cast<std::size_t>(parent(rng))],
                       label[static_cast<std::size_t>(v)]);
  }
  return Graph(n, edges);
}

// Configuration (pairing) model, rejecting multigraphs and disconnected draws.
Graph make_random_regular(int n, int k, std::uint64_t seed) {
  require_feasible(k >= 1 && k < n, "random regular graph needs 1 <= k < N");
  require_feasible((static_cast<long>(n) * k) % 2 == 0, "random regular graph needs N*k even");
  require_feasible(n > 2 || k == 1, "random regular graph on two vertices needs k = 1");
  std::mt19937_64 rng(seed);
  std::vector<int> stubs;
  for (int v = 0; v < n; ++v)
    for (int c = 0; c < k; ++c) stubs.push_back(v);
  constexpr int kMaxAttempts = 100000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::shuffle(stubs.begin(), stubs.end(), rng);
    std::set<Edge> edges;
    bool simple = true;
    for (std::size_t s = 0; s < stubs.size(); s += 2) {
      const int a = stubs[s];
      const int b = stubs[s + 1];
      if (a == b || !edges.insert({std::min(a, b), std::max(a, b)}).second) {
        simple = false;
        break;
      }
    }
    if (!simple) continue;
    Graph g(n, {edges.begin(), edges.end()});
    if (is_connected(g)) return g;
  }
  throw InfeasibleTopologyError("pairing model failed to produce a simple connected graph");
}

Graph make_complete(int n) {
  require_feasible(n >= 1, "complete graph needs n >= 1");
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  return Graph(n, edges);
}

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(item);
  return out;
}

long parse_integer(const std::string& s, const std::string& context) {
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InfeasibleTopologyError("bad integer '" + s + "' in topology '" + context + "'");
  }
}

}  // namespace

Graph make_topology(const TopologySpec& spec) {
  return std::visit(
      Overloaded{
          [](const topology::Line& t) { return make_line(t.n); },
          [](const topology::Ring& t) { return make_ring(t.n); },
          [](const topology::Circulant& t) { return make_circulant(t.n, t.offsets); },
          [](const topology::Tree& t) { return make_tree(t.n, t.seed); },
          [](const topology::RandomRegular& t) { return make_random_regular(t.n, t.k, t.seed); },
          [](const topology::Complete& t) { return make_complete(t.n); },
      },
      spec);
}

TopologySpec parse_topology(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.empty()) throw InfeasibleTopologyError("empty topology");
  const std::string& kind = parts[0];
  auto arg = [&](std::size_t i) {
    if (i >= parts.size()) throw InfeasibleTopologyError("missing field in topology '" + text + "'");
    return parse_integer(parts[i], text);
  };
  auto expect_fields = [&](std::size_t count) {
    if (parts.size() != count)
      throw InfeasibleTopologyError("wrong number of fields in topology '" + text + "'");
  };
  if (kind == "line") {
    expect_fields(2);
    return topology::Line{static_cast<int>(arg(1))};
  }
  if (kind == "ring") {
    expect_fields(2);
    return topology::Ring{static_cast<int>(arg(1))};
  }
  if (kind == "complete") {
    expect_fields(2);
    return topology::Complete{static_cast<int>(arg(1))};
  }
  if (kind == "circulant") {
    expect_fields(3);
    std::vector<int> offsets;
    for (const auto& o : split(parts[2], ',')) offsets.push_back(static_cast<int>(parse_integer(o, text)));
    return topology::Circulant{static_cast<int>(arg(1)), offsets};
  }
  if (kind == "tree") {
    expect_fields(3);
    return topology::Tree{static_cast<int>(arg(1)), static_cast<std::uint64_t>(arg(2))};
  }
  if (kind == "regular") {
    expect_fields(4);
    return topology::RandomRegular{static_cast<int>(arg(1)), static_cast<int>(arg(2)),
                                   static_cast<std::uint64_t>(arg(3))};
  }
  throw InfeasibleTopologyError("unknown topology kind '" + kind + "'");
}

std::string describe(const TopologySpec& spec) {
  return std::visit(
      Overloaded{
          [](const topology::Line& t) { return "line:" + std::to_string(t.n); },
          [](const topology::Ring& t) { return "ring:" + std::to_string(t.n); },
          [](const topology::Circulant& t) {
            std::string s = "circulant:" + std::to_string(t.n) + ":";
            for (std::size_t i = 0; i < t.offsets.size(); ++i)
              s += (i ? "," : "") + std::to_string(t.offsets[i]);
            return s;
          },
          [](const topology::Tree& t) {
            return "tree:" + std::to_string(t.n) + ":" + std::to_string(t.seed);
          },
          [](const topology::RandomRegular& t) {
            return "regular:" + std::to_string(t.n) + ":" + std::to_string(t.k) + ":" +
                   std::to_string(t.seed);
          },
          [](const topology::Complete& t) { return "complete:" + std::to_string(t.n); },
      },
      spec);
}

void write_edge_list(std::ostream& os, const Graph& g) {
  os << g.n_vertices() << '\n';
  for (auto [i, j] : g.edges()) os << i + 1 << ' ' << j + 1 << '\n';
}

Graph read_edge_list(std::istream& is) {
  int n = 0;
  if (!(is >> n)) throw InfeasibleTopologyError("edge list: missing vertex count");
  std::vector<Edge> edges;
  int i = 0;
  int j = 0;
  while (is >> i >> j) edges.emplace_back(i - 1, j - 1);
  if (!is.eof()) throw InfeasibleTopologyError("edge list: malformed edge line");
  return Graph(n, edges);
}

}  // namespace rcons
