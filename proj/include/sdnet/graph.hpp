#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sdnet/error.hpp"

namespace sdnet {

using NodeId = std::uint32_t;

struct Edge {
  NodeId u = 0;
  NodeId v = 0;

  /// Same edge with u <= v.
  constexpr Edge canonical() const noexcept { return u <= v ? Edge{u, v} : Edge{v, u}; }
  friend constexpr auto operator<=>(const Edge&, const Edge&) = default;
};

/// Undirected simple graph over nodes 0..n-1 with sorted adjacency lists.
class Graph {
 public:
  explicit Graph(std::size_t n_nodes = 0) : adj_(n_nodes) {
    detail::require(n_nodes <= std::numeric_limits<NodeId>::max(), "Graph: too many nodes");
  }

  /// Throws on self-loops, duplicate pairs, or ids out of range.
  static Graph from_edges(std::size_t n_nodes, std::span<const Edge> edges) {
    Graph g(n_nodes);
    for (const Edge& e : edges) {
      g.check_pair(e.u, e.v);
      g.adj_[e.u].push_back(e.v);
      g.adj_[e.v].push_back(e.u);
    }
    for (auto& list : g.adj_) {
      std::sort(list.begin(), list.end());
      if (std::adjacent_find(list.begin(), list.end()) != list.end())
        throw InvalidArgument("Graph::from_edges: duplicate edge");
    }
    g.n_edges_ = edges.size();
    return g;
  }

  std::size_t num_nodes() const noexcept { return adj_.size(); }
  std::size_t num_edges() const noexcept { return n_edges_; }
  std::size_t degree(NodeId v) const noexcept { return adj_[v].size(); }
  std::span<const NodeId> neighbors(NodeId v) const noexcept { return adj_[v]; }

  bool has_edge(NodeId u, NodeId v) const {
    if (u >= num_nodes() || v >= num_nodes()) return false;
    const auto& list = adj_[u].size() <= adj_[v].size() ? adj_[u] : adj_[v];
    const NodeId other = adj_[u].size() <= adj_[v].size() ? v : u;
    return std::binary_search(list.begin(), list.end(), other);
  }

  /// Returns false if the edge already exists.
  bool add_edge(NodeId u, NodeId v) {
    check_pair(u, v);
    auto& lu = adj_[u];
    auto it = std::lower_bound(lu.begin(), lu.end(), v);
    if (it != lu.end() && *it == v) return false;
    lu.insert(it, v);
    auto& lv = adj_[v];
    lv.insert(std::lower_bound(lv.begin(), lv.end(), u), u);
    ++n_edges_;
    return true;
  }

  /// Returns false if the edge was absent.
  bool remove_edge(NodeId u, NodeId v) {
    if (u >= num_nodes() || v >= num_nodes() || u == v) return false;
    auto& lu = adj_[u];
    auto it = std::lower_bound(lu.begin(), lu.end(), v);
    if (it == lu.end() || *it != v) return false;
    lu.erase(it);
    auto& lv = adj_[v];
    lv.erase(std::lower_bound(lv.begin(), lv.end(), u));
    --n_edges_;
    return true;
  }

  /// All edges with u < v in lexicographic order.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(n_edges_);
    for (NodeId u = 0; u < num_nodes(); ++u)
      for (NodeId v : adj_[u])
        if (u < v) out.push_back({u, v});
    return out;
  }

  std::vector<std::size_t> degrees() const {
    std::vector<std::size_t> out(num_nodes());
    for (std::size_t v = 0; v < out.size(); ++v) out[v] = adj_[v].size();
    return out;
  }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  void check_pair(NodeId u, NodeId v) const {
    if (u >= num_nodes() || v >= num_nodes()) throw InvalidArgument("Graph: node id out of range");
    if (u == v) throw InvalidArgument("Graph: self-loops are not allowed");
  }

  std::vector<std::vector<NodeId>> adj_;
  std::size_t n_edges_ = 0;
};

/// Undirected multigraph kept as an edge list; self-loops and parallel edges
/// are allowed. A self-loop adds 2 to its node's degree.
class MultiGraph {
 public:
  explicit MultiGraph(std::size_t n_nodes = 0) : n_(n_nodes) {}

  void add_edge(NodeId u, NodeId v) {
    if (u >= n_ || v >= n_) throw InvalidArgument("MultiGraph: node id out of range");
    edges_.push_back(Edge{u, v}.canonical());
  }

  std::size_t num_nodes() const noexcept { return n_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  std::span<const Edge> edges() const noexcept { return edges_; }

  std::vector<std::size_t> degrees() const {
    std::vector<std::size_t> out(n_, 0);
    for (const Edge& e : edges_) {
      ++out[e.u];
      ++out[e.v];
    }
    return out;
  }

 private:
  std::size_t n_;
  std::vector<Edge> edges_;
};

using HeaderFields = std::vector<std::pair<std::string, std::string>>;

/// Edge list: `# key=value` header lines (n_nodes first), then one sorted
/// 0-based `u v` pair per line.
inline void write_edge_list(std::ostream& out, const Graph& g, const HeaderFields& header = {}) {
  out << "# n_nodes=" << g.num_nodes() << '\n';
  for (const auto& [key, value] : header) out << "# " << key << '=' << value << '\n';
  for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

/// Parallel edges are repeated lines, loops are `u u` lines.
inline void write_edge_list(std::ostream& out, const MultiGraph& g,
                            const HeaderFields& header = {}) {
  out << "# n_nodes=" << g.num_nodes() << '\n';
  for (const auto& [key, value] : header) out << "# " << key << '=' << value << '\n';
  std::vector<Edge> sorted(g.edges().begin(), g.edges().end());
  std::sort(sorted.begin(), sorted.end());
  for (const Edge& e : sorted) out << e.u << ' ' << e.v << '\n';
}

struct EdgeListFile {
  std::size_t n_nodes = 0;
  std::vector<Edge> edges;
  HeaderFields header;
};

/// Reads an edge list. Node count comes from a `# n_nodes=` header when
/// present, otherwise from the largest id seen.
inline EdgeListFile read_edge_list_raw(std::istream& in) {
  EdgeListFile file;
  bool have_n = false;
  std::size_t max_id = 0;
  bool any = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(1, eq - 1);
      key.erase(0, key.find_first_not_of(' '));
      std::string value = line.substr(eq + 1);
      if (key == "n_nodes") {
        file.n_nodes = std::stoull(value);
        have_n = true;
      }
      file.header.emplace_back(std::move(key), std::move(value));
      continue;
    }
    std::istringstream fields(line);
    long long u = -1;
    long long v = -1;
    if (!(fields >> u >> v) || u < 0 || v < 0)
      throw IoError("edge list: malformed line " + std::to_string(line_no));
    file.edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
    max_id = std::max<std::size_t>(max_id, static_cast<std::size_t>(std::max(u, v)));
    any = true;
  }
  if (!have_n) file.n_nodes = any ? max_id + 1 : 0;
  return file;
}

inline Graph read_edge_list(std::istream& in) {
  const EdgeListFile file = read_edge_list_raw(in);
  return Graph::from_edges(file.n_nodes, file.edges);
}

}  // namespace sdnet
