#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace structmatrix {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public GraphError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : GraphError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Immutable undirected simple graph in CSR form. Neighbor lists are sorted,
// symmetric and free of self-loops and duplicates; ids are dense in
// [0, node_count).
class Graph {
 public:
  Graph() = default;

  // Builds from an arbitrary arc list: arcs are symmetrized, duplicates
  // collapsed and self-loops dropped. `labels` may be empty, in which case the
  // decimal internal id is used as the label.
  static Graph from_edges(std::size_t node_count, std::vector<Edge> arcs,
                          std::vector<std::string> labels = {},
                          std::size_t* self_loops = nullptr,
                          std::size_t* duplicates = nullptr) {
    std::size_t loops = 0;
    std::size_t kept = 0;
    for (auto& [u, v] : arcs) {
      if (u >= node_count || v >= node_count) throw GraphError("edge endpoint out of range");
      if (u == v) {
        ++loops;
        continue;
      }
      if (u > v) std::swap(u, v);
      arcs[kept++] = {u, v};
    }
    arcs.resize(kept);
    std::sort(arcs.begin(), arcs.end());
    const std::size_t before = arcs.size();
    arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
    if (self_loops) *self_loops = loops;
    if (duplicates) *duplicates = before - arcs.size();

    Graph g;
    g.edge_count_ = arcs.size();
    g.offsets_.assign(node_count + 1, 0);
    for (const auto& [u, v] : arcs) {
      ++g.offsets_[u + 1];
      ++g.offsets_[v + 1];
    }
    for (std::size_t i = 0; i < node_count; ++i) g.offsets_[i + 1] += g.offsets_[i];
    g.adjacency_.resize(2 * arcs.size());
    std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
    // With arcs sorted by (u, v), each list receives its smaller neighbors
    // first and its larger neighbors afterwards, both ascending.
    for (const auto& [u, v] : arcs) {
      g.adjacency_[fill[v]++] = u;
    }
    for (const auto& [u, v] : arcs) {
      g.adjacency_[fill[u]++] = v;
    }

    if (labels.empty()) {
      labels.reserve(node_count);
      for (std::size_t i = 0; i < node_count; ++i) labels.push_back(std::to_string(i));
    }
    if (labels.size() != node_count) throw GraphError("label count does not match node count");
    g.labels_ = std::move(labels);
    return g;
  }

  std::size_t node_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const { return edge_count_; }
  bool empty() const { return node_count() == 0; }

  std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }

  std::span<const NodeId> neighbors(NodeId v) const {
    return {adjacency_.data() + offsets_[v], degree(v)};
  }

  bool has_edge(NodeId u, NodeId v) const {
    auto n = neighbors(u);
    return std::binary_search(n.begin(), n.end(), v);
  }

  const std::string& label(NodeId v) const { return labels_[v]; }
  const std::vector<std::string>& external_ids() const { return labels_; }

  // Visits every undirected edge once as (u, v) with u < v.
  template <class F>
  void for_each_edge(F&& f) const {
    for (NodeId u = 0; u < node_count(); ++u) {
      for (NodeId v : neighbors(u)) {
        if (u < v) f(u, v);
      }
    }
  }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> adjacency_;
  std::vector<std::string> labels_;
  std::size_t edge_count_ = 0;
};

// Sorted, duplicate-free set of internal node ids of one graph.
class NodeSubset {
 public:
  NodeSubset() = default;

  static NodeSubset of(const Graph& g, std::vector<NodeId> members) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    if (!members.empty() && members.back() >= g.node_count()) {
      throw std::out_of_range("node id " + std::to_string(members.back()) + " out of range");
    }
    NodeSubset s;
    s.members_ = std::move(members);
    return s;
  }

  // Caller guarantees members are sorted, unique and in range.
  static NodeSubset from_sorted(std::vector<NodeId> members) {
    NodeSubset s;
    s.members_ = std::move(members);
    return s;
  }

  static NodeSubset all(const Graph& g) {
    std::vector<NodeId> m(g.node_count());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = static_cast<NodeId>(i);
    return from_sorted(std::move(m));
  }

  std::span<const NodeId> members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  bool contains(NodeId v) const { return std::binary_search(members_.begin(), members_.end(), v); }
  NodeId front() const { return members_.front(); }

  friend bool operator==(const NodeSubset&, const NodeSubset&) = default;

 private:
  std::vector<NodeId> members_;
};

struct LoadOptions {
  char comment_prefix = '#';
};

struct LoadReport {
  std::size_t lines = 0;
  std::size_t self_loops = 0;
  std::size_t duplicate_edges = 0;
};

namespace detail {

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

}  // namespace detail

// Streams an edge list: one edge per line, the first two whitespace-separated
// tokens are node labels, further tokens are ignored. Lines whose first
// non-blank character is the comment prefix, and blank lines, are skipped.
inline Graph parse_edge_list(std::istream& in, const LoadOptions& options = {}, LoadReport* report = nullptr) {
  std::unordered_map<std::string, NodeId> ids;
  std::vector<std::string> labels;
  std::vector<Edge> arcs;
  auto intern = [&](std::string_view token) {
    auto [it, inserted] = ids.try_emplace(std::string(token), static_cast<NodeId>(labels.size()));
    if (inserted) labels.emplace_back(token);
    return it->second;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view rest(line);
    std::size_t pos = 0;
    while (pos < rest.size() && detail::is_space(rest[pos])) ++pos;
    if (pos == rest.size() || rest[pos] == options.comment_prefix) continue;

    std::string_view tokens[2];
    std::size_t found = 0;
    while (found < 2 && pos < rest.size()) {
      std::size_t end = pos;
      while (end < rest.size() && !detail::is_space(rest[end])) ++end;
      tokens[found++] = rest.substr(pos, end - pos);
      pos = end;
      while (pos < rest.size() && detail::is_space(rest[pos])) ++pos;
    }
    if (found < 2) throw ParseError(line_no, "expected two node labels");
    const NodeId u = intern(tokens[0]);
    const NodeId v = intern(tokens[1]);
    arcs.emplace_back(u, v);
  }
  if (in.bad()) throw GraphError("read error");
  if (labels.empty()) throw GraphError("empty graph");

  std::size_t loops = 0;
  std::size_t dups = 0;
  const std::size_t n = labels.size();
  Graph g = Graph::from_edges(n, std::move(arcs), std::move(labels), &loops, &dups);
  if (report) {
    report->lines = line_no;
    report->self_loops = loops;
    report->duplicate_edges = dups;
  }
  return g;
}

inline Graph load_edge_list(const std::filesystem::path& path, const LoadOptions& options = {},
                            LoadReport* report = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GraphError("cannot open '" + path.string() + "'");
  try {
    return parse_edge_list(in, options, report);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path.string() + ": expected two node labels");
  }
}

// Writes one "u v" line per undirected edge using external labels. Nodes
// without edges are written as a self-loop line so they survive a reload.
inline void write_edge_list(const Graph& g, std::ostream& out) {
  for (NodeId u = 0; u < g.node_count(); ++u) {
    if (g.degree(u) == 0) out << g.label(u) << ' ' << g.label(u) << '\n';
    for (NodeId v : g.neighbors(u)) {
      if (u < v) out << g.label(u) << ' ' << g.label(v) << '\n';
    }
  }
}

// Subgraph on `nodes` with ids remapped in ascending order of the original
// ids; labels are carried over.
inline Graph induced_subgraph(const Graph& g, const NodeSubset& nodes) {
  auto members = nodes.members();
  if (!members.empty() && members.back() >= g.node_count()) {
    throw std::out_of_range("node id " + std::to_string(members.back()) + " out of range");
  }
  constexpr NodeId kAbsent = UINT32_MAX;
  std::vector<NodeId> remap(g.node_count(), kAbsent);
  std::vector<std::string> labels;
  labels.reserve(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    remap[members[i]] = static_cast<NodeId>(i);
    labels.push_back(g.label(members[i]));
  }
  std::vector<Edge> arcs;
  for (NodeId u : members) {
    for (NodeId v : g.neighbors(u)) {
      if (u < v && remap[v] != kAbsent) arcs.emplace_back(remap[u], remap[v]);
    }
  }
  return Graph::from_edges(members.size(), std::move(arcs), std::move(labels));
}

// Breadth-first expansion from `seed`, one whole level at a time, stopping at
// the first level whose inclusion brings the induced edge count to at least
// `target_edges`. Returns the whole component when the target is never met.
inline NodeSubset bfs_sample(const Graph& g, NodeId seed, std::size_t target_edges) {
  if (seed >= g.node_count()) throw std::out_of_range("seed node out of range");
  if (target_edges == 0) throw std::invalid_argument("target_edges must be >= 1");

  // 0 = unseen, 1 = in sample, 2 = in current level
  std::vector<std::uint8_t> state(g.node_count(), 0);
  std::vector<NodeId> sample{seed};
  std::vector<NodeId> level{seed};
  state[seed] = 1;
  std::size_t induced = 0;

  while (induced < target_edges) {
    std::vector<NodeId> next;
    for (NodeId u : level) {
      for (NodeId v : g.neighbors(u)) {
        if (state[v] == 0) {
          state[v] = 2;
          next.push_back(v);
        }
      }
    }
    if (next.empty()) break;
    std::sort(next.begin(), next.end());
    for (NodeId v : next) {
      for (NodeId w : g.neighbors(v)) {
        if (state[w] == 1 || (state[w] == 2 && w < v)) ++induced;
      }
    }
    for (NodeId v : next) state[v] = 1;
    sample.insert(sample.end(), next.begin(), next.end());
    level = std::move(next);
  }
  return NodeSubset::from_sorted([&] {
    std::sort(sample.begin(), sample.end());
    return std::move(sample);
  }());
}

}  // namespace structmatrix
