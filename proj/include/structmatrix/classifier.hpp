#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <vector>

#include "structmatrix/graph.hpp"
#include "structmatrix/ratio.hpp"
#include "structmatrix/structure_type.hpp"
#include "structmatrix/workspace.hpp"

namespace structmatrix {

struct Bipartition {
  NodeSubset side_a;  // holds the smallest member id
  NodeSubset side_b;
};

namespace detail {

struct EdgeCensus {
  std::uint64_t nodes = 0;
  std::uint64_t edges = 0;
  std::size_t max_degree = 0;
};

inline EdgeCensus census(const Graph& g, const Workspace& ws, TaggedSet set) {
  EdgeCensus c;
  c.nodes = set.members.size();
  std::uint64_t degree_sum = 0;
  for (NodeId v : set.members) {
    std::size_t d = 0;
    for (NodeId w : g.neighbors(v)) d += ws.tag(w) == set.tag;
    degree_sum += d;
    c.max_degree = std::max(c.max_degree, d);
  }
  c.edges = degree_sum / 2;
  return c;
}

struct TwoColoring {
  bool connected = false;
  bool bipartite = false;
  std::vector<std::uint8_t> side;  // by position in set.members
  std::size_t side_a_count = 0;
};

// Breadth-first two-coloring rooted at the smallest member. Overwrites the
// scratch slots of the members with their positions.
inline TwoColoring two_color(const Graph& g, Workspace& ws, TaggedSet set) {
  TwoColoring out;
  const std::size_t n = set.members.size();
  if (n == 0) return out;
  constexpr std::uint8_t kUnseen = 2;
  out.side.assign(n, kUnseen);
  std::size_t root = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ws.scratch(set.members[i]) = static_cast<std::uint32_t>(i);
    if (set.members[i] < set.members[root]) root = i;
  }
  bool odd_cycle = false;
  std::size_t seen = 1;
  std::deque<std::size_t> frontier{root};
  out.side[root] = 0;
  while (!frontier.empty()) {
    const std::size_t i = frontier.front();
    frontier.pop_front();
    for (NodeId w : g.neighbors(set.members[i])) {
      if (ws.tag(w) != set.tag) continue;
      const std::size_t j = ws.scratch(w);
      if (out.side[j] == kUnseen) {
        out.side[j] = static_cast<std::uint8_t>(1 - out.side[i]);
        ++seen;
        frontier.push_back(j);
      } else if (out.side[j] == out.side[i]) {
        odd_cycle = true;
      }
    }
  }
  out.connected = seen == n;
  out.bipartite = out.connected && !odd_cycle;
  out.side_a_count = static_cast<std::size_t>(std::count(out.side.begin(), out.side.end(), 0));
  return out;
}

inline void require_epsilon(const Ratio& epsilon) {
  if (epsilon.is_zero() || !epsilon.less_than_one()) throw std::invalid_argument("epsilon must lie in (0, 1)");
}

// Edge-arithmetic decision ladder over a connected tagged set.
inline StructureType classify_set(const Graph& g, Workspace& ws, TaggedSet set, const Ratio& epsilon,
                                  ChainMode chain_mode, const TwoColoring* precomputed = nullptr) {
  const EdgeCensus c = census(g, ws, set);
  const std::uint64_t n = c.nodes;
  const std::uint64_t m = c.edges;
  const Ratio keep = epsilon.complement();
  const std::uint64_t full = n * (n - 1) / 2;

  if (m == full) return StructureType::fc;
  if (exceeds_fraction_of(m, keep, full)) return StructureType::nc;
  if (4 * static_cast<u128>(m) < static_cast<u128>(n) * n) {
    TwoColoring local;
    const TwoColoring* coloring = precomputed;
    if (!coloring) {
      local = two_color(g, ws, set);
      coloring = &local;
    }
    if (coloring->bipartite) {
      const std::uint64_t a = coloring->side_a_count;
      const std::uint64_t b = n - a;
      // Stars are tested before complete bipartite cores: K(1,k) also
      // satisfies m = |Va||Vb|.
      if (a == 1 || b == 1) return StructureType::st;
      if (m == a * b) return StructureType::fb;
      if (exceeds_fraction_of(m, keep, a * b)) return StructureType::nb;
      if (m == n - 1 && (chain_mode == ChainMode::tree_literal || c.max_degree <= 2)) return StructureType::ch;
    }
  }
  return StructureType::undefined;
}

}  // namespace detail

// Two-coloring of a connected component, or nullopt when it has an odd cycle.
inline std::optional<Bipartition> check_bipartite(const Graph& g, const NodeSubset& component) {
  if (component.empty()) throw std::invalid_argument("empty component");
  detail::Workspace ws(g.node_count());
  const detail::TaggedSet set{component.members(), ws.tag_all(component.members())};
  const auto coloring = detail::two_color(g, ws, set);
  if (!coloring.connected) throw std::invalid_argument("component is not connected");
  if (!coloring.bipartite) return std::nullopt;
  std::vector<NodeId> a;
  std::vector<NodeId> b;
  for (std::size_t i = 0; i < set.members.size(); ++i) {
    (coloring.side[i] == 0 ? a : b).push_back(set.members[i]);
  }
  return Bipartition{NodeSubset::from_sorted(std::move(a)), NodeSubset::from_sorted(std::move(b))};
}

// Labels a connected component with a vocabulary type, or `undefined`.
// Never returns fs: false stars need the hub-removal context.
inline StructureType classify(const Graph& g, const NodeSubset& component, const Ratio& epsilon = Ratio(1, 5),
                              ChainMode chain_mode = ChainMode::strict_path) {
  detail::require_epsilon(epsilon);
  if (component.size() < 2) throw std::invalid_argument("component needs at least two nodes");
  detail::Workspace ws(g.node_count());
  const detail::TaggedSet set{component.members(), ws.tag_all(component.members())};
  const auto coloring = detail::two_color(g, ws, set);
  if (!coloring.connected) throw std::invalid_argument("component is not connected");
  return detail::classify_set(g, ws, set, epsilon, chain_mode, &coloring);
}

}  // namespace structmatrix
