#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "structmatrix/graph.hpp"

namespace structmatrix::synthetic {

// Co-authorship style graph: every team joins a small team into a clique.
// Team members are drawn half from earlier appearances (preferential) and
// half uniformly, which gives a heavy-tailed degree distribution with strong
// clustering. With window > 0 authors sit on a line: a team forms around a
// preferentially chosen lead, with members within `window` ids of it, so the
// graph keeps a long diameter.
inline Graph collaboration(std::size_t authors, std::size_t teams, std::uint64_t seed, std::size_t window = 0) {
  if (authors < 2) throw std::invalid_argument("need at least two authors");
  if (window != 0 && 2 * window + 1 < 41) throw std::invalid_argument("window must be at least 20");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<NodeId> any(0, static_cast<NodeId>(authors - 1));
  std::geometric_distribution<int> extra(0.45);
  std::bernoulli_distribution preferential(0.5);
  std::vector<NodeId> appearances;
  std::vector<Edge> arcs;
  std::vector<NodeId> team;
  auto earlier = [&] {
    return appearances[std::uniform_int_distribution<std::size_t>(0, appearances.size() - 1)(rng)];
  };
  for (std::size_t p = 0; p < teams; ++p) {
    const std::size_t size = std::min<std::size_t>(2 + static_cast<std::size_t>(extra(rng)), 40);
    team.clear();
    if (window == 0) {
      while (team.size() < size) {
        const NodeId a = (!appearances.empty() && preferential(rng)) ? earlier() : any(rng);
        if (std::find(team.begin(), team.end(), a) == team.end()) team.push_back(a);
      }
    } else {
      const NodeId lead = (!appearances.empty() && preferential(rng)) ? earlier() : any(rng);
      const std::size_t lo = lead > window ? lead - window : 0;
      const std::size_t hi = std::min(authors - 1, static_cast<std::size_t>(lead) + window);
      std::uniform_int_distribution<std::size_t> near(lo, hi);
      team.push_back(lead);
      while (team.size() < std::min(size, hi - lo + 1)) {
        const auto a = static_cast<NodeId>(near(rng));
        if (std::find(team.begin(), team.end(), a) == team.end()) team.push_back(a);
      }
    }
    for (std::size_t i = 0; i < team.size(); ++i) {
      appearances.push_back(team[i]);
      for (std::size_t j = i + 1; j < team.size(); ++j) arcs.emplace_back(team[i], team[j]);
    }
  }
  return Graph::from_edges(authors, std::move(arcs));
}

// Chung-Lu graph with power-law expected degrees w_i ~ (i + 1)^(-1/(gamma-1)).
inline Graph chung_lu(std::size_t nodes, std::size_t edges, double gamma, std::uint64_t seed) {
  if (nodes < 2) throw std::invalid_argument("need at least two nodes");
  if (!(gamma > 1.0)) throw std::invalid_argument("gamma must exceed 1");
  std::vector<double> cumulative(nodes);
  double total = 0.0;
  for (std::size_t i = 0; i < nodes; ++i) {
    total += std::pow(static_cast<double>(i + 1), -1.0 / (gamma - 1.0));
    cumulative[i] = total;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, total);
  auto draw = [&] {
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), unit(rng));
    return static_cast<NodeId>(std::min<std::size_t>(nodes - 1, static_cast<std::size_t>(it - cumulative.begin())));
  };
  std::vector<Edge> arcs;
  arcs.reserve(edges);
  for (std::size_t e = 0; e < edges; ++e) arcs.emplace_back(draw(), draw());
  return Graph::from_edges(nodes, std::move(arcs));
}

}  // namespace structmatrix::synthetic
