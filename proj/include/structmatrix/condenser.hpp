#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "structmatrix/graph.hpp"
#include "structmatrix/structure_type.hpp"

namespace structmatrix {

inline constexpr std::uint32_t kUnassigned = UINT32_MAX;

// A typed node set before ids and edge counts are attached.
struct RawStructure {
  StructureType stype = StructureType::undefined;
  std::vector<NodeId> members;  // sorted
};

struct StructureInstance {
  std::size_t id = 0;
  StructureType stype = StructureType::undefined;
  std::vector<NodeId> members;  // sorted; may be empty when loaded from a summary
  std::size_t n_nodes = 0;
  std::uint64_t internal_edges = 0;
  std::uint64_t total_external_degree = 0;
};

// D(i, j) for i < j.
struct InterEdge {
  std::uint32_t i = 0;
  std::uint32_t j = 0;
  std::uint64_t d = 0;
  friend bool operator==(const InterEdge&, const InterEdge&) = default;
};

struct EdgeTally {
  std::vector<InterEdge> inter;           // sorted by (i, j)
  std::vector<std::uint64_t> internal;    // per structure
  std::uint64_t unclassified_incident = 0;
};

struct Condensation {
  std::size_t source_nodes = 0;
  std::uint64_t source_edges = 0;
  std::vector<StructureInstance> instances;
  std::vector<std::uint32_t> node_assignment;  // structure id or kUnassigned
  std::vector<NodeId> unclassified_nodes;      // sorted
  std::vector<InterEdge> inter_edges;          // sorted by (i, j), i < j
  std::uint64_t unclassified_edges = 0;        // edges with an unclassified endpoint

  std::uint64_t d(std::uint32_t a, std::uint32_t b) const {
    if (a == b) return 0;
    if (a > b) std::swap(a, b);
    auto it = std::lower_bound(inter_edges.begin(), inter_edges.end(), InterEdge{a, b, 0},
                               [](const InterEdge& x, const InterEdge& y) {
                                 return x.i != y.i ? x.i < y.i : x.j < y.j;
                               });
    return it != inter_edges.end() && it->i == a && it->j == b ? it->d : 0;
  }

  std::array<std::size_t, kVocabularySize> type_counts() const {
    std::array<std::size_t, kVocabularySize> counts{};
    for (const auto& s : instances) ++counts[index_of(s.stype)];
    return counts;
  }
};

namespace detail {

inline std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

inline std::size_t resolve_workers(std::size_t requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace detail

// One pass over all edges. Node ranges may be split across workers; partial
// tallies are merged by sorting, so the result equals the sequential tally.
inline EdgeTally compute_inter_edges(const Graph& g, std::span<const std::uint32_t> assignment,
                                     std::size_t structure_count, std::size_t workers = 1) {
  if (assignment.size() != g.node_count()) throw std::invalid_argument("assignment size mismatch");
  workers = std::max<std::size_t>(1, std::min(detail::resolve_workers(workers), g.node_count() / 4096 + 1));

  struct Partial {
    std::vector<std::uint64_t> cross;
    std::vector<std::uint64_t> internal;
    std::uint64_t unclassified = 0;
  };
  std::vector<Partial> partials(workers);
  auto run = [&](std::size_t w) {
    Partial& p = partials[w];
    p.internal.assign(structure_count, 0);
    const std::size_t n = g.node_count();
    const std::size_t lo = n * w / workers;
    const std::size_t hi = n * (w + 1) / workers;
    for (std::size_t u = lo; u < hi; ++u) {
      const std::uint32_t su = assignment[u];
      for (NodeId v : g.neighbors(static_cast<NodeId>(u))) {
        if (v <= u) continue;
        const std::uint32_t sv = assignment[v];
        if (su == kUnassigned || sv == kUnassigned) {
          ++p.unclassified;
        } else if (su == sv) {
          ++p.internal[su];
        } else {
          p.cross.push_back(detail::pair_key(su, sv));
        }
      }
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }

  EdgeTally tally;
  tally.internal.assign(structure_count, 0);
  std::vector<std::uint64_t> keys;
  for (auto& p : partials) {
    for (std::size_t s = 0; s < structure_count; ++s) tally.internal[s] += p.internal[s];
    tally.unclassified_incident += p.unclassified;
    keys.insert(keys.end(), p.cross.begin(), p.cross.end());
  }
  std::sort(keys.begin(), keys.end());
  for (std::size_t k = 0; k < keys.size();) {
    std::size_t e = k;
    while (e < keys.size() && keys[e] == keys[k]) ++e;
    tally.inter.push_back({static_cast<std::uint32_t>(keys[k] >> 32),
                           static_cast<std::uint32_t>(keys[k] & 0xffffffffULL), e - k});
    k = e;
  }
  return tally;
}

// Numbers structures canonically (ascending smallest member) and attaches
// edge counts.
inline Condensation assemble_condensation(const Graph& g, std::vector<RawStructure> found,
                                          std::vector<NodeId> unclassified, std::size_t workers = 1) {
  for (auto& s : found) {
    if (s.members.empty()) throw std::invalid_argument("structure without members");
    if (!std::is_sorted(s.members.begin(), s.members.end())) std::sort(s.members.begin(), s.members.end());
  }
  std::sort(found.begin(), found.end(),
            [](const RawStructure& a, const RawStructure& b) { return a.members.front() < b.members.front(); });
  std::sort(unclassified.begin(), unclassified.end());

  Condensation c;
  c.source_nodes = g.node_count();
  c.source_edges = g.edge_count();
  c.node_assignment.assign(g.node_count(), kUnassigned);
  c.instances.reserve(found.size());
  for (std::size_t id = 0; id < found.size(); ++id) {
    for (NodeId v : found[id].members) {
      if (c.node_assignment[v] != kUnassigned) throw std::logic_error("node assigned to two structures");
      c.node_assignment[v] = static_cast<std::uint32_t>(id);
    }
    StructureInstance inst;
    inst.id = id;
    inst.stype = found[id].stype;
    inst.n_nodes = found[id].members.size();
    inst.members = std::move(found[id].members);
    c.instances.push_back(std::move(inst));
  }
  c.unclassified_nodes = std::move(unclassified);

  EdgeTally tally = compute_inter_edges(g, c.node_assignment, c.instances.size(), workers);
  for (std::size_t id = 0; id < c.instances.size(); ++id) c.instances[id].internal_edges = tally.internal[id];
  for (const auto& e : tally.inter) {
    c.instances[e.i].total_external_degree += e.d;
    c.instances[e.j].total_external_degree += e.d;
  }
  c.inter_edges = std::move(tally.inter);
  c.unclassified_edges = tally.unclassified_incident;
  return c;
}

struct Segment {
  StructureType stype = StructureType::undefined;
  std::size_t offset = 0;  // first matrix position
  std::size_t count = 0;
};

struct SegmentOrder {
  std::vector<std::size_t> position_of;  // structure id -> matrix position
  std::vector<std::size_t> instance_at;  // matrix position -> structure id
  std::array<Segment, kVocabularySize> segments{};
};

// Groups instances by type in vocabulary order; inside a segment, more
// external edges come first, ties by ascending id.
inline SegmentOrder order_segments(const Condensation& c) {
  SegmentOrder order;
  const std::size_t n = c.instances.size();
  order.instance_at.resize(n);
  for (std::size_t i = 0; i < n; ++i) order.instance_at[i] = i;
  std::sort(order.instance_at.begin(), order.instance_at.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = c.instances[a];
    const auto& y = c.instances[b];
    if (x.stype != y.stype) return x.stype < y.stype;
    if (x.total_external_degree != y.total_external_degree) return x.total_external_degree > y.total_external_degree;
    return a < b;
  });
  order.position_of.resize(n);
  for (std::size_t p = 0; p < n; ++p) order.position_of[order.instance_at[p]] = p;

  const auto counts = c.type_counts();
  std::size_t offset = 0;
  for (StructureType t : kVocabulary) {
    order.segments[index_of(t)] = {t, offset, counts[index_of(t)]};
    offset += counts[index_of(t)];
  }
  return order;
}

// Structures TSV: id, type, n_nodes, internal_edges, total_external_degree and,
// optionally, a comma-separated member list of external labels.
inline void write_structures_tsv(const Condensation& c, std::ostream& out, const Graph* labels = nullptr) {
  out << "id\ttype\tn_nodes\tinternal_edges\ttotal_external_degree";
  if (labels) out << "\tmembers";
  out << '\n';
  for (const auto& s : c.instances) {
    out << s.id << '\t' << to_string(s.stype) << '\t' << s.n_nodes << '\t' << s.internal_edges << '\t'
        << s.total_external_degree;
    if (labels) {
      out << '\t';
      for (std::size_t k = 0; k < s.members.size(); ++k) {
        if (k) out << ',';
        out << labels->label(s.members[k]);
      }
    }
    out << '\n';
  }
}

inline void write_inter_edges_tsv(const Condensation& c, std::ostream& out) {
  out << "i\tj\td\n";
  for (const auto& e : c.inter_edges) out << e.i << '\t' << e.j << '\t' << e.d << '\n';
}

struct StructureRecord {
  std::size_t id = 0;
  StructureType stype = StructureType::undefined;
  std::size_t n_nodes = 0;
  std::uint64_t internal_edges = 0;
  std::uint64_t total_external_degree = 0;
};

// Reads a structures TSV. An empty stream, or a header alone, yields no rows.
inline std::vector<StructureRecord> read_structures_tsv(std::istream& in) {
  std::vector<StructureRecord> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("id\t", 0) == 0) continue;
    std::istringstream fields(line);
    std::string id, type, n, internal, ext;
    if (!std::getline(fields, id, '\t') || !std::getline(fields, type, '\t') || !std::getline(fields, n, '\t') ||
        !std::getline(fields, internal, '\t') || !std::getline(fields, ext, '\t')) {
      throw ParseError(line_no, "expected at least five tab-separated columns");
    }
    StructureRecord r;
    const auto t = parse_structure_type(type);
    if (!t) throw ParseError(line_no, "unknown structure type '" + type + "'");
    r.stype = *t;
    try {
      std::size_t used = 0;
      auto num = [&](const std::string& s) {
        const unsigned long long v = std::stoull(s, &used);
        if (used != s.size() || s.empty() || s[0] == '-') throw std::invalid_argument(s);
        return v;
      };
      r.id = num(id);
      r.n_nodes = num(n);
      r.internal_edges = num(internal);
      r.total_external_degree = num(ext);
    } catch (const std::exception&) {
      throw ParseError(line_no, "malformed numeric column");
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace structmatrix
