#pragma once

#include <algorithm>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

#include "structmatrix/classifier.hpp"
#include "structmatrix/condenser.hpp"
#include "structmatrix/graph.hpp"
#include "structmatrix/ratio.hpp"
#include "structmatrix/workspace.hpp"

namespace structmatrix {

struct ShatterConfig {
  Ratio hub_fraction{1, 100};
  std::size_t min_structure_size = 5;
  Ratio epsilon{1, 5};
  ChainMode chain_mode = ChainMode::strict_path;
  std::size_t worker_count = 0;  // 0 = hardware concurrency

  void validate() const {
    if (hub_fraction.is_zero() || !hub_fraction.at_most_one()) throw std::invalid_argument("hub fraction must lie in (0, 1]");
    if (min_structure_size < 2) throw std::invalid_argument("minimum structure size must be >= 2");
    detail::require_epsilon(epsilon);
  }
};

struct HubStarResult {
  std::vector<RawStructure> stars;  // st or fs, in hub order
  NodeSubset residual;
  std::vector<NodeId> unclassified;  // hubs whose star was too small
};

namespace detail {

struct PendingComponent {
  std::vector<NodeId> members;  // sorted
  std::uint32_t tag = 0;
  bool classified = false;  // already ran the classifier and got `undefined`
};

inline std::size_t hub_count(const Ratio& fraction, std::size_t component_size) {
  return std::max<std::size_t>(1, fraction.ceil_times(component_size));
}

// Highest in-component degree first, ties by ascending id. Leaves the
// degrees in the members' scratch slots.
inline std::vector<NodeId> top_degree_nodes(const Graph& g, Workspace& ws, TaggedSet set, const Ratio& fraction) {
  for (NodeId v : set.members) {
    std::uint32_t d = 0;
    for (NodeId w : g.neighbors(v)) d += ws.tag(w) == set.tag;
    ws.scratch(v) = d;
  }
  std::vector<NodeId> order(set.members.begin(), set.members.end());
  const std::size_t k = std::min(order.size(), hub_count(fraction, order.size()));
  auto by_degree = [&](NodeId a, NodeId b) {
    const auto da = ws.scratch(a);
    const auto db = ws.scratch(b);
    return da != db ? da > db : a < b;
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), by_degree);
  order.resize(k);
  return order;
}

struct StarHarvest {
  std::vector<RawStructure> stars;
  std::vector<NodeId> unclassified_hubs;
};

// Removes `hubs` from the set and turns each into a star candidate. Satellites
// left without any in-set neighbor once the hubs are gone are consumed by the
// first hub that reaches them; the others stay in the set.
inline StarHarvest harvest_stars(const Graph& g, Workspace& ws, TaggedSet set, std::span<const NodeId> hubs,
                                 std::size_t min_size) {
  StarHarvest out;
  const std::uint32_t hub_tag = ws.fresh_tag();
  for (NodeId h : hubs) ws.set_tag(h, hub_tag);
  for (NodeId v : set.members) {
    if (ws.tag(v) != set.tag) continue;
    std::uint32_t d = 0;
    for (NodeId w : g.neighbors(v)) d += ws.tag(w) == set.tag;
    ws.scratch(v) = d;
  }

  std::vector<NodeId> consumed;
  for (NodeId h : hubs) {
    consumed.clear();
    std::size_t satellites = 0;
    for (NodeId w : g.neighbors(h)) {
      if (ws.tag(w) != set.tag) continue;
      ++satellites;
      if (ws.scratch(w) == 0) consumed.push_back(w);
    }
    if (satellites > 0 && consumed.size() + 1 >= min_size) {
      RawStructure star;
      star.stype = consumed.size() == satellites ? StructureType::st : StructureType::fs;
      star.members.reserve(consumed.size() + 1);
      star.members.push_back(h);
      star.members.insert(star.members.end(), consumed.begin(), consumed.end());
      std::sort(star.members.begin(), star.members.end());
      for (NodeId c : consumed) ws.set_tag(c, Workspace::kRetired);
      out.stars.push_back(std::move(star));
    } else {
      out.unclassified_hubs.push_back(h);
    }
    ws.set_tag(h, Workspace::kRetired);
  }
  return out;
}

// Splits the nodes of `candidates` still carrying `live_tag` into connected
// components, each retagged with a fresh tag. `candidates` must be sorted;
// components come out ordered by smallest member.
inline std::vector<PendingComponent> split_components(const Graph& g, Workspace& ws,
                                                      std::span<const NodeId> candidates, std::uint32_t live_tag) {
  std::vector<PendingComponent> out;
  std::vector<NodeId> stack;
  for (NodeId root : candidates) {
    if (ws.tag(root) != live_tag) continue;
    PendingComponent cc;
    cc.tag = ws.fresh_tag();
    ws.set_tag(root, cc.tag);
    stack.push_back(root);
    while (!stack.empty()) {
      const NodeId v = stack.back();
      stack.pop_back();
      cc.members.push_back(v);
      for (NodeId w : g.neighbors(v)) {
        if (ws.tag(w) == live_tag) {
          ws.set_tag(w, cc.tag);
          stack.push_back(w);
        }
      }
    }
    std::sort(cc.members.begin(), cc.members.end());
    out.push_back(std::move(cc));
  }
  return out;
}

struct ComponentOutcome {
  std::vector<RawStructure> found;
  std::vector<NodeId> unclassified;
  std::vector<PendingComponent> pending;
};

inline void retire(Workspace& ws, std::span<const NodeId> nodes) {
  for (NodeId v : nodes) ws.set_tag(v, Workspace::kRetired);
}

// One pop-process cycle on a connected component.
inline ComponentOutcome process_component(const Graph& g, Workspace& ws, const ShatterConfig& cfg,
                                          PendingComponent component) {
  ComponentOutcome out;
  const TaggedSet set{component.members, component.tag};

  if (!component.classified) {
    const StructureType t = classify_set(g, ws, set, cfg.epsilon, cfg.chain_mode);
    if (t != StructureType::undefined) {
      retire(ws, component.members);
      out.found.push_back({t, std::move(component.members)});
      return out;
    }
  }

  const auto hubs = top_degree_nodes(g, ws, set, cfg.hub_fraction);
  auto harvest = harvest_stars(g, ws, set, hubs, cfg.min_structure_size);
  out.found = std::move(harvest.stars);
  out.unclassified = std::move(harvest.unclassified_hubs);

  for (auto& cc : split_components(g, ws, component.members, component.tag)) {
    if (cc.members.size() < cfg.min_structure_size) {
      retire(ws, cc.members);
      out.unclassified.insert(out.unclassified.end(), cc.members.begin(), cc.members.end());
      continue;
    }
    const StructureType t = classify_set(g, ws, {cc.members, cc.tag}, cfg.epsilon, cfg.chain_mode);
    if (t != StructureType::undefined) {
      retire(ws, cc.members);
      out.found.push_back({t, std::move(cc.members)});
    } else {
      cc.classified = true;
      out.pending.push_back(std::move(cc));
    }
  }
  return out;
}

// FIFO work queue drained by `workers` threads. Each item is processed
// independently; results are collected under one lock and canonically ordered
// afterwards, so the outcome does not depend on scheduling.
class ShatterQueue {
 public:
  ShatterQueue(const Graph& g, Workspace& ws, const ShatterConfig& cfg) : g_(g), ws_(ws), cfg_(cfg) {}

  void push(PendingComponent c) { queue_.push_back(std::move(c)); }

  void run(std::size_t workers) {
    if (workers <= 1) {
      while (!queue_.empty()) {
        PendingComponent c = std::move(queue_.front());
        queue_.pop_front();
        collect(process_component(g_, ws_, cfg_, std::move(c)));
      }
      return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back([this] { work(); });
    for (auto& t : pool) t.join();
    if (error_) std::rethrow_exception(error_);
  }

  std::vector<RawStructure> take_found() { return std::move(found_); }
  std::vector<NodeId> take_unclassified() { return std::move(unclassified_); }

 private:
  void collect(ComponentOutcome o) {
    for (auto& s : o.found) found_.push_back(std::move(s));
    unclassified_.insert(unclassified_.end(), o.unclassified.begin(), o.unclassified.end());
    for (auto& p : o.pending) queue_.push_back(std::move(p));
  }

  void work() {
    std::unique_lock lock(mutex_);
    for (;;) {
      ready_.wait(lock, [&] { return !queue_.empty() || active_ == 0 || error_; });
      if (error_ || (queue_.empty() && active_ == 0)) break;
      PendingComponent c = std::move(queue_.front());
      queue_.pop_front();
      ++active_;
      lock.unlock();
      ComponentOutcome o;
      std::exception_ptr failure;
      try {
        o = process_component(g_, ws_, cfg_, std::move(c));
      } catch (...) {
        failure = std::current_exception();
      }
      lock.lock();
      --active_;
      if (failure) {
        error_ = failure;
      } else {
        collect(std::move(o));
      }
      ready_.notify_all();
    }
    ready_.notify_all();
  }

  const Graph& g_;
  Workspace& ws_;
  const ShatterConfig& cfg_;
  std::deque<PendingComponent> queue_;
  std::vector<RawStructure> found_;
  std::vector<NodeId> unclassified_;
  std::mutex mutex_;
  std::condition_variable ready_;
  std::size_t active_ = 0;
  std::exception_ptr error_;
};

}  // namespace detail

// max(1, ceil(fraction * |component|)) nodes of highest degree inside the
// component, ties by ascending id.
inline std::vector<NodeId> select_hubs(const Graph& g, const NodeSubset& component, const Ratio& hub_fraction) {
  if (component.empty()) throw std::invalid_argument("empty component");
  detail::Workspace ws(g.node_count());
  const detail::TaggedSet set{component.members(), ws.tag_all(component.members())};
  return detail::top_degree_nodes(g, ws, set, hub_fraction);
}

inline HubStarResult extract_hub_stars(const Graph& g, const NodeSubset& component, std::span<const NodeId> hubs,
                                       const ShatterConfig& config) {
  for (NodeId h : hubs) {
    if (!component.contains(h)) throw std::invalid_argument("hub outside the component");
  }
  detail::Workspace ws(g.node_count());
  const detail::TaggedSet set{component.members(), ws.tag_all(component.members())};
  auto harvest = detail::harvest_stars(g, ws, set, hubs, config.min_structure_size);
  std::vector<NodeId> residual;
  for (NodeId v : component.members()) {
    if (ws.tag(v) == set.tag) residual.push_back(v);
  }
  return {std::move(harvest.stars), NodeSubset::from_sorted(std::move(residual)),
          std::move(harvest.unclassified_hubs)};
}

// Maximal connected subsets of the subgraph induced by `nodes`, ordered by
// smallest member.
inline std::vector<NodeSubset> connected_components(const Graph& g, const NodeSubset& nodes) {
  detail::Workspace ws(g.node_count());
  const std::uint32_t tag = ws.tag_all(nodes.members());
  std::vector<NodeSubset> out;
  for (auto& cc : detail::split_components(g, ws, nodes.members(), tag)) {
    out.push_back(NodeSubset::from_sorted(std::move(cc.members)));
  }
  return out;
}

// Ordered hub removal over a queue of components. Every node ends up in
// exactly one structure or in the unclassified set.
inline Condensation shatter(const Graph& g, const ShatterConfig& config) {
  config.validate();
  if (g.empty()) throw std::invalid_argument("empty graph");
  const std::size_t workers = detail::resolve_workers(config.worker_count);

  detail::Workspace ws(g.node_count());
  const NodeSubset everything = NodeSubset::all(g);
  const std::uint32_t tag = ws.tag_all(everything.members());

  detail::ShatterQueue queue(g, ws, config);
  std::vector<NodeId> unclassified;
  for (auto& cc : detail::split_components(g, ws, everything.members(), tag)) {
    if (cc.members.size() < config.min_structure_size) {
      unclassified.insert(unclassified.end(), cc.members.begin(), cc.members.end());
      detail::retire(ws, cc.members);
    } else {
      queue.push(std::move(cc));
    }
  }
  queue.run(workers);

  auto found = queue.take_found();
  auto rest = queue.take_unclassified();
  unclassified.insert(unclassified.end(), rest.begin(), rest.end());
  return assemble_condensation(g, std::move(found), std::move(unclassified), workers);
}

}  // namespace structmatrix
