#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "structmatrix/graph.hpp"

namespace structmatrix::detail {

// Per-graph scratch shared by concurrent component workers. Every node carries
// the tag of the component currently holding it; components are node-disjoint,
// so a worker only writes tags and scratch slots of its own nodes, while it may
// read the tags of any neighbor. Tag 0 means "not in any live component".
class Workspace {
 public:
  static constexpr std::uint32_t kRetired = 0;

  explicit Workspace(std::size_t node_count)
      : tags_(std::make_unique<std::atomic<std::uint32_t>[]>(node_count)), scratch_(node_count, 0) {
    for (std::size_t i = 0; i < node_count; ++i) tags_[i].store(kRetired, std::memory_order_relaxed);
  }

  std::uint32_t fresh_tag() { return next_tag_.fetch_add(1, std::memory_order_relaxed); }

  std::uint32_t tag(NodeId v) const { return tags_[v].load(std::memory_order_relaxed); }
  void set_tag(NodeId v, std::uint32_t t) { tags_[v].store(t, std::memory_order_relaxed); }

  std::uint32_t& scratch(NodeId v) { return scratch_[v]; }

  std::uint32_t tag_all(std::span<const NodeId> members) {
    const std::uint32_t t = fresh_tag();
    for (NodeId v : members) set_tag(v, t);
    return t;
  }

 private:
  std::unique_ptr<std::atomic<std::uint32_t>[]> tags_;
  std::vector<std::uint32_t> scratch_;
  std::atomic<std::uint32_t> next_tag_{1};
};

// A node set identified by its tag in a workspace.
struct TaggedSet {
  std::span<const NodeId> members;
  std::uint32_t tag;
};

}  // namespace structmatrix::detail
