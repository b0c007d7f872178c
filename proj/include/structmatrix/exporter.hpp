#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "structmatrix/condenser.hpp"
#include "structmatrix/graph.hpp"
#include "structmatrix/layout.hpp"

namespace structmatrix {

using ordered_json = nlohmann::ordered_json;

struct BundleOptions {
  std::string name;
  std::size_t member_limit = 100;  // member lists only for smaller instances
  ordered_json config = ordered_json::object();
  const Graph* graph = nullptr;  // member labels; internal ids without it
};

// Bundle layout:
//   meta          graph name, counts, config echo, canvas, scale
//   segments      [{type, count, offset, px_x: [offset, len], px_y: [offset, len]}]
//   instances     [{id, sid, type, n, ext, members?}] in matrix order; id is the
//                 matrix position, sid the structure id of the TSV outputs
//   cells         [[row, col, d, size_sum]] with row < col, sorted
//   color_domain  [min, max] of size_sum over cells
inline ordered_json make_bundle(const Condensation& c, const SegmentOrder& order, const LayoutPlan& plan,
                                const BundleOptions& options = {}) {
  ordered_json meta;
  meta["name"] = options.name;
  meta["nodes"] = c.source_nodes;
  meta["edges"] = c.source_edges;
  meta["structures"] = c.instances.size();
  meta["unclassified_nodes"] = c.unclassified_nodes.size();
  meta["unclassified_edges"] = c.unclassified_edges;
  meta["config"] = options.config;
  meta["canvas"] = {plan.canvas_w, plan.canvas_h};
  meta["scale"] = std::string(to_string(plan.scale));

  ordered_json segments = ordered_json::array();
  for (const auto& s : plan.segments) {
    ordered_json seg;
    seg["type"] = std::string(to_string(s.stype));
    seg["count"] = s.count;
    seg["offset"] = s.matrix_offset;
    seg["px_x"] = {s.px_x_offset, s.px_x};
    seg["px_y"] = {s.px_y_offset, s.px_y};
    segments.push_back(std::move(seg));
  }

  ordered_json instances = ordered_json::array();
  for (std::size_t pos = 0; pos < order.instance_at.size(); ++pos) {
    const StructureInstance& s = c.instances[order.instance_at[pos]];
    ordered_json inst;
    inst["id"] = pos;
    inst["sid"] = s.id;
    inst["type"] = std::string(to_string(s.stype));
    inst["n"] = s.n_nodes;
    inst["ext"] = s.total_external_degree;
    if (s.n_nodes < options.member_limit && !s.members.empty()) {
      ordered_json members = ordered_json::array();
      for (NodeId v : s.members) {
        if (options.graph) {
          members.push_back(options.graph->label(v));
        } else {
          members.push_back(v);
        }
      }
      inst["members"] = std::move(members);
    }
    instances.push_back(std::move(inst));
  }

  std::vector<std::array<std::uint64_t, 4>> half;
  half.reserve(c.inter_edges.size());
  for (const auto& e : c.inter_edges) {
    std::uint64_t a = order.position_of[e.i];
    std::uint64_t b = order.position_of[e.j];
    if (a > b) std::swap(a, b);
    half.push_back({a, b, e.d, c.instances[e.i].n_nodes + c.instances[e.j].n_nodes});
  }
  std::sort(half.begin(), half.end());
  ordered_json cells = ordered_json::array();
  for (const auto& h : half) cells.push_back({h[0], h[1], h[2], h[3]});

  ordered_json bundle;
  bundle["meta"] = std::move(meta);
  bundle["segments"] = std::move(segments);
  bundle["instances"] = std::move(instances);
  bundle["cells"] = std::move(cells);
  bundle["color_domain"] = {plan.v_min, plan.v_max};
  return bundle;
}

inline void write_json(const ordered_json& doc, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << doc.dump() << '\n';
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

inline void export_bundle(const Condensation& c, const SegmentOrder& order, const LayoutPlan& plan,
                          const std::filesystem::path& path, const BundleOptions& options = {}) {
  write_json(make_bundle(c, order, plan, options), path);
}

class BundleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BundleModel {
  std::size_t structure_count = 0;
  std::vector<Cell> cells;  // both orientations
  std::uint64_t v_min = 0;
  std::uint64_t v_max = 0;
};

// Schema check plus symmetric reconstruction of the cell set; the same
// reading a bundle consumer performs.
inline BundleModel read_bundle(const nlohmann::json& doc) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw BundleError("bundle schema: " + what);
  };
  require(doc.is_object(), "top level must be an object");
  for (const char* key : {"meta", "segments", "instances", "cells", "color_domain"}) {
    require(doc.contains(key), std::string("missing '") + key + "'");
  }
  require(doc["segments"].is_array() && doc["segments"].size() == kVocabularySize, "segments must list 7 types");
  for (const auto& s : doc["segments"]) {
    require(s.contains("type") && s["type"].is_string() && parse_structure_type(s["type"].get<std::string>()),
            "segment type");
    require(s.contains("count") && s["count"].is_number_unsigned(), "segment count");
    require(s.contains("offset") && s["offset"].is_number_unsigned(), "segment offset");
  }
  require(doc["instances"].is_array(), "instances must be an array");
  BundleModel model;
  model.structure_count = doc["instances"].size();
  for (std::size_t k = 0; k < model.structure_count; ++k) {
    const auto& inst = doc["instances"][k];
    require(inst.contains("id") && inst["id"].is_number_unsigned() && inst["id"].get<std::size_t>() == k,
            "instance ids must be matrix positions");
    require(inst.contains("type") && inst["type"].is_string() && parse_structure_type(inst["type"].get<std::string>()),
            "instance type");
    require(inst.contains("n") && inst["n"].is_number_unsigned(), "instance n");
    require(inst.contains("ext") && inst["ext"].is_number_unsigned(), "instance ext");
  }
  require(doc["cells"].is_array(), "cells must be an array");
  for (const auto& cell : doc["cells"]) {
    require(cell.is_array() && cell.size() == 4, "cell must be [row, col, d, size_sum]");
    for (const auto& v : cell) require(v.is_number_unsigned(), "cell entries must be unsigned integers");
    const auto row = cell[0].get<std::size_t>();
    const auto col = cell[1].get<std::size_t>();
    require(row < col, "cells must have row < col");
    require(col < model.structure_count, "cell refers to an unknown instance");
    const auto d = cell[2].get<std::uint64_t>();
    const auto size_sum = cell[3].get<std::uint64_t>();
    require(d >= 1, "cell with zero edges");
    model.cells.push_back({row, col, d, size_sum});
    model.cells.push_back({col, row, d, size_sum});
  }
  const auto& dom = doc["color_domain"];
  require(dom.is_array() && dom.size() == 2, "color_domain must be [min, max]");
  model.v_min = dom[0].get<std::uint64_t>();
  model.v_max = dom[1].get<std::uint64_t>();
  require(model.v_min <= model.v_max, "color_domain min above max");
  return model;
}

// Touched pixels of a raster: {width, height, pixels: [[x, y, size_sum, value]]}.
inline ordered_json pixel_dump(const RasterGrid& grid) {
  ordered_json doc;
  doc["width"] = grid.width;
  doc["height"] = grid.height;
  ordered_json pixels = ordered_json::array();
  for (std::size_t y = 0; y < grid.height; ++y) {
    for (std::size_t x = 0; x < grid.width; ++x) {
      if (grid.touched(x, y)) pixels.push_back({x, y, grid.size_sum[grid.index(x, y)], grid.at(x, y)});
    }
  }
  doc["pixels"] = std::move(pixels);
  return doc;
}

// Random projection inputs with their outputs: [[x, x_min, x_max, res, offset, pixel]].
inline ordered_json projection_golden(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ordered_json rows = ordered_json::array();
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t x_min = rng() % 5000;
    const std::size_t x_max = x_min + rng() % 5000;
    const std::size_t x = x_min + (x_max > x_min ? rng() % (x_max - x_min + 1) : 0);
    const std::size_t res = 1 + rng() % 1200;
    const std::size_t offset = rng() % 1000;
    rows.push_back({x, x_min, x_max, res, offset, project(x, x_min, x_max, res, offset)});
  }
  return rows;
}

}  // namespace structmatrix
