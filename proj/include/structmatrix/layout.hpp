#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "structmatrix/condenser.hpp"
#include "structmatrix/ratio.hpp"
#include "structmatrix/structure_type.hpp"

namespace structmatrix {

class LayoutError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ColorScale : std::uint8_t { log, linear };

inline std::string_view to_string(ColorScale s) { return s == ColorScale::log ? "log" : "linear"; }

inline ColorScale parse_color_scale(std::string_view s) {
  if (s == "log") return ColorScale::log;
  if (s == "linear" || s == "normal") return ColorScale::linear;
  throw std::invalid_argument("unknown color scale '" + std::string(s) + "'");
}

struct SegmentPlan {
  StructureType stype = StructureType::undefined;
  std::size_t matrix_offset = 0;
  std::size_t count = 0;
  std::size_t px_x_offset = 0;
  std::size_t px_x = 0;  // Res_x of every region in this segment's column
  std::size_t px_y_offset = 0;
  std::size_t px_y = 0;  // Res_y of every region in this segment's row
};

struct LayoutPlan {
  std::array<SegmentPlan, kVocabularySize> segments{};
  std::size_t canvas_w = 0;
  std::size_t canvas_h = 0;
  std::uint64_t v_min = 0;  // color domain over cells; both zero without cells
  std::uint64_t v_max = 0;
  ColorScale scale = ColorScale::log;

  // R(row type, col type) as (x offset, y offset); 0-based pixel boundaries.
  std::pair<std::size_t, std::size_t> region_offset(StructureType row, StructureType col) const {
    return {segments[index_of(col)].px_x_offset, segments[index_of(row)].px_y_offset};
  }
  std::pair<std::size_t, std::size_t> region_resolution(StructureType row, StructureType col) const {
    return {segments[index_of(col)].px_x, segments[index_of(row)].px_y};
  }

  const SegmentPlan& segment_at(std::size_t position) const {
    for (const auto& s : segments) {
      if (position >= s.matrix_offset && position < s.matrix_offset + s.count) return s;
    }
    throw std::out_of_range("matrix position " + std::to_string(position) + " outside every segment");
  }
};

// One non-zero matrix entry; row and col are matrix positions.
struct Cell {
  std::size_t row = 0;
  std::size_t col = 0;
  std::uint64_t d = 0;
  std::uint64_t size_sum = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

// Both orientations of every structure pair with D > 0.
inline std::vector<Cell> build_cells(const Condensation& c, const SegmentOrder& order) {
  std::vector<Cell> cells;
  cells.reserve(2 * c.inter_edges.size());
  for (const auto& e : c.inter_edges) {
    const std::uint64_t size_sum = c.instances[e.i].n_nodes + c.instances[e.j].n_nodes;
    const std::size_t a = order.position_of[e.i];
    const std::size_t b = order.position_of[e.j];
    cells.push_back({a, b, e.d, size_sum});
    cells.push_back({b, a, e.d, size_sum});
  }
  return cells;
}

// Pixel extents proportional to `counts`, each non-empty entry getting at
// least max(1, min_px); empty entries get nothing. Extents sum to `total_px`
// whenever any entry is non-empty. Leftover pixels go by largest remainder,
// ties to the earlier entry.
inline std::vector<std::size_t> allocate_extents(std::span<const std::size_t> counts, std::size_t total_px,
                                                 std::size_t min_px) {
  const std::size_t floor_px = std::max<std::size_t>(1, min_px);
  std::vector<std::size_t> extents(counts.size(), 0);
  std::vector<bool> floored(counts.size(), false);
  std::size_t nonempty = 0;
  for (std::size_t c : counts) nonempty += c > 0;
  if (nonempty == 0) return extents;
  if (nonempty * floor_px > total_px) {
    throw LayoutError("canvas too small: " + std::to_string(nonempty) + " segments need " +
                      std::to_string(nonempty * floor_px) + " px, have " + std::to_string(total_px));
  }

  std::size_t pool = total_px;
  std::uint64_t weight = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (counts[i] == 0 || floored[i]) continue;
      // share = counts[i] * pool / weight < floor_px
      if (static_cast<u128>(counts[i]) * pool < static_cast<u128>(floor_px) * weight) {
        floored[i] = true;
        extents[i] = floor_px;
        pool -= floor_px;
        weight -= counts[i];
        changed = true;
      }
    }
  }
  if (weight == 0) {
    // Every segment hit the floor; spare pixels go to the first one.
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (counts[i] > 0) {
        extents[i] += pool;
        break;
      }
    }
    return extents;
  }

  std::vector<std::pair<std::uint64_t, std::size_t>> remainders;
  std::size_t used = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0 || floored[i]) continue;
    const u128 scaled = static_cast<u128>(counts[i]) * pool;
    extents[i] = static_cast<std::size_t>(scaled / weight);
    used += extents[i];
    remainders.emplace_back(static_cast<std::uint64_t>(scaled % weight), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; used < pool; ++k, ++used) ++extents[remainders[k % remainders.size()].second];
  return extents;
}

inline std::pair<std::uint64_t, std::uint64_t> color_domain(const Condensation& c) {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  for (const auto& e : c.inter_edges) {
    const std::uint64_t s = c.instances[e.i].n_nodes + c.instances[e.j].n_nodes;
    if (lo == 0 || s < lo) lo = s;
    hi = std::max(hi, s);
  }
  return {lo, hi};
}

inline LayoutPlan plan_layout(const Condensation& c, const SegmentOrder& order, std::size_t canvas_w,
                              std::size_t canvas_h, std::size_t min_segment_px = 1,
                              ColorScale scale = ColorScale::log) {
  std::array<std::size_t, kVocabularySize> counts{};
  for (std::size_t t = 0; t < kVocabularySize; ++t) counts[t] = order.segments[t].count;
  const auto xs = allocate_extents(counts, canvas_w, min_segment_px);
  const auto ys = allocate_extents(counts, canvas_h, min_segment_px);

  LayoutPlan plan;
  plan.canvas_w = canvas_w;
  plan.canvas_h = canvas_h;
  plan.scale = scale;
  std::size_t x_off = 0;
  std::size_t y_off = 0;
  for (std::size_t t = 0; t < kVocabularySize; ++t) {
    auto& s = plan.segments[t];
    s.stype = kVocabulary[t];
    s.matrix_offset = order.segments[t].offset;
    s.count = order.segments[t].count;
    s.px_x_offset = x_off;
    s.px_x = xs[t];
    s.px_y_offset = y_off;
    s.px_y = ys[t];
    x_off += xs[t];
    y_off += ys[t];
  }
  std::tie(plan.v_min, plan.v_max) = color_domain(c);
  return plan;
}

inline LayoutPlan plan_layout(const Condensation& c, std::size_t canvas_w, std::size_t canvas_h,
                              std::size_t min_segment_px = 1, ColorScale scale = ColorScale::log) {
  return plan_layout(c, order_segments(c), canvas_w, canvas_h, min_segment_px, scale);
}

// offset + ceil((res - 1) * (x - x_min) / (x_max - x_min) + 1/2), evaluated in
// integers. The result lies in [offset + 1, offset + res].
inline std::size_t project(std::size_t x, std::size_t x_min, std::size_t x_max, std::size_t res, std::size_t offset) {
  if (res == 0) throw std::invalid_argument("resolution must be >= 1");
  if (x_min > x_max || x < x_min || x > x_max) throw std::out_of_range("position outside [x_min, x_max]");
  if (x_min == x_max) return offset + 1;
  const u128 span = x_max - x_min;
  const u128 scaled = static_cast<u128>(res - 1) * (x - x_min);
  // ceil((2*scaled + span) / (2*span))
  const u128 num = 2 * scaled + span;
  const u128 den = 2 * span;
  return offset + static_cast<std::size_t>((num + den - 1) / den);
}

// Maps a node-count sum to [0, 1]: logarithmic by default, linear on request.
inline double color_value(std::uint64_t size_sum, std::uint64_t v_min, std::uint64_t v_max,
                          ColorScale scale = ColorScale::log) {
  if (v_min >= v_max) return 1.0;
  double v;
  if (scale == ColorScale::log) {
    v = (std::log(static_cast<double>(size_sum)) - std::log(static_cast<double>(v_min))) /
        (std::log(static_cast<double>(v_max)) - std::log(static_cast<double>(v_min)));
  } else {
    v = (static_cast<double>(size_sum) - static_cast<double>(v_min)) /
        (static_cast<double>(v_max) - static_cast<double>(v_min));
  }
  return std::clamp(v, 0.0, 1.0);
}

struct RasterGrid {
  static constexpr double kBackground = -1.0;

  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint64_t> size_sum;  // 0 where nothing was drawn
  std::vector<double> value;            // kBackground where nothing was drawn

  RasterGrid() = default;
  RasterGrid(std::size_t w, std::size_t h) : width(w), height(h), size_sum(w * h, 0), value(w * h, kBackground) {}

  std::size_t index(std::size_t x, std::size_t y) const { return y * width + x; }
  bool touched(std::size_t x, std::size_t y) const { return size_sum[index(x, y)] != 0; }
  double at(std::size_t x, std::size_t y) const { return value[index(x, y)]; }

  std::size_t touched_count() const {
    return static_cast<std::size_t>(std::count_if(size_sum.begin(), size_sum.end(), [](auto s) { return s != 0; }));
  }

  friend bool operator==(const RasterGrid&, const RasterGrid&) = default;
};

// Pixel (x, y), 0-based, of a cell: x from the column position, y from the
// row position, each projected inside its segment's extent.
inline std::pair<std::size_t, std::size_t> cell_pixel(const Cell& cell, const LayoutPlan& plan) {
  const SegmentPlan& rs = plan.segment_at(cell.row);
  const SegmentPlan& cs = plan.segment_at(cell.col);
  const std::size_t x =
      project(cell.col, cs.matrix_offset, cs.matrix_offset + cs.count - 1, cs.px_x, cs.px_x_offset) - 1;
  const std::size_t y =
      project(cell.row, rs.matrix_offset, rs.matrix_offset + rs.count - 1, rs.px_y, rs.px_y_offset) - 1;
  return {x, y};
}

// Colliding cells resolve to the largest size_sum, which is what painting in
// ascending size_sum order shows, but independent of input order.
inline RasterGrid rasterize_cells(std::span<const Cell> cells, const LayoutPlan& plan) {
  RasterGrid grid(plan.canvas_w, plan.canvas_h);
  for (const Cell& cell : cells) {
    const auto [x, y] = cell_pixel(cell, plan);
    const std::size_t k = grid.index(x, y);
    if (cell.size_sum > grid.size_sum[k]) {
      grid.size_sum[k] = cell.size_sum;
      grid.value[k] = color_value(cell.size_sum, plan.v_min, plan.v_max, plan.scale);
    }
  }
  return grid;
}

}  // namespace structmatrix
