// Acceptance runner: one PASS/FAIL/SKIP line per criterion.
//
//   structmatrix_acceptance                  run every criterion
//   structmatrix_acceptance --criterion X    run one; exit 0 pass, 1 fail, 77 skip
//   structmatrix_acceptance --list
//
// Real-world graphs are read from $STRUCTMATRIX_DATA_DIR (default: the data/
// directory configured at build time).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "structmatrix/cli.hpp"
#include "support/builders.hpp"
#include "support/oracles.hpp"

#ifndef STRUCTMATRIX_DEFAULT_DATA_DIR
#define STRUCTMATRIX_DEFAULT_DATA_DIR "data"
#endif

using namespace structmatrix;
namespace fs = std::filesystem;
using testkit::Rng;

namespace {

// Tolerances and budgets.
constexpr std::size_t kOracleCasesPerType = 1000;
constexpr double kOracleBudgetSeconds = 10.0;
constexpr double kShareTolerance = 0.10;
constexpr double kSharesBudgetSeconds = 30.0;
constexpr std::size_t kProjectionTuples = 10'000;
constexpr std::size_t kRasterCondensations = 100;
constexpr double kMaxScalingExponent = 1.3;
constexpr double kBenchBudgetSeconds = 600.0;
const std::vector<std::size_t> kBenchTargets{50'000, 100'000, 250'000, 500'000, 1'000'000};
constexpr std::size_t kBenchReps = 3;

enum class Status { pass, fail, skip };

struct Outcome {
  Status status;
  std::string detail;
};

Outcome pass(std::string d) { return {Status::pass, std::move(d)}; }
Outcome fail(std::string d) { return {Status::fail, std::move(d)}; }
Outcome skip(std::string d) { return {Status::skip, std::move(d)}; }

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fixed(double v, int digits = 2) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

fs::path data_dir() {
  if (const char* d = std::getenv("STRUCTMATRIX_DATA_DIR"); d && *d) return d;
  return STRUCTMATRIX_DEFAULT_DATA_DIR;
}

std::optional<fs::path> wiki_vote() {
  for (const char* name : {"wiki-Vote.txt", "Wiki-Vote.txt"}) {
    const fs::path p = data_dir() / name;
    if (fs::is_regular_file(p)) return p;
  }
  return std::nullopt;
}

std::vector<fs::path> corpus_files() {
  std::vector<fs::path> out;
  std::error_code ec;
  if (!fs::is_directory(data_dir(), ec)) return out;
  for (const auto& e : fs::directory_iterator(data_dir())) {
    if (e.is_regular_file() && e.path().extension() == ".txt") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

ShatterConfig defaults(std::size_t workers = 0) {
  ShatterConfig cfg;
  cfg.worker_count = workers;
  return cfg;
}

// ---------------------------------------------------------------- oracle ---

bool connected(const Graph& g) {
  if (g.node_count() == 0) return true;
  std::vector<char> seen(g.node_count(), 0);
  std::vector<NodeId> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    for (NodeId w : g.neighbors(v)) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == g.node_count();
}

// Drops `k` random edges from `edges`, retrying until the result stays
// connected.
Graph drop_edges(std::size_t n, std::vector<Edge> edges, std::size_t k, Rng& rng) {
  for (;;) {
    std::shuffle(edges.begin(), edges.end(), rng);
    std::vector<Edge> kept(edges.begin() + static_cast<std::ptrdiff_t>(k), edges.end());
    Graph g = testkit::make_graph(n, kept);
    if (connected(g)) return g;
  }
}

// Missing-edge count for a near structure over `total` slots: strictly below
// the tolerance, or exactly on it when the boundary is reachable.
std::size_t near_missing(std::size_t total, bool boundary, Rng& rng) {
  if (boundary && total % 5 == 0) return total / 5;
  const std::size_t most = (total - 1) / 5;
  return std::uniform_int_distribution<std::size_t>(std::min<std::size_t>(1, most), most)(rng);
}

Graph candidate(StructureType t, std::size_t n, bool boundary, Rng& rng) {
  switch (t) {
    case StructureType::fc:
      return testkit::complete(n);
    case StructureType::nc:
      return drop_edges(n, testkit::complete_edges(n), near_missing(n * (n - 1) / 2, boundary, rng), rng);
    case StructureType::fb:
    case StructureType::nb: {
      const std::size_t a = std::uniform_int_distribution<std::size_t>(2, n - 2)(rng);
      const std::size_t b = n - a;
      if (t == StructureType::fb) return testkit::complete_bipartite(a, b);
      return drop_edges(n, testkit::complete_bipartite_edges(a, b), near_missing(a * b, boundary, rng), rng);
    }
    case StructureType::st:
      return testkit::star(n - 1);
    case StructureType::ch:
      // Paths, plus random trees that only the literal chain reading accepts.
      return boundary ? testkit::tree_from_parents(testkit::random_parents(n, rng)) : testkit::path(n);
    default:
      throw std::logic_error("no generator for this type");
  }
}

// Places the candidate inside a larger graph with noise nodes attached to it
// and returns the relabeled graph and the candidate's member ids.
std::pair<Graph, std::vector<NodeId>> embed(const Graph& block, bool noisy, Rng& rng) {
  testkit::Composer k;
  k.add(block);
  const std::size_t n = block.node_count();
  if (noisy) {
    const std::size_t extra = std::uniform_int_distribution<std::size_t>(1, n)(rng);
    const auto base = static_cast<NodeId>(n);
    k.nodes += extra;
    std::uniform_int_distribution<NodeId> inner(0, static_cast<NodeId>(n - 1));
    std::uniform_int_distribution<NodeId> outer(base, static_cast<NodeId>(n + extra - 1));
    for (std::size_t e = 0; e < 3 * extra; ++e) k.link(outer(rng), e % 2 ? inner(rng) : outer(rng));
  }
  auto [g, perm] = testkit::shuffled(k.build(), rng);
  std::vector<NodeId> members(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n));
  std::sort(members.begin(), members.end());
  return {std::move(g), std::move(members)};
}

Outcome classify_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(20'231);
  const Ratio eps(1, 5);
  std::size_t cases = 0;
  std::size_t agree = 0;
  std::size_t boundary_cases = 0;
  std::map<std::string, std::size_t> labels;
  std::string first_mismatch;

  const std::array<StructureType, 6> types{StructureType::fc, StructureType::nc, StructureType::fb,
                                           StructureType::nb, StructureType::st, StructureType::ch};
  for (StructureType t : types) {
    for (std::size_t i = 0; i < kOracleCasesPerType; ++i) {
      const std::size_t n = std::uniform_int_distribution<std::size_t>(5, 50)(rng);
      const bool boundary = i % 4 == 1;
      const bool noisy = i % 4 >= 2;
      const auto [g, members] = embed(candidate(t, n, boundary, rng), noisy, rng);
      for (ChainMode mode : {ChainMode::strict_path, ChainMode::tree_literal}) {
        const StructureType want = testkit::oracle_classify(g, members, eps, mode);
        const StructureType got = classify(g, NodeSubset::from_sorted(members), eps, mode);
        ++cases;
        boundary_cases += boundary && (t == StructureType::nc || t == StructureType::nb);
        ++labels[std::string(to_string(want))];
        if (got == want) {
          ++agree;
        } else if (first_mismatch.empty()) {
          first_mismatch = "; first mismatch: generated " + std::string(to_string(t)) + " n=" + std::to_string(n) +
                           " oracle=" + std::string(to_string(want)) + " classify=" + std::string(to_string(got));
        }
      }
    }
  }

  // False stars: one hub, satellites possibly tied to other nodes.
  for (std::size_t i = 0; i < kOracleCasesPerType; ++i) {
    const std::size_t sat = std::uniform_int_distribution<std::size_t>(4, 49)(rng);
    const std::size_t extra = std::uniform_int_distribution<std::size_t>(0, 10)(rng);
    const std::size_t n = 1 + sat + extra;
    testkit::Composer k;
    k.add(testkit::star(sat));
    k.nodes = n;
    std::uniform_int_distribution<NodeId> satellite(1, static_cast<NodeId>(sat));
    for (std::size_t e = 0; e < extra; ++e) k.link(static_cast<NodeId>(1 + sat + e), satellite(rng));
    const std::size_t ties = i % 3 == 0 ? 0 : std::uniform_int_distribution<std::size_t>(0, sat)(rng);
    for (std::size_t e = 0; e < ties; ++e) k.link(satellite(rng), satellite(rng));
    const Graph g = k.build();
    const testkit::DenseView d(g, [&] {
      std::vector<NodeId> all(n);
      std::iota(all.begin(), all.end(), 0);
      return all;
    }());
    std::size_t neighbors = 0;
    std::vector<NodeId> lonely{0};
    for (std::size_t v = 1; v < n; ++v) {
      if (!d.adj[0][v]) continue;
      ++neighbors;
      bool only_hub = true;
      for (std::size_t w = 1; w < n; ++w) only_hub &= !d.adj[v][w];
      if (only_hub) lonely.push_back(static_cast<NodeId>(v));
    }
    std::optional<RawStructure> want;
    if (lonely.size() >= 5) want = RawStructure{lonely.size() == neighbors + 1 ? StructureType::st : StructureType::fs, lonely};
    const std::vector<NodeId> hubs{0};
    const auto got = extract_hub_stars(g, NodeSubset::all(g), hubs, defaults());
    const bool ok = want ? got.stars.size() == 1 && got.stars[0].stype == want->stype &&
                               got.stars[0].members == want->members
                         : got.stars.empty() && got.unclassified == hubs;
    ++cases;
    ++labels[want ? std::string(to_string(want->stype)) : "hub-unclassified"];
    if (ok) {
      ++agree;
    } else if (first_mismatch.empty()) {
      first_mismatch = "; first mismatch: hub star with " + std::to_string(sat) + " satellites";
    }
  }

  const double secs = since(t0);
  std::string mix;
  for (const auto& [name, count] : labels) mix += (mix.empty() ? "" : " ") + name + "=" + std::to_string(count);
  const std::string detail = std::to_string(agree) + "/" + std::to_string(cases) + " agree (" +
                             std::to_string(boundary_cases) + " boundary variants; oracle labels " + mix + ") in " +
                             fixed(secs) + " s (limit " + fixed(kOracleBudgetSeconds, 0) + " s)" + first_mismatch;
  return agree == cases && secs < kOracleBudgetSeconds ? pass(detail) : fail(detail);
}

// ---------------------------------------------------------- conservation ---

struct Conservation {
  std::uint64_t internal = 0;
  std::uint64_t cross = 0;
  std::uint64_t unclassified = 0;
  std::uint64_t edges = 0;
  bool holds() const { return internal + cross + unclassified == edges; }
};

Conservation conservation(const Graph& g) {
  const auto c = shatter(g, defaults());
  Conservation r;
  for (const auto& s : c.instances) r.internal += s.internal_edges;
  for (const auto& e : c.inter_edges) r.cross += e.d;
  r.unclassified = c.unclassified_edges;
  r.edges = g.edge_count();
  return r;
}

std::string describe(const std::string& name, const Conservation& r) {
  return name + ": " + std::to_string(r.internal) + "+" + std::to_string(r.cross) + "+" +
         std::to_string(r.unclassified) + (r.holds() ? "=" : "!=") + std::to_string(r.edges);
}

Outcome edge_conservation() {
  std::vector<std::pair<std::string, Graph>> corpus;
  Rng rng(509);
  corpus.emplace_back("chung-lu-50k", synthetic::chung_lu(50'000, 200'000, 2.1, 1));
  corpus.emplace_back("chung-lu-7k", synthetic::chung_lu(7'115, 103'689, 2.0, 2));
  corpus.emplace_back("collab-20k", synthetic::collaboration(20'000, 30'000, 3));
  corpus.emplace_back("collab-local-40k", synthetic::collaboration(40'000, 50'000, 4, 100));
  corpus.emplace_back("sparse-random-10k", testkit::sparse_random(10'000, 30'000, rng));
  for (const auto& p : corpus_files()) corpus.emplace_back(p.filename().string(), load_edge_list(p));
  bool ok = true;
  std::string detail;
  for (const auto& [name, g] : corpus) {
    const auto r = conservation(g);
    ok &= r.holds();
    detail += (detail.empty() ? "" : "; ") + describe(name, r);
  }
  return ok ? pass(detail) : fail(detail);
}

Outcome edge_conservation_wikivote() {
  const auto path = wiki_vote();
  if (!path) return skip("wiki-Vote.txt not found in " + data_dir().string());
  const auto r = conservation(load_edge_list(*path));
  return r.holds() ? pass(describe("wiki-Vote", r)) : fail(describe("wiki-Vote", r));
}

// --------------------------------------------------------------- shares ---

Outcome structure_shares_wikivote() {
  const auto path = wiki_vote();
  if (!path) return skip("wiki-Vote.txt not found in " + data_dir().string());
  const auto t0 = std::chrono::steady_clock::now();
  const Graph g = load_edge_list(*path);
  const auto c = shatter(g, defaults());
  std::stringstream tsv;
  write_structures_tsv(c, tsv, &g);
  const auto rows = cli::structure_shares(read_structures_tsv(tsv));
  const double secs = since(t0);
  const std::map<StructureType, double> target{{StructureType::fs, 0.65}, {StructureType::st, 0.33},
                                               {StructureType::ch, 0.02}};
  bool ok = secs < kSharesBudgetSeconds;
  std::string detail = std::to_string(c.instances.size()) + " structures;";
  for (const auto& row : rows) {
    detail += " " + std::string(to_string(row.stype)) + "=" + std::to_string(row.count) + " (" +
              fixed(100 * row.share, 1) + "%)";
    if (auto it = target.find(row.stype); it != target.end()) {
      ok &= std::abs(row.share - it->second) <= kShareTolerance;
    }
  }
  detail += "; target 65/33/2 +-" + fixed(100 * kShareTolerance, 0) + "pp; " + fixed(secs) + " s (limit " +
            fixed(kSharesBudgetSeconds, 0) + " s)";
  return ok ? pass(detail) : fail(detail);
}

// ----------------------------------------------------------- projection ---

// Independent evaluation of offset + ceil((res-1)(x-x_min)/span + 1/2): split
// the quotient into q + r/span; the fractional part plus one half rounds up
// to 1 when 2r <= span and to 2 otherwise.
std::size_t reference_projection(std::size_t x, std::size_t x_min, std::size_t x_max, std::size_t res,
                                 std::size_t offset) {
  if (x_min == x_max) return offset + 1;
  const u128 span = x_max - x_min;
  const u128 scaled = static_cast<u128>(res - 1) * (x - x_min);
  const u128 q = scaled / span;
  const u128 r = scaled % span;
  return offset + static_cast<std::size_t>(q) + (2 * r <= span ? 1 : 2);
}

Outcome projection_contract() {
  Rng rng(1009);
  std::size_t violations = 0;
  std::size_t checks = 0;
  std::string first;
  auto note = [&](bool ok, const std::string& what) {
    ++checks;
    if (!ok && violations++ == 0) first = "; first violation: " + what;
  };
  for (std::size_t t = 0; t < kProjectionTuples; ++t) {
    // Mix small and huge magnitudes.
    const std::size_t scale = t % 3 == 0 ? 20 : t % 3 == 1 ? 100'000 : 1'000'000'000'000ULL;
    const std::size_t x_min = std::uniform_int_distribution<std::size_t>(0, scale)(rng);
    const std::size_t x_max = x_min + std::uniform_int_distribution<std::size_t>(t % 50 == 0 ? 0 : 1, scale)(rng);
    const std::size_t res = std::uniform_int_distribution<std::size_t>(1, t % 2 ? 16 : 5000)(rng);
    const std::size_t offset = std::uniform_int_distribution<std::size_t>(0, 10'000)(rng);
    const std::string tuple = "(" + std::to_string(x_min) + "," + std::to_string(x_max) + "," + std::to_string(res) +
                              "," + std::to_string(offset) + ")";

    note(project(x_min, x_min, x_max, res, offset) == offset + 1, "x_min maps to offset+1 " + tuple);
    if (x_max > x_min) note(project(x_max, x_min, x_max, res, offset) == offset + res, "x_max maps to offset+res " + tuple);

    std::vector<std::size_t> xs{x_min, x_max};
    std::uniform_int_distribution<std::size_t> inside(x_min, x_max);
    for (int s = 0; s < 30; ++s) xs.push_back(inside(rng));
    std::sort(xs.begin(), xs.end());
    std::size_t prev = 0;
    for (std::size_t x : xs) {
      const std::size_t p = project(x, x_min, x_max, res, offset);
      note(p >= offset + 1 && p <= offset + res, "range " + tuple + " x=" + std::to_string(x));
      note(p >= prev, "monotone " + tuple + " x=" + std::to_string(x));
      note(p == reference_projection(x, x_min, x_max, res, offset), "exact value " + tuple + " x=" + std::to_string(x));
      prev = p;
    }
  }
  const std::string detail = std::to_string(kProjectionTuples) + " tuples, " + std::to_string(checks) + " checks, " +
                             std::to_string(violations) + " violations" + first;
  return violations == 0 ? pass(detail) : fail(detail);
}

// --------------------------------------------------------------- raster ---

Outcome raster_symmetry() {
  Rng rng(2003);
  std::size_t asymmetric = 0;
  std::size_t order_dependent = 0;
  std::size_t collisions = 0;
  for (std::size_t trial = 0; trial < kRasterCondensations; ++trial) {
    const auto c = testkit::random_condensation(rng, 2000);
    const auto order = order_segments(c);
    const std::size_t side = std::uniform_int_distribution<std::size_t>(20, 600)(rng);
    const auto plan = plan_layout(c, order, side, side);
    auto cells = build_cells(c, order);
    const auto grid = rasterize_cells(cells, plan);
    for (std::size_t y = 0; y < side; ++y) {
      for (std::size_t x = 0; x < side; ++x) {
        asymmetric += grid.size_sum[grid.index(x, y)] != grid.size_sum[grid.index(y, x)] ||
                      grid.at(x, y) != grid.at(y, x);
      }
    }
    collisions += cells.size() - grid.touched_count();
    for (int shuffle = 0; shuffle < 3; ++shuffle) {
      std::shuffle(cells.begin(), cells.end(), rng);
      order_dependent += !(rasterize_cells(cells, plan) == grid);
    }
  }
  const std::string detail = std::to_string(kRasterCondensations) + " condensations; " + std::to_string(asymmetric) +
                             " asymmetric pixels; " + std::to_string(order_dependent) +
                             " order-dependent rasters; " + std::to_string(collisions) + " colliding cells exercised";
  return asymmetric == 0 && order_dependent == 0 && collisions > 0 ? pass(detail) : fail(detail);
}

// ---------------------------------------------------------- determinism ---

std::pair<std::string, std::string> tsv_pair(const Graph& g, std::size_t workers) {
  const auto c = shatter(g, defaults(workers));
  std::ostringstream s;
  std::ostringstream e;
  write_structures_tsv(c, s, &g);
  write_inter_edges_tsv(c, e);
  return {s.str(), e.str()};
}

Outcome same_tsvs(const std::string& name, const Graph& g) {
  const auto base = tsv_pair(g, 1);
  std::string detail = name + " (" + std::to_string(g.edge_count()) + " edges): workers 1";
  bool ok = true;
  for (std::size_t w : {2u, 8u}) {
    const bool same = tsv_pair(g, w) == base;
    ok &= same;
    detail += same ? ", " + std::to_string(w) + " identical" : ", " + std::to_string(w) + " DIFFER";
  }
  detail += "; " + std::to_string(base.first.size()) + "+" + std::to_string(base.second.size()) + " bytes";
  return ok ? pass(detail) : fail(detail);
}

Outcome determinism() {
  Outcome a = same_tsvs("chung-lu-200k", synthetic::chung_lu(200'000, 800'000, 2.1, 41));
  Outcome b = same_tsvs("collab-local-100k", synthetic::collaboration(100'000, 120'000, 43, 150));
  const bool ok = a.status == Status::pass && b.status == Status::pass;
  return {ok ? Status::pass : Status::fail, a.detail + "; " + b.detail};
}

Outcome determinism_wikivote() {
  const auto path = wiki_vote();
  if (!path) return skip("wiki-Vote.txt not found in " + data_dir().string());
  return same_tsvs("wiki-Vote", load_edge_list(*path));
}

// -------------------------------------------------------------- scaling ---

Outcome near_linear_scaling() {
  std::string source;
  Graph g;
  const auto files = corpus_files();
  const auto largest = std::max_element(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    return fs::file_size(a) < fs::file_size(b);
  });
  if (largest != files.end()) {
    g = load_edge_list(*largest);
    source = largest->filename().string();
  }
  if (g.edge_count() < kBenchTargets.back()) {
    g = synthetic::collaboration(400'000, 500'000, 7, 200);
    source = "generated collab-local-400k";
  }
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = cli::run_bench(g, kBenchTargets, kBenchReps, defaults(), cli::highest_degree_node(g));
  const double secs = since(t0);
  std::string detail = source + " (" + std::to_string(g.edge_count()) + " edges):";
  for (const auto& row : r.rows) detail += " " + std::to_string(row.edges) + "e/" + fixed(row.seconds, 3) + "s";
  detail += "; exponent " + fixed(r.exponent, 3) + " (limit " + fixed(kMaxScalingExponent, 1) + "); bench " +
            fixed(secs, 1) + " s (limit " + fixed(kBenchBudgetSeconds, 0) + " s)";
  const bool ok = std::isfinite(r.exponent) && r.exponent <= kMaxScalingExponent && secs < kBenchBudgetSeconds;
  return ok ? pass(detail) : fail(detail);
}

// ------------------------------------------------------------------ ppm ---

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

std::string render_in_process(const Graph& g, std::size_t workers) {
  const auto c = shatter(g, defaults(workers));
  const auto order = order_segments(c);
  const auto plan = plan_layout(c, order, 1000, 1000);
  const auto grid = rasterize_cells(build_cells(c, order), plan);
  std::ostringstream out;
  write_ppm(compose_image(grid, ColorRamp::blue_red(), plan), out);
  return out.str();
}

Outcome ppm_determinism() {
  const fs::path dir = fs::temp_directory_path() / ("structmatrix_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string old_cache = std::getenv("STRUCTMATRIX_CACHE_DIR") ? std::getenv("STRUCTMATRIX_CACHE_DIR") : "";
  ::setenv("STRUCTMATRIX_CACHE_DIR", (dir / "cache").c_str(), 1);

  const Graph g = synthetic::chung_lu(30'000, 120'000, 2.1, 53);
  const fs::path graph = dir / "graph.txt";
  {
    std::ofstream out(graph);
    write_edge_list(g, out);
  }
  // Compare against the reloaded graph so labels and ids match the CLI's.
  const Graph loaded = load_edge_list(graph);
  const std::string a = render_in_process(loaded, 1);
  const std::string b = render_in_process(loaded, 4);

  std::ostringstream sink;
  int rc = 0;
  rc |= cli::run({"render", graph.string(), "--no-cache", "-o", (dir / "first.ppm").string()}, sink, sink);
  rc |= cli::run({"render", graph.string(), "-o", (dir / "second.ppm").string()}, sink, sink);
  rc |= cli::run({"render", graph.string(), "-o", (dir / "cached.ppm").string(), "--workers", "2"}, sink, sink);
  const std::string first = slurp(dir / "first.ppm");
  const std::string second = slurp(dir / "second.ppm");
  const std::string cached = slurp(dir / "cached.ppm");

  fs::remove_all(dir);
  if (old_cache.empty()) {
    ::unsetenv("STRUCTMATRIX_CACHE_DIR");
  } else {
    ::setenv("STRUCTMATRIX_CACHE_DIR", old_cache.c_str(), 1);
  }

  const bool ok = rc == 0 && !a.empty() && a == b && first == second && second == cached && first == a;
  const std::string detail = std::to_string(a.size()) + "-byte PPM; in-process renders " +
                             (a == b ? "identical" : "DIFFER") + "; CLI renders " +
                             (first == second && second == cached ? "identical" : "DIFFER") +
                             " (fresh, cached); CLI vs in-process " + (first == a ? "identical" : "DIFFER") +
                             (rc == 0 ? "" : "; CLI failed: " + sink.str());
  return ok ? pass(detail) : fail(detail);
}

const std::vector<std::pair<std::string, std::function<Outcome()>>>& criteria() {
  static const std::vector<std::pair<std::string, std::function<Outcome()>>> all{
      {"classify_oracle", classify_oracle},
      {"edge_conservation", edge_conservation},
      {"edge_conservation_wikivote", edge_conservation_wikivote},
      {"structure_shares_wikivote", structure_shares_wikivote},
      {"projection_contract", projection_contract},
      {"raster_symmetry", raster_symmetry},
      {"determinism", determinism},
      {"determinism_wikivote", determinism_wikivote},
      {"near_linear_scaling", near_linear_scaling},
      {"ppm_determinism", ppm_determinism},
  };
  return all;
}

Status report(const std::string& name, const std::function<Outcome()>& fn) {
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = fail(std::string("exception: ") + e.what());
  }
  const char* tag = o.status == Status::pass ? "PASS" : o.status == Status::fail ? "FAIL" : "SKIP";
  std::cout << tag << " " << name << ": " << o.detail << std::endl;
  return o.status;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.size() == 1 && args[0] == "--list") {
    for (const auto& [name, fn] : criteria()) std::cout << name << "\n";
    return 0;
  }
  if (args.size() == 2 && args[0] == "--criterion") {
    for (const auto& [name, fn] : criteria()) {
      if (name != args[1]) continue;
      const Status s = report(name, fn);
      return s == Status::pass ? 0 : s == Status::skip ? 77 : 1;
    }
    std::cerr << "unknown criterion: " << args[1] << "\n";
    return 2;
  }
  if (!args.empty()) {
    std::cerr << "usage: structmatrix_acceptance [--list | --criterion NAME]\n";
    return 2;
  }
  bool failed = false;
  for (const auto& [name, fn] : criteria()) failed |= report(name, fn) == Status::fail;
  return failed ? 1 : 0;
}
