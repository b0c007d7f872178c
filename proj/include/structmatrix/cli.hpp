#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "structmatrix/condenser.hpp"
#include "structmatrix/exporter.hpp"
#include "structmatrix/graph.hpp"
#include "structmatrix/layout.hpp"
#include "structmatrix/renderer.hpp"
#include "structmatrix/shatter.hpp"
#include "structmatrix/synthetic.hpp"

namespace structmatrix::cli {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// ---------------------------------------------------------------------------
// Analysis cache

inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::uint64_t file_digest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GraphError("cannot open '" + path.string() + "'");
  std::uint64_t h = 1469598103934665603ULL;
  std::vector<char> buf(1 << 20);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    h = fnv1a(std::string_view(buf.data(), static_cast<std::size_t>(in.gcount())), h);
  }
  return h;
}

// Worker count is deliberately absent: it does not change results.
inline std::string config_key(const ShatterConfig& cfg) {
  return "hub=" + cfg.hub_fraction.str() + ";eps=" + cfg.epsilon.str() +
         ";min=" + std::to_string(cfg.min_structure_size) + ";chain=" + std::string(to_string(cfg.chain_mode));
}

inline fs::path cache_dir() {
  if (const char* dir = std::getenv("STRUCTMATRIX_CACHE_DIR"); dir && *dir) return dir;
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) return fs::path(xdg) / "structmatrix";
  if (const char* home = std::getenv("HOME"); home && *home) return fs::path(home) / ".cache" / "structmatrix";
  return fs::temp_directory_path() / "structmatrix";
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

inline fs::path cache_path(std::uint64_t digest, const ShatterConfig& cfg) {
  return cache_dir() / (hex64(fnv1a(config_key(cfg), digest)) + ".json");
}

struct CachedShatter {
  std::vector<RawStructure> structures;
  std::vector<NodeId> unclassified;
};

inline void store_cache(const fs::path& path, std::uint64_t digest, const ShatterConfig& cfg, const Graph& g,
                        const Condensation& c) {
  nlohmann::json doc;
  doc["version"] = 1;
  doc["digest"] = hex64(digest);
  doc["config"] = config_key(cfg);
  doc["nodes"] = g.node_count();
  doc["edges"] = g.edge_count();
  auto& rows = doc["structures"] = nlohmann::json::array();
  for (const auto& s : c.instances) rows.push_back({std::string(to_string(s.stype)), s.members});
  doc["unclassified"] = c.unclassified_nodes;
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) return;  // an unwritable cache only costs recomputation
    out << doc.dump();
  }
  fs::rename(tmp, path, ec);
}

inline std::optional<CachedShatter> load_cache(const fs::path& path, std::uint64_t digest, const ShatterConfig& cfg,
                                                const Graph& g) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  try {
    const auto doc = nlohmann::json::parse(in);
    if (doc.at("version") != 1 || doc.at("digest") != hex64(digest) || doc.at("config") != config_key(cfg) ||
        doc.at("nodes") != g.node_count() || doc.at("edges") != g.edge_count()) {
      return std::nullopt;
    }
    CachedShatter cached;
    for (const auto& row : doc.at("structures")) {
      const auto t = parse_structure_type(row.at(0).get<std::string>());
      if (!t) return std::nullopt;
      cached.structures.push_back({*t, row.at(1).get<std::vector<NodeId>>()});
    }
    cached.unclassified = doc.at("unclassified").get<std::vector<NodeId>>();
    return cached;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

struct Analysis {
  Graph graph;
  LoadReport load;
  Condensation condensation;
  double shatter_seconds = 0.0;
  bool from_cache = false;
};

inline Analysis analyze_file(const fs::path& path, const ShatterConfig& cfg, bool use_cache) {
  Analysis a;
  a.graph = load_edge_list(path, {}, &a.load);
  const std::uint64_t digest = use_cache ? file_digest(path) : 0;
  const fs::path cpath = use_cache ? cache_path(digest, cfg) : fs::path{};
  if (use_cache) {
    if (auto cached = load_cache(cpath, digest, cfg, a.graph)) {
      try {
        a.condensation = assemble_condensation(a.graph, std::move(cached->structures), std::move(cached->unclassified),
                                               cfg.worker_count);
        if (a.condensation.unclassified_nodes.size() +
                std::accumulate(a.condensation.instances.begin(), a.condensation.instances.end(), std::size_t{0},
                                [](std::size_t s, const StructureInstance& i) { return s + i.n_nodes; }) ==
            a.graph.node_count()) {
          a.from_cache = true;
          return a;
        }
      } catch (const std::exception&) {
      }
    }
  }
  const auto start = Clock::now();
  a.condensation = shatter(a.graph, cfg);
  a.shatter_seconds = seconds_since(start);
  if (use_cache) store_cache(cpath, digest, cfg, a.graph, a.condensation);
  return a;
}

// ---------------------------------------------------------------------------
// Benchmark

struct BenchRow {
  std::size_t target = 0;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  double seconds = 0.0;  // median
  std::vector<double> samples;
};

struct BenchResult {
  NodeId seed = 0;
  std::vector<BenchRow> rows;
  double exponent = std::nan("");
};

inline double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<std::pair<double, double>>& points) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (const auto& [x, y] : points) {
    if (!(x > 0) || !(y > 0)) continue;
    const double lx = std::log(x);
    const double ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  const double denom = static_cast<double>(n) * sxx - sx * sx;
  if (n < 2 || denom <= 1e-12) return std::nan("");
  return (static_cast<double>(n) * sxy - sx * sy) / denom;
}

inline NodeId highest_degree_node(const Graph& g) {
  NodeId best = 0;
  for (NodeId v = 1; v < g.node_count(); ++v) {
    if (g.degree(v) > g.degree(best)) best = v;
  }
  return best;
}

inline BenchResult run_bench(const Graph& g, const std::vector<std::size_t>& targets, std::size_t reps,
                             const ShatterConfig& cfg, NodeId seed) {
  BenchResult result;
  result.seed = seed;
  std::vector<std::pair<double, double>> points;
  for (std::size_t target : targets) {
    const Graph sub = induced_subgraph(g, bfs_sample(g, seed, target));
    BenchRow row;
    row.target = target;
    row.nodes = sub.node_count();
    row.edges = sub.edge_count();
    for (std::size_t r = 0; r < std::max<std::size_t>(1, reps); ++r) {
      const auto start = Clock::now();
      const Condensation c = shatter(sub, cfg);
      row.samples.push_back(seconds_since(start));
      if (c.instances.size() == SIZE_MAX) std::abort();  // keeps the call observable
    }
    row.seconds = median(row.samples);
    points.emplace_back(static_cast<double>(row.edges), row.seconds);
    result.rows.push_back(std::move(row));
  }
  result.exponent = loglog_slope(points);
  return result;
}

// ---------------------------------------------------------------------------
// Command plumbing

struct ShatterFlags {
  std::string hub_fraction = "0.01";
  std::string epsilon = "0.2";
  std::size_t min_size = 5;
  std::string chain_mode = "strict_path";
  std::size_t workers = 0;

  ShatterConfig config() const {
    ShatterConfig c;
    c.hub_fraction = Ratio::parse(hub_fraction);
    c.epsilon = Ratio::parse(epsilon);
    c.min_structure_size = min_size;
    c.chain_mode = parse_chain_mode(chain_mode);
    c.worker_count = workers;
    c.validate();
    return c;
  }
};

inline void add_shatter_flags(CLI::App* cmd, ShatterFlags& f) {
  cmd->add_option("--hub-fraction", f.hub_fraction, "Share of each component removed as hubs per round")
      ->capture_default_str();
  cmd->add_option("--epsilon", f.epsilon, "Near-structure tolerance, in (0, 1)")->capture_default_str();
  cmd->add_option("--min-size", f.min_size, "Minimum structure size in nodes")->capture_default_str();
  cmd->add_option("--chain-mode", f.chain_mode, "strict_path or tree_literal")->capture_default_str();
  cmd->add_option("--workers", f.workers, "Shatter threads (0 = hardware concurrency)")->capture_default_str();
}

inline std::pair<std::size_t, std::size_t> parse_canvas(const std::string& s) {
  const auto x = s.find_first_of("xX");
  try {
    if (x == std::string::npos) throw std::invalid_argument(s);
    std::size_t used = 0;
    const auto w = std::stoull(s.substr(0, x), &used);
    if (used != x) throw std::invalid_argument(s);
    const auto h = std::stoull(s.substr(x + 1), &used);
    if (used != s.size() - x - 1 || w == 0 || h == 0) throw std::invalid_argument(s);
    return {w, h};
  } catch (const std::exception&) {
    throw std::invalid_argument("canvas must look like WIDTHxHEIGHT, got '" + s + "'");
  }
}

inline std::string type_summary(const Condensation& c) {
  const auto counts = c.type_counts();
  std::ostringstream s;
  for (StructureType t : kVocabulary) s << to_string(t) << '=' << counts[index_of(t)] << ' ';
  s << "unclassified=" << c.unclassified_nodes.size();
  return s.str();
}

inline ordered_json config_json(const ShatterConfig& cfg) {
  ordered_json j;
  j["hub_fraction"] = cfg.hub_fraction.str();
  j["epsilon"] = cfg.epsilon.str();
  j["min_size"] = cfg.min_structure_size;
  j["chain_mode"] = std::string(to_string(cfg.chain_mode));
  return j;
}

inline ordered_json counts_json(const Condensation& c) {
  ordered_json j;
  const auto counts = c.type_counts();
  for (StructureType t : kVocabulary) j[std::string(to_string(t))] = counts[index_of(t)];
  return j;
}

inline fs::path default_output(const fs::path& input, const std::string& suffix) {
  return fs::path(input.stem().string() + suffix);
}

inline void write_text(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  body(out);
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

struct StatsRow {
  StructureType stype;
  std::size_t count;
  double share;  // of all structures, in [0, 1]
};

inline std::vector<StatsRow> structure_shares(const std::vector<StructureRecord>& rows) {
  std::array<std::size_t, kVocabularySize> counts{};
  for (const auto& r : rows) ++counts[index_of(r.stype)];
  std::vector<StatsRow> out;
  for (StructureType t : kVocabulary) {
    const std::size_t n = counts[index_of(t)];
    out.push_back({t, n, rows.empty() ? 0.0 : static_cast<double>(n) / static_cast<double>(rows.size())});
  }
  return out;
}

inline std::string percent_label(std::size_t count, double share) {
  if (count == 0) return "-";
  const double pct = 100.0 * share;
  if (pct < 0.5) return "<1%";
  return std::to_string(static_cast<long long>(std::llround(pct))) + "%";
}

inline std::string group_thousands(std::size_t v) {
  std::string s = std::to_string(v);
  for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(s.size()) - 3; i > 0; i -= 3) s.insert(static_cast<std::size_t>(i), ",");
  return s;
}

// Entry point shared by the executable and the tests.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"StructMatrix: structure detection and structure-to-structure matrix plots for large graphs",
               "structmatrix"};
  app.require_subcommand(1);

  bool json = false;
  ShatterFlags flags;
  std::string graph_path;
  std::string out_path;
  bool no_cache = false;

  auto* analyze = app.add_subcommand("analyze", "Shatter a graph and write structure/inter-edge TSV files");
  analyze->add_option("graph", graph_path, "Edge-list file")->required();
  add_shatter_flags(analyze, flags);
  analyze->add_option("-o,--out", out_path, "Output prefix (default: input stem)");
  bool with_members = false;
  analyze->add_flag("--members", with_members, "Append member labels to the structures TSV");
  analyze->add_flag("--no-cache", no_cache, "Ignore and do not update the analysis cache");
  analyze->add_flag("--json", json, "Machine-readable summary");

  std::string structures_path;
  auto* stats = app.add_subcommand("stats", "Per-type structure counts and shares from a structures TSV");
  stats->add_option("structures", structures_path, "Structures TSV written by analyze")->required();
  stats->add_flag("--json", json, "Machine-readable summary");

  std::string canvas = "1000x1000";
  std::string scale = "log";
  std::string format = "ppm";
  std::size_t min_segment_px = 1;
  bool no_separators = false;
  std::string dump_path;
  auto* render = app.add_subcommand("render", "Render the structure matrix to an image");
  render->add_option("graph", graph_path, "Edge-list file")->required();
  add_shatter_flags(render, flags);
  render->add_option("--canvas", canvas, "Raster size WIDTHxHEIGHT")->capture_default_str();
  render->add_option("--scale", scale, "Color scale: log or linear")->capture_default_str();
  render->add_option("--format", format, "ppm or png")->capture_default_str();
  render->add_option("--min-segment-px", min_segment_px, "Pixel floor per non-empty segment")->capture_default_str();
  render->add_flag("--no-separators", no_separators, "Do not insert separator lines between segments");
  render->add_option("--dump", dump_path, "Also write the touched pixels as JSON");
  render->add_option("-o,--out", out_path, "Image path (default: input stem + extension)");
  render->add_flag("--no-cache", no_cache, "Ignore and do not update the analysis cache");
  render->add_flag("--json", json, "Machine-readable summary");

  std::size_t member_limit = 100;
  auto* exporter = app.add_subcommand("export", "Write the JSON bundle consumed by the interactive viewer");
  exporter->add_option("graph", graph_path, "Edge-list file")->required();
  add_shatter_flags(exporter, flags);
  exporter->add_option("--canvas", canvas, "Planned canvas WIDTHxHEIGHT")->capture_default_str();
  exporter->add_option("--scale", scale, "Color scale: log or linear")->capture_default_str();
  exporter->add_option("--min-segment-px", min_segment_px, "Pixel floor per non-empty segment")->capture_default_str();
  exporter->add_option("--member-limit", member_limit, "Export member lists below this size")->capture_default_str();
  exporter->add_option("-o,--out", out_path, "Bundle path (default: input stem + .bundle.json)");
  exporter->add_flag("--no-cache", no_cache, "Ignore and do not update the analysis cache");
  exporter->add_flag("--json", json, "Machine-readable summary");

  std::vector<std::size_t> targets{50'000, 100'000, 250'000, 500'000, 1'000'000};
  std::size_t reps = 3;
  long long seed_node = -1;
  double max_exponent = 1.3;
  auto* bench = app.add_subcommand("bench", "Time shattering on BFS-induced subgraphs of growing size");
  bench->add_option("graph", graph_path, "Edge-list file")->required();
  add_shatter_flags(bench, flags);
  bench->add_option("--targets", targets, "Edge targets")->delimiter(',')->capture_default_str();
  bench->add_option("--reps", reps, "Repetitions per target (median reported)")->capture_default_str();
  bench->add_option("--seed-node", seed_node, "BFS seed (internal id; default: highest-degree node)");
  bench->add_option("--max-exponent", max_exponent, "PASS threshold for the log-log slope")->capture_default_str();
  bench->add_flag("--json", json, "Machine-readable summary");

  std::string model = "collab";
  std::size_t gen_nodes = 100'000;
  std::size_t gen_size = 200'000;
  std::uint64_t gen_seed = 1;
  double gamma = 2.1;
  std::size_t window = 0;
  auto* generate = app.add_subcommand("generate", "Write a synthetic edge list (collab or chung-lu)");
  generate->add_option("--model", model, "collab or chung-lu")->capture_default_str();
  generate->add_option("--nodes", gen_nodes, "Node count")->capture_default_str();
  generate->add_option("--size", gen_size, "Teams (collab) or edge draws (chung-lu)")->capture_default_str();
  generate->add_option("--gamma", gamma, "Power-law exponent (chung-lu)")->capture_default_str();
  generate->add_option("--window", window, "Locality window for collab (0 = none)")->capture_default_str();
  generate->add_option("--seed", gen_seed, "Random seed")->capture_default_str();
  generate->add_option("-o,--out", out_path, "Output path")->required();
  generate->add_flag("--json", json, "Machine-readable summary");

  std::size_t golden_count = 1000;
  auto* golden = app.add_subcommand("golden", "Write projection golden vectors for client parity tests");
  golden->add_option("--count", golden_count, "Number of vectors")->capture_default_str();
  golden->add_option("--seed", gen_seed, "Random seed")->capture_default_str();
  golden->add_option("-o,--out", out_path, "Output path")->required();

  std::vector<std::string> argv_copy(args.rbegin(), args.rend());
  try {
    app.parse(argv_copy);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (stats->parsed()) {
      std::ifstream in(structures_path, std::ios::binary);
      if (!in) throw std::runtime_error("cannot open '" + structures_path + "'");
      const auto rows = read_structures_tsv(in);
      const auto shares = structure_shares(rows);
      if (json) {
        ordered_json j;
        j["total"] = rows.size();
        for (const auto& s : shares) j["types"][std::string(to_string(s.stype))] = {{"count", s.count}, {"share", s.share}};
        out << j.dump() << '\n';
      } else {
        out << std::left << std::setw(6) << "type" << std::right << std::setw(12) << "count" << std::setw(8) << "share"
            << '\n';
        for (const auto& s : shares) {
          out << std::left << std::setw(6) << to_string(s.stype) << std::right << std::setw(12)
              << group_thousands(s.count) << std::setw(8) << percent_label(s.count, s.share) << '\n';
        }
        out << std::left << std::setw(6) << "total" << std::right << std::setw(12) << group_thousands(rows.size())
            << '\n';
      }
      return 0;
    }

    if (generate->parsed()) {
      Graph g = model == "collab"     ? synthetic::collaboration(gen_nodes, gen_size, gen_seed, window)
                : model == "chung-lu" ? synthetic::chung_lu(gen_nodes, gen_size, gamma, gen_seed)
                                      : throw std::invalid_argument("unknown model '" + model + "'");
      write_text(out_path, [&](std::ostream& o) {
        o << "# synthetic " << model << " graph, seed " << gen_seed << '\n';
        write_edge_list(g, o);
      });
      if (json) {
        out << ordered_json{{"path", out_path}, {"nodes", g.node_count()}, {"edges", g.edge_count()}}.dump() << '\n';
      } else {
        out << "wrote " << out_path << ": " << g.node_count() << " nodes, " << g.edge_count() << " edges\n";
      }
      return 0;
    }

    if (golden->parsed()) {
      write_json(projection_golden(golden_count, gen_seed), out_path);
      out << "wrote " << golden_count << " projection vectors to " << out_path << '\n';
      return 0;
    }

    const ShatterConfig cfg = flags.config();

    if (bench->parsed()) {
      LoadReport report;
      const Graph g = load_edge_list(graph_path, {}, &report);
      if (seed_node >= static_cast<long long>(g.node_count())) throw std::out_of_range("seed node out of range");
      const NodeId seed = seed_node >= 0 ? static_cast<NodeId>(seed_node) : highest_degree_node(g);
      const auto start = Clock::now();
      const BenchResult r = run_bench(g, targets, reps, cfg, seed);
      const double total = seconds_since(start);
      const bool pass = std::isfinite(r.exponent) && r.exponent <= max_exponent;
      if (json) {
        ordered_json j;
        j["graph"] = graph_path;
        j["seed_node"] = g.label(seed);
        j["rows"] = ordered_json::array();
        for (const auto& row : r.rows) {
          j["rows"].push_back({{"target", row.target}, {"nodes", row.nodes}, {"edges", row.edges},
                               {"seconds", row.seconds}, {"samples", row.samples}});
        }
        j["exponent"] = std::isfinite(r.exponent) ? ordered_json(r.exponent) : ordered_json(nullptr);
        j["max_exponent"] = max_exponent;
        j["pass"] = pass;
        j["total_seconds"] = total;
        out << j.dump() << '\n';
      } else {
        out << "seed node " << g.label(seed) << ", " << reps << " repetitions (median)\n";
        out << std::setw(10) << "target" << std::setw(12) << "nodes" << std::setw(12) << "edges" << std::setw(12)
            << "seconds" << '\n';
        for (const auto& row : r.rows) {
          out << std::setw(10) << row.target << std::setw(12) << row.nodes << std::setw(12) << row.edges
              << std::setw(12) << std::fixed << std::setprecision(4) << row.seconds << '\n';
        }
        out << std::defaultfloat << "fitted exponent " << std::setprecision(4) << r.exponent << " (threshold "
            << max_exponent << "): " << (pass ? "PASS" : "FAIL") << '\n';
        out << "total " << std::setprecision(4) << total << " s\n";
      }
      return 0;
    }

    const auto start = Clock::now();
    Analysis a = analyze_file(graph_path, cfg, !no_cache);
    const double analysis_seconds = seconds_since(start);
    const Condensation& c = a.condensation;

    if (analyze->parsed()) {
      const std::string prefix = out_path.empty() ? fs::path(graph_path).stem().string() : out_path;
      const fs::path spath = prefix + ".structures.tsv";
      const fs::path epath = prefix + ".inter_edges.tsv";
      write_text(spath, [&](std::ostream& o) { write_structures_tsv(c, o, with_members ? &a.graph : nullptr); });
      write_text(epath, [&](std::ostream& o) { write_inter_edges_tsv(c, o); });
      if (json) {
        ordered_json j;
        j["graph"] = graph_path;
        j["nodes"] = a.graph.node_count();
        j["edges"] = a.graph.edge_count();
        j["self_loops_dropped"] = a.load.self_loops;
        j["duplicate_edges"] = a.load.duplicate_edges;
        j["config"] = config_json(cfg);
        j["structures"] = c.instances.size();
        j["counts"] = counts_json(c);
        j["unclassified_nodes"] = c.unclassified_nodes.size();
        j["unclassified_edges"] = c.unclassified_edges;
        j["inter_edge_pairs"] = c.inter_edges.size();
        j["cached"] = a.from_cache;
        j["seconds"] = analysis_seconds;
        j["structures_tsv"] = spath.string();
        j["inter_edges_tsv"] = epath.string();
        out << j.dump() << '\n';
      } else {
        if (a.load.self_loops) err << "warning: dropped " << a.load.self_loops << " self-loops\n";
        out << graph_path << ": " << a.graph.node_count() << " nodes, " << a.graph.edge_count() << " edges; "
            << c.instances.size() << " structures: " << type_summary(c) << "; " << std::fixed << std::setprecision(3)
            << analysis_seconds << " s" << (a.from_cache ? " (cached)" : "") << '\n';
      }
      return 0;
    }

    const auto [w, h] = parse_canvas(canvas);
    const SegmentOrder order = order_segments(c);
    const LayoutPlan plan = plan_layout(c, order, w, h, min_segment_px, parse_color_scale(scale));

    if (render->parsed()) {
      const ImageFormat fmt = parse_image_format(format);
      const fs::path ipath = out_path.empty() ? default_output(graph_path, fmt == ImageFormat::png ? ".png" : ".ppm")
                                              : fs::path(out_path);
      const auto cells = build_cells(c, order);
      const RasterGrid grid = rasterize_cells(cells, plan);
      write_image(grid, ColorRamp::blue_red(), plan, ipath, fmt, !no_separators);
      if (!dump_path.empty()) write_json(pixel_dump(grid), dump_path);
      if (json) {
        ordered_json j;
        j["image"] = ipath.string();
        j["canvas"] = {w, h};
        j["scale"] = scale;
        j["cells"] = cells.size();
        j["touched_pixels"] = grid.touched_count();
        j["color_domain"] = {plan.v_min, plan.v_max};
        j["cached"] = a.from_cache;
        out << j.dump() << '\n';
      } else {
        out << "wrote " << ipath.string() << " (" << w << "x" << h << ", " << scale << " scale, "
            << grid.touched_count() << " touched pixels)\n";
      }
      return 0;
    }

    if (exporter->parsed()) {
      const fs::path bpath = out_path.empty() ? default_output(graph_path, ".bundle.json") : fs::path(out_path);
      BundleOptions options;
      options.name = fs::path(graph_path).filename().string();
      options.member_limit = member_limit;
      options.config = config_json(cfg);
      options.graph = &a.graph;
      export_bundle(c, order, plan, bpath, options);
      if (json) {
        out << ordered_json{{"bundle", bpath.string()},
                            {"instances", c.instances.size()},
                            {"cells", c.inter_edges.size()},
                            {"cached", a.from_cache}}
                   .dump()
            << '\n';
      } else {
        out << "wrote " << bpath.string() << " (" << c.instances.size() << " instances, " << c.inter_edges.size()
            << " cells)\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

inline int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args);
}

}  // namespace structmatrix::cli
