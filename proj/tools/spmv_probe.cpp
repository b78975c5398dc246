// spmv_probe: command-line front end.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 correctness failure.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "spmvprobe/bench.hpp"
#include "spmvprobe/error.hpp"
#include "spmvprobe/features.hpp"
#include "spmvprobe/generator.hpp"
#include "spmvprobe/matrix_io.hpp"
#include "spmvprobe/report.hpp"
#include "spmvprobe/results_csv.hpp"
#include "spmvprobe/validation.hpp"

using namespace spmvprobe;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitCorrectness = 3;

struct Globals {
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::string out;
  std::string formats = "csr,csr-balanced,coo,ell,hyb";
  std::string profile;
  std::size_t iterations = 128;
  std::size_t repeats = 5;
  double capacity_gb = 8.0;
};

std::string default_profile_path() {
  const char* env = std::getenv("SPMV_PROBE_PROFILE");
  return env != nullptr && *env != '\0' ? env : "spmv_probe_profile.txt";
}

BenchConfig bench_config(const Globals& g) {
  BenchConfig cfg;
  cfg.iterations = g.iterations;
  cfg.repeats = g.repeats;
  cfg.workers = g.workers;
  cfg.limits.capacity_bytes = static_cast<std::uint64_t>(g.capacity_gb * 1073741824.0);
  return cfg;
}

MachineProfile require_profile(const Globals& g) {
  const std::string path = g.profile.empty() ? default_profile_path() : g.profile;
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorKind::io_error,
                "machine profile " + path + " not found; run `spmv_probe profile` first or pass --profile");
  }
  return load_profile(path);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io_error, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorKind::io_error, "write failed for " + path);
}

json features_json(const FeatureVector& f) {
  return json{{"mem_footprint_mb", f.mem_footprint_mb}, {"avg_nz_row", f.avg_nz_row},
              {"std_nz_row", f.std_nz_row},             {"skew_coeff", f.skew_coeff},
              {"cross_row_sim", f.cross_row_sim},       {"avg_num_neigh", f.avg_num_neigh},
              {"bw_scaled", f.bw_scaled},               {"nr_rows", f.nr_rows},
              {"nr_cols", f.nr_cols},                   {"nnz", f.nnz}};
}

bool any_correctness_failure(const SweepRecord& rec) {
  for (const auto& o : rec.outcomes) {
    if (o.status == RecordStatus::correctness_failure) return true;
  }
  return false;
}

std::pair<std::size_t, std::size_t> parse_shard(const std::string& s) {
  const auto slash = s.find('/');
  std::size_t i = 0, n = 0;
  try {
    if (slash == std::string::npos) throw std::invalid_argument(s);
    i = std::stoul(s.substr(0, slash));
    n = std::stoul(s.substr(slash + 1));
  } catch (const std::exception&) {
    throw Error(ErrorKind::invalid_argument, "--shard expects i/n, got '" + s + "'");
  }
  if (n == 0 || i >= n) throw Error(ErrorKind::invalid_argument, "--shard i/n needs 0 <= i < n");
  return {i, n};
}

RangeFilter parse_filter(const std::string& s) {
  // feature:lo:hi
  const auto a = s.find(':');
  const auto b = s.find(':', a == std::string::npos ? a : a + 1);
  if (a == std::string::npos || b == std::string::npos) {
    throw Error(ErrorKind::invalid_argument, "--filter expects feature:lo:hi, got '" + s + "'");
  }
  try {
    return {s.substr(0, a), std::stod(s.substr(a + 1, b - a - 1)), std::stod(s.substr(b + 1))};
  } catch (const std::exception&) {
    throw Error(ErrorKind::invalid_argument, "--filter bounds must be numbers: '" + s + "'");
  }
}

void print_sweep_progress(const SweepRecord& rec, std::size_t done, std::size_t total) {
  std::fprintf(stderr, "[%zu/%zu] %s %s", done, total, rec.matrix_id.c_str(),
               rec.status == RecordStatus::infeasible ? "infeasible" : "");
  if (rec.best_format) {
    std::fprintf(stderr, "best %s %.3f GFLOP/s", std::string(to_string(*rec.best_format)).c_str(),
                 rec.best_gflops);
  }
  std::fprintf(stderr, "\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Artificial sparse matrix generation and SpMV benchmarking"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--workers", g.workers, "Worker threads per kernel")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output path");
  app.add_option("--formats", g.formats, "Comma-separated formats: csr,csr-balanced,coo,ell,hyb");
  app.add_option("--profile", g.profile, "Machine profile (default $SPMV_PROBE_PROFILE)");
  app.add_option("--iterations", g.iterations, "SpMV calls per timed block")->check(CLI::PositiveNumber);
  app.add_option("--repeats", g.repeats, "Timed blocks per format")->check(CLI::PositiveNumber);
  app.add_option("--capacity-gb", g.capacity_gb, "Ceiling for padded ELL/HYB storage")->check(CLI::PositiveNumber);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a matrix from feature targets");
  GenParams gp;
  double gen_footprint = 0.0;
  gen->add_option("--rows", gp.nr_rows, "Rows (square unless --cols)");
  gen->add_option("--cols", gp.nr_cols, "Columns");
  gen->add_option("--footprint-mb", gen_footprint, "Derive a square size from a CSR footprint");
  gen->add_option("--avg-nnz", gp.avg_nz_row, "Mean nonzeros per row")->required();
  gen->add_option("--std-nnz", gp.std_nz_row, "Standard deviation of nonzeros per row");
  gen->add_option("--skew", gp.skew_coef, "Skew coefficient");
  gen->add_option("--bw", gp.bw_scaled, "Scaled bandwidth in (0, 1]");
  gen->add_option("--crs", gp.cross_row_sim, "Cross-row similarity in [0, 1]");
  gen->add_option("--neigh", gp.avg_num_neigh, "Average number of neighbors in [0, 2]");
  gen->add_flag("--shuffle", gp.shuffle_rows, "Shuffle row order");

  // features
  auto* feat = app.add_subcommand("features", "Extract the feature vector of a matrix");
  std::string feat_path;
  bool feat_csv = false;
  feat->add_option("matrix", feat_path, "Matrix Market or SPMB file")->required();
  feat->add_flag("--csv", feat_csv, "CSV instead of JSON");

  // bench
  auto* bench = app.add_subcommand("bench", "Benchmark one matrix in every requested format");
  std::string bench_path, bench_id;
  bench->add_option("matrix", bench_path, "Matrix Market or SPMB file")->required();
  bench->add_option("--id", bench_id, "Matrix id (default: file stem)");

  // profile
  auto* prof = app.add_subcommand("profile", "Measure memory bandwidth with a triad sweep");
  BandwidthConfig bw_cfg;
  prof->add_option("--array-length", bw_cfg.array_length, "Doubles per array (default 4 x LLC)");
  prof->add_option("--trials", bw_cfg.trials, "Trials; the best is kept")->check(CLI::PositiveNumber);
  prof->add_option("--llc-bytes", bw_cfg.llc_bytes, "Last-level cache size (default: detect)");
  prof->add_option("--label", bw_cfg.label, "Free-form machine label");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run the feature grid (resumable)");
  std::string preset = "medium", shard = "0/1", manifest_in;
  double max_fp = 0.0;
  bool dry_run = false;
  sweep->add_option("--preset", preset, "small, medium or large")
      ->check(CLI::IsMember({"small", "medium", "large"}));
  sweep->add_option("--manifest", manifest_in, "Read GenParams lines instead of a preset");
  sweep->add_option("--max-footprint-mb", max_fp, "Drop footprint samples above this size");
  sweep->add_option("--shard", shard, "Run shard i of n (i/n)");
  sweep->add_flag("--dry-run", dry_run, "Write the manifest (one GenParams per line) and stop");

  // validate
  auto* val = app.add_subcommand("validate", "Compare a real matrix with its artificial friends");
  std::string val_path;
  std::size_t friend_count = 70;
  FriendOptions fopts;
  val->add_option("matrix", val_path, "Matrix Market or SPMB file")->required();
  val->add_option("--friends", friend_count, "Number of friends")->check(CLI::PositiveNumber);
  val->add_option("--perturbation", fopts.perturbation, "Relative feature perturbation")
      ->check(CLI::Range(0.0, 0.99));

  // report
  auto* rep = app.add_subcommand("report", "Boxplot statistics of best-format performance");
  std::string rep_path;
  ReportOptions ropts;
  double split_mb = 256.0;
  std::vector<std::string> filters;
  std::vector<double> split_edges;
  bool wins = false;
  rep->add_option("results", rep_path, "Results CSV")->required();
  rep->add_option("--group-by", ropts.group_by, "Feature to group by")->check(CLI::IsMember(report_features()));
  rep->add_option("--split-mb", split_mb, "Footprint split threshold in MB (0: no split)");
  rep->add_option("--split-feature", ropts.split_feature, "Split by this feature instead of footprint")
      ->check(CLI::IsMember(report_features()));
  rep->add_option("--split-edges", split_edges, "Split edges for --split-feature")->delimiter(',');
  rep->add_option("--filter", filters, "Keep records with feature in [lo, hi]: feature:lo:hi");
  rep->add_option("--title", ropts.title, "SVG title");
  rep->add_flag("--wins", wins, "Also print the per-format win percentages");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    const std::vector<Format> formats = parse_formats(g.formats);

    if (*gen) {
      if (gen_footprint > 0.0) {
        const Dimensions d = plan_dimensions(gen_footprint, gp.avg_nz_row);
        gp.nr_rows = d.nr_rows;
        gp.nr_cols = d.nr_cols;
      }
      if (gp.nr_rows == 0) throw Error(ErrorKind::invalid_argument, "gen needs --rows or --footprint-mb");
      if (gp.nr_cols == 0) gp.nr_cols = gp.nr_rows;
      if (g.out.empty()) throw Error(ErrorKind::invalid_argument, "gen needs --out");
      gp.seed = g.seed;
      const CsrMatrix m = generate(gp);
      save_matrix(m, g.out);
      std::cout << "id=" << gen_params_key(gp) << ' ' << to_kv(gp) << " nnz=" << m.nnz() << '\n';
      return 0;
    }

    if (*feat) {
      const FeatureVector f = extract_features(load_matrix(feat_path));
      if (feat_csv) {
        std::ostringstream os;
        const json j = features_json(f);
        bool first = true;
        for (const auto& [k, v] : j.items()) os << (first ? "" : ",") << k, first = false;
        os << '\n';
        first = true;
        for (const auto& [k, v] : j.items()) os << (first ? "" : ",") << v.dump(), first = false;
        os << '\n';
        write_text(g.out, os.str());
      } else {
        write_text(g.out, features_json(f).dump(2) + "\n");
      }
      return 0;
    }

    if (*bench) {
      const MachineProfile profile = require_profile(g);
      const CsrMatrix m = load_matrix(bench_path);
      const std::string id = bench_id.empty() ? std::filesystem::path(bench_path).stem().string() : bench_id;
      const SweepRecord rec = bench_matrix(m, id, profile, formats, bench_config(g), g.seed);
      const auto rows = to_rows(rec);
      if (g.out.empty()) {
        std::cout << results_header() << '\n';
        for (const auto& r : rows) std::cout << format_row(r) << '\n';
      } else {
        ResultsWriter(g.out).append(rows);
      }
      for (const BenchResult& r : rec.results) {
        std::fprintf(stderr, "%-13s %10.4f GFLOP/s  %.3e s/iter\n", std::string(to_string(r.format)).c_str(),
                     r.gflops, r.mean_seconds_per_iter);
      }
      if (rec.roofline_gflops) std::fprintf(stderr, "roofline      %10.4f GFLOP/s\n", *rec.roofline_gflops);
      return any_correctness_failure(rec) ? kExitCorrectness : 0;
    }

    if (*prof) {
      bw_cfg.workers = g.workers;
      const MachineProfile p = measure_bandwidth(bw_cfg);
      const std::string path = !g.out.empty() ? g.out : (!g.profile.empty() ? g.profile : default_profile_path());
      save_profile(p, path);
      std::printf("bandwidth %.3f GB/s (llc %llu bytes, %zu workers) -> %s\n", p.measured_bw_bytes_per_s / 1e9,
                  static_cast<unsigned long long>(p.llc_bytes), p.workers, path.c_str());
      return 0;
    }

    if (*sweep) {
      std::vector<GenParams> grid;
      std::size_t flagged = 0;
      if (!manifest_in.empty()) {
        std::ifstream in(manifest_in);
        if (!in) throw Error(ErrorKind::io_error, "cannot read " + manifest_in);
        std::string line;
        while (std::getline(in, line)) {
          if (!line.empty() && line[0] != '#') grid.push_back(gen_params_from_kv(line));
        }
      } else {
        GridConfig cfg = grid_preset(preset);
        cfg.master_seed = g.seed;
        cfg.max_footprint_mb = max_fp;
        for (const GridEntry& e : sweep_grid(cfg)) {
          grid.push_back(e.params);
          if (!e.feasibility.feasible) ++flagged;
        }
      }
      if (dry_run) {
        std::string text;
        for (const GenParams& p : grid) text += to_kv(p) + '\n';
        write_text(g.out, text);
        std::fprintf(stderr, "%zu parameter sets (%zu flagged infeasible)\n", grid.size(), flagged);
        return 0;
      }
      if (g.out.empty()) throw Error(ErrorKind::invalid_argument, "sweep needs --out for the results CSV");
      const MachineProfile profile = require_profile(g);
      SweepOptions so;
      so.formats = formats;
      so.bench = bench_config(g);
      so.results_path = g.out;
      std::tie(so.shard_index, so.shard_count) = parse_shard(shard);
      so.progress = print_sweep_progress;
      const auto records = run_sweep(grid, profile, so);
      bool bad = false;
      for (const auto& r : records) bad = bad || any_correctness_failure(r);
      return bad ? kExitCorrectness : 0;
    }

    if (*val) {
      const MachineProfile profile = require_profile(g);
      const CsrMatrix m = load_matrix(val_path);
      SweepOptions so;
      so.formats = formats;
      so.bench = bench_config(g);
      so.results_path = g.out;
      so.progress = print_sweep_progress;
      const std::string id = std::filesystem::path(val_path).stem().string();
      const FriendSet set = validate_with_friends(m, id, friend_count, g.seed, profile, so, fopts);
      const FriendPair pair = friend_pair(set);
      std::printf("matrix %s: best %s %.4f GFLOP/s\n", id.c_str(),
                  set.base_record.best_format ? std::string(to_string(*set.base_record.best_format)).c_str() : "none",
                  pair.base_gflops);
      std::printf("friends: %zu generated, %zu benchmarked\n", set.friends.size(), pair.friend_gflops.size());
      std::printf("MAPE %.2f %%\nAPE-best %.2f %%\n", mape({pair}), ape_best({pair}));
      return any_correctness_failure(set.base_record) ? kExitCorrectness : 0;
    }

    if (*rep) {
      const auto records = records_from_rows(read_results(rep_path));
      if (records.empty()) throw Error(ErrorKind::empty_input, rep_path + " has no records");
      if (!split_edges.empty()) {
        ropts.split_edges = split_edges;
      } else if (split_mb > 0.0) {
        ropts.split_feature = "footprint";
        ropts.split_edges = {split_mb};
      } else {
        ropts.split_edges.clear();
      }
      for (const auto& f : filters) ropts.filters.push_back(parse_filter(f));
      const Report r = make_report(records, ropts);
      const std::string prefix = g.out.empty() ? "report" : g.out;
      write_text(prefix + ".csv", report_csv(r));
      write_text(prefix + ".svg", report_svg(r));
      for (const auto& note : r.notes) std::fprintf(stderr, "note: %s\n", note.c_str());
      std::printf("%zu boxes -> %s.csv, %s.svg\n", r.boxes.size(), prefix.c_str(), prefix.c_str());
      if (wins) {
        const FormatWins w = format_wins(records);
        for (std::size_t i = 0; i < w.formats.size(); ++i) {
          std::printf("%-13s %6.2f %%\n", std::string(to_string(w.formats[i])).c_str(), w.percent[i]);
        }
        std::printf("%zu records, %zu ties\n", w.counted, w.ties);
      }
      return 0;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    switch (e.kind()) {
      case ErrorKind::correctness_failure: return kExitCorrectness;
      case ErrorKind::invalid_argument:
      case ErrorKind::unknown_feature: return kExitUsage;
      default: return kExitData;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  }
  return kExitUsage;
}
