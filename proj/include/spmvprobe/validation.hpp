#pragma once

// Sweep orchestration and the friends validation.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spmvprobe/bench.hpp"
#include "spmvprobe/features.hpp"
#include "spmvprobe/generator.hpp"
#include "spmvprobe/results_csv.hpp"

namespace spmvprobe {

struct FormatOutcome {
  Format format = Format::csr;
  RecordStatus status = RecordStatus::ok;
};

struct SweepRecord {
  std::string matrix_id;
  std::optional<GenParams> gen_params;
  std::optional<FeatureVector> measured;
  std::vector<BenchResult> results;      // status ok only
  std::vector<FormatOutcome> outcomes;   // every requested format
  std::optional<double> roofline_gflops;
  RecordStatus status = RecordStatus::ok;  // infeasible when the matrix was never built
  std::optional<Format> best_format;
  double best_gflops = 0.0;
};

// Best over ok results; ties go to the earlier Format. Returns whether the
// maximum was shared.
bool select_best(SweepRecord& rec);

std::vector<ResultsRow> to_rows(const SweepRecord& rec);
// Groups rows by matrix_id in first-appearance order.
std::vector<SweepRecord> records_from_rows(const std::vector<ResultsRow>& rows);

struct SweepOptions {
  std::vector<Format> formats{std::begin(kAllFormats), std::end(kAllFormats)};
  BenchConfig bench;
  std::string results_path;  // empty: nothing persisted
  std::size_t shard_index = 0;
  std::size_t shard_count = 1;
  std::function<void(const SweepRecord&, std::size_t done, std::size_t total)> progress;
};

// Shard owning a parameter set; depends only on the parameters.
std::size_t shard_of(const GenParams& p, std::size_t shard_count);

// Builds and benchmarks every grid entry of this shard. Formats
// already present in the results file for a matrix are not re-run. Failures
// become record statuses.
std::vector<SweepRecord> run_sweep(const std::vector<GenParams>& grid, const MachineProfile& profile,
                                   const SweepOptions& opts = {});

// Benchmarks an existing matrix in every requested format.
SweepRecord bench_matrix(const CsrMatrix& m, std::string matrix_id, const MachineProfile& profile,
                         const std::vector<Format>& formats, const BenchConfig& cfg,
                         std::uint64_t x_seed);

struct FriendOptions {
  double perturbation = 0.3;
  std::size_t max_redraws = 100;
};

// Footprint, avg_nz_row, skew, cross_row_sim and avg_num_neigh are drawn
// uniformly in [(1-q) f, (1+q) f]; bw_scaled follows the base (raised so the
// longest requested row fits) and std_nz_row scales with avg_nz_row.
std::vector<GenParams> make_friends(const FeatureVector& base, std::size_t count, std::uint64_t seed,
                                    const FriendOptions& opts = {});

struct FriendSet {
  std::string base_id;
  FeatureVector base;
  SweepRecord base_record;
  std::vector<SweepRecord> friends;
};

// Benchmarks `real`, then generates and benchmarks its friends.
FriendSet validate_with_friends(const CsrMatrix& real, std::string base_id, std::size_t count,
                                std::uint64_t seed, const MachineProfile& profile,
                                const SweepOptions& opts = {}, const FriendOptions& fopts = {});

struct FriendPair {
  double base_gflops = 0.0;
  std::vector<double> friend_gflops;
};

// Best-format performance of the base and of every friend that ran.
FriendPair friend_pair(const FriendSet& set);

double median(std::vector<double> values);

// Mean over pairs of |base - median(friends)| / base * 100.
double mape(const std::vector<FriendPair>& pairs);
// Mean over pairs of min over friends of |base - friend| / base * 100.
double ape_best(const std::vector<FriendPair>& pairs);

struct FormatWins {
  std::vector<Format> formats;     // kAllFormats order
  std::vector<double> percent;     // share of counted records won
  std::size_t counted = 0;         // records with a best format
  std::size_t ties = 0;            // records whose maximum was shared
};

FormatWins format_wins(const std::vector<SweepRecord>& records);

}  // namespace spmvprobe
