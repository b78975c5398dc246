#pragma once

// Artificial matrix generator.
//
// A matrix is described by its dimensions plus the feature targets
// (avg/std nonzeros per row, skew, bandwidth, cross-row similarity, average
// number of neighbors). Generation runs in two phases:
//
//  1. row_nnz_profile(): per-row nonzero budgets. A short leading block decays
//     exponentially from MAX = avg * (skew + 1); the remaining rows draw from
//     N(mu', std) with mu' recomputed so the overall mean equals avg.
//  2. generate(): row-wise column placement. Runs of the previous row are
//     duplicated with probability cross_row_sim, the rest of the budget is
//     placed by uniform draws inside a bandwidth window around the scaled
//     diagonal, and each draw is followed by a chain of adjacent columns that
//     continues while a Bernoulli trial succeeds.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "spmvprobe/features.hpp"
#include "spmvprobe/sparse_core.hpp"

namespace spmvprobe {

enum class RowDistribution { normal };

struct GenParams {
  std::size_t nr_rows = 0;
  std::size_t nr_cols = 0;
  double avg_nz_row = 0.0;
  double std_nz_row = 0.0;
  RowDistribution distribution = RowDistribution::normal;
  double skew_coef = 0.0;
  double bw_scaled = 1.0;
  double cross_row_sim = 0.0;
  double avg_num_neigh = 0.0;
  std::uint64_t seed = 0;
  bool shuffle_rows = false;

  bool operator==(const GenParams&) const = default;
};

// Flat "key=value key=value ..." form; doubles use shortest round-trip text.
std::string to_kv(const GenParams& p);
GenParams gen_params_from_kv(std::string_view text);

// Stable 64-bit key of a parameter set, rendered as 16 hex digits.
std::string gen_params_key(const GenParams& p);

struct Dimensions {
  std::size_t nr_rows = 0;
  std::size_t nr_cols = 0;
};

// Square matrix whose CSR footprint is closest to footprint_mb.
Dimensions plan_dimensions(double footprint_mb, double avg_nz_row);

// Requested footprint implied by the parameters (nnz = round(rows * avg)).
double requested_footprint_mb(const GenParams& p);

std::size_t window_width(const GenParams& p);
std::size_t max_row_target(const GenParams& p);

struct ProfileOptions {
  // Upper bound on the fraction of rows covered by the exponential block.
  double decay_fraction = 0.1;
  // Upper bound on the share of all nonzeros the block may hold above the
  // bulk mean; keeps the skew rows from dominating per-nonzero features.
  double max_block_share = 0.02;
};

struct RowPlan {
  std::vector<index_t> target_nnz;
  std::size_t block_rows = 0;  // length of the exponential block
  double bulk_mean = 0.0;      // mu'
  double decay_constant = 0.0; // C
};

// Throws Error{infeasible} when the budget cannot satisfy the targets.
RowPlan row_nnz_profile(const GenParams& p, const ProfileOptions& opts = {});

CsrMatrix generate(const GenParams& p, const ProfileOptions& opts = {});

struct Feasibility {
  bool feasible = true;   // generate() succeeds
  bool reachable = true;  // targets attainable within the fidelity tolerances
  std::string reason;
};

Feasibility check_feasibility(const GenParams& p, const ProfileOptions& opts = {});

// Fidelity tolerances of generated matrices against their request.
struct FidelityTolerance {
  double avg_rel = 0.05;
  double footprint_rel = 0.10;
  double skew_rel = 0.20;
  double skew_abs_at_zero = 0.05;
  double cross_row_abs = 0.10;
  double neigh_abs = 0.15;
  double bw_abs = 0.10;
};

struct FidelityReport {
  bool ok = true;
  std::string failures;  // comma-separated feature names
};

FidelityReport check_fidelity(const GenParams& p, const FeatureVector& measured,
                              const FidelityTolerance& tol = {});

// Feature grid: footprint ranges times the five structural axes.
struct GridConfig {
  std::vector<std::pair<double, double>> footprint_ranges_mb{{4, 32}, {32, 512}, {512, 2048}};
  std::size_t footprint_samples = 5;
  std::vector<double> avg_nz_row{5, 10, 20, 50, 100, 500};
  std::vector<double> skew{0, 100, 1000, 10000};
  std::vector<double> cross_row_sim{0.05, 0.5, 0.95};
  std::vector<double> avg_num_neigh{0.05, 0.5, 0.95, 1.4, 1.9};
  std::vector<double> bw_scaled{0.05, 0.3, 0.6};
  double std_nz_row = 0.0;
  std::uint64_t master_seed = 42;
  double max_footprint_mb = 0.0;  // > 0 drops footprint samples above it
};

GridConfig grid_preset(std::string_view name);  // "small", "medium", "large"

struct GridEntry {
  GenParams params;
  double footprint_mb = 0.0;  // the sampled request
  Feasibility feasibility;
};

std::vector<GridEntry> sweep_grid(const GridConfig& cfg);

}  // namespace spmvprobe
