#pragma once

// Structural features tied to the four SpMV bottlenecks:
//   footprint       -> memory bandwidth intensity
//   avg_nz_row      -> low ILP (short rows are loop-control bound)
//   skew_coeff      -> load imbalance
//   cross_row_sim,
//   avg_num_neigh   -> irregular x accesses (temporal / spatial locality)
// bw_scaled is not a bottleneck feature; the generator uses it as a control.

#include <cstddef>
#include <span>

#include "spmvprobe/sparse_core.hpp"

namespace spmvprobe {

struct FeatureVector {
  double mem_footprint_mb = 0.0;
  double avg_nz_row = 0.0;
  double std_nz_row = 0.0;
  double skew_coeff = 0.0;
  double cross_row_sim = 0.0;
  double avg_num_neigh = 0.0;
  double bw_scaled = 0.0;
  std::size_t nr_rows = 0;
  std::size_t nr_cols = 0;
  std::size_t nnz = 0;

  bool operator==(const FeatureVector&) const = default;
};

// (max - avg) / avg over the given row lengths.
double skew_coefficient(std::span<const std::size_t> row_lengths);

// Mean, over nonzeros, of same-row elements at column distance exactly 1.
double avg_num_neighbors(const CsrMatrix& m);

// Mean, over non-empty rows that have a successor, of the fraction of the row's
// elements with at least one element of the next row at column distance <= 1.
double cross_row_similarity(const CsrMatrix& m);

// Mean, over non-empty rows, of (max_col - min_col + 1) / nr_cols.
double bandwidth_scaled(const CsrMatrix& m);

FeatureVector extract_features(const CsrMatrix& m);

}  // namespace spmvprobe
