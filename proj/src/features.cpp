#include "spmvprobe/features.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "spmvprobe/error.hpp"

namespace spmvprobe {

double skew_coefficient(std::span<const std::size_t> row_lengths) {
  if (row_lengths.empty()) {
    throw Error(ErrorKind::undefined_for_empty, "skew of zero rows");
  }
  std::size_t total = 0;
  std::size_t longest = 0;
  for (std::size_t len : row_lengths) {
    total += len;
    longest = std::max(longest, len);
  }
  if (total == 0) throw Error(ErrorKind::undefined_for_empty, "skew of a matrix with nnz = 0");
  const double avg = static_cast<double>(total) / static_cast<double>(row_lengths.size());
  return (static_cast<double>(longest) - avg) / avg;
}

double avg_num_neighbors(const CsrMatrix& m) {
  if (m.nnz() == 0) throw Error(ErrorKind::undefined_for_empty, "neighbors with nnz = 0");
  // Columns are strictly increasing, so every distance-1 pair is a consecutive
  // pair within the row and contributes one neighbor to each side.
  std::size_t pairs = 0;
  for (std::size_t r = 0; r < m.nr_rows; ++r) {
    const auto cols = m.row_cols(r);
    for (std::size_t j = 1; j < cols.size(); ++j) {
      if (cols[j] - cols[j - 1] == 1) ++pairs;
    }
  }
  return 2.0 * static_cast<double>(pairs) / static_cast<double>(m.nnz());
}

double cross_row_similarity(const CsrMatrix& m) {
  if (m.nnz() == 0) throw Error(ErrorKind::undefined_for_empty, "similarity with nnz = 0");
  double sum = 0.0;
  std::size_t rows = 0;
  for (std::size_t r = 0; r + 1 < m.nr_rows; ++r) {
    const auto cur = m.row_cols(r);
    if (cur.empty()) continue;
    const auto next = m.row_cols(r + 1);
    // Two-pointer merge: next[k] is the first next-row column >= c - 1.
    std::size_t matched = 0;
    std::size_t k = 0;
    for (index_t c : cur) {
      while (k < next.size() && next[k] + 1 < c) ++k;
      if (k < next.size() && next[k] <= static_cast<std::size_t>(c) + 1) ++matched;
    }
    sum += static_cast<double>(matched) / static_cast<double>(cur.size());
    ++rows;
  }
  if (rows == 0) {
    throw Error(ErrorKind::undefined_for_empty, "no non-empty row has a successor row");
  }
  return sum / static_cast<double>(rows);
}

double bandwidth_scaled(const CsrMatrix& m) {
  if (m.nnz() == 0) throw Error(ErrorKind::undefined_for_empty, "bandwidth with nnz = 0");
  double sum = 0.0;
  std::size_t rows = 0;
  for (std::size_t r = 0; r < m.nr_rows; ++r) {
    const auto cols = m.row_cols(r);
    if (cols.empty()) continue;
    sum += static_cast<double>(cols.back() - cols.front() + 1) / static_cast<double>(m.nr_cols);
    ++rows;
  }
  return sum / static_cast<double>(rows);
}

FeatureVector extract_features(const CsrMatrix& m) {
  require_valid_csr(m);
  if (m.nnz() == 0) throw Error(ErrorKind::undefined_for_empty, "features of an empty matrix");

  std::vector<std::size_t> lengths(m.nr_rows);
  for (std::size_t r = 0; r < m.nr_rows; ++r) lengths[r] = m.row_length(r);

  FeatureVector f;
  f.nr_rows = m.nr_rows;
  f.nr_cols = m.nr_cols;
  f.nnz = m.nnz();
  f.mem_footprint_mb = static_cast<double>(csr_footprint_bytes(m)) / kBytesPerMb;
  f.avg_nz_row = static_cast<double>(m.nnz()) / static_cast<double>(m.nr_rows);
  double sq = 0.0;
  for (std::size_t len : lengths) {
    const double d = static_cast<double>(len) - f.avg_nz_row;
    sq += d * d;
  }
  f.std_nz_row = std::sqrt(sq / static_cast<double>(m.nr_rows));
  f.skew_coeff = skew_coefficient(lengths);
  f.avg_num_neigh = avg_num_neighbors(m);
  f.cross_row_sim = cross_row_similarity(m);
  f.bw_scaled = bandwidth_scaled(m);
  return f;
}

}  // namespace spmvprobe
