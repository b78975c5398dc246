#pragma once

// Matrix Market (coordinate) text I/O and the SPMB binary cache.
//
// SPMB layout, all little-endian:
//   "SPMB" | version u32 | nr_rows u64 | nr_cols u64 | nnz u64 |
//   row_ptr u32[nr_rows + 1] | col_idx u32[nnz] | values f64[nnz]

#include <cstdint>
#include <istream>
#include <string>

#include "spmvprobe/sparse_core.hpp"

namespace spmvprobe {

inline constexpr std::uint32_t kSpmbVersion = 1;

// Supports `matrix coordinate real|integer|pattern general|symmetric|skew-symmetric`.
// Indices become 0-based, symmetric storage is mirrored (diagonal once),
// pattern entries get 1.0 and duplicates are summed.
CsrMatrix read_matrix_market(const std::string& path);
CsrMatrix read_matrix_market(std::istream& in);

// `general` coordinate file with shortest round-trip values.
void write_matrix_market(const CsrMatrix& m, const std::string& path);

void write_binary_cache(const CsrMatrix& m, const std::string& path);
CsrMatrix read_binary_cache(const std::string& path);

// Dispatch on content: SPMB magic, otherwise Matrix Market.
CsrMatrix load_matrix(const std::string& path);
// ".mtx" suffix writes Matrix Market, anything else SPMB.
void save_matrix(const CsrMatrix& m, const std::string& path);

}  // namespace spmvprobe
