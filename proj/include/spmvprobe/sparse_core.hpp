#pragma once

// Sparse storage formats (CSR, COO, ELL, HYB) and lossless conversions.
// CSR is the canonical interchange form: the generator emits it, the I/O layer
// reads into it, and every other format is derived from it.
//
// Storage layout: 4-byte unsigned column indices and row pointers, 8-byte
// values. Matrices with 2^32 or more nonzeros are rejected.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spmvprobe {

using index_t = std::uint32_t;

struct CsrMatrix {
  std::size_t nr_rows = 0;
  std::size_t nr_cols = 0;
  std::vector<index_t> row_ptr{0};
  std::vector<index_t> col_idx;
  std::vector<double> values;

  std::size_t nnz() const noexcept { return col_idx.size(); }
  std::size_t row_length(std::size_t row) const noexcept {
    return row_ptr[row + 1] - row_ptr[row];
  }
  std::span<const index_t> row_cols(std::size_t row) const noexcept {
    return {col_idx.data() + row_ptr[row], row_length(row)};
  }

  bool operator==(const CsrMatrix&) const = default;
};

struct CooMatrix {
  std::size_t nr_rows = 0;
  std::size_t nr_cols = 0;
  std::vector<index_t> row_idx;
  std::vector<index_t> col_idx;
  std::vector<double> values;

  std::size_t nnz() const noexcept { return values.size(); }
  bool operator==(const CooMatrix&) const = default;
};

// Row-major dense nr_rows x width arrays. Padding cells hold value 0.0 and the
// last valid column of their row (0 for an empty row), so x reads stay in bounds.
struct EllMatrix {
  std::size_t nr_rows = 0;
  std::size_t nr_cols = 0;
  std::size_t width = 0;
  std::vector<index_t> col_idx;
  std::vector<double> values;
  std::vector<index_t> row_length;  // valid prefix length per row

  bool operator==(const EllMatrix&) const = default;
};

struct HybMatrix {
  EllMatrix ell_part;  // width == k
  CooMatrix coo_part;  // elements past the first k of each row
  std::size_t k = 0;
};

struct CsrViolation {
  std::string invariant;
  std::size_t location = 0;

  std::string message() const;
};

struct ConversionLimits {
  // Ceiling on padded ELL storage (values + indices).
  std::uint64_t capacity_bytes = std::uint64_t{8} << 30;
};

// Returns nothing when every CSR invariant holds, otherwise the first violation.
std::optional<CsrViolation> validate_csr(const CsrMatrix& m);

// Throws Error{invalid_argument} carrying the violation message.
void require_valid_csr(const CsrMatrix& m);

CooMatrix csr_to_coo(const CsrMatrix& m);

// Sorts and rejects duplicate entries; used for round trips and HYB reassembly.
CsrMatrix coo_to_csr(const CooMatrix& m);

EllMatrix csr_to_ell(const CsrMatrix& m, const ConversionLimits& limits = {});

// k == nullopt selects ceil(nnz / nr_rows).
HybMatrix csr_to_hyb(const CsrMatrix& m, std::optional<std::size_t> k = std::nullopt,
                     const ConversionLimits& limits = {});

std::uint64_t ell_padded_bytes(std::size_t nr_rows, std::size_t width);

std::uint64_t csr_footprint_bytes(std::size_t nr_rows, std::size_t nnz) noexcept;
std::uint64_t csr_footprint_bytes(const CsrMatrix& m) noexcept;

inline constexpr double kBytesPerMb = 1024.0 * 1024.0;

}  // namespace spmvprobe
