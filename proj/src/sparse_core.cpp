#include "spmvprobe/sparse_core.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <tuple>

#include "spmvprobe/error.hpp"

namespace spmvprobe {

std::string CsrViolation::message() const {
  return invariant + " at index " + std::to_string(location);
}

std::optional<CsrViolation> validate_csr(const CsrMatrix& m) {
  if (m.row_ptr.size() != m.nr_rows + 1) {
    return CsrViolation{"row_ptr length is nr_rows+1", m.row_ptr.size()};
  }
  if (m.row_ptr[0] != 0) return CsrViolation{"row_ptr[0] = 0", 0};
  for (std::size_t i = 1; i <= m.nr_rows; ++i) {
    if (m.row_ptr[i] < m.row_ptr[i - 1]) {
      return CsrViolation{"row_ptr non-decreasing", i};
    }
  }
  if (m.values.size() != m.col_idx.size()) {
    return CsrViolation{"values length equals col_idx length", m.values.size()};
  }
  if (m.row_ptr[m.nr_rows] != m.col_idx.size()) {
    return CsrViolation{"row_ptr[nr_rows] = nnz", m.nr_rows};
  }
  for (std::size_t r = 0; r < m.nr_rows; ++r) {
    for (std::size_t j = m.row_ptr[r]; j < m.row_ptr[r + 1]; ++j) {
      if (m.col_idx[j] >= m.nr_cols) return CsrViolation{"column out of range", j};
      if (j > m.row_ptr[r] && m.col_idx[j] <= m.col_idx[j - 1]) {
        return CsrViolation{"columns strictly increasing within row", j};
      }
    }
  }
  return std::nullopt;
}

void require_valid_csr(const CsrMatrix& m) {
  if (auto v = validate_csr(m)) throw Error(ErrorKind::invalid_argument, v->message());
}

CooMatrix csr_to_coo(const CsrMatrix& m) {
  CooMatrix coo;
  coo.nr_rows = m.nr_rows;
  coo.nr_cols = m.nr_cols;
  coo.row_idx.resize(m.nnz());
  for (std::size_t r = 0; r < m.nr_rows; ++r) {
    std::fill(coo.row_idx.begin() + m.row_ptr[r], coo.row_idx.begin() + m.row_ptr[r + 1],
              static_cast<index_t>(r));
  }
  coo.col_idx = m.col_idx;
  coo.values = m.values;
  return coo;
}

CsrMatrix coo_to_csr(const CooMatrix& m) {
  const std::size_t nnz = m.nnz();
  if (m.row_idx.size() != nnz || m.col_idx.size() != nnz) {
    throw Error(ErrorKind::invalid_argument, "COO arrays differ in length");
  }
  if (nnz > std::numeric_limits<index_t>::max()) {
    throw Error(ErrorKind::capacity_exceeded, "nnz does not fit 32-bit indices");
  }
  std::vector<std::size_t> order(nnz);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(m.row_idx[a], m.col_idx[a]) < std::tie(m.row_idx[b], m.col_idx[b]);
  });

  CsrMatrix csr;
  csr.nr_rows = m.nr_rows;
  csr.nr_cols = m.nr_cols;
  csr.row_ptr.assign(m.nr_rows + 1, 0);
  csr.col_idx.reserve(nnz);
  csr.values.reserve(nnz);
  for (std::size_t i = 0; i < nnz; ++i) {
    const std::size_t e = order[i];
    if (m.row_idx[e] >= m.nr_rows || m.col_idx[e] >= m.nr_cols) {
      throw Error(ErrorKind::invalid_argument, "COO index out of range");
    }
    if (i > 0 && m.row_idx[e] == m.row_idx[order[i - 1]] &&
        m.col_idx[e] == m.col_idx[order[i - 1]]) {
      throw Error(ErrorKind::invalid_argument, "duplicate COO entry");
    }
    ++csr.row_ptr[m.row_idx[e] + 1];
    csr.col_idx.push_back(m.col_idx[e]);
    csr.values.push_back(m.values[e]);
  }
  std::partial_sum(csr.row_ptr.begin(), csr.row_ptr.end(), csr.row_ptr.begin());
  return csr;
}

std::uint64_t ell_padded_bytes(std::size_t nr_rows, std::size_t width) {
  constexpr std::uint64_t cell = sizeof(double) + sizeof(index_t);
  const auto rows = static_cast<std::uint64_t>(nr_rows);
  const auto w = static_cast<std::uint64_t>(width);
  if (w != 0 && rows > std::numeric_limits<std::uint64_t>::max() / w / cell) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return rows * w * cell;
}

namespace {

std::size_t max_row_length(const CsrMatrix& m) {
  std::size_t width = 0;
  for (std::size_t r = 0; r < m.nr_rows; ++r) width = std::max(width, m.row_length(r));
  return width;
}

// Fills the first min(len, width) elements of every row and pads the rest.
EllMatrix build_ell(const CsrMatrix& m, std::size_t width, const ConversionLimits& limits) {
  const std::uint64_t bytes = ell_padded_bytes(m.nr_rows, width);
  if (bytes > limits.capacity_bytes) {
    throw Error(ErrorKind::capacity_exceeded,
                "padded ELL needs " + std::to_string(bytes) + " bytes, ceiling is " +
                    std::to_string(limits.capacity_bytes));
  }
  EllMatrix ell;
  ell.nr_rows = m.nr_rows;
  ell.nr_cols = m.nr_cols;
  ell.width = width;
  ell.col_idx.assign(m.nr_rows * width, 0);
  ell.values.assign(m.nr_rows * width, 0.0);
  ell.row_length.resize(m.nr_rows);
  for (std::size_t r = 0; r < m.nr_rows; ++r) {
    const std::size_t len = std::min(m.row_length(r), width);
    const std::size_t base = r * width;
    const std::size_t src = m.row_ptr[r];
    for (std::size_t j = 0; j < len; ++j) {
      ell.col_idx[base + j] = m.col_idx[src + j];
      ell.values[base + j] = m.values[src + j];
    }
    const index_t pad_col = len > 0 ? m.col_idx[src + len - 1] : 0;
    for (std::size_t j = len; j < width; ++j) ell.col_idx[base + j] = pad_col;
    ell.row_length[r] = static_cast<index_t>(len);
  }
  return ell;
}

}  // namespace

EllMatrix csr_to_ell(const CsrMatrix& m, const ConversionLimits& limits) {
  return build_ell(m, max_row_length(m), limits);
}

HybMatrix csr_to_hyb(const CsrMatrix& m, std::optional<std::size_t> k,
                     const ConversionLimits& limits) {
  std::size_t threshold = 0;
  if (k) {
    threshold = *k;
  } else if (m.nr_rows > 0) {
    threshold = (m.nnz() + m.nr_rows - 1) / m.nr_rows;
  }

  HybMatrix hyb;
  hyb.k = threshold;
  hyb.ell_part = build_ell(m, threshold, limits);
  hyb.coo_part.nr_rows = m.nr_rows;
  hyb.coo_part.nr_cols = m.nr_cols;
  for (std::size_t r = 0; r < m.nr_rows; ++r) {
    for (std::size_t j = m.row_ptr[r] + threshold; j < m.row_ptr[r + 1]; ++j) {
      hyb.coo_part.row_idx.push_back(static_cast<index_t>(r));
      hyb.coo_part.col_idx.push_back(m.col_idx[j]);
      hyb.coo_part.values.push_back(m.values[j]);
    }
  }
  return hyb;
}

std::uint64_t csr_footprint_bytes(std::size_t nr_rows, std::size_t nnz) noexcept {
  return (sizeof(double) + sizeof(index_t)) * static_cast<std::uint64_t>(nnz) +
         sizeof(index_t) * (static_cast<std::uint64_t>(nr_rows) + 1);
}

std::uint64_t csr_footprint_bytes(const CsrMatrix& m) noexcept {
  return csr_footprint_bytes(m.nr_rows, m.nnz());
}

}  // namespace spmvprobe
