#include "spmvprobe/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "spmvprobe/error.hpp"

namespace spmvprobe {

namespace {

void require_dims(std::size_t expected_x, std::size_t got_x, std::size_t expected_y, std::size_t got_y) {
  if (expected_x != got_x) {
    throw Error(ErrorKind::dimension_mismatch,
                "x has length " + std::to_string(got_x) + ", expected " + std::to_string(expected_x));
  }
  if (expected_y != got_y) {
    throw Error(ErrorKind::dimension_mismatch,
                "y has length " + std::to_string(got_y) + ", expected " + std::to_string(expected_y));
  }
}

// Runs body(k) for every part k; parts are spread over up to `workers` threads.
template <typename Body>
void for_each_part(std::size_t parts, std::size_t workers, Body&& body) {
  if (workers <= 1 || parts <= 1) {
    for (std::size_t k = 0; k < parts; ++k) body(k);
    return;
  }
#pragma omp parallel num_threads(static_cast<int>(workers))
  {
    const auto tid = static_cast<std::size_t>(omp_get_thread_num());
    const auto nth = static_cast<std::size_t>(omp_get_num_threads());
    for (std::size_t k = tid; k < parts; k += nth) body(k);
  }
}

inline void csr_rows(const CsrMatrix& m, const double* x, double* y, std::size_t first, std::size_t last) {
  const index_t* rp = m.row_ptr.data();
  const index_t* ci = m.col_idx.data();
  const double* v = m.values.data();
  for (std::size_t r = first; r < last; ++r) {
    double sum = 0.0;
    for (index_t j = rp[r]; j < rp[r + 1]; ++j) sum += v[j] * x[ci[j]];
    y[r] = sum;
  }
}

inline void two_sum(double a, double b, double& s, double& e) {
  s = a + b;
  const double z = s - a;
  e = (a - (s - z)) + (b - z);
}

}  // namespace

bool is_valid_partition(const RowPartition& part, std::size_t nr_rows) {
  const auto& b = part.boundaries;
  if (b.size() < 2 || b.front() != 0 || b.back() != nr_rows) return false;
  return std::is_sorted(b.begin(), b.end());
}

RowPartition even_row_partition(std::size_t nr_rows, std::size_t workers) {
  if (workers == 0) throw Error(ErrorKind::invalid_argument, "workers must be >= 1");
  RowPartition part;
  part.boundaries.resize(workers + 1);
  for (std::size_t k = 0; k <= workers; ++k) part.boundaries[k] = nr_rows * k / workers;
  return part;
}

RowPartition balanced_row_partition(const CsrMatrix& m, std::size_t workers) {
  if (workers == 0) throw Error(ErrorKind::invalid_argument, "workers must be >= 1");
  RowPartition part;
  part.boundaries.resize(workers + 1);
  part.boundaries[0] = 0;
  part.boundaries[workers] = m.nr_rows;
  const double nnz = static_cast<double>(m.nnz());
  for (std::size_t k = 1; k < workers; ++k) {
    const double target = nnz * static_cast<double>(k) / static_cast<double>(workers);
    auto it = std::lower_bound(m.row_ptr.begin(), m.row_ptr.end(), target,
                               [](index_t v, double t) { return static_cast<double>(v) < t; });
    auto row = static_cast<std::size_t>(it - m.row_ptr.begin());
    part.boundaries[k] = std::clamp(row, part.boundaries[k - 1], m.nr_rows);
  }
  return part;
}

DenseVector spmv_reference(const CsrMatrix& m, std::span<const double> x) {
  require_dims(m.nr_cols, x.size(), 0, 0);
  DenseVector y(m.nr_rows, 0.0);
  for (std::size_t r = 0; r < m.nr_rows; ++r) {
    double p = 0.0;
    double s = 0.0;
    for (index_t j = m.row_ptr[r]; j < m.row_ptr[r + 1]; ++j) {
      const double h = m.values[j] * x[m.col_idx[j]];
      const double h_err = std::fma(m.values[j], x[m.col_idx[j]], -h);
      double q = 0.0;
      two_sum(p, h, p, q);
      s += q + h_err;
    }
    y[r] = p + s;
  }
  return y;
}

void spmv_csr(const CsrMatrix& m, std::span<const double> x, std::span<double> y,
              const RowPartition* part) {
  require_dims(m.nr_cols, x.size(), m.nr_rows, y.size());
  if (part == nullptr) {
    csr_rows(m, x.data(), y.data(), 0, m.nr_rows);
    return;
  }
  if (!is_valid_partition(*part, m.nr_rows)) {
    throw Error(ErrorKind::invalid_argument, "row partition does not cover the matrix");
  }
  const auto& b = part->boundaries;
  for_each_part(part->workers(), part->workers(),
                [&](std::size_t k) { csr_rows(m, x.data(), y.data(), b[k], b[k + 1]); });
}

DenseVector spmv_csr(const CsrMatrix& m, std::span<const double> x, const RowPartition* part) {
  DenseVector y(m.nr_rows);
  spmv_csr(m, x, y, part);
  return y;
}

DenseVector spmv_csr_balanced(const CsrMatrix& m, std::span<const double> x, std::size_t workers) {
  const RowPartition part = balanced_row_partition(m, workers);
  return spmv_csr(m, x, &part);
}

std::vector<std::size_t> coo_chunks(const CooMatrix& m, std::size_t workers) {
  if (workers == 0) throw Error(ErrorKind::invalid_argument, "workers must be >= 1");
  const std::size_t nnz = m.nnz();
  std::vector<std::size_t> b(workers + 1, nnz);
  b[0] = 0;
  for (std::size_t k = 1; k < workers; ++k) {
    std::size_t pos = std::max(nnz * k / workers, b[k - 1]);
    while (pos > 0 && pos < nnz && m.row_idx[pos] == m.row_idx[pos - 1]) ++pos;
    b[k] = pos;
  }
  return b;
}

namespace {

void coo_accumulate(const CooMatrix& m, const double* x, double* y, std::size_t workers) {
  const auto chunks = coo_chunks(m, workers);
  for_each_part(workers, workers, [&](std::size_t k) {
    for (std::size_t i = chunks[k]; i < chunks[k + 1]; ++i) {
      y[m.row_idx[i]] += m.values[i] * x[m.col_idx[i]];
    }
  });
}

void ell_rows(const EllMatrix& m, const double* x, double* y, std::size_t first, std::size_t last) {
  const std::size_t w = m.width;
  for (std::size_t r = first; r < last; ++r) {
    const index_t* ci = m.col_idx.data() + r * w;
    const double* v = m.values.data() + r * w;
    double sum = 0.0;
    for (std::size_t j = 0; j < w; ++j) sum += v[j] * x[ci[j]];
    y[r] = sum;
  }
}

void ell_multiply(const EllMatrix& m, const double* x, double* y, std::size_t workers) {
  const RowPartition part = even_row_partition(m.nr_rows, std::max<std::size_t>(workers, 1));
  const auto& b = part.boundaries;
  for_each_part(part.workers(), workers, [&](std::size_t k) { ell_rows(m, x, y, b[k], b[k + 1]); });
}

}  // namespace

void spmv_coo(const CooMatrix& m, std::span<const double> x, std::span<double> y, std::size_t workers) {
  require_dims(m.nr_cols, x.size(), m.nr_rows, y.size());
  std::fill(y.begin(), y.end(), 0.0);
  coo_accumulate(m, x.data(), y.data(), std::max<std::size_t>(workers, 1));
}

DenseVector spmv_coo(const CooMatrix& m, std::span<const double> x, std::size_t workers) {
  DenseVector y(m.nr_rows);
  spmv_coo(m, x, y, workers);
  return y;
}

void spmv_ell(const EllMatrix& m, std::span<const double> x, std::span<double> y, std::size_t workers) {
  require_dims(m.nr_cols, x.size(), m.nr_rows, y.size());
  ell_multiply(m, x.data(), y.data(), workers);
}

DenseVector spmv_ell(const EllMatrix& m, std::span<const double> x, std::size_t workers) {
  DenseVector y(m.nr_rows);
  spmv_ell(m, x, y, workers);
  return y;
}

void spmv_hyb(const HybMatrix& m, std::span<const double> x, std::span<double> y, std::size_t workers) {
  require_dims(m.ell_part.nr_cols, x.size(), m.ell_part.nr_rows, y.size());
  ell_multiply(m.ell_part, x.data(), y.data(), workers);
  coo_accumulate(m.coo_part, x.data(), y.data(), std::max<std::size_t>(workers, 1));
}

DenseVector spmv_hyb(const HybMatrix& m, std::span<const double> x, std::size_t workers) {
  DenseVector y(m.ell_part.nr_rows);
  spmv_hyb(m, x, y, workers);
  return y;
}

Agreement check_agreement(const CsrMatrix& m, std::span<const double> x, std::span<const double> y,
                          std::span<const double> ref, double eps) {
  require_dims(m.nr_cols, x.size(), m.nr_rows, y.size());
  require_dims(m.nr_cols, x.size(), m.nr_rows, ref.size());
  Agreement a;
  for (std::size_t r = 0; r < m.nr_rows; ++r) {
    double scale = 0.0;
    for (index_t j = m.row_ptr[r]; j < m.row_ptr[r + 1]; ++j) {
      scale += std::abs(m.values[j]) * std::abs(x[m.col_idx[j]]);
    }
    const double err = std::abs(y[r] - ref[r]);
    if (!(err <= eps * scale + 1e-300)) a.ok = false;  // also catches NaN
    const double scaled = scale > 0.0 ? err / scale : (err > 0.0 ? INFINITY : 0.0);
    if (!(scaled <= a.max_scaled_error)) {
      a.max_scaled_error = std::isnan(scaled) ? INFINITY : scaled;
      a.worst_row = r;
    }
  }
  return a;
}

}  // namespace spmvprobe
