#pragma once

// Double-precision SpMV, y = A * x, for every storage format. Parallel kernels
// split rows statically over the workers and write disjoint slices of y;
// summation order within a worker is fixed, so a given partition always
// produces bit-identical output.

#include <cstddef>
#include <span>
#include <vector>

#include "spmvprobe/sparse_core.hpp"

namespace spmvprobe {

using DenseVector = std::vector<double>;

// One contiguous row range [boundaries[k], boundaries[k+1]) per worker.
struct RowPartition {
  std::vector<std::size_t> boundaries;

  std::size_t workers() const noexcept { return boundaries.empty() ? 0 : boundaries.size() - 1; }
};

bool is_valid_partition(const RowPartition& part, std::size_t nr_rows);

// Equal row counts per worker.
RowPartition even_row_partition(std::size_t nr_rows, std::size_t workers);

// Boundary k is the first row whose prefix nnz reaches k * nnz / workers, so
// each worker's nnz is within one row length of the mean.
RowPartition balanced_row_partition(const CsrMatrix& m, std::size_t workers);

// Compensated (error-free transformation) dot product per row.
DenseVector spmv_reference(const CsrMatrix& m, std::span<const double> x);

// Serial when part is null, otherwise one worker per range.
void spmv_csr(const CsrMatrix& m, std::span<const double> x, std::span<double> y,
              const RowPartition* part = nullptr);
DenseVector spmv_csr(const CsrMatrix& m, std::span<const double> x,
                     const RowPartition* part = nullptr);

DenseVector spmv_csr_balanced(const CsrMatrix& m, std::span<const double> x, std::size_t workers);

// nnz chunks snapped forward to row starts; a row never straddles workers.
std::vector<std::size_t> coo_chunks(const CooMatrix& m, std::size_t workers);

void spmv_coo(const CooMatrix& m, std::span<const double> x, std::span<double> y,
              std::size_t workers = 1);
DenseVector spmv_coo(const CooMatrix& m, std::span<const double> x, std::size_t workers = 1);

void spmv_ell(const EllMatrix& m, std::span<const double> x, std::span<double> y,
              std::size_t workers = 1);
DenseVector spmv_ell(const EllMatrix& m, std::span<const double> x, std::size_t workers = 1);

void spmv_hyb(const HybMatrix& m, std::span<const double> x, std::span<double> y,
              std::size_t workers = 1);
DenseVector spmv_hyb(const HybMatrix& m, std::span<const double> x, std::size_t workers = 1);

struct Agreement {
  bool ok = true;
  double max_scaled_error = 0.0;  // max_i |y_i - ref_i| / sum_j |a_ij x_j|
  std::size_t worst_row = 0;
};

// Componentwise check |y_i - ref_i| <= eps * sum_j |a_ij||x_j| + 1e-300.
Agreement check_agreement(const CsrMatrix& m, std::span<const double> x,
                          std::span<const double> y, std::span<const double> ref,
                          double eps = 1e-10);

}  // namespace spmvprobe
