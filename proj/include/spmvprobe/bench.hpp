#pragma once

// Benchmark protocol: per repeat, one untimed warm-up SpMV and then a single
// monotonic-clock measurement around `iterations` back-to-back calls. The
// reported time per iteration is the arithmetic mean over repeats. The final
// y is checked against the compensated reference before any timing is
// reported.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spmvprobe/kernels.hpp"
#include "spmvprobe/sparse_core.hpp"

namespace spmvprobe {

// Enum order is the tie-break order for best-format selection.
enum class Format { csr, csr_balanced, coo, ell, hyb };

inline constexpr Format kAllFormats[] = {Format::csr, Format::csr_balanced, Format::coo,
                                         Format::ell, Format::hyb};

std::string_view to_string(Format f);
Format parse_format(std::string_view name);
std::vector<Format> parse_formats(std::string_view comma_list);

struct BenchResult {
  std::string matrix_id;
  Format format = Format::csr;
  std::size_t iterations = 0;
  std::size_t repeats = 0;
  double mean_seconds_per_iter = 0.0;
  double min_seconds_per_iter = 0.0;
  double max_seconds_per_iter = 0.0;
  double gflops = 0.0;
  std::size_t workers = 1;
  std::size_t nnz = 0;
};

// 2 * nnz flops per SpMV.
double gflops_from(std::size_t nnz, double seconds_per_iter);

struct BenchConfig {
  std::size_t iterations = 128;
  std::size_t repeats = 5;
  std::size_t workers = 1;
  ConversionLimits limits;
  double tolerance = 1e-10;
};

// A matrix converted to one format plus the callable computing y = A x.
struct PreparedKernel {
  Format format = Format::csr;
  std::size_t nr_rows = 0;
  std::size_t nr_cols = 0;
  std::size_t nnz = 0;
  std::function<void(std::span<const double>, std::span<double>)> run;
};

// Throws Error{capacity_exceeded} when ELL/HYB padding exceeds the ceiling.
PreparedKernel prepare_kernel(const CsrMatrix& m, Format format, std::size_t workers,
                              const ConversionLimits& limits = {});

// x values uniform in (0, 1], seeded.
DenseVector make_input_vector(std::size_t n, std::uint64_t seed);

// Throws Error{correctness_failure} if the kernel disagrees with the reference.
BenchResult time_spmv(const PreparedKernel& kernel, const CsrMatrix& reference_matrix,
                      std::span<const double> x, const BenchConfig& cfg,
                      std::string matrix_id = {});

struct MachineProfile {
  double measured_bw_bytes_per_s = 0.0;
  std::size_t workers = 1;
  std::string label;
  std::uint64_t llc_bytes = 0;
};

void save_profile(const MachineProfile& p, const std::string& path);
MachineProfile load_profile(const std::string& path);

// Largest cache reported by sysfs; 32 MiB when unavailable.
std::uint64_t detect_llc_bytes();

struct BandwidthConfig {
  std::size_t array_length = 0;  // 0: 4 x LLC bytes per array
  std::size_t trials = 10;
  std::size_t workers = 1;
  std::uint64_t llc_bytes = 0;   // 0: detect
  std::string label;
};

// Triad a[i] = b[i] + s * c[i]; bytes/s = 24 * length / best trial time.
MachineProfile measure_bandwidth(const BandwidthConfig& cfg);

// Attainable GFLOP/s = bandwidth * 2 nnz / traffic, with traffic the CSR
// footprint plus, optionally, one pass over x and y.
double roofline_bound(std::size_t nr_rows, std::size_t nr_cols, std::size_t nnz,
                      const MachineProfile& profile, bool include_vectors = false);
double roofline_bound(const CsrMatrix& m, const MachineProfile& profile,
                      bool include_vectors = false);

}  // namespace spmvprobe
