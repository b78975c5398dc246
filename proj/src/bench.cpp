#include "spmvprobe/bench.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numeric>
#include <sstream>

#include "spmvprobe/error.hpp"
#include "spmvprobe/random.hpp"

namespace spmvprobe {

std::string_view to_string(Format f) {
  switch (f) {
    case Format::csr: return "csr";
    case Format::csr_balanced: return "csr-balanced";
    case Format::coo: return "coo";
    case Format::ell: return "ell";
    case Format::hyb: return "hyb";
  }
  return "unknown";
}

Format parse_format(std::string_view name) {
  for (Format f : kAllFormats) {
    if (to_string(f) == name) return f;
  }
  throw Error(ErrorKind::invalid_argument, "unknown format " + std::string(name));
}

std::vector<Format> parse_formats(std::string_view list) {
  std::vector<Format> out;
  while (!list.empty()) {
    const auto comma = list.find(',');
    const auto item = list.substr(0, comma);
    if (!item.empty()) {
      const Format f = parse_format(item);
      if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
    }
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  if (out.empty()) throw Error(ErrorKind::invalid_argument, "no formats given");
  return out;
}

double gflops_from(std::size_t nnz, double seconds_per_iter) {
  return 2.0 * static_cast<double>(nnz) / (seconds_per_iter * 1e9);
}

PreparedKernel prepare_kernel(const CsrMatrix& m, Format format, std::size_t workers,
                              const ConversionLimits& limits) {
  PreparedKernel k;
  k.format = format;
  k.nr_rows = m.nr_rows;
  k.nr_cols = m.nr_cols;
  k.nnz = m.nnz();
  workers = std::max<std::size_t>(workers, 1);
  switch (format) {
    case Format::csr: {
      // `m` must outlive the kernel; CSR is not copied.
      if (workers == 1) {
        k.run = [&m](std::span<const double> x, std::span<double> y) { spmv_csr(m, x, y); };
      } else {
        auto part = std::make_shared<RowPartition>(even_row_partition(m.nr_rows, workers));
        k.run = [&m, part](std::span<const double> x, std::span<double> y) { spmv_csr(m, x, y, part.get()); };
      }
      break;
    }
    case Format::csr_balanced: {
      auto part = std::make_shared<RowPartition>(balanced_row_partition(m, workers));
      k.run = [&m, part](std::span<const double> x, std::span<double> y) { spmv_csr(m, x, y, part.get()); };
      break;
    }
    case Format::coo: {
      auto coo = std::make_shared<CooMatrix>(csr_to_coo(m));
      k.run = [coo, workers](std::span<const double> x, std::span<double> y) { spmv_coo(*coo, x, y, workers); };
      break;
    }
    case Format::ell: {
      auto ell = std::make_shared<EllMatrix>(csr_to_ell(m, limits));
      k.run = [ell, workers](std::span<const double> x, std::span<double> y) { spmv_ell(*ell, x, y, workers); };
      break;
    }
    case Format::hyb: {
      auto hyb = std::make_shared<HybMatrix>(csr_to_hyb(m, std::nullopt, limits));
      k.run = [hyb, workers](std::span<const double> x, std::span<double> y) { spmv_hyb(*hyb, x, y, workers); };
      break;
    }
  }
  return k;
}

DenseVector make_input_vector(std::size_t n, std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0x78));
  DenseVector x(n);
  for (double& v : x) v = rng.uniform_open_closed();
  return x;
}

BenchResult time_spmv(const PreparedKernel& kernel, const CsrMatrix& reference_matrix,
                      std::span<const double> x, const BenchConfig& cfg, std::string matrix_id) {
  if (x.size() != kernel.nr_cols || reference_matrix.nr_cols != kernel.nr_cols ||
      reference_matrix.nr_rows != kernel.nr_rows) {
    throw Error(ErrorKind::dimension_mismatch, "matrix and vector dimensions disagree");
  }
  if (cfg.iterations == 0 || cfg.repeats == 0) {
    throw Error(ErrorKind::invalid_argument, "iterations and repeats must be positive");
  }
  using clock = std::chrono::steady_clock;
  DenseVector y(kernel.nr_rows);
  std::vector<double> per_iter;
  per_iter.reserve(cfg.repeats);
  for (std::size_t rep = 0; rep < cfg.repeats; ++rep) {
    std::fill(y.begin(), y.end(), 0.0);
    kernel.run(x, y);
    const auto t0 = clock::now();
    for (std::size_t it = 0; it < cfg.iterations; ++it) kernel.run(x, y);
    const auto t1 = clock::now();
    per_iter.push_back(std::chrono::duration<double>(t1 - t0).count() /
                       static_cast<double>(cfg.iterations));
  }

  const DenseVector ref = spmv_reference(reference_matrix, x);
  const Agreement agree = check_agreement(reference_matrix, x, y, ref, cfg.tolerance);
  if (!agree.ok) {
    throw Error(ErrorKind::correctness_failure,
                std::string(to_string(kernel.format)) + " result differs from reference at row " +
                    std::to_string(agree.worst_row) + " (scaled error " +
                    std::to_string(agree.max_scaled_error) + ")");
  }

  BenchResult r;
  r.matrix_id = std::move(matrix_id);
  r.format = kernel.format;
  r.iterations = cfg.iterations;
  r.repeats = cfg.repeats;
  r.workers = cfg.workers;
  r.nnz = kernel.nnz;
  r.mean_seconds_per_iter =
      std::accumulate(per_iter.begin(), per_iter.end(), 0.0) / static_cast<double>(per_iter.size());
  r.min_seconds_per_iter = *std::min_element(per_iter.begin(), per_iter.end());
  r.max_seconds_per_iter = *std::max_element(per_iter.begin(), per_iter.end());
  // The mean of a few doubles can round outside [min, max] by one ulp.
  r.mean_seconds_per_iter = std::clamp(r.mean_seconds_per_iter, r.min_seconds_per_iter, r.max_seconds_per_iter);
  r.gflops = gflops_from(r.nnz, r.mean_seconds_per_iter);
  return r;
}

void save_profile(const MachineProfile& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io_error, "cannot write " + path);
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), p.measured_bw_bytes_per_s);
  out << "measured_bw_bytes_per_s=" << std::string(buf, res.ptr) << '\n'
      << "workers=" << p.workers << '\n'
      << "llc_bytes=" << p.llc_bytes << '\n'
      << "label=" << p.label << '\n';
  if (!out) throw Error(ErrorKind::io_error, "write failed for " + path);
}

MachineProfile load_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_error, "cannot read profile " + path);
  MachineProfile p;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, eq);
    const std::string val = line.substr(eq + 1);
    try {
      if (key == "measured_bw_bytes_per_s") p.measured_bw_bytes_per_s = std::stod(val);
      else if (key == "workers") p.workers = std::stoul(val);
      else if (key == "llc_bytes") p.llc_bytes = std::stoull(val);
      else if (key == "label") p.label = val;
    } catch (const std::exception&) {
      throw Error(ErrorKind::parse_error, "bad value for " + key + " in " + path);
    }
  }
  if (!(p.measured_bw_bytes_per_s > 0.0)) {
    throw Error(ErrorKind::parse_error, "profile " + path + " has no positive bandwidth");
  }
  return p;
}

std::uint64_t detect_llc_bytes() {
  namespace fs = std::filesystem;
  std::uint64_t best = 0;
  int best_level = -1;
  std::error_code ec;
  const fs::path base = "/sys/devices/system/cpu/cpu0/cache";
  if (fs::exists(base, ec)) {
    for (const auto& entry : fs::directory_iterator(base, ec)) {
      if (entry.path().filename().string().rfind("index", 0) != 0) continue;
      std::ifstream level_in(entry.path() / "level");
      std::ifstream size_in(entry.path() / "size");
      int level = 0;
      std::string size;
      if (!(level_in >> level) || !(size_in >> size) || size.empty()) continue;
      std::uint64_t bytes = std::strtoull(size.c_str(), nullptr, 10);
      if (size.back() == 'K') bytes <<= 10;
      else if (size.back() == 'M') bytes <<= 20;
      if (level > best_level || (level == best_level && bytes > best)) {
        best_level = level;
        best = bytes;
      }
    }
  }
  return best > 0 ? best : std::uint64_t{32} << 20;
}

MachineProfile measure_bandwidth(const BandwidthConfig& cfg) {
  const std::uint64_t llc = cfg.llc_bytes > 0 ? cfg.llc_bytes : detect_llc_bytes();
  const std::size_t min_length = static_cast<std::size_t>((4 * llc + sizeof(double) - 1) / sizeof(double));
  const std::size_t n = cfg.array_length > 0 ? cfg.array_length : min_length;
  if (n < min_length) {
    throw Error(ErrorKind::invalid_argument,
                "triad arrays of " + std::to_string(n) + " doubles are smaller than 4 x LLC (" +
                    std::to_string(min_length) + ")");
  }
  if (cfg.trials == 0) throw Error(ErrorKind::invalid_argument, "trials must be positive");
  const int threads = static_cast<int>(std::max<std::size_t>(cfg.workers, 1));

  std::vector<double> a(n), b(n), c(n);
  // Parallel first touch so pages land near the threads that stream them.
#pragma omp parallel for num_threads(threads) schedule(static)
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = 0.0;
    b[i] = 1.0;
    c[i] = 2.0;
  }
  const double s = 3.0;
  double best = 1e300;
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const auto t0 = std::chrono::steady_clock::now();
#pragma omp parallel for num_threads(threads) schedule(static)
    for (std::size_t i = 0; i < n; ++i) a[i] = b[i] + s * c[i];
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  volatile double sink = a[n / 2];
  (void)sink;

  MachineProfile p;
  p.measured_bw_bytes_per_s = 24.0 * static_cast<double>(n) / best;
  p.workers = static_cast<std::size_t>(threads);
  p.llc_bytes = llc;
  p.label = cfg.label;
  return p;
}

double roofline_bound(std::size_t nr_rows, std::size_t nr_cols, std::size_t nnz,
                      const MachineProfile& profile, bool include_vectors) {
  double traffic = static_cast<double>(csr_footprint_bytes(nr_rows, nnz));
  if (include_vectors) traffic += 8.0 * static_cast<double>(nr_rows + nr_cols);
  if (!(traffic > 0.0)) throw Error(ErrorKind::invalid_argument, "empty matrix has no roofline");
  return profile.measured_bw_bytes_per_s * (2.0 * static_cast<double>(nnz) / traffic) / 1e9;
}

double roofline_bound(const CsrMatrix& m, const MachineProfile& profile, bool include_vectors) {
  return roofline_bound(m.nr_rows, m.nr_cols, m.nnz(), profile, include_vectors);
}

}  // namespace spmvprobe
