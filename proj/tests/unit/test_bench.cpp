#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "spmvprobe/bench.hpp"
#include "spmvprobe/error.hpp"
#include "spmvprobe/generator.hpp"

using namespace spmvprobe;

namespace {

CsrMatrix small_generated() {
  GenParams p;
  p.nr_rows = p.nr_cols = 2000;
  p.avg_nz_row = 10;
  p.skew_coef = 20;
  p.bw_scaled = 0.3;
  p.cross_row_sim = 0.5;
  p.avg_num_neigh = 0.5;
  p.seed = 3;
  return generate(p);
}

BenchConfig quick() {
  BenchConfig cfg;
  cfg.iterations = 4;
  cfg.repeats = 3;
  return cfg;
}

}  // namespace

TEST(Gflops, Formula) {
  EXPECT_DOUBLE_EQ(gflops_from(1000000, 1e-3), 2.0);
}

TEST(Formats, ParseNames) {
  EXPECT_EQ(parse_formats("csr,csr-balanced,coo,ell,hyb").size(), 5u);
  EXPECT_EQ(parse_formats("hyb,csr,hyb"), (std::vector<Format>{Format::hyb, Format::csr}));
  for (Format f : kAllFormats) EXPECT_EQ(parse_format(to_string(f)), f);
  EXPECT_THROW(parse_formats("csr,dia"), Error);
  EXPECT_THROW(parse_formats(""), Error);
}

TEST(TimeSpmv, ResultInvariantsForEveryFormat) {
  const CsrMatrix m = small_generated();
  const DenseVector x = make_input_vector(m.nr_cols, 3);
  for (Format f : kAllFormats) {
    for (std::size_t w : {1, 2}) {
      BenchConfig cfg = quick();
      cfg.workers = w;
      const BenchResult r = time_spmv(prepare_kernel(m, f, w), m, x, cfg, "gen");
      EXPECT_EQ(r.format, f);
      EXPECT_EQ(r.iterations, 4u);
      EXPECT_EQ(r.repeats, 3u);
      EXPECT_EQ(r.nnz, m.nnz());
      EXPECT_EQ(r.workers, w);
      EXPECT_LE(r.min_seconds_per_iter, r.mean_seconds_per_iter);
      EXPECT_LE(r.mean_seconds_per_iter, r.max_seconds_per_iter);
      EXPECT_GT(r.min_seconds_per_iter, 0.0);
      EXPECT_EQ(r.gflops, gflops_from(r.nnz, r.mean_seconds_per_iter));
    }
  }
}

TEST(TimeSpmv, FaultyKernelIsRejected) {
  const CsrMatrix m = small_generated();
  const DenseVector x = make_input_vector(m.nr_cols, 3);
  PreparedKernel k = prepare_kernel(m, Format::csr, 1);
  auto good = k.run;
  k.run = [good](std::span<const double> xs, std::span<double> y) {
    good(xs, y);
    y[0] += 1.0;
  };
  try {
    time_spmv(k, m, x, quick());
    FAIL() << "expected correctness-failure";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::correctness_failure);
  }
}

TEST(TimeSpmv, DimensionMismatch) {
  const CsrMatrix m = small_generated();
  const DenseVector x(m.nr_cols + 1, 1.0);
  EXPECT_THROW(time_spmv(prepare_kernel(m, Format::csr, 1), m, x, quick()), Error);
}

TEST(InputVector, SeededAndInHalfOpenUnitInterval) {
  const DenseVector a = make_input_vector(1000, 9);
  EXPECT_EQ(a, make_input_vector(1000, 9));
  EXPECT_NE(a, make_input_vector(1000, 10));
  for (double v : a) {
    EXPECT_GT(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(PrepareKernel, CapacityCeiling) {
  const CsrMatrix m = small_generated();
  ConversionLimits lim;
  lim.capacity_bytes = 1000;
  EXPECT_THROW(prepare_kernel(m, Format::ell, 1, lim), Error);
  EXPECT_NO_THROW(prepare_kernel(m, Format::csr, 1, lim));
}

TEST(Roofline, WorkedExample) {
  MachineProfile p;
  p.measured_bw_bytes_per_s = 50e9;
  const std::size_t nnz = 100000000, rows = 10000000;
  EXPECT_EQ(csr_footprint_bytes(rows, nnz), 1240000004u);
  const double bound = roofline_bound(rows, rows, nnz, p);
  EXPECT_NEAR(bound, 8.06, 0.005);
  MachineProfile doubled = p;
  doubled.measured_bw_bytes_per_s *= 2;
  EXPECT_DOUBLE_EQ(roofline_bound(rows, rows, nnz, doubled), 2 * bound);
  EXPECT_LT(roofline_bound(rows, rows, nnz, p, true), bound);
  EXPECT_LT(roofline_bound(testing_helpers::example3x3(), p, true), roofline_bound(testing_helpers::example3x3(), p));
}

TEST(Bandwidth, RejectsArraysBelowFourTimesLlc) {
  BandwidthConfig cfg;
  cfg.llc_bytes = 1 << 20;
  cfg.array_length = 1000;
  try {
    measure_bandwidth(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_argument);
  }
}

TEST(Bandwidth, CountsTwentyFourBytesPerElement) {
  BandwidthConfig cfg;
  cfg.llc_bytes = 1 << 20;
  cfg.trials = 3;
  cfg.label = "unit";
  const MachineProfile p = measure_bandwidth(cfg);
  EXPECT_GT(p.measured_bw_bytes_per_s, 0.0);
  EXPECT_EQ(p.llc_bytes, 1u << 20);
  EXPECT_EQ(p.label, "unit");
}

TEST(Bandwidth, RepeatedMeasurementsAreStable) {
  BandwidthConfig cfg;  // detected LLC, 4x arrays, best of 10
  const double a = measure_bandwidth(cfg).measured_bw_bytes_per_s;
  const double b = measure_bandwidth(cfg).measured_bw_bytes_per_s;
  EXPECT_LT(std::abs(a - b) / std::max(a, b), 0.10) << a << " vs " << b;
}

TEST(Profile, SaveLoadRoundTrip) {
  const auto dir = testing_helpers::scratch_dir("profile");
  MachineProfile p;
  p.measured_bw_bytes_per_s = 12345678901.25;
  p.workers = 3;
  p.label = "box one";
  p.llc_bytes = 110100480;
  save_profile(p, (dir / "p.txt").string());
  const MachineProfile q = load_profile((dir / "p.txt").string());
  EXPECT_EQ(q.measured_bw_bytes_per_s, p.measured_bw_bytes_per_s);
  EXPECT_EQ(q.workers, 3u);
  EXPECT_EQ(q.label, "box one");
  EXPECT_EQ(q.llc_bytes, p.llc_bytes);
  EXPECT_THROW(load_profile((dir / "missing.txt").string()), Error);
}

TEST(Profile, DetectsSomeCache) {
  EXPECT_GT(detect_llc_bytes(), 0u);
}
