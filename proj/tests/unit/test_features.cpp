#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "oracles.hpp"
#include "spmvprobe/error.hpp"
#include "spmvprobe/features.hpp"

using namespace spmvprobe;
using testing_helpers::csr_from_rows;
using testing_helpers::identity;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::invalid_argument;
}

}  // namespace

TEST(SkewCoefficient, EqualRowsGiveZero) {
  const std::vector<std::size_t> lens(7, 10);
  EXPECT_EQ(skew_coefficient(lens), 0.0);
}

TEST(SkewCoefficient, TwiceTheAverageGivesOne) {
  const std::vector<std::size_t> lens{20, 5, 5, 10};
  EXPECT_DOUBLE_EQ(skew_coefficient(lens), 1.0);
}

TEST(SkewCoefficient, SingleLongRow) {
  const std::vector<std::size_t> lens{1, 1, 1, 1, 110};
  EXPECT_NEAR(skew_coefficient(lens), (110 - 22.8) / 22.8, 1e-12);
  EXPECT_NEAR(skew_coefficient(lens), 3.8246, 1e-4);
}

TEST(SkewCoefficient, EmptyIsAnError) {
  EXPECT_EQ(kind_of([] { skew_coefficient(std::vector<std::size_t>{}); }), ErrorKind::undefined_for_empty);
  EXPECT_EQ(kind_of([] { skew_coefficient(std::vector<std::size_t>{0, 0}); }), ErrorKind::undefined_for_empty);
}

TEST(SkewCoefficient, PermutationInvariant) {
  std::vector<std::size_t> lens{3, 9, 1, 4, 4, 0, 12};
  const double s = skew_coefficient(lens);
  std::sort(lens.begin(), lens.end());
  do {
    EXPECT_EQ(skew_coefficient(lens), s);
  } while (std::next_permutation(lens.begin(), lens.end()));
}

TEST(AvgNumNeighbors, DiagonalHasNone) {
  EXPECT_EQ(avg_num_neighbors(identity(50)), 0.0);
}

TEST(AvgNumNeighbors, DenseRow) {
  EXPECT_DOUBLE_EQ(avg_num_neighbors(csr_from_rows(5, {{0, 1, 2, 3, 4}})), 1.6);
}

TEST(AvgNumNeighbors, ThreeRowExample) {
  EXPECT_DOUBLE_EQ(avg_num_neighbors(csr_from_rows(3, {{0, 1}, {1}, {0, 2}})), 0.4);
}

TEST(AvgNumNeighbors, EmptyIsAnError) {
  EXPECT_EQ(kind_of([] { avg_num_neighbors(testing_helpers::zero_matrix(3, 3)); }),
            ErrorKind::undefined_for_empty);
}

TEST(CrossRowSimilarity, IdenticalRows) {
  EXPECT_EQ(cross_row_similarity(csr_from_rows(8, {{1, 4, 6}, {1, 4, 6}})), 1.0);
}

TEST(CrossRowSimilarity, DiagonalIsFullySimilar) {
  EXPECT_EQ(cross_row_similarity(identity(40)), 1.0);
}

TEST(CrossRowSimilarity, OnlyRowsWithSuccessorCount) {
  EXPECT_DOUBLE_EQ(cross_row_similarity(csr_from_rows(6, {{0, 5}, {1}})), 0.5);
}

TEST(CrossRowSimilarity, EmptyRowsAreSkippedNotZero) {
  // Row 1 is empty; row 0 sees nothing below it, row 2 fully matches row 3.
  EXPECT_DOUBLE_EQ(cross_row_similarity(csr_from_rows(6, {{2}, {}, {3}, {4}})), 0.5);
}

TEST(CrossRowSimilarity, UndefinedCases) {
  EXPECT_EQ(kind_of([] { cross_row_similarity(testing_helpers::zero_matrix(3, 3)); }),
            ErrorKind::undefined_for_empty);
  EXPECT_EQ(kind_of([] { cross_row_similarity(csr_from_rows(3, {{0, 1}})); }), ErrorKind::undefined_for_empty);
}

TEST(BandwidthScaled, Cases) {
  EXPECT_DOUBLE_EQ(bandwidth_scaled(identity(25)), 1.0 / 25.0);
  EXPECT_DOUBLE_EQ(bandwidth_scaled(csr_from_rows(4, {{0, 1, 2, 3}, {0, 1, 2, 3}})), 1.0);
  EXPECT_DOUBLE_EQ(bandwidth_scaled(csr_from_rows(10, {{2, 7}})), 0.6);
}

TEST(ExtractFeatures, ThreeRowExample) {
  const FeatureVector f = extract_features(csr_from_rows(3, {{0, 1}, {1}, {0, 2}}));
  EXPECT_DOUBLE_EQ(f.mem_footprint_mb, 76.0 / 1048576.0);
  EXPECT_DOUBLE_EQ(f.avg_nz_row, 5.0 / 3.0);
  EXPECT_DOUBLE_EQ(f.skew_coeff, 0.2);
  EXPECT_DOUBLE_EQ(f.avg_num_neigh, 0.4);
  EXPECT_DOUBLE_EQ(f.cross_row_sim, 1.0);
  EXPECT_EQ(f.nnz, 5u);
}

TEST(ExtractFeatures, Identity100) {
  const FeatureVector f = extract_features(identity(100));
  EXPECT_EQ(f.avg_nz_row, 1.0);
  EXPECT_EQ(f.std_nz_row, 0.0);
  EXPECT_EQ(f.skew_coeff, 0.0);
  EXPECT_EQ(f.avg_num_neigh, 0.0);
  EXPECT_EQ(f.cross_row_sim, 1.0);
  EXPECT_DOUBLE_EQ(f.bw_scaled, 0.01);
}

TEST(ExtractFeatures, PopulationStd) {
  const FeatureVector f = extract_features(csr_from_rows(4, {{0}, {0, 1, 2}}));
  EXPECT_DOUBLE_EQ(f.std_nz_row, 1.0);
}

TEST(ExtractFeatures, RejectsInvalidAndEmpty) {
  CsrMatrix bad = testing_helpers::example3x3();
  bad.col_idx[0] = 7;
  EXPECT_EQ(kind_of([&] { extract_features(bad); }), ErrorKind::invalid_argument);
  EXPECT_EQ(kind_of([] { extract_features(testing_helpers::zero_matrix(2, 2)); }), ErrorKind::undefined_for_empty);
}

TEST(ExtractFeatures, MatchesBruteForceOracles) {
  std::mt19937_64 gen(21);
  for (int i = 0; i < 200; ++i) {
    const CsrMatrix m = oracle::random_matrix(gen, 80, 4000);
    const oracle::Dense d = oracle::to_dense(m);
    const auto want_neigh = oracle::avg_num_neighbors(d);
    if (!want_neigh) continue;
    EXPECT_EQ(avg_num_neighbors(m), *want_neigh);
    std::vector<std::size_t> lens(m.nr_rows);
    for (std::size_t r = 0; r < m.nr_rows; ++r) lens[r] = m.row_length(r);
    EXPECT_EQ(skew_coefficient(lens), *oracle::skew(d));
    EXPECT_EQ(bandwidth_scaled(m), *oracle::bandwidth_scaled(d));
    const auto crs = oracle::cross_row_similarity(d);
    if (!crs) {
      EXPECT_THROW(cross_row_similarity(m), Error);
      continue;
    }
    EXPECT_EQ(cross_row_similarity(m), *crs);
    const FeatureVector f = extract_features(m);
    EXPECT_GE(f.avg_num_neigh, 0.0);
    EXPECT_LE(f.avg_num_neigh, 2.0);
    EXPECT_GE(f.cross_row_sim, 0.0);
    EXPECT_LE(f.cross_row_sim, 1.0);
    EXPECT_EQ(extract_features(m), f);
  }
}
