#pragma once

// Brute-force oracles for the unit and acceptance tests. Everything here
// works on a dense occupancy grid or plain sorting and shares no code with
// the library beyond the CsrMatrix struct.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "spmvprobe/sparse_core.hpp"

namespace oracle {

using spmvprobe::CsrMatrix;
using spmvprobe::index_t;

struct Dense {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;        // row-major values
  std::vector<char> present;    // explicit entries, zero values included

  bool at(std::size_t r, std::size_t c) const { return present[r * cols + c] != 0; }
  double value(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
};

inline Dense to_dense(const CsrMatrix& m) {
  Dense d{m.nr_rows, m.nr_cols, std::vector<double>(m.nr_rows * m.nr_cols, 0.0),
          std::vector<char>(m.nr_rows * m.nr_cols, 0)};
  for (std::size_t r = 0; r < m.nr_rows; ++r) {
    for (index_t j = m.row_ptr[r]; j < m.row_ptr[r + 1]; ++j) {
      d.a[r * d.cols + m.col_idx[j]] = m.values[j];
      d.present[r * d.cols + m.col_idx[j]] = 1;
    }
  }
  return d;
}

inline CsrMatrix from_dense(const Dense& d) {
  CsrMatrix m;
  m.nr_rows = d.rows;
  m.nr_cols = d.cols;
  m.row_ptr.assign(1, 0);
  for (std::size_t r = 0; r < d.rows; ++r) {
    for (std::size_t c = 0; c < d.cols; ++c) {
      if (d.at(r, c)) {
        m.col_idx.push_back(static_cast<index_t>(c));
        m.values.push_back(d.value(r, c));
      }
    }
    m.row_ptr.push_back(static_cast<index_t>(m.col_idx.size()));
  }
  return m;
}

// Random sparse matrix with a mix of scattered entries, horizontal runs and
// vertically repeated columns, so every feature takes non-trivial values.
inline CsrMatrix random_matrix(std::mt19937_64& gen, std::size_t max_dim = 120, std::size_t max_nnz = 10000) {
  std::uniform_int_distribution<std::size_t> dim(1, max_dim);
  Dense d;
  d.rows = dim(gen);
  d.cols = dim(gen);
  d.a.assign(d.rows * d.cols, 0.0);
  d.present.assign(d.rows * d.cols, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  const double density = std::pow(unit(gen), 2.0);
  const double run_p = unit(gen);
  const double copy_p = unit(gen);
  std::size_t nnz = 0;
  for (std::size_t r = 0; r < d.rows && nnz < max_nnz; ++r) {
    if (unit(gen) < 0.1) continue;  // empty row
    for (std::size_t c = 0; c < d.cols && nnz < max_nnz; ++c) {
      bool on = unit(gen) < density * 0.3;
      if (!on && c > 0 && d.at(r, c - 1) && unit(gen) < run_p * 0.8) on = true;
      if (!on && r > 0 && d.at(r - 1, c) && unit(gen) < copy_p * 0.5) on = true;
      if (on) {
        d.present[r * d.cols + c] = 1;
        d.a[r * d.cols + c] = val(gen);
        ++nnz;
      }
    }
  }
  return from_dense(d);
}

inline std::optional<double> skew(const Dense& d) {
  if (d.rows == 0) return std::nullopt;
  std::size_t total = 0, longest = 0;
  for (std::size_t r = 0; r < d.rows; ++r) {
    std::size_t len = 0;
    for (std::size_t c = 0; c < d.cols; ++c) len += d.at(r, c) ? 1 : 0;
    total += len;
    longest = std::max(longest, len);
  }
  if (total == 0) return std::nullopt;
  const double avg = static_cast<double>(total) / static_cast<double>(d.rows);
  return (static_cast<double>(longest) - avg) / avg;
}

// Pairwise scan: for every element, count every same-row element at |dc| = 1.
inline std::optional<double> avg_num_neighbors(const Dense& d) {
  std::size_t nnz = 0, neighbors = 0;
  for (std::size_t r = 0; r < d.rows; ++r) {
    for (std::size_t c = 0; c < d.cols; ++c) {
      if (!d.at(r, c)) continue;
      ++nnz;
      for (std::size_t c2 = 0; c2 < d.cols; ++c2) {
        if (d.at(r, c2) && (c2 + 1 == c || c + 1 == c2)) ++neighbors;
      }
    }
  }
  if (nnz == 0) return std::nullopt;
  return static_cast<double>(neighbors) / static_cast<double>(nnz);
}

// Scans every (element, next-row element) pair.
inline std::optional<double> cross_row_similarity(const Dense& d) {
  std::size_t nnz = 0;
  for (char p : d.present) nnz += p ? 1 : 0;
  if (nnz == 0) return std::nullopt;
  double sum = 0.0;
  std::size_t rows = 0;
  for (std::size_t r = 0; r + 1 < d.rows; ++r) {
    std::size_t len = 0, matched = 0;
    for (std::size_t c = 0; c < d.cols; ++c) {
      if (!d.at(r, c)) continue;
      ++len;
      bool hit = false;
      for (std::size_t c2 = 0; c2 < d.cols; ++c2) {
        const std::size_t dist = c2 > c ? c2 - c : c - c2;
        if (d.at(r + 1, c2) && dist <= 1) hit = true;
      }
      matched += hit ? 1 : 0;
    }
    if (len == 0) continue;
    sum += static_cast<double>(matched) / static_cast<double>(len);
    ++rows;
  }
  if (rows == 0) return std::nullopt;
  return sum / static_cast<double>(rows);
}

inline std::optional<double> bandwidth_scaled(const Dense& d) {
  double sum = 0.0;
  std::size_t rows = 0;
  for (std::size_t r = 0; r < d.rows; ++r) {
    std::optional<std::size_t> lo, hi;
    for (std::size_t c = 0; c < d.cols; ++c) {
      if (!d.at(r, c)) continue;
      if (!lo) lo = c;
      hi = c;
    }
    if (!lo) continue;
    sum += static_cast<double>(*hi - *lo + 1) / static_cast<double>(d.cols);
    ++rows;
  }
  if (rows == 0) return std::nullopt;
  return sum / static_cast<double>(rows);
}

// Dense y = A x accumulated in long double.
inline std::vector<long double> spmv(const Dense& d, const std::vector<double>& x) {
  std::vector<long double> y(d.rows, 0.0L);
  for (std::size_t r = 0; r < d.rows; ++r) {
    for (std::size_t c = 0; c < d.cols; ++c) {
      y[r] += static_cast<long double>(d.value(r, c)) * static_cast<long double>(x[c]);
    }
  }
  return y;
}

// Row scale sum_j |a_rj||x_j| for the componentwise tolerance.
inline std::vector<double> row_scale(const Dense& d, const std::vector<double>& x) {
  std::vector<double> s(d.rows, 0.0);
  for (std::size_t r = 0; r < d.rows; ++r) {
    for (std::size_t c = 0; c < d.cols; ++c) s[r] += std::abs(d.value(r, c)) * std::abs(x[c]);
  }
  return s;
}

struct Box {
  double min, q1, median, q3, max, lower_whisker, upper_whisker;
};

// Sort-and-index quartiles in the 1-based form j = floor(1 + (n-1)p),
// g = frac; whiskers by scanning every sample against the fences.
inline Box boxplot(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  auto q = [&](double p) {
    const double h = 1.0 + static_cast<double>(n - 1) * p;
    const auto j = static_cast<std::size_t>(std::floor(h));
    const double g = h - static_cast<double>(j);
    const double lo = v[j - 1];
    const double hi = j < n ? v[j] : v[j - 1];
    return lo + g * (hi - lo);
  };
  Box b{v.front(), q(0.25), q(0.5), q(0.75), v.back(), 0, 0};
  const double iqr = b.q3 - b.q1;
  double lw = INFINITY, uw = -INFINITY;
  for (double x : v) {
    if (x >= b.q1 - 1.5 * iqr) lw = std::min(lw, x);
    if (x <= b.q3 + 1.5 * iqr) uw = std::max(uw, x);
  }
  b.lower_whisker = lw;
  b.upper_whisker = uw;
  return b;
}

}  // namespace oracle
