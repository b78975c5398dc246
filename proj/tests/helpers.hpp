#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

#include "spmvprobe/sparse_core.hpp"

namespace testing_helpers {

using spmvprobe::CsrMatrix;
using spmvprobe::index_t;

// Rows given as sorted column lists; values count up from 1.
inline CsrMatrix csr_from_rows(std::size_t nr_cols, const std::vector<std::vector<index_t>>& rows) {
  CsrMatrix m;
  m.nr_rows = rows.size();
  m.nr_cols = nr_cols;
  double v = 1.0;
  for (const auto& r : rows) {
    for (index_t c : r) {
      m.col_idx.push_back(c);
      m.values.push_back(v);
      v += 1.0;
    }
    m.row_ptr.push_back(static_cast<index_t>(m.col_idx.size()));
  }
  return m;
}

inline CsrMatrix identity(std::size_t n) {
  CsrMatrix m;
  m.nr_rows = n;
  m.nr_cols = n;
  for (std::size_t i = 0; i < n; ++i) {
    m.col_idx.push_back(static_cast<index_t>(i));
    m.values.push_back(1.0);
    m.row_ptr.push_back(static_cast<index_t>(i + 1));
  }
  return m;
}

// A = [[1,2,0],[0,3,0],[4,0,5]].
inline CsrMatrix example3x3() {
  CsrMatrix m;
  m.nr_rows = 3;
  m.nr_cols = 3;
  m.row_ptr = {0, 2, 3, 5};
  m.col_idx = {0, 1, 1, 0, 2};
  m.values = {1, 2, 3, 4, 5};
  return m;
}

inline CsrMatrix zero_matrix(std::size_t rows, std::size_t cols) {
  CsrMatrix m;
  m.nr_rows = rows;
  m.nr_cols = cols;
  m.row_ptr.assign(rows + 1, 0);
  return m;
}

// Fresh per-test scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("spmvprobe_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing_helpers
