#pragma once

// Results CSV: one row per (matrix, format), fixed header, append-only.
// Rows of a non-ok status leave every timing column empty; matrices without
// generator parameters (real inputs) leave the request columns empty.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spmvprobe/bench.hpp"
#include "spmvprobe/features.hpp"
#include "spmvprobe/generator.hpp"

namespace spmvprobe {

enum class RecordStatus { ok, infeasible, capacity_exceeded, correctness_failure };

std::string_view to_string(RecordStatus s);
RecordStatus parse_status(std::string_view s);

struct RowTiming {
  std::size_t workers = 1;
  std::size_t iterations = 0;
  std::size_t repeats = 0;
  double mean_seconds_per_iter = 0.0;
  double gflops = 0.0;
  std::optional<double> roofline_gflops;

  bool operator==(const RowTiming&) const = default;
};

struct ResultsRow {
  std::string matrix_id;
  std::optional<GenParams> params;
  std::optional<FeatureVector> measured;
  Format format = Format::csr;
  RecordStatus status = RecordStatus::ok;
  std::optional<RowTiming> timing;  // present iff status == ok

  bool operator==(const ResultsRow&) const = default;
};

const std::vector<std::string>& results_columns();
std::string results_header();

std::string format_row(const ResultsRow& row);
// Throws Error{parse_error} naming the line.
ResultsRow parse_row(std::string_view line, std::size_t lineno = 0);

// Reads every complete row; a trailing line without newline (interrupted
// write) is ignored. A missing file yields no rows.
std::vector<ResultsRow> read_results(const std::string& path);

// Appends whole rows. Creates the file with a header, verifies the header of
// an existing file, and drops an unterminated tail left by an interrupted run.
class ResultsWriter {
 public:
  explicit ResultsWriter(std::string path);
  void append(const std::vector<ResultsRow>& rows);
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace spmvprobe
