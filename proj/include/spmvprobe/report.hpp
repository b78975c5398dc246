#pragma once

// Per-feature boxplot reports of best-format performance.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spmvprobe/generator.hpp"
#include "spmvprobe/validation.hpp"

namespace spmvprobe {

struct BoxplotStats {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double lower_whisker = 0.0;
  double upper_whisker = 0.0;
  std::size_t n = 0;

  bool operator==(const BoxplotStats&) const = default;
};

// Type-7 quantiles (position p * (n - 1), linear interpolation). Whiskers are
// the most extreme samples inside [q1 - 1.5 IQR, q3 + 1.5 IQR]; with few
// samples they can fall inside the box.
BoxplotStats boxplot_stats(std::span<const double> values);

// Feature names accepted by reports: footprint, avg_nz_row, skew,
// cross_row_sim, avg_num_neigh, bw_scaled.
const std::vector<std::string>& report_features();

// Requested value when generator parameters exist, else the measured one.
double record_feature(const SweepRecord& rec, const std::string& feature);

struct RangeFilter {
  std::string feature;
  double lo = 0.0;
  double hi = 0.0;  // inclusive
};

struct ReportOptions {
  std::string group_by = "skew";
  // Records are split by split_feature at the given edges ("< edge" / ">= edge").
  std::string split_feature = "footprint";
  std::vector<double> split_edges{256.0};
  std::vector<RangeFilter> filters;
  // Group values and footprint bins come from this grid.
  GridConfig grid = grid_preset("medium");
  std::string title;
};

struct ReportGroup {
  std::string split;  // split label, "all" without splits
  std::string group;  // grid value or footprint range
  BoxplotStats stats;
};

struct Report {
  std::string group_by;
  std::vector<std::string> splits;
  std::vector<std::string> groups;
  std::vector<ReportGroup> boxes;  // non-empty (split, group) cells
  std::vector<std::string> notes;
  std::string title;
};

// Throws Error{unknown_feature} for an unsupported group or split feature and
// Error{empty_input} when no record has a best format.
Report make_report(const std::vector<SweepRecord>& records, const ReportOptions& opts = {});

std::string report_csv(const Report& r);
std::string report_svg(const Report& r);

}  // namespace spmvprobe
