#include "spmvprobe/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

#include "spmvprobe/error.hpp"

namespace spmvprobe {

namespace {

double quantile7(const std::vector<double>& sorted, double p) {
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void require_feature(const std::string& name) {
  const auto& names = report_features();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw Error(ErrorKind::unknown_feature, "'" + name + "'");
  }
}

const std::vector<double>& grid_values(const GridConfig& g, const std::string& feature) {
  if (feature == "avg_nz_row") return g.avg_nz_row;
  if (feature == "skew") return g.skew;
  if (feature == "cross_row_sim") return g.cross_row_sim;
  if (feature == "avg_num_neigh") return g.avg_num_neigh;
  if (feature == "bw_scaled") return g.bw_scaled;
  throw Error(ErrorKind::unknown_feature, "'" + feature + "' has no grid values");
}

}  // namespace

BoxplotStats boxplot_stats(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::empty_input, "boxplot of an empty list");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  BoxplotStats s;
  s.n = v.size();
  s.min = v.front();
  s.max = v.back();
  s.q1 = quantile7(v, 0.25);
  s.median = quantile7(v, 0.5);
  s.q3 = quantile7(v, 0.75);
  const double iqr = s.q3 - s.q1;
  const double lo_fence = s.q1 - 1.5 * iqr;
  const double hi_fence = s.q3 + 1.5 * iqr;
  // With interpolated quartiles the extreme sample inside a fence can lie
  // inside the box ([1,2,3,100] has q3 = 27.25 and upper whisker 3).
  s.lower_whisker = *std::lower_bound(v.begin(), v.end(), lo_fence);
  s.upper_whisker = *(std::upper_bound(v.begin(), v.end(), hi_fence) - 1);
  return s;
}

const std::vector<std::string>& report_features() {
  static const std::vector<std::string> names = {"footprint",     "avg_nz_row",    "skew",
                                                 "cross_row_sim", "avg_num_neigh", "bw_scaled"};
  return names;
}

double record_feature(const SweepRecord& rec, const std::string& feature) {
  require_feature(feature);
  if (const auto& p = rec.gen_params) {
    if (feature == "footprint") return requested_footprint_mb(*p);
    if (feature == "avg_nz_row") return p->avg_nz_row;
    if (feature == "skew") return p->skew_coef;
    if (feature == "cross_row_sim") return p->cross_row_sim;
    if (feature == "avg_num_neigh") return p->avg_num_neigh;
    return p->bw_scaled;
  }
  if (const auto& m = rec.measured) {
    if (feature == "footprint") return m->mem_footprint_mb;
    if (feature == "avg_nz_row") return m->avg_nz_row;
    if (feature == "skew") return m->skew_coeff;
    if (feature == "cross_row_sim") return m->cross_row_sim;
    if (feature == "avg_num_neigh") return m->avg_num_neigh;
    return m->bw_scaled;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

Report make_report(const std::vector<SweepRecord>& records, const ReportOptions& opts) {
  require_feature(opts.group_by);
  const bool split = !opts.split_feature.empty() && !opts.split_edges.empty();
  if (split) require_feature(opts.split_feature);
  for (const RangeFilter& f : opts.filters) require_feature(f.feature);

  Report r;
  r.group_by = opts.group_by;
  r.title = opts.title.empty() ? "best-format GFLOP/s by " + opts.group_by : opts.title;

  // Group definitions.
  std::vector<std::pair<double, double>> ranges;  // footprint bins
  std::vector<double> points;
  if (opts.group_by == "footprint") {
    ranges = opts.grid.footprint_ranges_mb;
    for (const auto& [lo, hi] : ranges) r.groups.push_back("[" + shortest(lo) + "," + shortest(hi) + ")");
  } else {
    points = grid_values(opts.grid, opts.group_by);
    for (double v : points) r.groups.push_back(shortest(v));
  }
  std::vector<double> edges = opts.split_edges;
  std::sort(edges.begin(), edges.end());
  if (split) {
    const std::string& f = opts.split_feature;
    r.splits.push_back(f + "<" + shortest(edges.front()));
    for (std::size_t i = 1; i < edges.size(); ++i) {
      r.splits.push_back(shortest(edges[i - 1]) + "<=" + f + "<" + shortest(edges[i]));
    }
    r.splits.push_back(f + ">=" + shortest(edges.back()));
  } else {
    r.splits.push_back("all");
  }

  auto group_of = [&](double v) -> std::optional<std::size_t> {
    if (std::isnan(v)) return std::nullopt;
    if (!ranges.empty()) {
      for (std::size_t i = 0; i < ranges.size(); ++i) {
        const bool last = i + 1 == ranges.size();
        if (v >= ranges[i].first && (v < ranges[i].second || (last && v <= ranges[i].second))) return i;
      }
      return std::nullopt;
    }
    if (points.empty()) return std::nullopt;
    std::size_t best = 0;
    for (std::size_t i = 1; i < points.size(); ++i) {
      if (std::abs(points[i] - v) < std::abs(points[best] - v)) best = i;
    }
    return best;
  };

  std::vector<std::vector<std::vector<double>>> cells(r.splits.size(),
                                                      std::vector<std::vector<double>>(r.groups.size()));
  std::size_t no_result = 0, filtered = 0, outside = 0, used = 0;
  for (const SweepRecord& rec : records) {
    if (!rec.best_format) {
      ++no_result;
      continue;
    }
    bool keep = true;
    for (const RangeFilter& f : opts.filters) {
      const double v = record_feature(rec, f.feature);
      if (!(v >= f.lo && v <= f.hi)) keep = false;
    }
    if (!keep) {
      ++filtered;
      continue;
    }
    const auto g = group_of(record_feature(rec, opts.group_by));
    if (!g) {
      ++outside;
      continue;
    }
    std::size_t s = 0;
    if (split) {
      const double v = record_feature(rec, opts.split_feature);
      s = static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), v) - edges.begin());
    }
    cells[s][*g].push_back(rec.best_gflops);
    ++used;
  }
  if (used == 0) throw Error(ErrorKind::empty_input, "no benchmarked records to report");

  if (no_result > 0) r.notes.push_back(std::to_string(no_result) + " records without a successful benchmark skipped");
  if (filtered > 0) r.notes.push_back(std::to_string(filtered) + " records removed by filters");
  if (outside > 0) r.notes.push_back(std::to_string(outside) + " records outside every group");
  for (std::size_t s = 0; s < r.splits.size(); ++s) {
    for (std::size_t g = 0; g < r.groups.size(); ++g) {
      if (cells[s][g].empty()) {
        r.notes.push_back("empty group " + opts.group_by + "=" + r.groups[g] + " (" + r.splits[s] + ") omitted");
        continue;
      }
      r.boxes.push_back({r.splits[s], r.groups[g], boxplot_stats(cells[s][g])});
    }
  }
  return r;
}

std::string report_csv(const Report& r) {
  std::string out = "split," + r.group_by + ",n,min,lower_whisker,q1,median,q3,upper_whisker,max\n";
  for (const ReportGroup& b : r.boxes) {
    const BoxplotStats& s = b.stats;
    out += csv_field(b.split) + ',' + csv_field(b.group) + ',' + std::to_string(s.n);
    for (double v : {s.min, s.lower_whisker, s.q1, s.median, s.q3, s.upper_whisker, s.max}) {
      out += ',' + shortest(v);
    }
    out += '\n';
  }
  return out;
}

std::string report_svg(const Report& r) {
  static const char* kColors[] = {"#c6dbef", "#2171b5", "#fdd0a2", "#d94801", "#c7e9c0", "#238b45"};
  const double box_w = 22.0, box_gap = 6.0, group_gap = 24.0;
  const double left = 70.0, top = 50.0, plot_h = 300.0;
  const double ns = static_cast<double>(r.splits.size());
  const double slot_w = ns * box_w + (ns - 1.0) * box_gap;
  const double plot_w = static_cast<double>(r.groups.size()) * (slot_w + group_gap) + group_gap;
  const double notes_h = 16.0 * static_cast<double>(r.notes.size());
  const double width = left + plot_w + 20.0;
  const double height = top + plot_h + 70.0 + 18.0 * ns + notes_h;

  double ymax = 0.0;
  for (const ReportGroup& b : r.boxes) ymax = std::max({ymax, b.stats.upper_whisker, b.stats.q3});
  if (!(ymax > 0.0)) ymax = 1.0;
  // Round the axis up to 1, 2 or 5 times a power of ten.
  const double mag = std::pow(10.0, std::floor(std::log10(ymax)));
  double axis = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= ymax) {
      axis = m * mag;
      break;
    }
  }
  auto y_of = [&](double v) { return top + plot_h - plot_h * std::clamp(v / axis, 0.0, 1.0); };

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fixed(width, 0) +
       "\" height=\"" + fixed(height, 0) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + fixed(width, 0) + "\" height=\"" + fixed(height, 0) +
       "\" fill=\"white\"/>\n";
  s += "<text x=\"" + fixed(width / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
       xml_escape(r.title) + "</text>\n";

  // Axes and ticks.
  s += "<line x1=\"" + fixed(left) + "\" y1=\"" + fixed(top) + "\" x2=\"" + fixed(left) + "\" y2=\"" +
       fixed(top + plot_h) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + fixed(left) + "\" y1=\"" + fixed(top + plot_h) + "\" x2=\"" + fixed(left + plot_w) +
       "\" y2=\"" + fixed(top + plot_h) + "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double v = axis * i / 5.0;
    const double y = y_of(v);
    s += "<line x1=\"" + fixed(left - 4) + "\" y1=\"" + fixed(y) + "\" x2=\"" + fixed(left + plot_w) +
         "\" y2=\"" + fixed(y) + "\" stroke=\"#dddddd\"/>\n";
    s += "<text x=\"" + fixed(left - 8) + "\" y=\"" + fixed(y + 4) + "\" text-anchor=\"end\">" +
         fixed(v, v == std::floor(v) ? 0 : 2) + "</text>\n";
  }
  s += "<text x=\"18\" y=\"" + fixed(top + plot_h / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
       fixed(top + plot_h / 2) + ")\">GFLOP/s</text>\n";
  s += "<text x=\"" + fixed(left + plot_w / 2) + "\" y=\"" + fixed(top + plot_h + 40) +
       "\" text-anchor=\"middle\">" + xml_escape(r.group_by) + "</text>\n";

  for (std::size_t g = 0; g < r.groups.size(); ++g) {
    const double gx = left + group_gap + static_cast<double>(g) * (slot_w + group_gap);
    s += "<text x=\"" + fixed(gx + slot_w / 2) + "\" y=\"" + fixed(top + plot_h + 18) +
         "\" text-anchor=\"middle\">" + xml_escape(r.groups[g]) + "</text>\n";
    for (std::size_t k = 0; k < r.splits.size(); ++k) {
      const auto it = std::find_if(r.boxes.begin(), r.boxes.end(), [&](const ReportGroup& b) {
        return b.group == r.groups[g] && b.split == r.splits[k];
      });
      if (it == r.boxes.end()) continue;
      const BoxplotStats& st = it->stats;
      const double x = gx + static_cast<double>(k) * (box_w + box_gap);
      const double lw = std::min(st.lower_whisker, st.q1), uw = std::max(st.upper_whisker, st.q3);
      const double cx = x + box_w / 2;
      const char* color = kColors[k % std::size(kColors)];
      s += "<g>\n";
      s += "<line x1=\"" + fixed(cx) + "\" y1=\"" + fixed(y_of(uw)) + "\" x2=\"" + fixed(cx) +
           "\" y2=\"" + fixed(y_of(st.q3)) + "\" stroke=\"black\"/>\n";
      s += "<line x1=\"" + fixed(cx) + "\" y1=\"" + fixed(y_of(st.q1)) + "\" x2=\"" + fixed(cx) + "\" y2=\"" +
           fixed(y_of(lw)) + "\" stroke=\"black\"/>\n";
      for (double w : {lw, uw}) {
        s += "<line x1=\"" + fixed(x + 5) + "\" y1=\"" + fixed(y_of(w)) + "\" x2=\"" + fixed(x + box_w - 5) +
             "\" y2=\"" + fixed(y_of(w)) + "\" stroke=\"black\"/>\n";
      }
      const double y3 = y_of(st.q3);
      s += "<rect x=\"" + fixed(x) + "\" y=\"" + fixed(y3) + "\" width=\"" + fixed(box_w) + "\" height=\"" +
           fixed(std::max(0.5, y_of(st.q1) - y3)) + "\" fill=\"" + color + "\" stroke=\"black\"/>\n";
      s += "<line x1=\"" + fixed(x) + "\" y1=\"" + fixed(y_of(st.median)) + "\" x2=\"" + fixed(x + box_w) +
           "\" y2=\"" + fixed(y_of(st.median)) + "\" stroke=\"black\" stroke-width=\"2\"/>\n";
      s += "<title>" + xml_escape(it->split + ", " + r.group_by + "=" + it->group) + ": n=" +
           std::to_string(st.n) + ", median " + fixed(st.median, 3) + "</title>\n";
      s += "</g>\n";
    }
  }

  double ly = top + plot_h + 62;
  for (std::size_t k = 0; k < r.splits.size(); ++k) {
    s += "<rect x=\"" + fixed(left) + "\" y=\"" + fixed(ly - 10) + "\" width=\"12\" height=\"12\" fill=\"" +
         kColors[k % std::size(kColors)] + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + fixed(left + 18) + "\" y=\"" + fixed(ly) + "\">" + xml_escape(r.splits[k]) + "</text>\n";
    ly += 18;
  }
  for (const std::string& note : r.notes) {
    s += "<text x=\"" + fixed(left) + "\" y=\"" + fixed(ly) + "\" font-size=\"10\" fill=\"#555555\">" +
         xml_escape(note) + "</text>\n";
    ly += 16;
  }
  s += "</svg>\n";
  return s;
}

}  // namespace spmvprobe
