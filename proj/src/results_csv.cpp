#include "spmvprobe/results_csv.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "spmvprobe/error.hpp"

namespace spmvprobe {

namespace {

const std::vector<std::string> kColumns = {
    "matrix_id",
    "nr_rows", "nr_cols", "avg_nz_row", "std_nz_row", "distribution", "skew_coef",
    "bw_scaled", "cross_row_sim", "avg_num_neigh", "seed", "shuffle_rows",
    "m_mem_footprint_mb", "m_avg_nz_row", "m_std_nz_row", "m_skew_coeff", "m_cross_row_sim",
    "m_avg_num_neigh", "m_bw_scaled", "m_nr_rows", "m_nr_cols", "m_nnz",
    "format", "workers", "iterations", "repeats", "mean_seconds_per_iter", "gflops",
    "roofline_gflops", "status",
};

constexpr std::size_t kParamsBegin = 1;
constexpr std::size_t kParamsCount = 11;
constexpr std::size_t kMeasuredBegin = kParamsBegin + kParamsCount;
constexpr std::size_t kMeasuredCount = 10;
constexpr std::size_t kFormatCol = kMeasuredBegin + kMeasuredCount;
constexpr std::size_t kTimingBegin = kFormatCol + 1;

std::string num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string num(std::uint64_t v) { return std::to_string(v); }

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_fields(std::string_view line, std::size_t lineno) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"' && cur.empty()) {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw Error(ErrorKind::parse_error, "line " + std::to_string(lineno) + ": unterminated quote");
  out.push_back(std::move(cur));
  return out;
}

class FieldReader {
 public:
  FieldReader(const std::vector<std::string>& f, std::size_t lineno) : f_(f), lineno_(lineno) {}

  bool empty(std::size_t i) const { return f_[i].empty(); }

  bool all_empty(std::size_t begin, std::size_t count) const {
    for (std::size_t i = begin; i < begin + count; ++i) {
      if (!f_[i].empty()) return false;
    }
    return true;
  }

  double real(std::size_t i) const {
    double v = 0.0;
    parse(i, v);
    return v;
  }

  std::uint64_t count(std::size_t i) const {
    std::uint64_t v = 0;
    parse(i, v);
    return v;
  }

  [[noreturn]] void fail(std::size_t i, const std::string& what) const {
    throw Error(ErrorKind::parse_error,
                "line " + std::to_string(lineno_) + ", column " + kColumns[i] + ": " + what);
  }

 private:
  template <typename T>
  void parse(std::size_t i, T& v) const {
    const std::string& s = f_[i];
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
      fail(i, "bad number '" + s + "'");
    }
  }

  const std::vector<std::string>& f_;
  std::size_t lineno_;
};

}  // namespace

std::string_view to_string(RecordStatus s) {
  switch (s) {
    case RecordStatus::ok: return "ok";
    case RecordStatus::infeasible: return "infeasible";
    case RecordStatus::capacity_exceeded: return "capacity_exceeded";
    case RecordStatus::correctness_failure: return "correctness_failure";
  }
  return "unknown";
}

RecordStatus parse_status(std::string_view s) {
  for (auto st : {RecordStatus::ok, RecordStatus::infeasible, RecordStatus::capacity_exceeded,
                  RecordStatus::correctness_failure}) {
    if (to_string(st) == s) return st;
  }
  throw Error(ErrorKind::parse_error, "unknown status '" + std::string(s) + "'");
}

const std::vector<std::string>& results_columns() { return kColumns; }

std::string results_header() {
  std::string out;
  for (std::size_t i = 0; i < kColumns.size(); ++i) {
    if (i > 0) out += ',';
    out += kColumns[i];
  }
  return out;
}

std::string format_row(const ResultsRow& row) {
  std::vector<std::string> f(kColumns.size());
  f[0] = quote(row.matrix_id);
  if (const auto& p = row.params) {
    std::size_t i = kParamsBegin;
    f[i++] = num(std::uint64_t{p->nr_rows});
    f[i++] = num(std::uint64_t{p->nr_cols});
    f[i++] = num(p->avg_nz_row);
    f[i++] = num(p->std_nz_row);
    f[i++] = "normal";
    f[i++] = num(p->skew_coef);
    f[i++] = num(p->bw_scaled);
    f[i++] = num(p->cross_row_sim);
    f[i++] = num(p->avg_num_neigh);
    f[i++] = num(p->seed);
    f[i++] = p->shuffle_rows ? "1" : "0";
  }
  if (const auto& m = row.measured) {
    std::size_t i = kMeasuredBegin;
    f[i++] = num(m->mem_footprint_mb);
    f[i++] = num(m->avg_nz_row);
    f[i++] = num(m->std_nz_row);
    f[i++] = num(m->skew_coeff);
    f[i++] = num(m->cross_row_sim);
    f[i++] = num(m->avg_num_neigh);
    f[i++] = num(m->bw_scaled);
    f[i++] = num(std::uint64_t{m->nr_rows});
    f[i++] = num(std::uint64_t{m->nr_cols});
    f[i++] = num(std::uint64_t{m->nnz});
  }
  f[kFormatCol] = std::string(to_string(row.format));
  if (row.status == RecordStatus::ok && row.timing) {
    const RowTiming& t = *row.timing;
    std::size_t i = kTimingBegin;
    f[i++] = num(std::uint64_t{t.workers});
    f[i++] = num(std::uint64_t{t.iterations});
    f[i++] = num(std::uint64_t{t.repeats});
    f[i++] = num(t.mean_seconds_per_iter);
    f[i++] = num(t.gflops);
    if (t.roofline_gflops) f[i] = num(*t.roofline_gflops);
  }
  f.back() = std::string(to_string(row.status));

  std::string out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i > 0) out += ',';
    out += f[i];
  }
  return out;
}

ResultsRow parse_row(std::string_view line, std::size_t lineno) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const auto f = split_fields(line, lineno);
  if (f.size() != kColumns.size()) {
    throw Error(ErrorKind::parse_error, "line " + std::to_string(lineno) + ": expected " +
                                            std::to_string(kColumns.size()) + " fields, found " +
                                            std::to_string(f.size()));
  }
  const FieldReader rd(f, lineno);
  ResultsRow row;
  row.matrix_id = f[0];

  if (!rd.all_empty(kParamsBegin, kParamsCount)) {
    GenParams p;
    std::size_t i = kParamsBegin;
    p.nr_rows = rd.count(i++);
    p.nr_cols = rd.count(i++);
    p.avg_nz_row = rd.real(i++);
    p.std_nz_row = rd.real(i++);
    if (f[i] != "normal") rd.fail(i, "unknown distribution '" + f[i] + "'");
    ++i;
    p.skew_coef = rd.real(i++);
    p.bw_scaled = rd.real(i++);
    p.cross_row_sim = rd.real(i++);
    p.avg_num_neigh = rd.real(i++);
    p.seed = rd.count(i++);
    if (f[i] != "0" && f[i] != "1") rd.fail(i, "expected 0 or 1");
    p.shuffle_rows = f[i] == "1";
    row.params = p;
  }
  if (!rd.all_empty(kMeasuredBegin, kMeasuredCount)) {
    FeatureVector m;
    std::size_t i = kMeasuredBegin;
    m.mem_footprint_mb = rd.real(i++);
    m.avg_nz_row = rd.real(i++);
    m.std_nz_row = rd.real(i++);
    m.skew_coeff = rd.real(i++);
    m.cross_row_sim = rd.real(i++);
    m.avg_num_neigh = rd.real(i++);
    m.bw_scaled = rd.real(i++);
    m.nr_rows = rd.count(i++);
    m.nr_cols = rd.count(i++);
    m.nnz = rd.count(i++);
    row.measured = m;
  }
  try {
    row.format = parse_format(f[kFormatCol]);
  } catch (const Error&) {
    rd.fail(kFormatCol, "unknown format '" + f[kFormatCol] + "'");
  }
  try {
    row.status = parse_status(f.back());
  } catch (const Error&) {
    rd.fail(f.size() - 1, "unknown status '" + f.back() + "'");
  }
  const std::size_t timing_count = kColumns.size() - 1 - kTimingBegin;
  if (row.status == RecordStatus::ok) {
    RowTiming t;
    std::size_t i = kTimingBegin;
    t.workers = rd.count(i++);
    t.iterations = rd.count(i++);
    t.repeats = rd.count(i++);
    t.mean_seconds_per_iter = rd.real(i++);
    t.gflops = rd.real(i++);
    if (!rd.empty(i)) t.roofline_gflops = rd.real(i);
    row.timing = t;
  } else if (!rd.all_empty(kTimingBegin, timing_count)) {
    rd.fail(kTimingBegin, "timing fields must be empty when status is " + f.back());
  }
  return row;
}

std::vector<ResultsRow> read_results(const std::string& path) {
  std::vector<ResultsRow> rows;
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!std::filesystem::exists(path)) return rows;
    throw Error(ErrorKind::io_error, "cannot read " + path);
  }
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  std::size_t pos = 0;
  std::size_t lineno = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    if (nl == std::string::npos) break;  // unterminated tail
    std::string_view line(text.data() + pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (lineno == 1) {
      if (line != results_header()) {
        throw Error(ErrorKind::parse_error, path + ": header does not match the results schema");
      }
      continue;
    }
    if (line.empty()) continue;
    rows.push_back(parse_row(line, lineno));
  }
  return rows;
}

ResultsWriter::ResultsWriter(std::string path) : path_(std::move(path)) {
  namespace fs = std::filesystem;
  std::error_code ec;
  const bool exists = fs::exists(path_, ec) && fs::file_size(path_, ec) > 0;
  if (!exists) {
    std::ofstream out(path_, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io_error, "cannot create " + path_);
    out << results_header() << '\n';
    return;
  }
  std::ifstream in(path_, std::ios::binary);
  std::string first;
  std::getline(in, first);
  if (!first.empty() && first.back() == '\r') first.pop_back();
  if (first != results_header()) {
    throw Error(ErrorKind::parse_error, path_ + ": header does not match the results schema");
  }
  in.clear();
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::uintmax_t>(in.tellg());
  in.seekg(static_cast<std::streamoff>(size - 1));
  char last = '\n';
  in.get(last);
  if (last != '\n') {
    // Interrupted write: cut back to the last complete line.
    std::uintmax_t keep = size;
    while (keep > 0) {
      in.seekg(static_cast<std::streamoff>(keep - 1));
      char c = 0;
      in.get(c);
      if (c == '\n') break;
      --keep;
    }
    in.close();
    fs::resize_file(path_, keep);
    if (keep == 0) {
      std::ofstream out(path_, std::ios::binary | std::ios::trunc);
      out << results_header() << '\n';
    }
  }
}

void ResultsWriter::append(const std::vector<ResultsRow>& rows) {
  if (rows.empty()) return;
  std::string block;
  for (const auto& r : rows) {
    block += format_row(r);
    block += '\n';
  }
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) throw Error(ErrorKind::io_error, "cannot append to " + path_);
  out.write(block.data(), static_cast<std::streamsize>(block.size()));
  out.flush();
  if (!out) throw Error(ErrorKind::io_error, "write failed for " + path_);
}

}  // namespace spmvprobe
