#include "spmvprobe/generator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "spmvprobe/error.hpp"
#include "spmvprobe/random.hpp"

namespace spmvprobe {

namespace {

// Independent random streams derived from GenParams::seed.
enum Stream : std::uint64_t { kProfileStream = 1, kShuffleStream = 2, kPlacementStream = 3 };

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view key, std::string_view text) {
  double v = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw Error(ErrorKind::parse_error, "bad number for " + std::string(key) + ": " + std::string(text));
  }
  return v;
}

std::uint64_t parse_u64(std::string_view key, std::string_view text) {
  std::uint64_t v = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw Error(ErrorKind::parse_error, "bad integer for " + std::string(key) + ": " + std::string(text));
  }
  return v;
}

void validate_params(const GenParams& p) {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::invalid_argument, msg); };
  if (p.nr_rows == 0 || p.nr_cols == 0) fail("matrix dimensions must be positive");
  if (p.nr_rows > std::numeric_limits<index_t>::max() || p.nr_cols > std::numeric_limits<index_t>::max()) {
    fail("dimensions exceed 32-bit indices");
  }
  if (!(p.avg_nz_row > 0.0)) fail("avg_nz_row must be positive");
  if (!(p.std_nz_row >= 0.0)) fail("std_nz_row must be non-negative");
  if (!(p.skew_coef >= 0.0)) fail("skew_coef must be non-negative");
  if (!(p.bw_scaled > 0.0 && p.bw_scaled <= 1.0)) fail("bw_scaled must lie in (0, 1]");
  if (!(p.cross_row_sim >= 0.0 && p.cross_row_sim <= 1.0)) fail("cross_row_sim must lie in [0, 1]");
  if (!(p.avg_num_neigh >= 0.0 && p.avg_num_neigh <= 2.0)) fail("avg_num_neigh must lie in [0, 2]");
}

std::size_t total_nnz(const GenParams& p) {
  return static_cast<std::size_t>(std::llround(static_cast<double>(p.nr_rows) * p.avg_nz_row));
}

// Exponential block: row r of L gets round(MAX * (mu / MAX)^(r / L)).
std::vector<index_t> block_targets(std::size_t max_target, double mu, std::size_t length) {
  std::vector<index_t> out(length);
  const double ratio = std::log(mu / static_cast<double>(max_target));
  for (std::size_t r = 0; r < length; ++r) {
    const double v = static_cast<double>(max_target) *
                     std::exp(ratio * static_cast<double>(r) / static_cast<double>(length));
    out[r] = static_cast<index_t>(std::max(1.0, std::round(v)));
  }
  return out;
}

double block_excess(const std::vector<index_t>& block, double mu) {
  double s = 0.0;
  for (index_t t : block) s += static_cast<double>(t) - mu;
  return s;
}

// Largest block length whose excess over mu stays within cap (at least 1).
std::size_t choose_block_length(std::size_t max_target, double mu, std::size_t max_len, double cap) {
  std::size_t lo = 1;
  std::size_t hi = std::max<std::size_t>(1, max_len);
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo + 1) / 2;
    if (block_excess(block_targets(max_target, mu, mid), mu) <= cap) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return lo;
}

// A single run cannot span the bandwidth window. Rows get at least two runs
// when the relative neighbor error of the extra run is smaller than the
// relative bandwidth error of a collapsed row.
double min_runs_for_extent(const GenParams& p, double row_len) {
  const FidelityTolerance tol;
  if (row_len < 2.0) return 1.0;
  return (2.0 / row_len) / tol.neigh_abs < p.bw_scaled / tol.bw_abs ? 2.0 : 1.0;
}

}  // namespace

std::string to_kv(const GenParams& p) {
  std::ostringstream os;
  os << "nr_rows=" << p.nr_rows << " nr_cols=" << p.nr_cols
     << " avg_nz_row=" << format_double(p.avg_nz_row)
     << " std_nz_row=" << format_double(p.std_nz_row) << " distribution=normal"
     << " skew_coef=" << format_double(p.skew_coef) << " bw_scaled=" << format_double(p.bw_scaled)
     << " cross_row_sim=" << format_double(p.cross_row_sim)
     << " avg_num_neigh=" << format_double(p.avg_num_neigh) << " seed=" << p.seed
     << " shuffle_rows=" << (p.shuffle_rows ? 1 : 0);
  return os.str();
}

GenParams gen_params_from_kv(std::string_view text) {
  GenParams p;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    if (pos >= text.size()) break;
    std::size_t end = text.find_first_of(" \t", pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view token = text.substr(pos, end - pos);
    pos = end;
    const std::size_t eq = token.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::parse_error, "expected key=value, got " + std::string(token));
    }
    const std::string_view key = token.substr(0, eq);
    const std::string_view val = token.substr(eq + 1);
    if (key == "nr_rows") p.nr_rows = parse_u64(key, val);
    else if (key == "nr_cols") p.nr_cols = parse_u64(key, val);
    else if (key == "avg_nz_row") p.avg_nz_row = parse_double(key, val);
    else if (key == "std_nz_row") p.std_nz_row = parse_double(key, val);
    else if (key == "distribution") {
      if (val != "normal") throw Error(ErrorKind::parse_error, "unknown distribution " + std::string(val));
      p.distribution = RowDistribution::normal;
    } else if (key == "skew_coef") p.skew_coef = parse_double(key, val);
    else if (key == "bw_scaled") p.bw_scaled = parse_double(key, val);
    else if (key == "cross_row_sim") p.cross_row_sim = parse_double(key, val);
    else if (key == "avg_num_neigh") p.avg_num_neigh = parse_double(key, val);
    else if (key == "seed") p.seed = parse_u64(key, val);
    else if (key == "shuffle_rows") p.shuffle_rows = parse_u64(key, val) != 0;
    // Unknown keys are ignored so manifests can carry annotations.
  }
  return p;
}

std::string gen_params_key(const GenParams& p) {
  const std::string kv = to_kv(p);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : kv) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Dimensions plan_dimensions(double footprint_mb, double avg_nz_row) {
  if (!(avg_nz_row > 0.0)) throw Error(ErrorKind::infeasible, "avg_nz_row must be positive");
  const double bytes_per_row = 12.0 * avg_nz_row + 4.0;
  const double rows = std::round(footprint_mb * kBytesPerMb / bytes_per_row);
  if (!(rows >= 1.0)) {
    throw Error(ErrorKind::infeasible, "footprint " + format_double(footprint_mb) + " MB is below one row");
  }
  if (rows > static_cast<double>(std::numeric_limits<index_t>::max())) {
    throw Error(ErrorKind::infeasible, "footprint needs more rows than 32-bit indices allow");
  }
  const auto n = static_cast<std::size_t>(rows);
  if (avg_nz_row > static_cast<double>(n)) {
    throw Error(ErrorKind::infeasible, "avg_nz_row exceeds the column count");
  }
  return {n, n};
}

double requested_footprint_mb(const GenParams& p) {
  return static_cast<double>(csr_footprint_bytes(p.nr_rows, total_nnz(p))) / kBytesPerMb;
}

std::size_t window_width(const GenParams& p) {
  const auto w = static_cast<std::size_t>(std::llround(p.bw_scaled * static_cast<double>(p.nr_cols)));
  return std::clamp<std::size_t>(w, 1, p.nr_cols);
}

std::size_t max_row_target(const GenParams& p) {
  const auto max_t = static_cast<std::size_t>(std::llround(p.avg_nz_row * (p.skew_coef + 1.0)));
  return std::max(max_t, static_cast<std::size_t>(std::ceil(p.avg_nz_row)));
}

RowPlan row_nnz_profile(const GenParams& p, const ProfileOptions& opts) {
  validate_params(p);
  const std::size_t n = p.nr_rows;
  const std::size_t width = window_width(p);
  const std::size_t max_t = max_row_target(p);
  const std::size_t total = total_nnz(p);

  if (p.avg_nz_row > static_cast<double>(p.nr_cols)) {
    throw Error(ErrorKind::infeasible, "avg_nz_row exceeds nr_cols");
  }
  if (max_t > width) {
    throw Error(ErrorKind::infeasible, "longest row (" + std::to_string(max_t) +
                                          ") does not fit the bandwidth window (" +
                                          std::to_string(width) + ")");
  }
  if (total < n) throw Error(ErrorKind::infeasible, "avg_nz_row below one nonzero per row");
  if (total > std::numeric_limits<index_t>::max()) {
    throw Error(ErrorKind::capacity_exceeded, "nnz does not fit 32-bit indices");
  }

  RowPlan plan;
  plan.target_nnz.assign(n, 0);
  Rng rng(mix_seed(p.seed, kProfileStream));

  // The skew block exists only when the longest row must exceed the bulk rows.
  const bool skewed = static_cast<double>(max_t) > std::ceil(p.avg_nz_row) && n > 1;
  std::size_t block_len = 0;
  double mu = p.avg_nz_row;
  if (skewed) {
    const auto max_len = static_cast<std::size_t>(opts.decay_fraction * static_cast<double>(n));
    const double cap = opts.max_block_share * static_cast<double>(total);
    // Two passes: the block decays towards mu', which itself depends on the block.
    for (int pass = 0; pass < 2; ++pass) {
      block_len = std::min(choose_block_length(max_t, mu, std::min(max_len, n - 1), cap), n - 1);
      const auto block = block_targets(max_t, mu, block_len);
      const double block_sum = block_excess(block, 0.0);
      mu = (static_cast<double>(total) - block_sum) / static_cast<double>(n - block_len);
      if (mu < 1.0) {
        throw Error(ErrorKind::infeasible,
                    "skew " + format_double(p.skew_coef) + " leaves less than one nonzero per bulk row");
      }
    }
    const auto block = block_targets(max_t, mu, block_len);
    std::copy(block.begin(), block.end(), plan.target_nnz.begin());
    plan.decay_constant = static_cast<double>(n) * std::log(static_cast<double>(max_t) / mu) /
                          static_cast<double>(block_len);
  }
  plan.block_rows = block_len;
  plan.bulk_mean = mu;

  const auto upper = static_cast<double>(std::min(max_t, width));
  for (std::size_t r = block_len; r < n; ++r) {
    double v = p.std_nz_row > 0.0 ? std::round(rng.normal(mu, p.std_nz_row)) : std::floor(mu);
    plan.target_nnz[r] = static_cast<index_t>(std::clamp(v, 1.0, upper));
  }

  // Bring the total to exactly round(n * avg) with +-1 steps over the bulk rows.
  std::int64_t residual = static_cast<std::int64_t>(total) -
                          static_cast<std::int64_t>(std::accumulate(
                              plan.target_nnz.begin(), plan.target_nnz.end(), std::uint64_t{0}));
  if (residual != 0 && block_len < n) {
    std::vector<std::size_t> order(n - block_len);
    std::iota(order.begin(), order.end(), block_len);
    shuffle(order.begin(), order.end(), rng);
    const auto hi = static_cast<index_t>(upper);
    while (residual != 0) {
      bool moved = false;
      for (std::size_t r : order) {
        if (residual == 0) break;
        index_t& t = plan.target_nnz[r];
        if (residual > 0 && t < hi) {
          ++t;
          --residual;
          moved = true;
        } else if (residual < 0 && t > 1) {
          --t;
          ++residual;
          moved = true;
        }
      }
      if (!moved) throw Error(ErrorKind::infeasible, "row budgets cannot reach the requested nnz");
    }
  }

  if (p.shuffle_rows) {
    Rng perm(mix_seed(p.seed, kShuffleStream));
    shuffle(plan.target_nnz.begin(), plan.target_nnz.end(), perm);
  }
  return plan;
}

namespace {

// Per-row column placement state. Marker arrays span all columns and are
// cleared after each row by walking the touched positions.
class RowPlacer {
 public:
  RowPlacer(const GenParams& p, Rng& rng)
      : p_(p), rng_(rng), ncols_(p.nr_cols), width_(window_width(p)),
        band_(std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.05 * static_cast<double>(width_))))),
        occupied_(ncols_, 0), forbidden_(ncols_, 0) {}

  // Places the columns of `row` given the previous row's sorted columns.
  void place(std::size_t row, std::size_t budget, const std::vector<index_t>& prev,
             std::vector<index_t>& out) {
    out.clear();
    cols_ = &out;
    budget_ = budget;
    const double center = std::round(static_cast<double>(row) / static_cast<double>(p_.nr_rows) *
                                     static_cast<double>(ncols_));
    const double lo = std::clamp(center - static_cast<double>(width_ / 2), 0.0,
                                 static_cast<double>(ncols_ - width_));
    lo_ = static_cast<std::size_t>(lo);
    hi_ = lo_ + width_;  // exclusive
    min_col_ = std::numeric_limits<std::size_t>::max();
    max_col_ = 0;
    copied_runs_.clear();
    left_tried_ = false;
    right_tried_ = false;

    copy_from_previous(prev);
    place_new_elements();

    for (index_t c : out) occupied_[c] = 0;
    for (std::size_t c : forbidden_marks_) forbidden_[c] = 0;
    forbidden_marks_.clear();
    std::sort(out.begin(), out.end());
  }

 private:
  struct Run {
    std::size_t first;
    std::size_t last;
  };

  bool in_window(std::size_t c) const { return c >= lo_ && c < hi_; }
  bool left_band_empty() const { return cols_->empty() || min_col_ >= lo_ + band_; }
  bool right_band_empty() const { return cols_->empty() || max_col_ + band_ < hi_; }

  void put(std::size_t c) {
    occupied_[c] = 1;
    cols_->push_back(static_cast<index_t>(c));
    min_col_ = std::min(min_col_, c);
    max_col_ = std::max(max_col_, c);
  }

  void forbid_around(std::size_t c) {
    const std::size_t from = c > 0 ? c - 1 : 0;
    const std::size_t to = std::min(c + 1, ncols_ - 1);
    for (std::size_t k = from; k <= to; ++k) {
      if (!forbidden_[k]) {
        forbidden_[k] = 1;
        forbidden_marks_.push_back(k);
      }
    }
  }

  // Whole runs of adjacent columns are duplicated with probability
  // cross_row_sim, so duplication keeps the previous row's clustering. Columns
  // of runs that are not duplicated forbid their distance-1 shadow, so later
  // draws do not create accidental cross-row matches.
  void copy_from_previous(const std::vector<index_t>& prev) {
    if (prev.empty()) return;
    std::vector<Run> runs;
    for (std::size_t i = 0; i < prev.size();) {
      std::size_t j = i;
      while (j + 1 < prev.size() && prev[j + 1] == prev[j] + 1) ++j;
      runs.push_back({prev[i], prev[j]});
      i = j + 1;
    }
    const std::size_t start = runs.size() > 1 ? rng_.below(runs.size()) : 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const Run& run = runs[(start + i) % runs.size()];
      const bool copy = rng_.bernoulli(p_.cross_row_sim);
      std::size_t seg_first = 0;
      bool in_seg = false;
      for (std::size_t c = run.first; c <= run.last; ++c) {
        if (copy && cols_->size() < budget_ && in_window(c)) {
          put(c);
          if (!in_seg) {
            seg_first = c;
            in_seg = true;
          }
        } else {
          if (in_seg) copied_runs_.push_back({seg_first, c - 1});
          in_seg = false;
          forbid_around(c);
        }
      }
      if (in_seg) copied_runs_.push_back({seg_first, run.last});
    }
  }

  bool strict_ok(std::size_t c) const {
    if (occupied_[c] || forbidden_[c]) return false;
    if (c > 0 && occupied_[c - 1]) return false;
    if (c + 1 < ncols_ && occupied_[c + 1]) return false;
    return true;
  }

  // A start column inside [from, to): random draws first, then a wrap-around
  // scan; strict placement avoids adjacency and forbidden shadows, relaxed
  // placement only avoids occupied columns.
  std::optional<std::size_t> find_start(std::size_t from, std::size_t to) {
    const std::size_t span = to - from;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      const std::size_t c = from + rng_.below(span);
      if (strict_ok(c)) return c;
    }
    const std::size_t offset = rng_.below(span);
    for (std::size_t i = 0; i < span; ++i) {
      const std::size_t c = from + (offset + i) % span;
      if (strict_ok(c)) return c;
    }
    return std::nullopt;
  }

  std::optional<std::size_t> find_relaxed(std::size_t from, std::size_t to) {
    const std::size_t span = to - from;
    const std::size_t offset = rng_.below(span);
    for (std::size_t i = 0; i < span; ++i) {
      const std::size_t c = from + (offset + i) % span;
      if (!occupied_[c]) return c;
    }
    return std::nullopt;
  }

  bool can_extend_right(const Run& run) const {
    const std::size_t c = run.last + 1;
    return c < hi_ && !occupied_[c] && !forbidden_[c] && !(c + 1 < ncols_ && occupied_[c + 1]);
  }

  bool can_extend_left(const Run& run) const {
    if (run.first == 0) return false;
    const std::size_t c = run.first - 1;
    return c >= lo_ && !occupied_[c] && !forbidden_[c] && !(c > 0 && occupied_[c - 1]);
  }

  // Extends `run` by one column, alternating direction; false if both sides are blocked.
  bool extend(Run& run) {
    const bool right_first = grow_right_;
    grow_right_ = !grow_right_;
    if (right_first ? can_extend_right(run) : can_extend_left(run)) {
      if (right_first) put(++run.last);
      else put(--run.first);
      return true;
    }
    if (right_first ? can_extend_left(run) : can_extend_right(run)) {
      if (right_first) put(--run.first);
      else put(++run.last);
      return true;
    }
    return false;
  }

  // Starts a new run, preferring an empty edge band of the window so that the
  // row extent tracks the window width.
  bool start_run(Run& run) {
    std::optional<std::size_t> c;
    if (left_band_empty() && !left_tried_) {
      left_tried_ = true;
      c = find_start(lo_, lo_ + band_);
    } else if (right_band_empty() && !right_tried_) {
      right_tried_ = true;
      c = find_start(hi_ - band_, hi_);
    }
    if (!c) c = find_start(lo_, hi_);
    if (!c) c = find_relaxed(lo_, hi_);
    if (!c) return false;
    put(*c);
    run = {*c, *c};
    return true;
  }

  // Remaining budget: each element either starts a run or chains onto the
  // current one. The start probability tracks the number of runs that yields
  // the requested neighbor count, 2 * (1 - runs / row_length).
  void place_new_elements() {
    const double target_runs = std::max(
        static_cast<double>(budget_) * (1.0 - p_.avg_num_neigh / 2.0),
        min_runs_for_extent(p_, static_cast<double>(budget_)));
    double runs = static_cast<double>(copied_runs_.size());
    Run current{};
    bool have_current = false;
    if (!copied_runs_.empty()) {
      current = copied_runs_[rng_.below(copied_runs_.size())];
      have_current = true;
    }
    while (cols_->size() < budget_) {
      const double remaining = static_cast<double>(budget_ - cols_->size());
      const double start_p = std::clamp((target_runs - runs) / remaining, 0.0, 1.0);
      bool start = !have_current || rng_.bernoulli(start_p);
      if (!start && !extend(current)) start = true;
      if (start) {
        if (!start_run(current)) break;  // window full: budget shrinks
        have_current = true;
        runs += 1.0;
      }
    }
  }

  static constexpr int kMaxAttempts = 100;

  const GenParams& p_;
  Rng& rng_;
  std::size_t ncols_;
  std::size_t width_;
  std::size_t band_;
  std::vector<std::uint8_t> occupied_;
  std::vector<std::uint8_t> forbidden_;
  std::vector<std::size_t> forbidden_marks_;
  std::vector<Run> copied_runs_;
  std::vector<index_t>* cols_ = nullptr;
  std::size_t budget_ = 0;
  std::size_t lo_ = 0;
  std::size_t hi_ = 0;
  std::size_t min_col_ = 0;
  std::size_t max_col_ = 0;
  bool grow_right_ = true;
  bool left_tried_ = false;
  bool right_tried_ = false;
};

}  // namespace

CsrMatrix generate(const GenParams& p, const ProfileOptions& opts) {
  const RowPlan plan = row_nnz_profile(p, opts);
  Rng rng(mix_seed(p.seed, kPlacementStream));

  CsrMatrix m;
  m.nr_rows = p.nr_rows;
  m.nr_cols = p.nr_cols;
  m.row_ptr.assign(p.nr_rows + 1, 0);
  const std::size_t expected = std::accumulate(plan.target_nnz.begin(), plan.target_nnz.end(), std::size_t{0});
  m.col_idx.reserve(expected);
  m.values.reserve(expected);

  RowPlacer placer(p, rng);
  std::vector<index_t> prev;
  std::vector<index_t> cur;
  for (std::size_t r = 0; r < p.nr_rows; ++r) {
    placer.place(r, plan.target_nnz[r], prev, cur);
    for (index_t c : cur) {
      m.col_idx.push_back(c);
      m.values.push_back(rng.uniform_open_closed());
    }
    m.row_ptr[r + 1] = static_cast<index_t>(m.col_idx.size());
    std::swap(prev, cur);
  }
  return m;
}

Feasibility check_feasibility(const GenParams& p, const ProfileOptions& opts) {
  Feasibility f;
  auto infeasible = [&](const std::string& why) {
    f.feasible = false;
    f.reachable = false;
    f.reason = why;
    return f;
  };
  try {
    validate_params(p);
  } catch (const Error& e) {
    return infeasible(e.what());
  }
  const std::size_t width = window_width(p);
  const std::size_t max_t = max_row_target(p);
  const double n = static_cast<double>(p.nr_rows);
  if (p.avg_nz_row > static_cast<double>(p.nr_cols)) return infeasible("avg_nz_row exceeds nr_cols");
  if (max_t > width) return infeasible("longest row does not fit the bandwidth window");
  if (p.avg_nz_row < 1.0) return infeasible("avg_nz_row below one nonzero per row");
  // With a one-row block the bulk keeps (total - MAX) / (n - 1) per row.
  if (static_cast<double>(max_t) > std::ceil(p.avg_nz_row) &&
      (n < 2.0 || (n * p.avg_nz_row - static_cast<double>(max_t)) / (n - 1.0) < 1.0)) {
    return infeasible("skew leaves less than one nonzero per bulk row");
  }
  (void)opts;

  // Analytic reachability of the structural targets for a typical bulk row of
  // b elements in a window of w columns.
  const FidelityTolerance tol;
  const double b = p.avg_nz_row;
  const double w = static_cast<double>(width);
  const double min_runs = min_runs_for_extent(p, b);
  const double max_neigh = b >= min_runs ? 2.0 * (1.0 - min_runs / b) : 0.0;
  if (p.avg_num_neigh - max_neigh > tol.neigh_abs) {
    f.reachable = false;
    f.reason = "avg_num_neigh needs longer rows";
    return f;
  }
  // Placement room: shadows of the previous row's unmatched elements plus the
  // runs of the current row (one separating gap per run) must fit the window.
  const double t = p.cross_row_sim;
  const double a = p.avg_num_neigh;
  if (b * ((1.0 - t) * (3.0 - a) + (2.0 - a / 2.0)) > w) {
    f.reachable = false;
    f.reason = "window too dense for the requested cross_row_sim";
    return f;
  }
  const double max_runs = std::floor((w + 1.0) / 2.0);
  if (b > max_runs) {
    const double min_neigh = 2.0 * (1.0 - (w - b + 1.0) / b);
    if (min_neigh - p.avg_num_neigh > tol.neigh_abs) {
      f.reachable = false;
      f.reason = "window too dense for the requested avg_num_neigh";
      return f;
    }
  }
  return f;
}

FidelityReport check_fidelity(const GenParams& p, const FeatureVector& m, const FidelityTolerance& tol) {
  FidelityReport rep;
  auto fail = [&](const char* name) {
    rep.ok = false;
    if (!rep.failures.empty()) rep.failures += ',';
    rep.failures += name;
  };
  if (std::abs(m.avg_nz_row - p.avg_nz_row) > tol.avg_rel * p.avg_nz_row) fail("avg_nz_row");
  const double fp = requested_footprint_mb(p);
  if (std::abs(m.mem_footprint_mb - fp) > tol.footprint_rel * fp) fail("mem_footprint");
  if (p.skew_coef == 0.0) {
    if (std::abs(m.skew_coeff) > tol.skew_abs_at_zero) fail("skew_coeff");
  } else if (std::abs(m.skew_coeff - p.skew_coef) > tol.skew_rel * p.skew_coef) {
    fail("skew_coeff");
  }
  if (std::abs(m.cross_row_sim - p.cross_row_sim) > tol.cross_row_abs) fail("cross_row_sim");
  if (std::abs(m.avg_num_neigh - p.avg_num_neigh) > tol.neigh_abs) fail("avg_num_neigh");
  if (std::abs(m.bw_scaled - p.bw_scaled) > tol.bw_abs) fail("bw_scaled");
  return rep;
}

GridConfig grid_preset(std::string_view name) {
  GridConfig cfg;
  if (name == "medium") return cfg;
  if (name == "small") {
    cfg.footprint_samples = 1;
    return cfg;
  }
  if (name == "large") {
    cfg.bw_scaled = {0.05, 0.15, 0.3, 0.45, 0.6};
    return cfg;
  }
  throw Error(ErrorKind::invalid_argument, "unknown grid preset " + std::string(name));
}

std::vector<GridEntry> sweep_grid(const GridConfig& cfg) {
  std::vector<GridEntry> out;
  out.reserve(cfg.footprint_ranges_mb.size() * cfg.footprint_samples * cfg.avg_nz_row.size() *
              cfg.skew.size() * cfg.cross_row_sim.size() * cfg.avg_num_neigh.size() *
              cfg.bw_scaled.size());
  for (std::size_t ri = 0; ri < cfg.footprint_ranges_mb.size(); ++ri) {
    const auto [lo, hi] = cfg.footprint_ranges_mb[ri];
    for (std::size_t si = 0; si < cfg.footprint_samples; ++si) {
      Rng fp_rng(mix_seed(cfg.master_seed, (ri << 32) | si));
      const double footprint = std::exp(std::log(lo) + fp_rng.uniform() * (std::log(hi) - std::log(lo)));
      if (cfg.max_footprint_mb > 0.0 && footprint > cfg.max_footprint_mb) continue;
      for (std::size_t ai = 0; ai < cfg.avg_nz_row.size(); ++ai) {
        for (std::size_t ki = 0; ki < cfg.skew.size(); ++ki) {
          for (std::size_t ci = 0; ci < cfg.cross_row_sim.size(); ++ci) {
            for (std::size_t ni = 0; ni < cfg.avg_num_neigh.size(); ++ni) {
              for (std::size_t bi = 0; bi < cfg.bw_scaled.size(); ++bi) {
                GridEntry e;
                e.footprint_mb = footprint;
                GenParams& p = e.params;
                p.avg_nz_row = cfg.avg_nz_row[ai];
                p.std_nz_row = cfg.std_nz_row;
                p.skew_coef = cfg.skew[ki];
                p.cross_row_sim = cfg.cross_row_sim[ci];
                p.avg_num_neigh = cfg.avg_num_neigh[ni];
                p.bw_scaled = cfg.bw_scaled[bi];
                std::uint64_t coord = cfg.master_seed;
                for (std::uint64_t v : {std::uint64_t{ri}, std::uint64_t{si}, std::uint64_t{ai},
                                        std::uint64_t{ki}, std::uint64_t{ci}, std::uint64_t{ni},
                                        std::uint64_t{bi}}) {
                  coord = mix_seed(coord, v);
                }
                p.seed = coord;
                try {
                  const Dimensions d = plan_dimensions(footprint, p.avg_nz_row);
                  p.nr_rows = d.nr_rows;
                  p.nr_cols = d.nr_cols;
                  e.feasibility = check_feasibility(p);
                } catch (const Error& err) {
                  e.feasibility = {false, false, err.what()};
                }
                out.push_back(std::move(e));
              }
            }
          }
        }
      }
    }
  }
  return out;
}

}  // namespace spmvprobe
