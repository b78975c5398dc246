#include "spmvprobe/validation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

#include "spmvprobe/error.hpp"
#include "spmvprobe/random.hpp"

namespace spmvprobe {

bool select_best(SweepRecord& rec) {
  rec.best_format.reset();
  rec.best_gflops = 0.0;
  bool tie = false;
  for (Format f : kAllFormats) {
    for (const BenchResult& r : rec.results) {
      if (r.format != f) continue;
      if (!rec.best_format || r.gflops > rec.best_gflops) {
        rec.best_format = f;
        rec.best_gflops = r.gflops;
        tie = false;
      } else if (r.gflops == rec.best_gflops) {
        tie = true;
      }
    }
  }
  return tie;
}

std::vector<ResultsRow> to_rows(const SweepRecord& rec) {
  std::vector<ResultsRow> rows;
  for (const FormatOutcome& o : rec.outcomes) {
    ResultsRow row;
    row.matrix_id = rec.matrix_id;
    row.params = rec.gen_params;
    row.measured = rec.measured;
    row.format = o.format;
    row.status = o.status;
    if (o.status == RecordStatus::ok) {
      const auto it = std::find_if(rec.results.begin(), rec.results.end(),
                                   [&](const BenchResult& r) { return r.format == o.format; });
      if (it == rec.results.end()) {
        throw Error(ErrorKind::invalid_argument, "record " + rec.matrix_id + " lacks a result for " +
                                                     std::string(to_string(o.format)));
      }
      RowTiming t;
      t.workers = it->workers;
      t.iterations = it->iterations;
      t.repeats = it->repeats;
      t.mean_seconds_per_iter = it->mean_seconds_per_iter;
      t.gflops = it->gflops;
      t.roofline_gflops = rec.roofline_gflops;
      row.timing = t;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<SweepRecord> records_from_rows(const std::vector<ResultsRow>& rows) {
  std::vector<SweepRecord> out;
  std::unordered_map<std::string, std::size_t> index;
  for (const ResultsRow& row : rows) {
    auto [it, inserted] = index.try_emplace(row.matrix_id, out.size());
    if (inserted) {
      SweepRecord rec;
      rec.matrix_id = row.matrix_id;
      rec.gen_params = row.params;
      rec.measured = row.measured;
      rec.status = row.status == RecordStatus::infeasible ? RecordStatus::infeasible : RecordStatus::ok;
      out.push_back(std::move(rec));
    }
    SweepRecord& rec = out[it->second];
    if (!rec.measured && row.measured) rec.measured = row.measured;
    // Later rows for the same (matrix, format) supersede earlier ones.
    std::erase_if(rec.outcomes, [&](const FormatOutcome& o) { return o.format == row.format; });
    std::erase_if(rec.results, [&](const BenchResult& r) { return r.format == row.format; });
    rec.outcomes.push_back({row.format, row.status});
    if (row.status == RecordStatus::ok && row.timing) {
      BenchResult r;
      r.matrix_id = row.matrix_id;
      r.format = row.format;
      r.iterations = row.timing->iterations;
      r.repeats = row.timing->repeats;
      r.mean_seconds_per_iter = row.timing->mean_seconds_per_iter;
      r.min_seconds_per_iter = r.mean_seconds_per_iter;
      r.max_seconds_per_iter = r.mean_seconds_per_iter;
      r.gflops = row.timing->gflops;
      r.workers = row.timing->workers;
      r.nnz = row.measured ? row.measured->nnz : 0;
      rec.results.push_back(r);
      if (row.timing->roofline_gflops) rec.roofline_gflops = row.timing->roofline_gflops;
    }
  }
  for (SweepRecord& rec : out) select_best(rec);
  return out;
}

std::size_t shard_of(const GenParams& p, std::size_t shard_count) {
  if (shard_count == 0) throw Error(ErrorKind::invalid_argument, "shard count must be >= 1");
  const std::uint64_t key = std::stoull(gen_params_key(p), nullptr, 16);
  return static_cast<std::size_t>(key % shard_count);
}

SweepRecord bench_matrix(const CsrMatrix& m, std::string matrix_id, const MachineProfile& profile,
                         const std::vector<Format>& formats, const BenchConfig& cfg,
                         std::uint64_t x_seed) {
  SweepRecord rec;
  rec.matrix_id = std::move(matrix_id);
  rec.measured = extract_features(m);
  rec.roofline_gflops = roofline_bound(m, profile);
  const DenseVector x = make_input_vector(m.nr_cols, x_seed);
  for (Format f : formats) {
    FormatOutcome o{f, RecordStatus::ok};
    try {
      const PreparedKernel k = prepare_kernel(m, f, cfg.workers, cfg.limits);
      rec.results.push_back(time_spmv(k, m, x, cfg, rec.matrix_id));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::capacity_exceeded) o.status = RecordStatus::capacity_exceeded;
      else if (e.kind() == ErrorKind::correctness_failure) o.status = RecordStatus::correctness_failure;
      else throw;
    } catch (const std::bad_alloc&) {
      o.status = RecordStatus::capacity_exceeded;
    }
    rec.outcomes.push_back(o);
  }
  select_best(rec);
  return rec;
}

std::vector<SweepRecord> run_sweep(const std::vector<GenParams>& grid, const MachineProfile& profile,
                                   const SweepOptions& opts) {
  if (opts.shard_count == 0 || opts.shard_index >= opts.shard_count) {
    throw Error(ErrorKind::invalid_argument, "shard index must be in [0, shard count)");
  }
  if (opts.formats.empty()) throw Error(ErrorKind::invalid_argument, "no formats requested");

  std::map<std::string, SweepRecord> done;
  std::optional<ResultsWriter> writer;
  if (!opts.results_path.empty()) {
    for (SweepRecord& rec : records_from_rows(read_results(opts.results_path))) {
      done.emplace(rec.matrix_id, std::move(rec));
    }
    writer.emplace(opts.results_path);
  }

  std::vector<const GenParams*> mine;
  for (const GenParams& p : grid) {
    if (shard_of(p, opts.shard_count) == opts.shard_index) mine.push_back(&p);
  }

  std::vector<SweepRecord> out;
  out.reserve(mine.size());
  for (const GenParams* pp : mine) {
    const GenParams& p = *pp;
    const std::string id = gen_params_key(p);

    SweepRecord prior;
    std::vector<Format> todo;
    if (auto it = done.find(id); it != done.end()) {
      prior = std::move(it->second);
      done.erase(it);
      for (Format f : opts.formats) {
        const bool have = std::any_of(prior.outcomes.begin(), prior.outcomes.end(),
                                      [&](const FormatOutcome& o) { return o.format == f; });
        if (!have) todo.push_back(f);
      }
    } else {
      todo = opts.formats;
    }

    SweepRecord rec;
    if (todo.empty()) {
      rec = std::move(prior);
    } else {
      rec.matrix_id = id;
      rec.gen_params = p;
      bool built = false;
      CsrMatrix m;
      if (check_feasibility(p).feasible) {
        try {
          m = generate(p);
          built = true;
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::infeasible && e.kind() != ErrorKind::capacity_exceeded) throw;
        } catch (const std::bad_alloc&) {
        }
      }
      if (built) {
        rec = bench_matrix(m, id, profile, todo, opts.bench, p.seed);
        rec.gen_params = p;
      } else {
        rec.status = RecordStatus::infeasible;
        for (Format f : todo) rec.outcomes.push_back({f, RecordStatus::infeasible});
      }
      if (writer) writer->append(to_rows(rec));

      // Merge with formats finished by an earlier run.
      for (const FormatOutcome& o : prior.outcomes) {
        if (std::find(todo.begin(), todo.end(), o.format) != todo.end()) continue;
        rec.outcomes.push_back(o);
      }
      for (const BenchResult& r : prior.results) {
        if (std::find(todo.begin(), todo.end(), r.format) == todo.end()) rec.results.push_back(r);
      }
      if (!rec.measured) rec.measured = prior.measured;
      if (!rec.roofline_gflops) rec.roofline_gflops = prior.roofline_gflops;
      select_best(rec);
    }
    out.push_back(std::move(rec));
    if (opts.progress) opts.progress(out.back(), out.size(), mine.size());
  }
  return out;
}

std::vector<GenParams> make_friends(const FeatureVector& base, std::size_t count, std::uint64_t seed,
                                    const FriendOptions& opts) {
  if (opts.perturbation < 0.0 || opts.perturbation >= 1.0) {
    throw Error(ErrorKind::invalid_argument, "perturbation must be in [0, 1)");
  }
  if (!(base.avg_nz_row > 0.0) || !(base.mem_footprint_mb > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "base matrix has no nonzeros");
  }
  const double q = opts.perturbation;
  std::vector<GenParams> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(mix_seed(seed, i));
    auto draw = [&](double f) { return f * (1.0 - q + 2.0 * q * rng.uniform()); };
    for (std::size_t attempt = 0; attempt <= opts.max_redraws; ++attempt) {
      GenParams p;
      const double footprint = draw(base.mem_footprint_mb);
      p.avg_nz_row = draw(base.avg_nz_row);
      p.skew_coef = draw(base.skew_coeff);
      p.cross_row_sim = std::clamp(draw(base.cross_row_sim), 0.0, 1.0);
      p.avg_num_neigh = std::clamp(draw(base.avg_num_neigh), 0.0, 2.0);
      p.std_nz_row = base.std_nz_row * p.avg_nz_row / base.avg_nz_row;
      p.seed = mix_seed(seed ^ 0x667269656e6473ULL, (i << 16) | attempt);
      Dimensions d;
      try {
        d = plan_dimensions(footprint, p.avg_nz_row);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::infeasible) throw;
        continue;
      }
      p.nr_rows = d.nr_rows;
      p.nr_cols = d.nr_cols;
      p.bw_scaled = 1.0;
      const double longest = static_cast<double>(max_row_target(p)) / static_cast<double>(p.nr_cols);
      p.bw_scaled = std::min(1.0, std::max(base.bw_scaled, longest));
      if (check_feasibility(p).feasible) {
        out.push_back(p);
        break;
      }
    }
  }
  return out;
}

FriendSet validate_with_friends(const CsrMatrix& real, std::string base_id, std::size_t count,
                                std::uint64_t seed, const MachineProfile& profile,
                                const SweepOptions& opts, const FriendOptions& fopts) {
  FriendSet set;
  set.base_id = std::move(base_id);
  set.base_record = bench_matrix(real, set.base_id, profile, opts.formats, opts.bench, seed);
  set.base = *set.base_record.measured;
  const auto params = make_friends(set.base, count, seed, fopts);
  set.friends = run_sweep(params, profile, opts);
  return set;
}

FriendPair friend_pair(const FriendSet& set) {
  FriendPair pair;
  pair.base_gflops = set.base_record.best_gflops;
  for (const SweepRecord& f : set.friends) {
    if (f.best_format) pair.friend_gflops.push_back(f.best_gflops);
  }
  return pair;
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorKind::empty_input, "median of an empty list");
  const std::size_t n = values.size();
  std::sort(values.begin(), values.end());
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

void check_pairs(const std::vector<FriendPair>& pairs) {
  if (pairs.empty()) throw Error(ErrorKind::empty_input, "no (base, friends) pairs");
  for (const FriendPair& p : pairs) {
    if (p.friend_gflops.empty()) throw Error(ErrorKind::empty_input, "a base matrix has no friends");
    if (!(p.base_gflops > 0.0)) throw Error(ErrorKind::invalid_argument, "base performance must be > 0");
  }
}

}  // namespace

double mape(const std::vector<FriendPair>& pairs) {
  check_pairs(pairs);
  double sum = 0.0;
  for (const FriendPair& p : pairs) {
    sum += std::abs(p.base_gflops - median(p.friend_gflops)) / p.base_gflops * 100.0;
  }
  return sum / static_cast<double>(pairs.size());
}

double ape_best(const std::vector<FriendPair>& pairs) {
  check_pairs(pairs);
  double sum = 0.0;
  for (const FriendPair& p : pairs) {
    double best = INFINITY;
    for (double f : p.friend_gflops) best = std::min(best, std::abs(p.base_gflops - f));
    sum += best / p.base_gflops * 100.0;
  }
  return sum / static_cast<double>(pairs.size());
}

FormatWins format_wins(const std::vector<SweepRecord>& records) {
  FormatWins w;
  w.formats.assign(std::begin(kAllFormats), std::end(kAllFormats));
  std::vector<std::size_t> wins(w.formats.size(), 0);
  for (const SweepRecord& rec : records) {
    SweepRecord copy;
    copy.results = rec.results;
    const bool tie = select_best(copy);
    if (!copy.best_format) continue;
    ++w.counted;
    if (tie) ++w.ties;
    ++wins[static_cast<std::size_t>(*copy.best_format)];
  }
  w.percent.assign(w.formats.size(), 0.0);
  if (w.counted > 0) {
    for (std::size_t i = 0; i < wins.size(); ++i) {
      w.percent[i] = 100.0 * static_cast<double>(wins[i]) / static_cast<double>(w.counted);
    }
  }
  return w;
}

}  // namespace spmvprobe
