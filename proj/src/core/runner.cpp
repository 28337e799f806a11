#include "core/runner.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "core/ibp.hpp"
#include "core/observables.hpp"
#include "core/version.hpp"
#include "json.hpp"

namespace rfim {

using nlohmann::json;

namespace {

constexpr double kHStep = 1e-4;  // common-seed central difference in h

struct ResolvedCell {
  int index = 0;
  int d = 0, n = 0;
  double beta = 0, h = 0;
  FieldProfile profile;
  ZetaDistribution dist;
  std::string engine;       // exact | transfer-matrix | mcmc
  bool tm_available = false;  // d == 1
  std::vector<std::uint64_t> seeds;
};

struct Needs {
  bool free_energy = false;
  bool fd_in_h = false;
  bool overlap = false;      // <R>, <R^2>
  bool delta = false;
  bool fkg = false;
  bool gg = false;
  bool delta_samples = false;
  int gg_m = 3;
  OverlapFunctionSpec gg_f;
};

struct SeedRecord {
  bool failed = false;
  std::string error;
  std::map<std::string, double> v;
  std::vector<double> delta_samples;  // mcmc cells only
};

void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const int k = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
  pool.reserve(static_cast<std::size_t>(k));
  for (int t = 0; t < k; ++t) {
    pool.emplace_back([&]() {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) break;
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

Needs needs_for(const std::vector<ObservableSpec>& observables) {
  Needs needs;
  for (const auto& o : observables) {
    if (o.name == "overlap-variance") needs.overlap = true;
    if (o.name == "gg-residual") {
      needs.gg = true;
      needs.gg_m = o.m;
      needs.gg_f = parse_overlap_function(o.f);
    }
    if (o.name == "delta-self-averaging") {
      needs.delta = true;
      needs.fd_in_h = true;
      needs.free_energy = true;
      needs.delta_samples = true;
    }
    if (o.name == "q-consistency") {
      needs.overlap = true;
      needs.delta = true;
      needs.fd_in_h = true;
      needs.free_energy = true;
    }
    if (o.name == "fkg-scan") needs.fkg = true;
    if (o.name == "var-fn-scaling") needs.free_energy = true;
  }
  return needs;
}

std::vector<double> overlap_weights(const DisorderRealization& dis) {
  std::vector<double> w(dis.hprofile.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = dis.hprofile[i] * dis.hprofile[i];
  return w;
}

SeedRecord compute_exact_seed(const LatticeSpec& spec, const ResolvedCell& cell,
                              int cap, std::uint64_t seed, const Needs& needs) {
  SeedRecord rec;
  const DisorderRealization dis =
      realize_disorder(spec, cell.profile, cell.dist, seed);
  const ModelParams params{cell.beta, cell.h};
  ExactGibbs st(spec, params, dis, cap);
  rec.v["F"] = st.log_partition();
  const std::vector<double> w = overlap_weights(dis);
  const double vol = static_cast<double>(spec.volume);

  if (needs.overlap || needs.delta) {
    const auto& means = st.site_means();
    if (needs.overlap) {
      double r = 0;
      for (std::int64_t x = 0; x < spec.volume; ++x)
        r += w[static_cast<std::size_t>(x)] * means[static_cast<std::size_t>(x)] *
             means[static_cast<std::size_t>(x)];
      rec.v["R_mean"] = r / vol;
    }
    if (needs.delta) {
      double dsum = 0;
      for (std::int64_t x = 0; x < spec.volume; ++x)
        dsum += dis.g[static_cast<std::size_t>(x)] * means[static_cast<std::size_t>(x)];
      rec.v["Delta_mean"] = dsum / vol;
    }
  }
  if (needs.overlap || needs.fkg) {
    if (needs.overlap) {
      double r2 = 0;
      for (std::int64_t x = 0; x < spec.volume; ++x)
        for (std::int64_t y = 0; y < spec.volume; ++y) {
          const double pm = st.pair_mean(x, y);
          r2 += w[static_cast<std::size_t>(x)] * w[static_cast<std::size_t>(y)] * pm * pm;
        }
      rec.v["R_sq"] = r2 / (vol * vol);
    }
    if (needs.fkg) {
      double worst = 1.0;
      for (std::int64_t x = 0; x < spec.volume; ++x)
        for (std::int64_t y = x; y < spec.volume; ++y)
          worst = std::min(worst, st.truncated_correlation(x, y));
      rec.v["fkg_min"] = worst;
    }
  }
  if (needs.fd_in_h) {
    rec.v["F_plus"] =
        log_partition(spec, {cell.beta, cell.h + kHStep}, dis, cap);
    rec.v["F_minus"] =
        log_partition(spec, {cell.beta, cell.h - kHStep}, dis, cap);
  }
  if (needs.gg) {
    const GgTerms terms = gg_terms_exact(st, needs.gg_m, needs.gg_f, w);
    rec.v["gg_f_r_top"] = terms.f_r_top;
    rec.v["gg_f"] = terms.f_alone;
    rec.v["gg_r12"] = terms.r12;
    for (std::size_t s = 0; s < terms.f_r_s.size(); ++s)
      rec.v["gg_f_r_s" + std::to_string(s + 2)] = terms.f_r_s[s];
  }
  return rec;
}

SeedRecord compute_tm_seed(const ResolvedCell& cell, const LatticeSpec& spec,
                           std::uint64_t seed, const Needs& needs) {
  SeedRecord rec;
  const DisorderRealization dis =
      realize_disorder(spec, cell.profile, cell.dist, seed);
  const ModelParams params{cell.beta, cell.h};
  rec.v["F"] = transfer_matrix_log_partition(params, dis);
  if (needs.fd_in_h) {
    rec.v["F_plus"] =
        transfer_matrix_log_partition({cell.beta, cell.h + kHStep}, dis);
    rec.v["F_minus"] =
        transfer_matrix_log_partition({cell.beta, cell.h - kHStep}, dis);
  }
  if (needs.overlap || needs.delta) {
    const ChainMarginals marg = transfer_matrix_marginals(params, dis);
    const std::vector<double> w = overlap_weights(dis);
    const double vol = static_cast<double>(spec.volume);
    if (needs.overlap) {
      double r = 0;
      for (std::size_t x = 0; x < marg.site_mean.size(); ++x)
        r += w[x] * marg.site_mean[x] * marg.site_mean[x];
      rec.v["R_mean"] = r / vol;
    }
    if (needs.delta) {
      double dsum = 0;
      for (std::size_t x = 0; x < marg.site_mean.size(); ++x)
        dsum += dis.g[x] * marg.site_mean[x];
      rec.v["Delta_mean"] = dsum / vol;
    }
  }
  return rec;
}

SeedRecord compute_mcmc_seed(const LatticeSpec& spec, const ResolvedCell& cell,
                             const SamplerConfig& base_config,
                             std::uint64_t seed, const Needs& needs) {
  SeedRecord rec;
  const DisorderRealization dis =
      realize_disorder(spec, cell.profile, cell.dist, seed);
  const ModelParams params{cell.beta, cell.h};
  const std::vector<double> w = overlap_weights(dis);

  if (cell.tm_available) {
    rec.v["F"] = transfer_matrix_log_partition(params, dis);
    if (needs.fd_in_h) {
      rec.v["F_plus"] =
          transfer_matrix_log_partition({cell.beta, cell.h + kHStep}, dis);
      rec.v["F_minus"] =
          transfer_matrix_log_partition({cell.beta, cell.h - kHStep}, dis);
    }
    if (needs.overlap || needs.delta) {
      const ChainMarginals marg = transfer_matrix_marginals(params, dis);
      const double vol = static_cast<double>(spec.volume);
      double r = 0, dsum = 0;
      for (std::size_t x = 0; x < marg.site_mean.size(); ++x) {
        r += w[x] * marg.site_mean[x] * marg.site_mean[x];
        dsum += dis.g[x] * marg.site_mean[x];
      }
      if (needs.overlap) rec.v["R_mean_exact"] = r / vol;
      if (needs.delta) rec.v["Delta_mean_exact"] = dsum / vol;
    }
  }

  int replicas = 1;
  if (needs.overlap) replicas = 2;
  if (needs.gg) replicas = std::max(replicas, needs.gg_m + 1);
  if (!needs.overlap && !needs.delta && !needs.gg) return rec;

  SamplerConfig cfg = base_config;
  // derive the chain master away from the per-site disorder substreams
  cfg.seed = RngStream::substream(seed, 0xFFFFFFFF00000001ULL).next_u64();

  long samples = 0;
  double r_sum = 0, r2_sum = 0, delta_sum = 0;
  double gg_top = 0, gg_f = 0, gg_r12 = 0;
  std::vector<double> gg_f_r_s(needs.gg ? static_cast<std::size_t>(needs.gg_m - 1) : 0, 0.0);
  std::vector<double> matrix;

  sample_replicas(
      spec, params, dis, replicas, cfg,
      [&](const std::vector<Chain>& chains) {
        ++samples;
        if (needs.overlap) {
          const double r = overlap(chains[0].spins(), chains[1].spins(), w).value;
          r_sum += r;
          r2_sum += r * r;
        }
        if (needs.delta) {
          const double dn = delta_n(chains[0].spins(), dis);
          delta_sum += dn;
          if (needs.delta_samples) rec.delta_samples.push_back(dn);
        }
        if (needs.gg) {
          const int m = needs.gg_m;
          const int mm = m + 1;
          matrix.assign(static_cast<std::size_t>(mm) * mm, 1.0);
          for (int a = 0; a < mm; ++a)
            for (int b = a + 1; b < mm; ++b) {
              const double r =
                  overlap(chains[static_cast<std::size_t>(a)].spins(),
                          chains[static_cast<std::size_t>(b)].spins(), w)
                      .value;
              matrix[static_cast<std::size_t>(a) * mm + b] = r;
              matrix[static_cast<std::size_t>(b) * mm + a] = r;
            }
          const double fval = eval_overlap_function(needs.gg_f, matrix, m);
          const double r_top = matrix[static_cast<std::size_t>(0) * mm + m];
          gg_top += fval * r_top;
          gg_f += fval;
          gg_r12 += matrix[1];
          for (int s = 2; s <= m; ++s)
            gg_f_r_s[static_cast<std::size_t>(s - 2)] +=
                fval * matrix[static_cast<std::size_t>(s - 1)];
        }
      });

  if (samples == 0) fail(ErrorKind::execution, "mcmc produced no samples");
  const double inv = 1.0 / static_cast<double>(samples);
  if (needs.overlap) {
    rec.v["R_mean"] = r_sum * inv;
    rec.v["R_sq"] = r2_sum * inv;
  }
  if (needs.delta) rec.v["Delta_mean"] = delta_sum * inv;
  if (needs.gg) {
    rec.v["gg_f_r_top"] = gg_top * inv;
    rec.v["gg_f"] = gg_f * inv;
    rec.v["gg_r12"] = gg_r12 * inv;
    for (std::size_t s = 0; s < gg_f_r_s.size(); ++s)
      rec.v["gg_f_r_s" + std::to_string(s + 2)] = gg_f_r_s[s] * inv;
  }
  rec.v["samples"] = static_cast<double>(samples);
  return rec;
}

bool all_have(const std::vector<SeedRecord>& recs, const std::string& key) {
  for (const auto& r : recs)
    if (r.v.find(key) == r.v.end()) return false;
  return !recs.empty();
}

QuenchedStats stats_from(const std::vector<SeedRecord>& recs,
                         const std::vector<std::uint64_t>& seeds,
                         const std::string& key) {
  QuenchedStats qs;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    auto it = recs[i].v.find(key);
    if (it != recs[i].v.end()) qs.add(seeds[i], it->second);
  }
  return qs;
}

Row make_row(const ResolvedCell& cell, const std::string& observable,
             double mean, double variance, double se, std::size_t nseeds) {
  Row row;
  row.observable = observable;
  row.n = cell.n;
  row.d = cell.d;
  row.beta = cell.beta;
  row.h = cell.h;
  row.profile = cell.profile.name();
  row.dist = cell.dist.name();
  row.mean = mean;
  row.variance = variance;
  row.se = se;
  row.seeds = nseeds;
  return row;
}

Row row_from_stats(const ResolvedCell& cell, const std::string& observable,
                   const QuenchedStats& qs) {
  return make_row(cell, observable, qs.mean(), qs.variance(),
                  qs.standard_error(), qs.count());
}

std::string csv_file_for(const std::string& observable) {
  if (observable.rfind("overlap", 0) == 0) return "overlap-variance.csv";
  if (observable.rfind("gg-residual", 0) == 0) return "gg-residual.csv";
  if (observable.rfind("delta", 0) == 0) return "delta-self-averaging.csv";
  if (observable.rfind("q-", 0) == 0) return "q-consistency.csv";
  if (observable.rfind("fkg", 0) == 0) return "fkg-scan.csv";
  return "var-fn-scaling.csv";
}

bool trendable(const std::string& observable) {
  return observable == "overlap-nu-variance" || observable == "delta-mad" ||
         observable == "q-gap" || observable == "var-fn-per-volume" ||
         observable.rfind("gg-residual", 0) == 0;
}

}  // namespace

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string csv_text(const std::vector<Row>& rows) {
  std::ostringstream out;
  out << "observable,n,d,beta,h,profile,dist,mean,variance,se,seeds\n";
  for (const auto& r : rows) {
    out << r.observable << ',' << r.n << ',' << r.d << ',' << format_g17(r.beta)
        << ',' << format_g17(r.h) << ',' << r.profile << ',' << r.dist << ','
        << format_g17(r.mean) << ',' << format_g17(r.variance) << ','
        << format_g17(r.se) << ',' << r.seeds << '\n';
  }
  return out.str();
}

json row_to_json(const Row& r) {
  json j;
  j["observable"] = r.observable;
  j["n"] = r.n;
  j["d"] = r.d;
  j["beta"] = r.beta;
  j["h"] = r.h;
  j["profile"] = r.profile;
  j["dist"] = r.dist;
  j["mean"] = r.mean;
  j["variance"] = r.variance;
  j["se"] = r.se;
  j["seeds"] = r.seeds;
  return j;
}

json trend_to_json(const CellTrend& t) {
  json j;
  j["observable"] = t.report.observable;
  j["d"] = t.d;
  j["beta"] = t.beta;
  j["h"] = t.h;
  j["profile"] = t.profile;
  j["dist"] = t.dist;
  json pts = json::array();
  for (const auto& p : t.report.points)
    pts.push_back({{"n", p.n}, {"estimate", p.estimate}, {"se", p.se}});
  j["points"] = pts;
  j["verdict"] = verdict_name(t.report.verdict);
  if (t.report.decay_exponent) j["decay_exponent"] = *t.report.decay_exponent;
  if (t.report.exponent_ci_half_width)
    j["exponent_ci_half_width"] = *t.report.exponent_ci_half_width;
  if (t.report.max_min_ratio) j["max_min_ratio"] = *t.report.max_min_ratio;
  if (t.report.bounded) j["bounded"] = *t.report.bounded;
  return j;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot write " + path.string());
  out << text;
}

}  // namespace

RunOutput run_plan(const Plan& plan, const std::string& mode,
                   const std::string& out_dir, int workers,
                   const std::vector<std::vector<std::uint64_t>>* seed_override) {
  if (mode != "all" && mode != "exact" && mode != "mcmc" && mode != "gg" &&
      mode != "ibp")
    fail(ErrorKind::invalid_argument, "run mode must be all|exact|mcmc|gg|ibp");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(ErrorKind::io, "cannot create output directory " + out_dir);

  // effective observables under the mode slice
  std::vector<ObservableSpec> effective;
  for (const auto& o : plan.observables) {
    if (o.name == "ibp-suite") continue;
    if (mode == "gg" && o.name != "gg-residual") continue;
    if (mode == "ibp") continue;
    effective.push_back(o);
  }
  const bool run_ibp = plan.wants("ibp-suite") && (mode == "all" || mode == "ibp");

  // resolve cells
  std::vector<ResolvedCell> cells;
  int index = 0;
  for (int n : plan.n)
    for (double beta : plan.beta)
      for (double h : plan.h)
        for (const auto& profile : plan.profiles)
          for (const auto& dist : plan.dists) {
            ResolvedCell cell;
            cell.index = index++;
            cell.d = plan.d;
            cell.n = n;
            cell.beta = beta;
            cell.h = h;
            cell.profile = profile;
            cell.dist = dist;
            cell.engine = resolve_engine(plan, n);
            cell.tm_available = plan.d == 1;
            cell.seeds.resize(static_cast<std::size_t>(plan.seed_count));
            for (int s = 0; s < plan.seed_count; ++s)
              cell.seeds[static_cast<std::size_t>(s)] =
                  plan.seed_base +
                  static_cast<std::uint64_t>(cell.index) *
                      static_cast<std::uint64_t>(plan.seed_count) +
                  static_cast<std::uint64_t>(s);
            cells.push_back(std::move(cell));
          }
  if (seed_override) {
    if (seed_override->size() != cells.size())
      fail(ErrorKind::invalid_argument, "seed override does not match the grid");
    for (std::size_t i = 0; i < cells.size(); ++i)
      cells[i].seeds = (*seed_override)[i];
  }

  auto included = [&](const ResolvedCell& cell) {
    if (effective.empty()) return false;
    if (mode == "exact")
      return cell.engine == "exact" || cell.engine == "transfer-matrix";
    if (mode == "mcmc") return cell.engine == "mcmc";
    return mode == "all" || mode == "gg";
  };

  const Needs needs = needs_for(effective);

  // phase A: per (cell, seed) records
  struct Task {
    std::size_t cell;
    std::size_t seed_pos;
  };
  std::vector<Task> tasks;
  std::vector<std::size_t> active_cells;
  std::vector<LatticeSpec> lattices(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (!included(cells[c])) continue;
    active_cells.push_back(c);
    lattices[c] = build_lattice(cells[c].d, cells[c].n);
    for (std::size_t s = 0; s < cells[c].seeds.size(); ++s) tasks.push_back({c, s});
  }

  std::vector<SeedRecord> records(tasks.size());
  parallel_for(tasks.size(), workers, [&](std::size_t i) {
    const auto& task = tasks[i];
    const ResolvedCell& cell = cells[task.cell];
    const std::uint64_t seed = cell.seeds[task.seed_pos];
    try {
      if (cell.engine == "exact")
        records[i] = compute_exact_seed(lattices[task.cell], cell,
                                        plan.enumeration_cap, seed, needs);
      else if (cell.engine == "transfer-matrix")
        records[i] = compute_tm_seed(cell, lattices[task.cell], seed, needs);
      else
        records[i] = compute_mcmc_seed(lattices[task.cell], cell, plan.mcmc,
                                       seed, needs);
    } catch (const std::exception& e) {
      records[i].failed = true;
      records[i].error = e.what();
    }
  });

  // regroup per cell
  std::map<std::size_t, std::vector<SeedRecord>> by_cell;
  {
    std::size_t pos = 0;
    for (std::size_t c : active_cells) {
      auto& bucket = by_cell[c];
      bucket.resize(cells[c].seeds.size());
      for (std::size_t s = 0; s < cells[c].seeds.size(); ++s)
        bucket[s] = std::move(records[pos++]);
    }
  }

  json errors = json::array();
  std::set<std::size_t> failed_cells;
  for (std::size_t c : active_cells) {
    for (std::size_t s = 0; s < by_cell[c].size(); ++s) {
      if (by_cell[c][s].failed) {
        if (!failed_cells.count(c)) {
          errors.push_back({{"cell", cells[c].index},
                            {"seed", cells[c].seeds[s]},
                            {"message", by_cell[c][s].error}});
          failed_cells.insert(c);
        }
      }
    }
  }

  // phase B: <|Delta - nu(Delta)|> per seed, centered on the phase-A mean
  const bool want_delta = needs.delta_samples;
  std::map<std::size_t, double> delta_center;
  if (want_delta) {
    std::vector<Task> btasks;
    for (std::size_t c : active_cells) {
      if (failed_cells.count(c)) continue;
      const auto& recs = by_cell[c];
      const std::string key =
          all_have(recs, "Delta_mean_exact") ? "Delta_mean_exact" : "Delta_mean";
      if (!all_have(recs, key)) continue;
      double acc = 0;
      for (const auto& r : recs) acc += r.v.at(key);
      delta_center[c] = acc / static_cast<double>(recs.size());
      for (std::size_t s = 0; s < cells[c].seeds.size(); ++s) btasks.push_back({c, s});
    }
    parallel_for(btasks.size(), workers, [&](std::size_t i) {
      const auto& task = btasks[i];
      const ResolvedCell& cell = cells[task.cell];
      SeedRecord& rec = by_cell[task.cell][task.seed_pos];
      const double center = delta_center[task.cell];
      try {
        if (cell.engine == "exact") {
          const DisorderRealization dis = realize_disorder(
              lattices[task.cell], cell.profile, cell.dist,
              cell.seeds[task.seed_pos]);
          ExactGibbs st(lattices[task.cell], {cell.beta, cell.h}, dis,
                        plan.enumeration_cap);
          rec.v["Delta_absdev"] = st.abs_delta_deviation(center);
        } else if (cell.engine == "mcmc") {
          if (!rec.delta_samples.empty()) {
            double acc = 0;
            for (double dn : rec.delta_samples) acc += std::abs(dn - center);
            rec.v["Delta_absdev"] = acc / static_cast<double>(rec.delta_samples.size());
          }
        }
      } catch (const std::exception& e) {
        rec.failed = true;
        rec.error = e.what();
      }
    });
  }

  // aggregate rows per cell
  RunOutput out;
  for (std::size_t c : active_cells) {
    if (failed_cells.count(c)) continue;
    const ResolvedCell& cell = cells[c];
    const auto& recs = by_cell[c];
    const double vol = static_cast<double>(lattices[c].volume);
    const std::size_t k = recs.size();

    auto rows_of = [&](const std::string& key) {
      std::vector<std::vector<double>> rows;
      rows.reserve(k);
      for (const auto& r : recs) rows.push_back({r.v.at(key)});
      return rows;
    };
    (void)rows_of;

    for (const auto& o : effective) {
      if (o.name == "overlap-variance" && all_have(recs, "R_mean") &&
          all_have(recs, "R_sq")) {
        const QuenchedStats qr = stats_from(recs, cell.seeds, "R_mean");
        const QuenchedStats qr2 = stats_from(recs, cell.seeds, "R_sq");
        QuenchedStats thermal;
        for (std::size_t s = 0; s < k; ++s)
          thermal.add(cell.seeds[s],
                      recs[s].v.at("R_sq") -
                          recs[s].v.at("R_mean") * recs[s].v.at("R_mean"));
        std::vector<std::vector<double>> jrows;
        for (const auto& r : recs) jrows.push_back({r.v.at("R_sq"), r.v.at("R_mean")});
        const JackknifeResult nu_var = jackknife(
            jrows, [](const std::vector<double>& m) { return m[0] - m[1] * m[1]; });
        out.rows.push_back(row_from_stats(cell, "overlap-mean", qr));
        out.rows.push_back(row_from_stats(cell, "overlap-second-moment", qr2));
        out.rows.push_back(row_from_stats(cell, "overlap-thermal-variance", thermal));
        out.rows.push_back(make_row(cell, "overlap-nu-variance", nu_var.estimate,
                                    nu_var.se * nu_var.se, nu_var.se, k));
      } else if (o.name == "gg-residual" && all_have(recs, "gg_f_r_top")) {
        std::vector<GgTerms> terms(k);
        for (std::size_t s = 0; s < k; ++s) {
          terms[s].f_r_top = recs[s].v.at("gg_f_r_top");
          terms[s].f_alone = recs[s].v.at("gg_f");
          terms[s].r12 = recs[s].v.at("gg_r12");
          for (int q = 2; q <= o.m; ++q)
            terms[s].f_r_s.push_back(recs[s].v.at("gg_f_r_s" + std::to_string(q)));
        }
        const JackknifeResult res = gg_residual(terms, o.m);
        const std::string label =
            "gg-residual(m=" + std::to_string(o.m) + ",f=" + o.f + ")";
        out.rows.push_back(
            make_row(cell, label, res.estimate, res.se * res.se, res.se, k));
      } else if (o.name == "delta-self-averaging") {
        const std::string dkey =
            all_have(recs, "Delta_mean_exact") ? "Delta_mean_exact" : "Delta_mean";
        if (all_have(recs, dkey))
          out.rows.push_back(
              row_from_stats(cell, "delta-mean", stats_from(recs, cell.seeds, dkey)));
        if (all_have(recs, "Delta_absdev"))
          out.rows.push_back(row_from_stats(
              cell, "delta-mad", stats_from(recs, cell.seeds, "Delta_absdev")));
        if (all_have(recs, dkey) && all_have(recs, "F_plus")) {
          QuenchedStats gap;
          for (std::size_t s = 0; s < k; ++s) {
            const double fd = (recs[s].v.at("F_plus") - recs[s].v.at("F_minus")) /
                              (2.0 * kHStep * vol);
            gap.add(cell.seeds[s], std::abs(recs[s].v.at(dkey) - fd));
          }
          out.rows.push_back(row_from_stats(cell, "delta-dpsi-fd-gap", gap));
        }
      } else if (o.name == "q-consistency") {
        const std::string rkey =
            all_have(recs, "R_mean_exact") ? "R_mean_exact" : "R_mean";
        const std::string dkey =
            all_have(recs, "Delta_mean_exact") ? "Delta_mean_exact" : "Delta_mean";
        if (!all_have(recs, rkey) || !all_have(recs, dkey) ||
            !all_have(recs, "F_plus"))
          continue;
        out.rows.push_back(
            row_from_stats(cell, "q-nu-r12", stats_from(recs, cell.seeds, rkey)));
        std::vector<std::vector<double>> jrows;
        for (const auto& r : recs)
          jrows.push_back({r.v.at("F_plus"), r.v.at("F_minus"), r.v.at(dkey),
                           r.v.at(rkey)});
        const double h = cell.h;
        const JackknifeResult rhs =
            jackknife(jrows, [vol, h](const std::vector<double>& m) {
              const double dpdh = (m[0] - m[1]) / (2.0 * kHStep * vol);
              return 1.0 - dpdh / h;
            });
        const JackknifeResult gap =
            jackknife(jrows, [h](const std::vector<double>& m) {
              return std::abs(m[2] - h * (1.0 - m[3]));
            });
        out.rows.push_back(
            make_row(cell, "q-rhs", rhs.estimate, rhs.se * rhs.se, rhs.se, k));
        out.rows.push_back(
            make_row(cell, "q-gap", gap.estimate, gap.se * gap.se, gap.se, k));
      } else if (o.name == "fkg-scan" && all_have(recs, "fkg_min")) {
        const QuenchedStats qs = stats_from(recs, cell.seeds, "fkg_min");
        out.rows.push_back(row_from_stats(cell, "fkg-min-per-seed", qs));
        double global = 1.0;
        for (const auto& rec : qs.records()) global = std::min(global, rec.second);
        out.rows.push_back(make_row(cell, "fkg-global-min", global, 0.0, 0.0, k));
      } else if (o.name == "var-fn-scaling" && all_have(recs, "F")) {
        const QuenchedStats qf = stats_from(recs, cell.seeds, "F");
        out.rows.push_back(row_from_stats(cell, "free-energy", qf));
        std::vector<std::vector<double>> jrows;
        for (const auto& r : recs)
          jrows.push_back({r.v.at("F"), r.v.at("F") * r.v.at("F")});
        const double kk = static_cast<double>(k);
        const JackknifeResult vf =
            jackknife(jrows, [vol, kk](const std::vector<double>& m) {
              const double pop = m[1] - m[0] * m[0];
              return pop * kk / std::max(1.0, kk - 1.0) / vol;
            });
        out.rows.push_back(make_row(cell, "var-fn-per-volume", vf.estimate,
                                    vf.se * vf.se, vf.se, k));
      }
    }
  }

  // deterministic row order
  std::sort(out.rows.begin(), out.rows.end(), [](const Row& a, const Row& b) {
    return std::tie(a.observable, a.d, a.n, a.beta, a.h, a.profile, a.dist) <
           std::tie(b.observable, b.d, b.n, b.beta, b.h, b.profile, b.dist);
  });

  // trends across the n-ladder
  {
    std::map<std::string, std::vector<const Row*>> groups;
    for (const auto& row : out.rows) {
      if (!trendable(row.observable)) continue;
      const std::string key = row.observable + "|" + std::to_string(row.d) + "|" +
                              format_g17(row.beta) + "|" + format_g17(row.h) +
                              "|" + row.profile + "|" + row.dist;
      groups[key].push_back(&row);
    }
    for (const auto& [key, rows] : groups) {
      if (rows.size() < 2) continue;
      std::vector<TrendPoint> pts;
      for (const Row* r : rows) {
        TrendPoint p;
        p.n = r->n;
        p.estimate = r->observable.rfind("gg-residual", 0) == 0
                         ? std::abs(r->mean)
                         : r->mean;
        p.se = r->se;
        pts.push_back(p);
      }
      CellTrend trend;
      trend.d = rows[0]->d;
      trend.beta = rows[0]->beta;
      trend.h = rows[0]->h;
      trend.profile = rows[0]->profile;
      trend.dist = rows[0]->dist;
      trend.report = analyze_trend(rows[0]->observable, pts, plan.bound_factor);
      out.trends.push_back(std::move(trend));
    }
  }

  // ibp suite
  json ibp_json;
  if (run_ibp) {
    try {
      const auto reports = ibp::run_suite();
      const std::string text = ibp::reports_to_json(reports);
      ibp_json = json::parse(text);
      write_file(std::filesystem::path(out_dir) / "ibp_reports.json", text);
    } catch (const std::exception& e) {
      errors.push_back({{"cell", -1}, {"message", std::string("ibp-suite: ") + e.what()}});
    }
  }

  out.failed_cells = static_cast<int>(failed_cells.size());

  // manifest
  json manifest;
  manifest["format"] = "rfim-manifest-v1";
  manifest["software"] = {{"name", kProjectName}, {"version", kVersion}};
  manifest["mode"] = mode;
  manifest["plan"] = json::parse(plan.to_json());
  json jcells = json::array();
  for (const auto& cell : cells) {
    json jc;
    jc["index"] = cell.index;
    jc["d"] = cell.d;
    jc["n"] = cell.n;
    jc["beta"] = cell.beta;
    jc["h"] = cell.h;
    jc["profile"] = json::parse(cell.profile.to_json());
    jc["dist"] = json::parse(cell.dist.to_json());
    jc["engine"] = cell.engine;
    jc["seeds"] = cell.seeds;
    jcells.push_back(jc);
  }
  manifest["cells"] = jcells;
  manifest["errors"] = errors;
  write_file(std::filesystem::path(out_dir) / "manifest.json", manifest.dump(2));

  // CSVs
  const bool want_csv =
      std::find(plan.formats.begin(), plan.formats.end(), "csv") != plan.formats.end();
  if (want_csv) {
    std::map<std::string, std::vector<Row>> files;
    for (const auto& row : out.rows) files[csv_file_for(row.observable)].push_back(row);
    for (const auto& [name, rows] : files)
      write_file(std::filesystem::path(out_dir) / name, csv_text(rows));
  }

  // summary
  json summary;
  summary["software"] = {{"name", kProjectName}, {"version", kVersion}};
  summary["mode"] = mode;
  summary["failed_cells"] = out.failed_cells;
  json jrows = json::array();
  for (const auto& row : out.rows) jrows.push_back(row_to_json(row));
  summary["rows"] = jrows;
  json jtrends = json::array();
  for (const auto& t : out.trends) jtrends.push_back(trend_to_json(t));
  summary["trends"] = jtrends;
  summary["errors"] = errors;
  if (!ibp_json.is_null()) summary["ibp"] = ibp_json;
  out.summary_json = summary.dump(2);
  const bool want_json =
      std::find(plan.formats.begin(), plan.formats.end(), "json") != plan.formats.end();
  if (want_json)
    write_file(std::filesystem::path(out_dir) / "summary.json", out.summary_json);

  return out;
}

RunOutput replay_manifest(const std::string& manifest_text,
                          const std::string& out_dir, int workers) {
  json manifest;
  try {
    manifest = json::parse(manifest_text);
  } catch (const std::exception& e) {
    fail(ErrorKind::validation, std::string("manifest: bad json: ") + e.what());
  }
  if (!manifest.contains("plan") || !manifest.contains("cells"))
    fail(ErrorKind::validation, "manifest: missing plan or cells");
  const std::string mode = manifest.value("mode", std::string("all"));
  ValidationResult vr = validate_plan(manifest["plan"].dump());
  if (!vr.ok())
    fail(ErrorKind::validation,
         "manifest: embedded plan fails validation: " + diagnostics_to_json(vr.diagnostics));
  std::vector<std::vector<std::uint64_t>> seeds;
  for (const auto& cell : manifest["cells"])
    seeds.push_back(cell["seeds"].get<std::vector<std::uint64_t>>());
  return run_plan(*vr.plan, mode, out_dir, workers, &seeds);
}

std::string trend_from_csv(const std::string& csv_text_in,
                           const std::string& observable) {
  std::istringstream in(csv_text_in);
  std::string line;
  if (!std::getline(in, line))
    fail(ErrorKind::invalid_argument, "trend: empty csv");
  std::map<std::string, std::vector<Row>> groups;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 11) continue;
    Row row;
    row.observable = fields[0];
    row.n = std::stoi(fields[1]);
    row.d = std::stoi(fields[2]);
    row.beta = std::stod(fields[3]);
    row.h = std::stod(fields[4]);
    row.profile = fields[5];
    row.dist = fields[6];
    row.mean = std::stod(fields[7]);
    row.variance = std::stod(fields[8]);
    row.se = std::stod(fields[9]);
    row.seeds = static_cast<std::size_t>(std::stoul(fields[10]));
    if (row.observable != observable) continue;
    const std::string key = std::to_string(row.d) + "|" + format_g17(row.beta) +
                            "|" + format_g17(row.h) + "|" + row.profile + "|" +
                            row.dist;
    groups[key].push_back(row);
  }
  json arr = json::array();
  for (const auto& [key, rows] : groups) {
    std::vector<TrendPoint> pts;
    for (const auto& r : rows) {
      TrendPoint p;
      p.n = r.n;
      p.estimate = observable.rfind("gg-residual", 0) == 0 ? std::abs(r.mean) : r.mean;
      p.se = r.se;
      pts.push_back(p);
    }
    CellTrend trend;
    trend.d = rows[0].d;
    trend.beta = rows[0].beta;
    trend.h = rows[0].h;
    trend.profile = rows[0].profile;
    trend.dist = rows[0].dist;
    trend.report = analyze_trend(observable, pts);
    arr.push_back(trend_to_json(trend));
  }
  return arr.dump(2);
}

}  // namespace rfim
