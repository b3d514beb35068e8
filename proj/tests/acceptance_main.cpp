// Acceptance gates for the adaptive chunk-sampling library. Each criterion
// prints one PASS/FAIL line with its measurements; the process exits nonzero
// if any gate fails. Tolerances are pinned next to each check.

#include "exsample/analysis.hpp"
#include "exsample/commands.hpp"
#include "exsample/core.hpp"
#include "exsample/estimator.hpp"
#include "exsample/rng.hpp"
#include "exsample/runner.hpp"
#include "exsample/sampler.hpp"
#include "exsample/simulation.hpp"
#include "exsample/stats.hpp"
#include "exsample/validation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace exsample;

namespace {

constexpr double kMedianSeFactor = 1.2533;  // se(median) ~ 1.2533 * sd / sqrt(R)

unsigned hw_threads() {
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_over(std::size_t count, const std::function<void(std::size_t)>& fn) {
  std::size_t workers = std::min<std::size_t>(hw_threads(), count ? count : 1);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count;
           i = next.fetch_add(1))
        fn(i);
    });
  for (auto& th : pool) th.join();
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::string fmt(const char* f, ...) {
  va_list args;
  va_start(args, f);
  char buf[512];
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

struct CriterionResult {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& on_fail) {
    if (!ok) {
      pass = false;
      notes.push_back("VIOLATION: " + on_fail);
    }
  }
  void note(const std::string& line) { notes.push_back(line); }
};

// ---------------------------------------------------------------- criterion 1

CriterionResult criterion_bias_ceilings() {
  CriterionResult out;
  RngStream rng(11, 0);
  const std::uint64_t horizons[] = {1, 10, 1000, 100000};
  std::size_t evaluations = 0;
  double max_bias = 0.0;
  double tightest_margin = std::numeric_limits<double>::infinity();

  for (int trial = 0; trial < 200; ++trial) {
    auto n_inst = static_cast<std::size_t>(1 + rng.uniform_below(2000));
    std::vector<double> p;
    if (trial % 2 == 0) {
      double mean = std::pow(10.0, -(1.0 + 3.0 * rng.uniform()));
      double sigma = 0.5 + 1.5 * rng.uniform();
      p = gen_lognormal_p(n_inst, mean, sigma, rng);
    } else {
      double hi = std::pow(10.0, -3.0 * rng.uniform());
      p.resize(n_inst);
      for (double& v : p) v = hi * rng.uniform_pos();
    }
    DurationStats st = duration_stats(p);
    auto [cap_largest, cap_moment] = bias_upper_bounds(st, p.size());
    double ceiling = std::min(cap_largest, cap_moment);
    for (std::uint64_t n : horizons) {
      double bias = analytic_relative_bias(p, n);
      ++evaluations;
      max_bias = std::max(max_bias, bias);
      tightest_margin = std::min(tightest_margin, ceiling - bias);
      out.require(bias >= -1e-12,
                  fmt("trial %d n=%llu: bias %.3e below -1e-12", trial,
                      static_cast<unsigned long long>(n), bias));
      out.require(bias <= ceiling + 1e-9,
                  fmt("trial %d n=%llu: bias %.6f above ceiling %.6f", trial,
                      static_cast<unsigned long long>(n), bias, ceiling));
    }
  }
  out.note(fmt("%zu evaluations over 200 random workloads; largest bias %.4f; "
               "tightest ceiling margin %.3e",
               evaluations, max_bias, tightest_margin));
  return out;
}

// ---------------------------------------------------------------- criterion 2

CriterionResult criterion_validation_gates() {
  CriterionResult out;
  ValidationConfig vc;
  vc.threads = hw_threads();
  ValidationReport report = run_estimator_validation(vc);

  std::size_t applicable = 0;
  for (const auto& cp : report.checkpoints) {
    double z = cp.se_n1 > 0.0
                   ? std::abs(cp.mean_n1 - cp.expected_n1_analytic) / cp.se_n1
                   : 0.0;
    double var_ratio =
        cp.var_bound > 0.0 ? cp.var_n1_over_n / cp.var_bound : 0.0;
    out.require(cp.mean_pass,
                fmt("n=%llu: mean %.3f vs analytic %.3f is %.2f se away "
                    "(limit 4)",
                    static_cast<unsigned long long>(cp.n), cp.mean_n1,
                    cp.expected_n1_analytic, z));
    out.require(cp.var_pass,
                fmt("n=%llu: scaled variance ratio %.3f exceeds 1.05",
                    static_cast<unsigned long long>(cp.n), var_ratio));
    if (cp.poisson_applicable) {
      ++applicable;
      out.require(cp.poisson_pass,
                  fmt("n=%llu: Poisson fit rejected, stat %.2f > %.2f",
                      static_cast<unsigned long long>(cp.n), cp.gof.stat,
                      cp.gof.critical));
    }
    out.note(fmt("n=%-6llu mean %8.2f (analytic %8.2f, %.2f se)  "
                 "var ratio %.3f  once-prob max %.3f -> fit %s",
                 static_cast<unsigned long long>(cp.n), cp.mean_n1,
                 cp.expected_n1_analytic, z, var_ratio,
                 cp.max_once_probability,
                 cp.poisson_applicable ? (cp.poisson_pass ? "pass" : "FAIL")
                                       : "n/a"));
  }
  if (applicable == 0)
    out.note("no checkpoint meets the exactly-once-probability gate at this "
             "scale; the fit check passes vacuously (it runs positively in "
             "the unit suite on a qualifying workload)");
  out.require(report.all_pass == out.pass,
              "summary flag disagrees with per-checkpoint gates");
  return out;
}

// ---------------------------------------------------------------- criterion 3

const CellResult* find_cell(const GridResult& grid, const std::string& skew,
                            double duration) {
  for (const auto& cell : grid.cells)
    if (cell.skew.label == skew && cell.duration_mean == duration)
      return &cell;
  return nullptr;
}

std::optional<double> median_samples_for(const CellResult& cell, Method m,
                                         double r) {
  for (const auto& row : cell.savings)
    if (row.method == m && row.recall == r) return row.median_samples;
  return std::nullopt;
}

std::optional<double> savings_for(const CellResult& cell, double r) {
  for (const auto& row : cell.savings)
    if (row.method == Method::kExSample && row.recall == r)
      return row.savings_vs_random;
  return std::nullopt;
}

CriterionResult criterion_grid_margins() {
  CriterionResult out;
  GridConfig g;
  g.instances = 500;
  g.total_frames = 1'000'000;
  g.chunks = 64;
  g.duration_means = {7.0, 70.0, 700.0};
  g.skews = {SkewSpec::none(), SkewSpec::central(4), SkewSpec::central(32)};
  g.methods = {Method::kExSample, Method::kRandom};
  g.limit = Limit::recall(0.6);
  g.recalls = {0.5};
  g.repetitions = 11;
  g.base_seed = 1;
  g.threads = hw_threads();
  g.with_oracle = true;
  g.oracle_points = 25;
  GridResult grid = run_grid(g);

  // (a) without skew the adaptive sampler must stay near random parity
  for (double dur : g.duration_means) {
    const CellResult* cell = find_cell(grid, "none", dur);
    out.require(cell != nullptr, fmt("missing cell none/%g", dur));
    if (!cell) continue;
    auto ex = median_samples_for(*cell, Method::kExSample, 0.5);
    auto rnd = median_samples_for(*cell, Method::kRandom, 0.5);
    out.require(ex.has_value() && rnd.has_value(),
                fmt("none/%g: missing median samples-to-recall", dur));
    if (!ex || !rnd) continue;
    double ratio = *ex / *rnd;
    out.require(ratio <= 1.15,
                fmt("none/%g: adaptive/random ratio %.3f exceeds 1.15", dur,
                    ratio));
    out.note(fmt("no-skew dur=%-4g median ratio adaptive/random = %.3f "
                 "(limit 1.15)",
                 dur, ratio));
  }

  // (b) strong skew with visible spans must pay off at least 2x
  for (double dur : {70.0, 700.0}) {
    const CellResult* cell = find_cell(grid, "1/32", dur);
    out.require(cell != nullptr, fmt("missing cell 1/32 %g", dur));
    if (!cell) continue;
    auto sv = savings_for(*cell, 0.5);
    out.require(sv.has_value(), fmt("1/32 dur=%g: savings undefined", dur));
    if (!sv) continue;
    out.require(*sv >= 2.0,
                fmt("1/32 dur=%g: savings %.2fx below 2x", dur, *sv));
    out.note(fmt("skew-1/32 dur=%-4g savings vs random = %.2fx (floor 2x)",
                 dur, *sv));
  }

  // (c) the best-fixed-allocation curve bounds the measured median everywhere
  double min_slack = std::numeric_limits<double>::infinity();
  std::size_t points = 0;
  for (const auto& cell : grid.cells) {
    out.require(!cell.oracle_index.empty(),
                fmt("%s dur=%g: no oracle curve", cell.skew.label.c_str(),
                    cell.duration_mean));
    if (cell.oracle_index.empty()) continue;
    const auto& trajs = cell.trajectories.at(Method::kExSample);
    std::vector<std::vector<std::uint64_t>> counts;
    counts.reserve(trajs.size());
    for (const auto& t : trajs) counts.push_back(t.found_at(cell.oracle_index));
    std::vector<double> column(trajs.size());
    for (std::size_t k = 0; k < cell.oracle_index.size(); ++k) {
      for (std::size_t r = 0; r < trajs.size(); ++r)
        column[r] = static_cast<double>(counts[r][k]);
      SampleStats st = summarize(column);
      double med = median_of(column);
      double bound = cell.nstar_median[k] +
                     3.0 * kMedianSeFactor * st.sd /
                         std::sqrt(static_cast<double>(trajs.size()));
      min_slack = std::min(min_slack, bound - med);
      ++points;
      out.require(
          med <= bound,
          fmt("%s dur=%g n=%llu: median %.1f above optimal bound %.1f",
              cell.skew.label.c_str(), cell.duration_mean,
              static_cast<unsigned long long>(cell.oracle_index[k]), med,
              bound));
    }
  }
  out.note(fmt("optimal-allocation dominance held at %zu checkpoints across "
               "9 cells; smallest slack %.2f instances",
               points, min_slack));
  return out;
}

// ---------------------------------------------------------------- criterion 4

CriterionResult criterion_chunk_sweep() {
  CriterionResult out;
  const std::uint64_t total_frames = 1ull << 20;
  const std::vector<std::size_t> chunk_counts = {1, 8, 64, 512};
  const std::size_t reps = 101;
  const double slack = 1e-6 * 500.0;

  GridConfig proto;
  proto.instances = 500;
  proto.total_frames = total_frames;
  proto.duration_base_mean = 700.0;
  proto.duration_means = {700.0};
  proto.skews = {SkewSpec::central(32)};
  proto.base_seed = 4;

  std::vector<SyntheticDataset> datasets;
  datasets.reserve(reps);
  for (std::size_t rep = 0; rep < reps; ++rep)
    datasets.push_back(
        make_grid_dataset(proto, rep, proto.skews[0], 700.0));

  std::vector<std::uint64_t> horizons = checkpoint_grid(10240, 41);
  for (std::uint64_t h : {20ull, 160ull, 1280ull, 10240ull})
    horizons.push_back(h);
  std::sort(horizons.begin(), horizons.end());
  horizons.erase(std::unique(horizons.begin(), horizons.end()),
                 horizons.end());

  // best-fixed-allocation curves per chunk count, per repetition
  std::vector<std::vector<std::vector<double>>> nstar(
      chunk_counts.size(),
      std::vector<std::vector<double>>(reps));
  std::vector<std::size_t> rep_unconverged(reps, 0);
  std::vector<double> rep_max_gap(reps, 0.0);
  parallel_over(reps, [&](std::size_t rep) {
    for (std::size_t mi = 0; mi < chunk_counts.size(); ++mi) {
      ChunkLayout layout = partition_frames(total_frames, chunk_counts[mi]);
      PMatrix pm = compute_p_matrix(datasets[rep], layout);
      std::vector<double> warm;
      auto& curve = nstar[mi][rep];
      curve.reserve(horizons.size());
      // 5e-7 keeps the per-solve error below half the refinement slack;
      // tighter settings stall against the objective's precision floor.
      // The iteration cap bounds the stalled solves; their residual gap
      // stays orders of magnitude below the slack.
      for (std::uint64_t h : horizons) {
        AllocationSolution sol = optimal_allocation(
            pm, h, 5e-7, 2500, warm.empty() ? nullptr : &warm);
        warm = sol.w;
        curve.push_back(sol.expected_found);
        if (!sol.converged) {
          ++rep_unconverged[rep];
          rep_max_gap[rep] = std::max(rep_max_gap[rep], sol.final_gap);
        }
      }
    }
  });
  std::size_t oracle_unconverged = 0;
  double oracle_max_gap = 0.0;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    oracle_unconverged += rep_unconverged[rep];
    oracle_max_gap = std::max(oracle_max_gap, rep_max_gap[rep]);
  }
  std::size_t total_solves = chunk_counts.size() * reps * horizons.size();
  out.require(oracle_max_gap <= slack / 2.0,
              fmt("stalled oracle solves leave a duality gap of %.2e, above "
                  "half the refinement slack %.0e",
                  oracle_max_gap, slack));
  out.note(fmt("oracle: %zu of %zu solves stopped on the iteration cap, max "
               "residual duality gap %.2e",
               oracle_unconverged, total_solves, oracle_max_gap));

  // (a) refining the partition never lowers the optimal curve
  std::size_t monotone_checks = 0, monotone_violations = 0;
  double worst_drop = 0.0;
  for (std::size_t rep = 0; rep < reps; ++rep)
    for (std::size_t k = 0; k < horizons.size(); ++k)
      for (std::size_t mi = 0; mi + 1 < chunk_counts.size(); ++mi) {
        double drop = nstar[mi][rep][k] - nstar[mi + 1][rep][k];
        worst_drop = std::max(worst_drop, drop);
        ++monotone_checks;
        if (drop > slack) ++monotone_violations;
      }
  out.require(monotone_violations == 0,
              fmt("%zu of %zu refinement checks dropped by more than %.0e",
                  monotone_violations, monotone_checks, slack));
  out.note(fmt("oracle monotone under chunk refinement: %zu checks, worst "
               "drop %.2e (slack %.0e)",
               monotone_checks, worst_drop, slack));

  // (b) the adaptation gap peaks near the chunk count and decays by 20x it
  for (std::size_t mi = 0; mi < chunk_counts.size(); ++mi) {
    std::size_t m = chunk_counts[mi];
    std::uint64_t run_len = 20 * static_cast<std::uint64_t>(m);
    std::vector<std::uint64_t> grid;
    for (std::uint64_t h : horizons)
      if (h <= run_len) grid.push_back(h);

    ChunkLayout layout = partition_frames(total_frames, m);
    std::vector<std::vector<std::uint64_t>> found(reps);
    parallel_over(reps, [&](std::size_t rep) {
      RngStream rng = sampler_stream(proto.base_seed, rep, 0, 0,
                                     Method::kExSample);
      Trajectory traj = run_exsample(datasets[rep], layout, RunOptions{},
                                     Limit::samples(run_len), rng);
      found[rep] = traj.found_at(grid);
    });

    double peak = -std::numeric_limits<double>::infinity();
    std::uint64_t peak_at = 0;
    double gap_at_end = 0.0;
    std::vector<double> column(reps), oracle_column(reps);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      for (std::size_t rep = 0; rep < reps; ++rep) {
        column[rep] = static_cast<double>(found[rep][k]);
        oracle_column[rep] =
            nstar[mi][rep][std::lower_bound(horizons.begin(), horizons.end(),
                                            grid[k]) -
                           horizons.begin()];
      }
      double gap = median_of(oracle_column) - median_of(column);
      if (gap > peak) {
        peak = gap;
        peak_at = grid[k];
      }
      if (grid[k] == run_len) gap_at_end = gap;
    }

    double lo = static_cast<double>(m) / 4.0;
    double hi = 4.0 * static_cast<double>(m);
    out.require(static_cast<double>(peak_at) >= lo &&
                    static_cast<double>(peak_at) <= hi,
                fmt("M=%zu: gap peaks at n=%llu outside [%.2f, %.0f]", m,
                    static_cast<unsigned long long>(peak_at), lo, hi));
    out.require(gap_at_end < peak,
                fmt("M=%zu: gap %.2f at n=%llu has not decayed below peak "
                    "%.2f",
                    m, gap_at_end, static_cast<unsigned long long>(run_len),
                    peak));
    out.note(fmt("M=%-3zu peak gap %6.2f at n=%-5llu (window [%.2f, %.0f]); "
                 "gap %.2f at n=%llu",
                 m, peak, static_cast<unsigned long long>(peak_at), lo, hi,
                 gap_at_end, static_cast<unsigned long long>(run_len)));
  }
  return out;
}

// ---------------------------------------------------------------- criterion 5

CriterionResult criterion_equivalences() {
  CriterionResult out;

  // one chunk makes the adaptive sampler uniform sampling in disguise
  {
    GridConfig cfg;
    cfg.instances = 500;
    cfg.total_frames = 1'000'000;
    cfg.duration_base_mean = 700.0;
    cfg.duration_means = {700.0};
    cfg.skews = {SkewSpec::none()};
    cfg.base_seed = 5;
    const std::size_t reps = 200;
    ChunkLayout layout = partition_frames(cfg.total_frames, 1);
    std::vector<double> adaptive(reps), baseline(reps);
    std::atomic<std::size_t> unreached{0};
    parallel_over(reps, [&](std::size_t rep) {
      SyntheticDataset ds =
          make_grid_dataset(cfg, rep, cfg.skews[0], 700.0);
      RngStream re = sampler_stream(cfg.base_seed, rep, 0, 0,
                                    Method::kExSample);
      RngStream rr = sampler_stream(cfg.base_seed, rep, 0, 0,
                                    Method::kRandom);
      Trajectory te = run_exsample(ds, layout, RunOptions{},
                                   Limit::recall(0.5), re);
      Trajectory tr = run_random(ds, Limit::recall(0.5), rr);
      auto se = samples_to_recall(te, cfg.instances, 0.5);
      auto sr = samples_to_recall(tr, cfg.instances, 0.5);
      if (!se || !sr) {
        ++unreached;
        return;
      }
      adaptive[rep] = static_cast<double>(*se);
      baseline[rep] = static_cast<double>(*sr);
    });
    out.require(unreached == 0, "a run ended before half recall");
    double stat = ks_two_sample_stat(adaptive, baseline);
    double critical = ks_two_sample_critical(reps, reps, 0.05);
    out.require(stat <= critical,
                fmt("single-chunk distributions differ: KS %.4f > %.4f",
                    stat, critical));
    out.note(fmt("single-chunk vs random over %zu paired runs: KS %.4f "
                 "(5%% critical %.4f)",
                 reps, stat, critical));
  }

  // batching belief updates must not change the median cost materially
  {
    // The comparison needs runs that span many batches: at duration mean 70
    // a run to half recall takes roughly 670 samples, over 13 batches of 50.
    GridConfig cfg;
    cfg.instances = 500;
    cfg.total_frames = 1'000'000;
    cfg.duration_base_mean = 700.0;
    cfg.duration_means = {70.0};
    cfg.skews = {SkewSpec::central(32)};
    cfg.base_seed = 6;
    const std::size_t reps = 201;
    ChunkLayout layout = partition_frames(cfg.total_frames, 64);
    std::vector<double> single(reps), batched(reps);
    std::atomic<std::size_t> unreached{0};
    parallel_over(reps, [&](std::size_t rep) {
      SyntheticDataset ds =
          make_grid_dataset(cfg, rep, cfg.skews[0], 70.0);
      RunOptions one;
      RunOptions fifty;
      fifty.batch = 50;
      RngStream r1 = sampler_stream(cfg.base_seed, rep, 0, 0,
                                    Method::kExSample);
      RngStream r50 = r1;
      Trajectory t1 =
          run_exsample(ds, layout, one, Limit::recall(0.5), r1);
      Trajectory t50 =
          run_exsample(ds, layout, fifty, Limit::recall(0.5), r50);
      auto s1 = samples_to_recall(t1, cfg.instances, 0.5);
      auto s50 = samples_to_recall(t50, cfg.instances, 0.5);
      if (!s1 || !s50) {
        ++unreached;
        return;
      }
      single[rep] = static_cast<double>(*s1);
      batched[rep] = static_cast<double>(*s50);
    });
    out.require(unreached == 0, "a batched run ended before half recall");
    double med1 = median_of(single);
    double med50 = median_of(batched);
    double rel = std::abs(med50 / med1 - 1.0);
    out.require(rel <= 0.15,
                fmt("batch=50 median %.0f vs batch=1 median %.0f: %.1f%% "
                    "apart (limit 15%%)",
                    med50, med1, 100.0 * rel));
    out.note(fmt("batch=50 median %.0f vs batch=1 median %.0f over %zu runs "
                 "(%.1f%% apart, limit 15%%; a median run spans %.0f "
                 "batches)",
                 med50, med1, reps, 100.0 * rel, med1 / 50.0));
  }
  return out;
}

// ---------------------------------------------------------------- criterion 6

CriterionResult criterion_solver_gates() {
  CriterionResult out;
  RngStream rng(66, 0);

  // the solved point never loses to the uniform allocation
  double worst_edge = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t m = 2 + rng.uniform_below(15);
    std::vector<std::uint64_t> lengths = gen_lognormal_durations(30, 25, rng);
    std::optional<double> sigma;
    if (trial % 2 == 1) sigma = placement_sigma_for_fraction(4000, 0.25);
    SyntheticDataset data = place_spans(lengths, 4000, sigma, rng);
    ChunkLayout layout = partition_frames(4000, m);
    PMatrix pm = compute_p_matrix(data, layout);
    std::uint64_t n = 5 + rng.uniform_below(2000);
    AllocationSolution sol = optimal_allocation(pm, n, 1e-9);
    std::vector<double> uniform(m, 1.0 / static_cast<double>(m));
    double edge = sol.expected_found - expected_weighted_curve(pm, uniform, n);
    worst_edge = std::min(worst_edge, edge);
    out.require(edge >= -1e-6,
                fmt("trial %d (m=%zu, n=%llu): solved point loses to uniform "
                    "by %.2e",
                    trial, m, static_cast<unsigned long long>(n), -edge));
  }
  out.note(fmt("uniform dominance on 100 random problems; worst edge %.2e",
               worst_edge));

  // a chunk-symmetric problem must come back to uniform from a skewed start
  {
    std::vector<Span> spans;
    for (std::uint64_t j = 0; j < 4; ++j) {
      spans.push_back(Span{250 * j + 10, 40});
      spans.push_back(Span{250 * j + 100, 25});
    }
    SyntheticDataset data = SyntheticDataset::spans(1000, spans);
    PMatrix pm = compute_p_matrix(data, partition_frames(1000, 4));
    std::vector<double> skewed = {0.7, 0.1, 0.1, 0.1};
    AllocationSolution sol =
        optimal_allocation(pm, 200, 1e-12, 200000, &skewed);
    double worst = 0.0;
    for (double w : sol.w) worst = std::max(worst, std::abs(w - 0.25));
    out.require(sol.converged, "symmetric problem did not converge");
    out.require(worst <= 1e-6,
                fmt("symmetric problem ended %.2e from uniform (limit 1e-6)",
                    worst));
    out.note(fmt("symmetry recovered from a 0.7-skewed start to within %.1e "
                 "(%zu iterations)",
                 worst, sol.iterations));
  }

  // curve gradients agree with central differences
  double worst_fd = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    std::size_t m = 2 + rng.uniform_below(7);
    std::vector<std::uint64_t> lengths = gen_lognormal_durations(25, 30, rng);
    SyntheticDataset data = place_spans(lengths, 4000, 700.0, rng);
    PMatrix pm = compute_p_matrix(data, partition_frames(4000, m));
    std::uint64_t n = 50 + rng.uniform_below(500);

    std::vector<double> w(m);
    double min_w = 0.0;
    do {
      double sum = 0.0;
      for (double& x : w) {
        x = -std::log(rng.uniform_pos());
        sum += x;
      }
      min_w = 1.0;
      for (double& x : w) {
        x /= sum;
        min_w = std::min(min_w, x);
      }
    } while (min_w < 0.01);

    std::vector<double> analytic(m, 0.0);
    for (std::size_t i = 0; i < pm.instances; ++i) {
      double x = 0.0;
      for (std::size_t j = 0; j < m; ++j) x += pm.at(i, j) * w[j];
      double shell = static_cast<double>(n) *
                     std::pow(1.0 - x, static_cast<double>(n - 1));
      for (std::size_t j = 0; j < m; ++j) analytic[j] -= shell * pm.at(i, j);
    }
    double total = static_cast<double>(pm.instances);
    for (std::size_t j = 0; j < m; ++j) {
      std::size_t k = (j + 1) % m;
      double h = 1e-6;
      std::vector<double> up = w, down = w;
      up[j] += h;
      up[k] -= h;
      down[j] -= h;
      down[k] += h;
      double fd = ((total - expected_weighted_curve(pm, up, n)) -
                   (total - expected_weighted_curve(pm, down, n))) /
                  (2.0 * h);
      double expect = analytic[j] - analytic[k];
      double rel = std::abs(fd - expect) / std::max(1.0, std::abs(expect));
      worst_fd = std::max(worst_fd, rel);
      out.require(rel <= 1e-5,
                  fmt("trial %d coordinate %zu: gradient off by %.2e "
                      "relative",
                      trial, j, rel));
    }
  }
  out.note(fmt("finite-difference agreement on 10 problems; worst relative "
               "error %.2e",
               worst_fd));
  return out;
}

// ---------------------------------------------------------------- criterion 7

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

CriterionResult criterion_determinism() {
  CriterionResult out;
  namespace fs = std::filesystem;
  fs::path root = fs::temp_directory_path() / "exsample-acceptance-run";
  fs::remove_all(root);
  fs::create_directories(root);

  std::ofstream cfg(root / "desk.ini");
  cfg << "[dataset]\n"
         "model = spans\n"
         "instances = 500\n"
         "total_frames = 1000000\n"
         "duration_base_mean = 700\n"
         "duration_sigma_log = 0.70\n"
         "duration_means = 7, 70, 700\n"
         "skews = none, 4, 32\n"
         "[layout]\n"
         "chunks = 64\n"
         "[sampler]\n"
         "methods = exsample, random\n"
         "policy = thompson\n"
         "[limit]\n"
         "kind = recall\n"
         "value = 0.6\n"
         "[run]\n"
         "recalls = 0.5\n"
         "repetitions = 11\n"
         "base_seed = 1\n"
         "oracle = true\n"
         "oracle_points = 25\n";
  cfg.close();

  CliOptions opts;
  opts.config_path = (root / "desk.ini").string();
  opts.threads = hw_threads();
  opts.out_dir = (root / "a").string();
  out.require(cmd_simulate(opts) == 0, "first run failed");
  opts.out_dir = (root / "b").string();
  out.require(cmd_simulate(opts) == 0, "second run failed");

  auto csv_files = [](const fs::path& dir) {
    std::vector<std::string> rel;
    for (const auto& e : fs::recursive_directory_iterator(dir))
      if (e.is_regular_file() && e.path().extension() == ".csv")
        rel.push_back(fs::relative(e.path(), dir).generic_string());
    std::sort(rel.begin(), rel.end());
    return rel;
  };
  std::vector<std::string> a = csv_files(root / "a");
  std::vector<std::string> b = csv_files(root / "b");
  out.require(a == b, "the two runs produced different file sets");
  out.require(!a.empty(), "no tables were written");
  std::size_t identical = 0;
  for (const auto& rel : a) {
    if (slurp(root / "a" / rel) == slurp(root / "b" / rel))
      ++identical;
    else
      out.require(false, "byte difference in " + rel);
  }
  out.note(fmt("%zu of %zu tables byte-identical across two runs",
               identical, a.size()));
  return out;
}

// --------------------------------------------------------------------- main

int run_criterion(int index, const char* description,
                  const std::function<CriterionResult()>& fn) {
  auto start = std::chrono::steady_clock::now();
  CriterionResult result;
  try {
    result = fn();
  } catch (const std::exception& e) {
    result.pass = false;
    result.notes.push_back(std::string("exception: ") + e.what());
  }
  double secs = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  std::printf("%s [criterion %d] %s (%.1fs)\n",
              result.pass ? "PASS" : "FAIL", index, description, secs);
  for (const auto& line : result.notes)
    std::printf("       %s\n", line.c_str());
  std::fflush(stdout);
  return result.pass ? 0 : 1;
}

}  // namespace

int main() {
  int failures = 0;
  failures += run_criterion(
      1, "singleton-rate bias stays within both analytic ceilings",
      criterion_bias_ceilings);
  failures += run_criterion(
      2, "singleton-count statistics track the analytic curves",
      criterion_validation_gates);
  failures += run_criterion(
      3, "grid margins: parity without skew, savings under skew, oracle "
         "dominance",
      criterion_grid_margins);
  failures += run_criterion(
      4, "chunk-count sweep: oracle monotone, adaptation gap peaks near the "
         "chunk count",
      criterion_chunk_sweep);
  failures += run_criterion(
      5, "single-chunk parity with random sampling; batching leaves the "
         "median cost unchanged",
      criterion_equivalences);
  failures += run_criterion(
      6, "allocation solver: uniform dominance, symmetry recovery, gradient "
         "agreement",
      criterion_solver_gates);
  failures += run_criterion(
      7, "one seed, two executions, byte-identical tables",
      criterion_determinism);

  if (failures == 0)
    std::printf("acceptance: all 7 criteria passed\n");
  else
    std::printf("acceptance: %d of 7 criteria FAILED\n", failures);
  return failures == 0 ? 0 : 1;
}
