#include "exsample/runner.hpp"

#include "exsample/csvio.hpp"
#include "exsample/estimator.hpp"
#include "exsample/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace exsample {

namespace {

constexpr std::uint64_t kTagDurations = 0x01;
constexpr std::uint64_t kTagCenters = 0x02;
constexpr std::uint64_t kTagSampler = 0x03;

std::uint64_t make_tag(std::uint64_t kind, std::uint64_t a = 0,
                       std::uint64_t b = 0, std::uint64_t c = 0) {
  return (kind << 48) | (a << 32) | (b << 16) | c;
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::kExSample: return "exsample";
    case Method::kRandom: return "random";
    case Method::kSequential: return "sequential";
    case Method::kLevelSet: return "levelset";
  }
  throw std::logic_error("method_name: unknown method");
}

Method method_from_name(const std::string& name) {
  if (name == "exsample") return Method::kExSample;
  if (name == "random") return Method::kRandom;
  if (name == "sequential") return Method::kSequential;
  if (name == "levelset") return Method::kLevelSet;
  throw std::invalid_argument("unknown method: " + name);
}

SkewSpec SkewSpec::central(double f) {
  if (!(f >= 1.0)) throw std::invalid_argument("skew divisor must be >= 1");
  char buf[32];
  std::snprintf(buf, sizeof(buf), "1/%.10g", f);
  return {1.0 / f, buf};
}

SyntheticDataset make_grid_dataset(const GridConfig& config, std::size_t rep,
                                   const SkewSpec& skew,
                                   double duration_mean) {
  RngStream rep_root(config.base_seed, rep);
  RngStream duration_rng = rep_root.substream(make_tag(kTagDurations));
  std::vector<std::uint64_t> base = gen_lognormal_durations(
      config.instances, config.duration_base_mean, duration_rng,
      config.duration_sigma_log);
  std::vector<std::uint64_t> lengths =
      scale_durations(base, duration_mean / config.duration_base_mean);

  std::size_t skew_key = 0;
  std::optional<double> sigma;
  if (skew.fraction) {
    sigma = placement_sigma_for_fraction(config.total_frames, *skew.fraction);
    skew_key = static_cast<std::size_t>(std::llround(1.0 / *skew.fraction));
  }
  RngStream center_rng = rep_root.substream(make_tag(kTagCenters, skew_key));
  return place_spans(lengths, config.total_frames, sigma, center_rng);
}

RngStream sampler_stream(std::uint64_t base_seed, std::size_t rep,
                         std::size_t skew_index, std::size_t duration_index,
                         Method method) {
  return RngStream(base_seed, rep)
      .substream(make_tag(kTagSampler, skew_index, duration_index,
                          static_cast<std::uint64_t>(method)));
}

std::vector<std::uint64_t> checkpoint_grid(std::uint64_t max_index,
                                           std::size_t points) {
  std::vector<std::uint64_t> grid;
  if (max_index == 0 || points == 0) return grid;
  double log_max = std::log(static_cast<double>(max_index));
  for (std::size_t k = 0; k < points; ++k) {
    double frac = points == 1 ? 1.0
                              : static_cast<double>(k) /
                                    static_cast<double>(points - 1);
    auto v = static_cast<std::uint64_t>(std::llround(std::exp(frac * log_max)));
    v = std::max<std::uint64_t>(v, 1);
    v = std::min(v, max_index);
    if (grid.empty() || v > grid.back()) grid.push_back(v);
  }
  return grid;
}

namespace {

Trajectory run_one(const GridConfig& config, const SyntheticDataset& dataset,
                   const ChunkLayout& layout, Method method, RngStream rng) {
  switch (method) {
    case Method::kExSample:
      return run_exsample(dataset, layout, config.run_options, config.limit,
                          rng);
    case Method::kRandom:
      return run_random(dataset, config.limit, rng);
    case Method::kSequential:
      return run_sequential(dataset, config.sequential_stride, config.limit,
                            rng);
    case Method::kLevelSet:
      return run_levelset_global(dataset, config.limit, rng);
  }
  throw std::logic_error("run_one: unknown method");
}

}  // namespace

GridResult run_grid(const GridConfig& config) {
  if (config.repetitions == 0)
    throw std::invalid_argument("run_grid: repetitions must be >= 1");
  if (config.methods.empty())
    throw std::invalid_argument("run_grid: no methods");
  GridResult result;
  result.config = config;
  ChunkLayout layout = partition_frames(config.total_frames, config.chunks);

  for (std::size_t si = 0; si < config.skews.size(); ++si) {
    for (std::size_t di = 0; di < config.duration_means.size(); ++di) {
      CellResult cell;
      cell.skew = config.skews[si];
      cell.duration_mean = config.duration_means[di];

      // one dataset per repetition, shared by every method
      std::vector<SyntheticDataset> datasets;
      datasets.reserve(config.repetitions);
      for (std::size_t rep = 0; rep < config.repetitions; ++rep)
        datasets.push_back(make_grid_dataset(config, rep, cell.skew,
                                             cell.duration_mean));

      for (Method m : config.methods)
        cell.trajectories[m].resize(config.repetitions);
      std::size_t n_tasks = config.repetitions * config.methods.size();
      parallel_for(n_tasks, config.threads, [&](std::size_t task) {
        std::size_t rep = task / config.methods.size();
        Method m = config.methods[task % config.methods.size()];
        RngStream rng = sampler_stream(config.base_seed, rep, si, di, m);
        cell.trajectories.find(m)->second[rep] =
            run_one(config, datasets[rep], layout, m, rng);
      });

      // quartile bands per method over that method's common index range
      for (Method m : config.methods) {
        const auto& trajs = cell.trajectories[m];
        std::uint64_t t_min = trajs.front().steps.size();
        for (const auto& t : trajs)
          t_min = std::min<std::uint64_t>(t_min, t.steps.size());
        auto grid = checkpoint_grid(t_min, config.oracle_points);
        if (!grid.empty()) cell.bands[m] = percentile_bands(trajs, grid);
      }

      // savings at each recall level, against the random baseline
      bool have_random = cell.trajectories.count(Method::kRandom) > 0;
      for (Method m : config.methods) {
        for (double r : config.recalls) {
          SavingRow row;
          row.method = m;
          row.recall = r;
          std::vector<double> reached;
          for (const auto& t : cell.trajectories[m]) {
            auto s = samples_to_recall(t, config.instances, r);
            reached.push_back(s ? static_cast<double>(*s)
                                : std::numeric_limits<double>::infinity());
          }
          std::sort(reached.begin(), reached.end());
          std::size_t h = reached.size() / 2;
          double med = reached.size() % 2
                           ? reached[h]
                           : 0.5 * (reached[h - 1] + reached[h]);
          if (std::isfinite(med)) row.median_samples = med;
          if (have_random && m != Method::kRandom)
            row.savings_vs_random =
                savings(cell.trajectories[m], cell.trajectories[Method::kRandom],
                        config.instances, r);
          cell.savings.push_back(row);
        }
      }

      // oracle curves on the adaptive method's index range
      if (config.with_oracle && datasets.front().is_spans() &&
          cell.trajectories.count(Method::kExSample)) {
        const auto& trajs = cell.trajectories[Method::kExSample];
        std::uint64_t t_min = trajs.front().steps.size();
        for (const auto& t : trajs)
          t_min = std::min<std::uint64_t>(t_min, t.steps.size());
        cell.oracle_index = checkpoint_grid(t_min, config.oracle_points);
        if (!cell.oracle_index.empty()) {
          std::vector<std::vector<double>> nstar(config.repetitions);
          std::vector<std::vector<double>> uniform_curve(config.repetitions);
          parallel_for(config.repetitions, config.threads,
                       [&](std::size_t rep) {
                         nstar[rep].reserve(cell.oracle_index.size());
                         uniform_curve[rep].reserve(cell.oracle_index.size());
                         PMatrix pm = compute_p_matrix(datasets[rep], layout);
                         std::vector<double> p = datasets[rep].global_p();
                         std::vector<double> warm;
                         for (std::uint64_t n : cell.oracle_index) {
                           AllocationSolution sol = optimal_allocation(
                               pm, n, 1e-6, 50000,
                               warm.empty() ? nullptr : &warm);
                           warm = sol.w;
                           nstar[rep].push_back(sol.expected_found);
                           uniform_curve[rep].push_back(
                               expected_random_curve(p, n));
                         }
                       });
          for (std::size_t k = 0; k < cell.oracle_index.size(); ++k) {
            std::vector<double> col(config.repetitions);
            for (std::size_t rep = 0; rep < config.repetitions; ++rep)
              col[rep] = nstar[rep][k];
            std::sort(col.begin(), col.end());
            std::size_t h = col.size() / 2;
            cell.nstar_median.push_back(
                col.size() % 2 ? col[h] : 0.5 * (col[h - 1] + col[h]));
            for (std::size_t rep = 0; rep < config.repetitions; ++rep)
              col[rep] = uniform_curve[rep][k];
            std::sort(col.begin(), col.end());
            cell.random_expected_median.push_back(
                col.size() % 2 ? col[h] : 0.5 * (col[h - 1] + col[h]));
          }
        }
      }

      result.cells.push_back(std::move(cell));
    }
  }
  return result;
}

std::string cell_dir_name(const SkewSpec& skew, double duration_mean) {
  std::string skew_tag = skew.label;
  for (auto& ch : skew_tag)
    if (ch == '/') ch = 'o';
  return "skew-" + skew_tag + "_dur-" + format_double(duration_mean);
}

namespace {

void write_trajectories(const std::string& path,
                        const std::vector<Trajectory>& trajs) {
  CsvWriter csv(path, "rep,sample_index,distinct_found");
  for (std::size_t rep = 0; rep < trajs.size(); ++rep) {
    std::uint64_t cum = 0;
    const auto& steps = trajs[rep].steps;
    for (std::size_t k = 0; k < steps.size(); ++k) {
      bool last = k + 1 == steps.size();
      if (steps[k].new_found == 0 && !last) continue;
      cum += steps[k].new_found;
      csv.cell(static_cast<std::uint64_t>(rep))
          .cell(static_cast<std::uint64_t>(k + 1))
          .cell(cum);
      csv.end_row();
    }
  }
}

void write_bands(const std::string& path, const PercentileBands& bands) {
  CsvWriter csv(path, "sample_index,p25,p50,p75");
  for (std::size_t k = 0; k < bands.index.size(); ++k) {
    csv.cell(bands.index[k])
        .cell(bands.p25[k])
        .cell(bands.p50[k])
        .cell(bands.p75[k]);
    csv.end_row();
  }
}

}  // namespace

void write_grid_outputs(const GridResult& result, const std::string& out_dir,
                        const std::string& config_echo) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  CsvWriter cells_csv(out_dir + "/cells.csv", "skew,duration,dir");
  CsvWriter savings_csv(
      out_dir + "/savings.csv",
      "skew,duration,method,recall,median_samples,savings_vs_random");

  for (const auto& cell : result.cells) {
    std::string dir_name = cell_dir_name(cell.skew, cell.duration_mean);
    std::string cell_dir = out_dir + "/" + dir_name;
    fs::create_directories(cell_dir);
    cells_csv.cell(cell.skew.label).cell(cell.duration_mean).cell(dir_name);
    cells_csv.end_row();

    CsvWriter flags(cell_dir + "/flags.csv",
                    "method,rep,exhausted,samples,found");
    for (const auto& [method, trajs] : cell.trajectories) {
      write_trajectories(
          cell_dir + "/trajectories_" + method_name(method) + ".csv", trajs);
      auto b = cell.bands.find(method);
      if (b != cell.bands.end())
        write_bands(cell_dir + "/bands_" + method_name(method) + ".csv",
                    b->second);
      for (std::size_t rep = 0; rep < trajs.size(); ++rep) {
        flags.cell(method_name(method))
            .cell(static_cast<std::uint64_t>(rep))
            .cell(static_cast<std::uint64_t>(trajs[rep].exhausted ? 1 : 0))
            .cell(static_cast<std::uint64_t>(trajs[rep].steps.size()))
            .cell(trajs[rep].total_found());
        flags.end_row();
      }
    }

    if (!cell.oracle_index.empty()) {
      CsvWriter oracle(cell_dir + "/oracle.csv",
                       "sample_index,optimal_median,random_expected_median");
      for (std::size_t k = 0; k < cell.oracle_index.size(); ++k) {
        oracle.cell(cell.oracle_index[k])
            .cell(cell.nstar_median[k])
            .cell(cell.random_expected_median[k]);
        oracle.end_row();
      }
    }

    for (const auto& row : cell.savings) {
      savings_csv.cell(cell.skew.label)
          .cell(cell.duration_mean)
          .cell(method_name(row.method))
          .cell(row.recall)
          .cell(row.median_samples ? format_double(*row.median_samples)
                                   : std::string())
          .cell(row.savings_vs_random ? format_double(*row.savings_vs_random)
                                      : std::string());
      savings_csv.end_row();
    }
  }

  std::ofstream meta(out_dir + "/run_meta.txt");
  auto now = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  meta << "finished_unix=" << now << "\n" << config_echo;
}

}  // namespace exsample
