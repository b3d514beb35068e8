#pragma once

#include "exsample/analysis.hpp"
#include "exsample/sampler.hpp"
#include "exsample/simulation.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace exsample {

enum class Method { kExSample, kRandom, kSequential, kLevelSet };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

// One placement column of the grid: fraction of the frame range, centered,
// that holds 95% of instance centers. Missing fraction = uniform placement.
struct SkewSpec {
  std::optional<double> fraction;
  std::string label;  // "none", "1/32", ...

  static SkewSpec none() { return {std::nullopt, "none"}; }
  static SkewSpec central(double f);  // f = denominator, label "1/f"
};

struct GridConfig {
  std::size_t instances = 500;
  std::uint64_t total_frames = 1'000'000;
  std::size_t chunks = 64;

  // spans model: per repetition, one set of base lengths is drawn at
  // duration_base_mean and rescaled per duration column, so columns share
  // placement and relative sizes
  double duration_base_mean = 700.0;
  double duration_sigma_log = 0.70;
  std::vector<double> duration_means = {700.0};
  std::vector<SkewSpec> skews = {SkewSpec::none()};

  std::vector<Method> methods = {Method::kExSample, Method::kRandom};
  RunOptions run_options;
  std::uint64_t sequential_stride = 1;
  Limit limit = Limit::recall(0.6);

  std::vector<double> recalls = {0.5};
  std::size_t repetitions = 11;
  std::uint64_t base_seed = 1;
  unsigned threads = 0;

  // per-cell oracle curves: median best fixed allocation and median uniform
  // expectation across repetitions
  bool with_oracle = true;
  std::size_t oracle_points = 25;
};

struct SavingRow {
  Method method = Method::kRandom;
  double recall = 0.5;
  std::optional<double> median_samples;
  std::optional<double> savings_vs_random;
};

struct CellResult {
  SkewSpec skew;
  double duration_mean = 0.0;
  std::map<Method, std::vector<Trajectory>> trajectories;
  std::map<Method, PercentileBands> bands;
  // oracle curves on the exsample checkpoint grid
  std::vector<std::uint64_t> oracle_index;
  std::vector<double> nstar_median;
  std::vector<double> random_expected_median;
  std::vector<SavingRow> savings;
};

struct GridResult {
  GridConfig config;
  std::vector<CellResult> cells;
};

// Dataset for one (repetition, skew, duration) cell under the shared-draw
// protocol; identical inputs give identical datasets, independent of which
// methods or chunk layouts are later applied to them.
SyntheticDataset make_grid_dataset(const GridConfig& config, std::size_t rep,
                                   const SkewSpec& skew, double duration_mean);

RngStream sampler_stream(std::uint64_t base_seed, std::size_t rep,
                         std::size_t skew_index, std::size_t duration_index,
                         Method method);

// Log-spaced 1-based sample indices covering [1, max_index].
std::vector<std::uint64_t> checkpoint_grid(std::uint64_t max_index,
                                           std::size_t points);

GridResult run_grid(const GridConfig& config);

// CSV layout under out_dir: cells.csv and savings.csv at the root, one
// directory per cell holding trajectories_<method>.csv, bands_<method>.csv,
// flags.csv, and oracle.csv. run_meta.txt carries the timestamp and config
// echo and is the only file whose bytes vary across identical runs.
void write_grid_outputs(const GridResult& result, const std::string& out_dir,
                        const std::string& config_echo);

std::string cell_dir_name(const SkewSpec& skew, double duration_mean);

}  // namespace exsample
