#include "exsample/commands.hpp"

#include "exsample/analysis.hpp"
#include "exsample/config.hpp"
#include "exsample/csvio.hpp"
#include "exsample/runner.hpp"
#include "exsample/validation.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace exsample {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RunOptions parse_run_options(const Config& cfg) {
  RunOptions opts;
  opts.belief.alpha0 = cfg.get_double_or("sampler", "alpha0", 0.1);
  opts.belief.beta0 = cfg.get_double_or("sampler", "beta0", 1.0);
  if (!(opts.belief.alpha0 > 0.0) || !(opts.belief.beta0 > 0.0))
    throw ConfigError("[sampler] alpha0 and beta0 must be > 0");
  std::string policy = cfg.get_string_or("sampler", "policy", "thompson");
  if (policy == "thompson")
    opts.belief.policy = Policy::kThompson;
  else if (policy == "bayes-ucb")
    opts.belief.policy = Policy::kBayesUcbQuantile;
  else
    throw ConfigError("[sampler] policy must be thompson or bayes-ucb");
  std::string within = cfg.get_string_or("sampler", "within", "uniform");
  if (within == "uniform")
    opts.within = WithinChunk::kUniform;
  else if (within == "levelset")
    opts.within = WithinChunk::kLevelSet;
  else
    throw ConfigError("[sampler] within must be uniform or levelset");
  opts.strict_global_once =
      cfg.get_bool_or("sampler", "strict_global_once", false);
  std::int64_t batch = cfg.get_int_or("sampler", "batch", 1);
  if (batch < 1) throw ConfigError("[sampler] batch must be >= 1");
  opts.batch = static_cast<std::size_t>(batch);
  return opts;
}

Limit parse_limit(const Config& cfg) {
  std::string kind = cfg.get_string_or("limit", "kind", "recall");
  double value = cfg.get_double_or("limit", "value", 0.6);
  if (kind == "samples") {
    if (value < 1.0) throw ConfigError("[limit] samples value must be >= 1");
    return Limit::samples(static_cast<std::uint64_t>(value));
  }
  if (kind == "results") {
    if (value < 1.0) throw ConfigError("[limit] results value must be >= 1");
    return Limit::results(static_cast<std::uint64_t>(value));
  }
  if (kind == "recall") {
    if (!(value > 0.0) || value > 1.0)
      throw ConfigError("[limit] recall value must lie in (0, 1]");
    return Limit::recall(value);
  }
  throw ConfigError("[limit] kind must be samples, results, or recall");
}

// Reads the [dataset] and [layout] sections plus the seed and thread
// options; enough to build datasets without a sampler or limit section.
GridConfig parse_dataset_config(const Config& cfg, const CliOptions& options) {
  GridConfig grid;
  std::string model = cfg.get_string_or("dataset", "model", "spans");
  if (model != "spans")
    throw ConfigError("[dataset] model: only 'spans' runs the grid");
  std::int64_t instances = cfg.get_int("dataset", "instances");
  std::int64_t frames = cfg.get_int("dataset", "total_frames");
  if (instances < 0 || frames < 1)
    throw ConfigError("[dataset] instances/total_frames out of range");
  grid.instances = static_cast<std::size_t>(instances);
  grid.total_frames = static_cast<std::uint64_t>(frames);
  grid.duration_base_mean =
      cfg.get_double_or("dataset", "duration_base_mean", 700.0);
  grid.duration_sigma_log =
      cfg.get_double_or("dataset", "duration_sigma_log", 0.70);
  grid.duration_means = cfg.has("dataset", "duration_means")
                            ? cfg.get_double_list("dataset", "duration_means")
                            : std::vector<double>{700.0};
  for (double d : grid.duration_means)
    if (!(d > 0.0)) throw ConfigError("[dataset] duration_means must be > 0");

  grid.skews.clear();
  std::vector<std::string> skew_items =
      cfg.has("dataset", "skews") ? cfg.get_list("dataset", "skews")
                                  : std::vector<std::string>{"none"};
  for (const auto& item : skew_items) {
    if (item == "none") {
      grid.skews.push_back(SkewSpec::none());
    } else {
      char* end = nullptr;
      double f = std::strtod(item.c_str(), &end);
      if (end == item.c_str() || *end != '\0' || !(f >= 1.0))
        throw ConfigError("[dataset] skews: expected 'none' or divisor >= 1: " +
                          item);
      grid.skews.push_back(SkewSpec::central(f));
    }
  }

  std::int64_t chunks = cfg.get_int_or("layout", "chunks", 64);
  if (chunks < 1) throw ConfigError("[layout] chunks must be >= 1");
  grid.chunks = static_cast<std::size_t>(chunks);

  grid.base_seed =
      static_cast<std::uint64_t>(cfg.get_int_or("run", "base_seed", 1));
  if (options.seed) grid.base_seed = *options.seed;
  grid.threads = options.threads;
  return grid;
}

GridConfig parse_grid_config(const Config& cfg, const CliOptions& options) {
  GridConfig grid = parse_dataset_config(cfg, options);

  grid.methods.clear();
  for (const auto& name : cfg.get_list("sampler", "methods"))
    grid.methods.push_back(method_from_name(name));
  grid.run_options = parse_run_options(cfg);
  std::int64_t stride = cfg.get_int_or("sampler", "sequential_stride", 1);
  if (stride < 1) throw ConfigError("[sampler] sequential_stride must be >= 1");
  grid.sequential_stride = static_cast<std::uint64_t>(stride);
  grid.limit = parse_limit(cfg);

  grid.recalls = cfg.has("run", "recalls")
                     ? cfg.get_double_list("run", "recalls")
                     : std::vector<double>{0.5};
  for (double r : grid.recalls)
    if (!(r > 0.0) || r > 1.0)
      throw ConfigError("[run] recalls must lie in (0, 1]");
  std::int64_t reps = cfg.get_int_or("run", "repetitions", 11);
  if (reps < 1) throw ConfigError("[run] repetitions must be >= 1");
  grid.repetitions = static_cast<std::size_t>(reps);
  grid.with_oracle = cfg.get_bool_or("run", "oracle", true);
  std::int64_t points = cfg.get_int_or("run", "oracle_points", 25);
  if (points < 1) throw ConfigError("[run] oracle_points must be >= 1");
  grid.oracle_points = static_cast<std::size_t>(points);
  return grid;
}

}  // namespace

int cmd_simulate(const CliOptions& options) {
  if (options.out_dir.empty()) throw ConfigError("simulate: --out is required");
  std::string text = read_file(options.config_path);
  Config cfg = Config::parse(text);
  GridConfig grid = parse_grid_config(cfg, options);
  GridResult result = run_grid(grid);
  write_grid_outputs(result, options.out_dir, text);
  return 0;
}

int cmd_validate_estimator(const CliOptions& options) {
  if (options.out_dir.empty())
    throw ConfigError("validate-estimator: --out is required");
  std::string text = read_file(options.config_path);
  Config cfg = Config::parse(text);
  ValidationConfig vc;
  std::int64_t instances = cfg.get_int_or("validate", "instances", 1000);
  if (instances < 0) throw ConfigError("[validate] instances must be >= 0");
  vc.instances = static_cast<std::size_t>(instances);
  vc.p_mean = cfg.get_double_or("validate", "p_mean", 3e-3);
  vc.p_sigma_log = cfg.get_double_or("validate", "p_sigma_log", 1.5);
  if (vc.instances > 0 && (!(vc.p_mean > 0.0) || vc.p_mean > 1.0))
    throw ConfigError("[validate] p_mean must lie in (0, 1]");
  if (cfg.has("validate", "checkpoints"))
    vc.checkpoints = cfg.get_uint_list("validate", "checkpoints");
  for (std::uint64_t n : vc.checkpoints)
    if (n == 0) throw ConfigError("[validate] checkpoints must be >= 1");
  std::int64_t reps = cfg.get_int_or("validate", "repetitions", 2000);
  if (reps < 1) throw ConfigError("[validate] repetitions must be >= 1");
  vc.repetitions = static_cast<std::size_t>(reps);
  vc.base_seed =
      static_cast<std::uint64_t>(cfg.get_int_or("run", "base_seed", 1));
  if (options.seed) vc.base_seed = *options.seed;
  vc.threads = options.threads;
  vc.prior_alpha0 = cfg.get_double_or("validate", "alpha0", 0.1);
  vc.prior_beta0 = cfg.get_double_or("validate", "beta0", 1.0);

  ValidationReport report = run_estimator_validation(vc);

  std::filesystem::create_directories(options.out_dir);
  CsvWriter csv(options.out_dir + "/estimator_validation.csv",
                "n,repetitions,mean_n1,expected_n1,se_n1,var_n1_over_n,"
                "var_bound,mean_r_next,expected_r_next,lambda,belief_q025,"
                "belief_q975,max_once_probability,poisson_applicable,"
                "chi2_stat,chi2_dof,chi2_critical,mean_pass,var_pass,"
                "poisson_pass");
  for (const auto& cp : report.checkpoints) {
    csv.cell(cp.n)
        .cell(static_cast<std::uint64_t>(vc.repetitions))
        .cell(cp.mean_n1)
        .cell(cp.expected_n1_analytic)
        .cell(cp.se_n1)
        .cell(cp.var_n1_over_n)
        .cell(cp.var_bound)
        .cell(cp.mean_r_next)
        .cell(cp.expected_r_next_analytic)
        .cell(cp.lambda)
        .cell(cp.belief_lo)
        .cell(cp.belief_hi)
        .cell(cp.max_once_probability)
        .cell(static_cast<std::uint64_t>(cp.poisson_applicable ? 1 : 0))
        .cell(cp.gof.stat)
        .cell(static_cast<std::uint64_t>(cp.gof.dof))
        .cell(cp.gof.critical)
        .cell(static_cast<std::uint64_t>(cp.mean_pass ? 1 : 0))
        .cell(static_cast<std::uint64_t>(cp.var_pass ? 1 : 0))
        .cell(static_cast<std::uint64_t>(cp.poisson_pass ? 1 : 0));
    csv.end_row();
  }
  std::ofstream summary(options.out_dir + "/summary.txt");
  for (const auto& cp : report.checkpoints) {
    summary << "n=" << cp.n << " mean=" << (cp.mean_pass ? "pass" : "FAIL")
            << " variance=" << (cp.var_pass ? "pass" : "FAIL") << " poisson=";
    if (!cp.poisson_applicable)
      summary << "n/a";
    else
      summary << (cp.poisson_pass ? "pass" : "FAIL");
    summary << "\n";
  }
  summary << (report.all_pass ? "ALL PASS" : "FAILURES PRESENT") << "\n";
  return 0;
}

int cmd_optimal(const CliOptions& options) {
  if (options.out_dir.empty()) throw ConfigError("optimal: --out is required");
  std::string text = read_file(options.config_path);
  Config cfg = Config::parse(text);

  SyntheticDataset dataset = [&] {
    if (cfg.has("optimal", "spans_file"))
      return load_spans_file(cfg.get_string("optimal", "spans_file"));
    GridConfig grid = parse_dataset_config(cfg, options);
    return make_grid_dataset(grid, 0, grid.skews.front(),
                             grid.duration_means.front());
  }();

  std::vector<std::uint64_t> horizons = cfg.get_uint_list("optimal", "horizons");
  for (std::uint64_t n : horizons)
    if (n == 0) throw ConfigError("[optimal] horizons must be >= 1");
  std::vector<std::uint64_t> chunk_counts =
      cfg.has("optimal", "chunks") ? cfg.get_uint_list("optimal", "chunks")
                                   : std::vector<std::uint64_t>{64};

  std::filesystem::create_directories(options.out_dir);
  CsvWriter summary(options.out_dir + "/nstar.csv",
                    "chunks,horizon,expected_found,final_gap,converged,"
                    "iterations");
  for (std::uint64_t m : chunk_counts) {
    if (m == 0) throw ConfigError("[optimal] chunks must be >= 1");
    ChunkLayout layout =
        partition_frames(dataset.total_frames(), static_cast<std::size_t>(m));
    PMatrix pm = compute_p_matrix(dataset, layout);
    std::vector<double> warm;
    for (std::uint64_t n : horizons) {
      AllocationSolution sol =
          optimal_allocation(pm, n, 1e-6, 50000, warm.empty() ? nullptr : &warm);
      warm = sol.w;
      summary.cell(m)
          .cell(n)
          .cell(sol.expected_found)
          .cell(sol.final_gap)
          .cell(static_cast<std::uint64_t>(sol.converged ? 1 : 0))
          .cell(static_cast<std::uint64_t>(sol.iterations));
      summary.end_row();
      CsvWriter alloc(options.out_dir + "/allocation_m" + std::to_string(m) +
                          "_n" + std::to_string(n) + ".csv",
                      "chunk,weight");
      for (std::size_t j = 0; j < sol.w.size(); ++j) {
        alloc.cell(static_cast<std::uint64_t>(j)).cell(sol.w[j]);
        alloc.end_row();
      }
    }
  }
  return 0;
}

namespace {

struct BandsFile {
  std::vector<std::uint64_t> index;
  std::vector<double> p50;
};

BandsFile read_bands(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("report: missing " + path);
  BandsFile b;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != 4) throw ConfigError("report: bad bands row: " + line);
    b.index.push_back(std::stoull(cells[0]));
    b.p50.push_back(std::stod(cells[2]));
  }
  return b;
}

}  // namespace

int cmd_report(const CliOptions& options) {
  std::string in_dir = options.input_dir;
  if (in_dir.empty()) throw ConfigError("report: run directory is required");
  std::string out_dir =
      options.out_dir.empty() ? in_dir + "/report" : options.out_dir;

  std::ifstream cells(in_dir + "/cells.csv");
  if (!cells) throw ConfigError("report: missing " + in_dir + "/cells.csv");
  std::filesystem::create_directories(out_dir);

  CsvWriter gap_csv(out_dir + "/gap.csv",
                    "skew,duration,sample_index,optimal_median,exsample_p50,"
                    "gap");
  std::string line;
  std::getline(cells, line);
  bool any_gap = false;
  while (std::getline(cells, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string skew, duration, dir;
    std::getline(row, skew, ',');
    std::getline(row, duration, ',');
    std::getline(row, dir, ',');
    std::string cell_dir = in_dir + "/" + dir;

    std::string oracle_path = cell_dir + "/oracle.csv";
    std::string bands_path = cell_dir + "/bands_exsample.csv";
    if (!std::filesystem::exists(oracle_path) ||
        !std::filesystem::exists(bands_path))
      continue;
    std::ifstream oracle(oracle_path);
    BandsFile bands = read_bands(bands_path);
    std::map<std::uint64_t, double> p50_at;
    for (std::size_t k = 0; k < bands.index.size(); ++k)
      p50_at[bands.index[k]] = bands.p50[k];
    std::string orow;
    std::getline(oracle, orow);
    while (std::getline(oracle, orow)) {
      if (orow.empty()) continue;
      std::istringstream os(orow);
      std::string n_str, nstar_str, rnd_str;
      std::getline(os, n_str, ',');
      std::getline(os, nstar_str, ',');
      std::getline(os, rnd_str, ',');
      std::uint64_t n = std::stoull(n_str);
      auto it = p50_at.find(n);
      if (it == p50_at.end()) continue;
      double nstar = std::stod(nstar_str);
      gap_csv.cell(skew)
          .cell(duration)
          .cell(n)
          .cell(nstar)
          .cell(it->second)
          .cell(nstar - it->second);
      gap_csv.end_row();
      any_gap = true;
    }
  }

  std::ifstream savings_in(in_dir + "/savings.csv");
  if (!savings_in)
    throw ConfigError("report: missing " + in_dir + "/savings.csv");
  std::ofstream savings_out(out_dir + "/savings.csv");
  savings_out << savings_in.rdbuf();
  (void)any_gap;
  return 0;
}

}  // namespace exsample
