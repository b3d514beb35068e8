#pragma once

#include "exsample/stats.hpp"

#include <cstdint>
#include <vector>

namespace exsample {

// Monte Carlo check of the singleton-rate analytics against a workload where
// each instance appears independently per inspected frame. Per repetition,
// each instance's first and second sighting times are drawn directly from
// their geometric laws, which reproduces the per-frame coin model exactly
// without touching every frame.
struct ValidationConfig {
  std::size_t instances = 1000;
  double p_mean = 3e-3;
  double p_sigma_log = 1.5;
  std::vector<std::uint64_t> checkpoints = {10, 100, 1000, 10000, 20000};
  std::size_t repetitions = 2000;
  std::uint64_t base_seed = 1;
  unsigned threads = 0;
  double prior_alpha0 = 0.1;
  double prior_beta0 = 1.0;
};

struct ValidationCheckpoint {
  std::uint64_t n = 0;
  // empirical singleton counts across repetitions
  double mean_n1 = 0.0;
  double sd_n1 = 0.0;
  double se_n1 = 0.0;
  double var_n1_over_n = 0.0;
  // analytic counterparts
  double expected_n1_analytic = 0.0;
  double var_bound = 0.0;  // expected_n1 / n^2
  double lambda = 0.0;
  // next-sample discovery rate, averaged over realized histories
  double mean_r_next = 0.0;
  double expected_r_next_analytic = 0.0;
  // central 95% belief interval at the mean singleton count
  double belief_lo = 0.0;
  double belief_hi = 0.0;
  // Poisson fit: gated on every per-instance exactly-once probability
  // n * p * (1-p)^(n-1) being at most 0.01
  bool poisson_applicable = false;
  double max_once_probability = 0.0;
  ChiSquareGof gof;

  bool mean_pass = false;
  bool var_pass = false;
  bool poisson_pass = false;  // vacuously true when not applicable
};

struct ValidationReport {
  std::vector<double> p;
  std::vector<ValidationCheckpoint> checkpoints;
  bool all_pass = false;
};

// Gates: empirical mean of N1 within 4 standard errors of the analytic value;
// empirical Var[N1/n] at most 1.05x the analytic ceiling; where the Poisson
// law applies, a chi-square fit at significance 0.01 must not reject.
ValidationReport run_estimator_validation(const ValidationConfig& config);

}  // namespace exsample
