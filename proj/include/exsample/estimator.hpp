#pragma once

#include <cstdint>
#include <span>
#include <utility>

namespace exsample {

// Estimated probability that the next sample reveals a new distinct instance,
// from the count of instances seen exactly once so far. The estimate may
// exceed 1 when singletons outnumber samples. Throws std::invalid_argument
// when n == 0.
double gt_estimate(std::uint64_t n1, std::uint64_t n);

// (1 - p)^n evaluated in log space so tiny p at large n keeps full precision.
double pow_one_minus(double p, std::uint64_t n);

// Probability that an instance with per-frame probability p is first seen on
// sample n (n >= 1): p * (1 - p)^(n-1).
double pi_first_hit(double p, std::uint64_t n);

// Expected probability that sample n+1 reveals a new instance after n misses
// of each: sum_i p_i * (1 - p_i)^n.
double expected_r_next(std::span<const double> p, std::uint64_t n);

// Same quantity conditioned on the realized history: the total probability of
// the instances not yet seen. seen holds distinct indices into p.
double conditional_r_next(std::span<const double> p,
                          std::span<const std::uint32_t> seen);

// Expected count of instances seen exactly once after n samples:
// sum_i n * p_i * (1 - p_i)^(n-1). Requires n >= 1.
double expected_n1(std::span<const double> p, std::uint64_t n);

// Relative overestimate of the singleton-rate estimator,
// (E[N1(n)]/n - E[R(n+1)]) / (E[N1(n)]/n)
//   = sum_i p_i^2 (1-p_i)^(n-1) / sum_i p_i (1-p_i)^(n-1).
// Computed with a shared exponent shift so it stays finite when every term
// underflows. Throws std::domain_error when the denominator is exactly zero
// (all p_i == 1 with n >= 2).
double analytic_relative_bias(std::span<const double> p, std::uint64_t n);

struct DurationStats {
  double mu_p = 0.0;     // mean of p
  double sigma_p = 0.0;  // population standard deviation of p
  double max_p = 0.0;
};

DurationStats duration_stats(std::span<const double> p);

// Two closed-form ceilings on the relative overestimate: the largest p_i, and
// sqrt(N) * (mu_p + sigma_p). The true bias never exceeds either.
std::pair<double, double> bias_upper_bounds(const DurationStats& stats,
                                            std::size_t n_instances);

// Rate parameter of the limiting Poisson law of N1(n); equals expected_n1.
double poisson_lambda(std::span<const double> p, std::uint64_t n);

}  // namespace exsample
