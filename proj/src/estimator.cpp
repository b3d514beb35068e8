#include "exsample/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace exsample {

namespace {

void check_probabilities(std::span<const double> p) {
  for (double v : p)
    if (!(v > 0.0) || v > 1.0)
      throw std::invalid_argument("probabilities must lie in (0, 1]");
}

// log of p * (1-p)^(n-1); -inf when the product is exactly zero.
double log_pi_first_hit(double p, std::uint64_t n) {
  if (p == 1.0) return n == 1 ? 0.0 : -std::numeric_limits<double>::infinity();
  return std::log(p) + static_cast<double>(n - 1) * std::log1p(-p);
}

}  // namespace

double gt_estimate(std::uint64_t n1, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("gt_estimate: n must be >= 1");
  return static_cast<double>(n1) / static_cast<double>(n);
}

double pow_one_minus(double p, std::uint64_t n) {
  if (n == 0) return 1.0;
  if (p == 1.0) return 0.0;
  return std::exp(static_cast<double>(n) * std::log1p(-p));
}

double pi_first_hit(double p, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("pi_first_hit: n must be >= 1");
  if (!(p > 0.0) || p > 1.0)
    throw std::invalid_argument("pi_first_hit: p must lie in (0, 1]");
  return p * pow_one_minus(p, n - 1);
}

double expected_r_next(std::span<const double> p, std::uint64_t n) {
  check_probabilities(p);
  long double acc = 0.0L;
  for (double v : p) acc += v * pow_one_minus(v, n);
  return static_cast<double>(acc);
}

double conditional_r_next(std::span<const double> p,
                          std::span<const std::uint32_t> seen) {
  check_probabilities(p);
  std::vector<char> mask(p.size(), 0);
  for (std::uint32_t idx : seen) {
    if (idx >= p.size())
      throw std::invalid_argument("conditional_r_next: index out of range");
    mask[idx] = 1;
  }
  long double acc = 0.0L;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (!mask[i]) acc += p[i];
  return static_cast<double>(acc);
}

double expected_n1(std::span<const double> p, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("expected_n1: n must be >= 1");
  check_probabilities(p);
  long double acc = 0.0L;
  for (double v : p) acc += v * pow_one_minus(v, n - 1);
  return static_cast<double>(n) * static_cast<double>(acc);
}

double analytic_relative_bias(std::span<const double> p, std::uint64_t n) {
  if (n == 0)
    throw std::invalid_argument("analytic_relative_bias: n must be >= 1");
  check_probabilities(p);
  if (p.empty())
    throw std::domain_error("analytic_relative_bias: empty vector");

  // Shift all terms by the largest log so the ratio survives underflow.
  std::vector<double> logs(p.size());
  double log_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.size(); ++i) {
    logs[i] = log_pi_first_hit(p[i], n);
    log_max = std::max(log_max, logs[i]);
  }
  if (log_max == -std::numeric_limits<double>::infinity())
    throw std::domain_error("analytic_relative_bias: zero denominator");

  long double num = 0.0L, den = 0.0L;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (logs[i] == -std::numeric_limits<double>::infinity()) continue;
    long double t = std::exp(logs[i] - log_max);
    num += p[i] * t;
    den += t;
  }
  return static_cast<double>(num / den);
}

DurationStats duration_stats(std::span<const double> p) {
  check_probabilities(p);
  if (p.empty()) throw std::invalid_argument("duration_stats: empty vector");
  DurationStats s;
  long double sum = 0.0L;
  for (double v : p) {
    sum += v;
    s.max_p = std::max(s.max_p, v);
  }
  s.mu_p = static_cast<double>(sum / p.size());
  long double ss = 0.0L;
  for (double v : p) {
    long double d = v - s.mu_p;
    ss += d * d;
  }
  s.sigma_p = std::sqrt(static_cast<double>(ss / p.size()));
  return s;
}

std::pair<double, double> bias_upper_bounds(const DurationStats& stats,
                                            std::size_t n_instances) {
  double spread_bound = std::sqrt(static_cast<double>(n_instances)) *
                        (stats.mu_p + stats.sigma_p);
  return {stats.max_p, spread_bound};
}

double poisson_lambda(std::span<const double> p, std::uint64_t n) {
  return expected_n1(p, n);
}

}  // namespace exsample
