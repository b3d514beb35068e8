#include "exsample/stats.hpp"

#include "exsample/belief.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace exsample {

SampleStats summarize(std::span<const double> values) {
  SampleStats s;
  s.count = values.size();
  if (s.count == 0) return s;
  long double sum = 0.0L;
  for (double v : values) sum += v;
  s.mean = static_cast<double>(sum / s.count);
  if (s.count > 1) {
    long double ss = 0.0L;
    for (double v : values) {
      long double d = v - s.mean;
      ss += d * d;
    }
    s.variance = static_cast<double>(ss / (s.count - 1));
    s.sd = std::sqrt(s.variance);
    s.se_mean = s.sd / std::sqrt(static_cast<double>(s.count));
  }
  return s;
}

namespace {

double poisson_pmf(std::uint64_t k, double lambda) {
  if (lambda == 0.0) return k == 0 ? 1.0 : 0.0;
  return std::exp(static_cast<double>(k) * std::log(lambda) - lambda -
                  std::lgamma(static_cast<double>(k) + 1.0));
}

}  // namespace

ChiSquareGof poisson_gof(std::span<const std::uint64_t> values, double lambda,
                         double significance, double min_expected) {
  if (values.empty()) throw std::invalid_argument("poisson_gof: no values");
  if (!(significance > 0.0) || !(significance < 1.0))
    throw std::invalid_argument("poisson_gof: significance in (0, 1)");
  auto r = static_cast<double>(values.size());

  std::uint64_t max_value = *std::max_element(values.begin(), values.end());
  std::uint64_t k_hi = std::max<std::uint64_t>(
      max_value, static_cast<std::uint64_t>(lambda + 10.0 * std::sqrt(lambda)) + 20);
  std::vector<std::uint64_t> observed(k_hi + 1, 0);
  for (std::uint64_t v : values) ++observed[v];
  std::vector<double> expected(k_hi + 1);
  for (std::uint64_t k = 0; k <= k_hi; ++k)
    expected[k] = r * poisson_pmf(k, lambda);
  // remaining tail mass folded into the top cell
  double tail = r;
  for (double e : expected) tail -= e;
  expected[k_hi] += std::max(tail, 0.0);

  // merge sparse cells inward from both tails
  std::vector<double> obs_bins, exp_bins;
  double o_acc = 0.0, e_acc = 0.0;
  for (std::uint64_t k = 0; k <= k_hi; ++k) {
    o_acc += observed[k];
    e_acc += expected[k];
    if (e_acc >= min_expected) {
      obs_bins.push_back(o_acc);
      exp_bins.push_back(e_acc);
      o_acc = e_acc = 0.0;
    }
  }
  if (e_acc > 0.0 || o_acc > 0.0) {
    if (exp_bins.empty()) {
      obs_bins.push_back(o_acc);
      exp_bins.push_back(e_acc);
    } else {
      obs_bins.back() += o_acc;
      exp_bins.back() += e_acc;
    }
  }

  ChiSquareGof g;
  if (exp_bins.size() < 2) {
    g.dof = 0;
    g.rejected = false;
    return g;
  }
  for (std::size_t b = 0; b < exp_bins.size(); ++b) {
    double d = obs_bins[b] - exp_bins[b];
    g.stat += d * d / exp_bins[b];
  }
  g.dof = exp_bins.size() - 1;
  g.critical =
      chi_square_quantile(static_cast<double>(g.dof), 1.0 - significance);
  g.rejected = g.stat > g.critical;
  return g;
}

double ks_two_sample_stat(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_two_sample_stat: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double na = static_cast<double>(a.size());
  double nb = static_cast<double>(b.size());
  std::size_t ia = 0, ib = 0;
  double d = 0.0;
  while (ia < a.size() && ib < b.size()) {
    double x = std::min(a[ia], b[ib]);
    while (ia < a.size() && a[ia] <= x) ++ia;
    while (ib < b.size() && b[ib] <= x) ++ib;
    d = std::max(d, std::abs(static_cast<double>(ia) / na -
                             static_cast<double>(ib) / nb));
  }
  return d;
}

double ks_two_sample_critical(std::size_t n, std::size_t m, double alpha) {
  if (n == 0 || m == 0)
    throw std::invalid_argument("ks_two_sample_critical: empty sample");
  double c = std::sqrt(-std::log(alpha / 2.0) / 2.0);
  return c * std::sqrt(static_cast<double>(n + m) /
                       (static_cast<double>(n) * static_cast<double>(m)));
}

}  // namespace exsample
