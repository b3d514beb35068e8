#include "exsample/belief.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace exsample {

namespace {

// Marsaglia-Tsang for shape >= 1, rate 1.
double sample_gamma_rate1(double shape, RngStream& rng) {
  double d = shape - 1.0 / 3.0;
  double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    double u = rng.uniform_pos();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace

GammaBelief belief_from_stats(const ChunkStats& stats,
                              const BeliefParams& params) {
  if (!(params.alpha0 > 0.0) || !(params.beta0 > 0.0))
    throw std::invalid_argument("belief_from_stats: prior must be positive");
  double shape = static_cast<double>(stats.n1) + params.alpha0;
  shape = std::max(shape, params.alpha0);
  return {shape, static_cast<double>(stats.n) + params.beta0};
}

double sample_gamma(const GammaBelief& belief, RngStream& rng) {
  if (!(belief.shape > 0.0) || !(belief.rate > 0.0))
    throw std::invalid_argument("sample_gamma: shape and rate must be > 0");
  if (belief.shape >= 1.0)
    return sample_gamma_rate1(belief.shape, rng) / belief.rate;
  double g = sample_gamma_rate1(belief.shape + 1.0, rng);
  double u = rng.uniform_pos();
  return g * std::pow(u, 1.0 / belief.shape) / belief.rate;
}

double gamma_cdf(const GammaBelief& belief, double x) {
  if (!(belief.shape > 0.0) || !(belief.rate > 0.0))
    throw std::invalid_argument("gamma_cdf: shape and rate must be > 0");
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(belief.shape, belief.rate * x);
}

double gamma_quantile(const GammaBelief& belief, double q) {
  if (!(belief.shape > 0.0) || !(belief.rate > 0.0))
    throw std::invalid_argument("gamma_quantile: shape and rate must be > 0");
  if (!(q > 0.0) || !(q < 1.0))
    throw std::invalid_argument("gamma_quantile: q must lie in (0, 1)");

  double hi = belief.mean() + 20.0 * std::sqrt(belief.variance()) + 1.0;
  while (gamma_cdf(belief, hi) < q) hi *= 2.0;
  double lo = 0.0;
  while (hi - lo > 1e-10) {
    double mid = 0.5 * (lo + hi);
    if (gamma_cdf(belief, mid) < q)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double chi_square_quantile(double dof, double q) {
  return gamma_quantile(GammaBelief{dof / 2.0, 0.5}, q);
}

}  // namespace exsample
