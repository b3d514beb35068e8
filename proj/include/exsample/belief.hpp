#pragma once

#include "exsample/core.hpp"
#include "exsample/rng.hpp"

namespace exsample {

// Gamma posterior over a chunk's future hit rate, shape/rate parametrization.
struct GammaBelief {
  double shape = 0.0;
  double rate = 0.0;

  double mean() const { return shape / rate; }
  double variance() const { return shape / (rate * rate); }
};

// Posterior after observing stats under the given prior: shape = n1 + alpha0,
// rate = n + beta0. A negative n1 (transient double-sighting debt) clamps the
// shape at alpha0 so the belief stays proper.
GammaBelief belief_from_stats(const ChunkStats& stats,
                              const BeliefParams& params);

// One draw. Marsaglia-Tsang squeeze/rejection for shape >= 1; shape < 1 uses
// a draw at shape+1 scaled by U^(1/shape). Throws std::invalid_argument on
// non-positive parameters.
double sample_gamma(const GammaBelief& belief, RngStream& rng);

// P(X <= x) for the belief.
double gamma_cdf(const GammaBelief& belief, double x);

// Inverse CDF by bisection on gamma_cdf to absolute tolerance 1e-10.
// Requires q in (0, 1).
double gamma_quantile(const GammaBelief& belief, double q);

// Chi-square inverse CDF, used by goodness-of-fit gates.
double chi_square_quantile(double dof, double q);

}  // namespace exsample
