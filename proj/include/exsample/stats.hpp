#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace exsample {

struct SampleStats {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // sample variance, n-1 denominator
  double sd = 0.0;
  double se_mean = 0.0;
};

SampleStats summarize(std::span<const double> values);

struct ChiSquareGof {
  double stat = 0.0;
  std::size_t dof = 0;
  double critical = 0.0;
  bool rejected = false;
};

// Pearson goodness of fit of integer observations against Poisson(lambda).
// Bins with expected count below min_expected are merged into their
// neighbors from both tails inward.
ChiSquareGof poisson_gof(std::span<const std::uint64_t> values, double lambda,
                         double significance, double min_expected = 5.0);

// Two-sample Kolmogorov-Smirnov distance between empirical CDFs.
double ks_two_sample_stat(std::vector<double> a, std::vector<double> b);

// Asymptotic rejection threshold c(alpha) * sqrt((n+m)/(n*m)).
double ks_two_sample_critical(std::size_t n, std::size_t m, double alpha);

}  // namespace exsample
