#include <doctest.h>

#include "exsample/estimator.hpp"
#include "exsample/rng.hpp"
#include "exsample/simulation.hpp"
#include "exsample/stats.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

using namespace exsample;

TEST_CASE("gt_estimate is the singleton fraction") {
  CHECK(gt_estimate(5, 100) == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(gt_estimate(0, 7) == 0.0);
  CHECK(gt_estimate(12, 4) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK_THROWS_AS(gt_estimate(1, 0), std::invalid_argument);
}

TEST_CASE("pow_one_minus exact values and edge cases") {
  CHECK(pow_one_minus(0.5, 2) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(pow_one_minus(0.5, 0) == 1.0);
  CHECK(pow_one_minus(1.0, 3) == 0.0);
  CHECK(pow_one_minus(1.0, 0) == 1.0);
  // tiny p at large n stays accurate in log space
  CHECK(pow_one_minus(1e-9, 1'000'000'000) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-7));
}

TEST_CASE("pi_first_hit closed form") {
  CHECK(pi_first_hit(0.1, 1) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(pi_first_hit(0.1, 3) == doctest::Approx(0.1 * 0.81).epsilon(1e-12));
  CHECK(pi_first_hit(1.0, 1) == 1.0);
  CHECK(pi_first_hit(1.0, 2) == 0.0);
  CHECK_THROWS_AS(pi_first_hit(0.1, 0), std::invalid_argument);
  CHECK_THROWS_AS(pi_first_hit(0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(pi_first_hit(1.5, 1), std::invalid_argument);
}

TEST_CASE("first-hit mass drops by p^2 (1-p)^(n-1) per extra sample") {
  for (double p : {1e-5, 1e-3, 0.1, 0.5, 0.99}) {
    for (std::uint64_t n : {std::uint64_t{1}, std::uint64_t{2},
                            std::uint64_t{10}, std::uint64_t{1000}}) {
      double lhs = pi_first_hit(p, n) - pi_first_hit(p, n + 1);
      double rhs = p * p * pow_one_minus(p, n - 1);
      // looser floor for tiny p, where the subtraction cancels digits
      double tol = p >= 1e-3 ? 1e-12 : 1e-9;
      CHECK(lhs == doctest::Approx(rhs).epsilon(tol));
    }
  }
}

TEST_CASE("expected_r_next single point closed form") {
  std::vector<double> p = {0.25};
  CHECK(expected_r_next(p, 0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(expected_r_next(p, 2) ==
        doctest::Approx(0.25 * 0.5625).epsilon(1e-13));
  std::vector<double> bad = {0.5, 0.0};
  CHECK_THROWS_AS(expected_r_next(bad, 1), std::invalid_argument);
}

TEST_CASE("expected_n1 single point closed form") {
  std::vector<double> p = {0.2};
  CHECK(expected_n1(p, 1) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(expected_n1(p, 3) == doctest::Approx(3 * 0.2 * 0.64).epsilon(1e-13));
  CHECK_THROWS_AS(expected_n1(p, 0), std::invalid_argument);
}

TEST_CASE("conditional_r_next sums the unseen mass") {
  std::vector<double> p = {0.1, 0.2, 0.3};
  std::vector<std::uint32_t> seen = {1};
  CHECK(conditional_r_next(p, seen) == doctest::Approx(0.4).epsilon(1e-13));
  std::vector<std::uint32_t> none;
  CHECK(conditional_r_next(p, none) == doctest::Approx(0.6).epsilon(1e-13));
  std::vector<std::uint32_t> out_of_range = {3};
  CHECK_THROWS_AS(conditional_r_next(p, out_of_range), std::invalid_argument);
}

TEST_CASE("relative bias equals p for a single instance") {
  std::vector<double> p = {0.037};
  for (std::uint64_t n : {std::uint64_t{1}, std::uint64_t{50}})
    CHECK(analytic_relative_bias(p, n) ==
          doctest::Approx(0.037).epsilon(1e-13));
}

TEST_CASE("relative bias matches a two-point hand derivation") {
  // bias = (p1^2 + p2^2 e^D) / (p1 + p2 e^D),
  // D = (n-1) (log(1-p2) - log(1-p1)), which never underflows
  auto oracle = [](double p1, double p2, std::uint64_t n) {
    double d = static_cast<double>(n - 1) * (std::log1p(-p2) - std::log1p(-p1));
    double e = std::exp(d);
    return (p1 * p1 + p2 * p2 * e) / (p1 + p2 * e);
  };
  std::vector<double> p = {1e-4, 2e-4};
  for (std::uint64_t n :
       {std::uint64_t{1}, std::uint64_t{1000}, std::uint64_t{100000}}) {
    CHECK(analytic_relative_bias(p, n) ==
          doctest::Approx(oracle(1e-4, 2e-4, n)).epsilon(1e-10));
  }
  // every term underflows a double here; the shifted ratio must survive
  std::uint64_t deep = 20'000'000;
  CHECK(pow_one_minus(1e-4, deep - 1) == 0.0);
  CHECK(analytic_relative_bias(p, deep) ==
        doctest::Approx(oracle(1e-4, 2e-4, deep)).epsilon(1e-9));
}

TEST_CASE("relative bias rejects an all-certain workload past one sample") {
  std::vector<double> p = {1.0, 1.0};
  CHECK(analytic_relative_bias(p, 1) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK_THROWS_AS(analytic_relative_bias(p, 2), std::domain_error);
}

TEST_CASE("duration_stats population moments") {
  std::vector<double> p = {0.1, 0.3};
  DurationStats s = duration_stats(p);
  CHECK(s.mu_p == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(s.sigma_p == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(s.max_p == 0.3);
}

TEST_CASE("bias_upper_bounds closed forms") {
  DurationStats s;
  s.mu_p = 3e-3;
  s.sigma_p = 8e-3;
  s.max_p = 0.15;
  auto [cap, spread] = bias_upper_bounds(s, 1000);
  CHECK(cap == 0.15);
  CHECK(spread == doctest::Approx(0.347850542618521).epsilon(1e-12));
}

TEST_CASE("relative bias never exceeds either ceiling") {
  RngStream rng(202, 0);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n_inst = 1 + rng.uniform_below(300);
    std::vector<double> p;
    p.reserve(n_inst);
    for (std::size_t i = 0; i < n_inst; ++i) {
      double v = trial % 2 == 0 ? rng.lognormal(std::log(2e-3), 1.5)
                                : 1e-4 + rng.uniform() * 0.4;
      p.push_back(std::min(v, 1.0));
    }
    DurationStats s = duration_stats(p);
    auto [cap, spread] = bias_upper_bounds(s, p.size());
    for (std::uint64_t n : {std::uint64_t{1}, std::uint64_t{100},
                            std::uint64_t{10000}}) {
      double bias = analytic_relative_bias(p, n);
      CHECK(bias <= cap + 1e-12);
      CHECK(bias <= spread + 1e-12);
      CHECK(bias >= -1e-15);
    }
  }
}

TEST_CASE("poisson_lambda matches brute-force long double products") {
  std::vector<double> p(100, 1e-4);
  std::uint64_t n = 1000;
  long double factor = 1.0L;
  for (std::uint64_t k = 0; k + 1 < n; ++k) factor *= (1.0L - 1e-4L);
  long double expected = 100.0L * static_cast<long double>(n) * 1e-4L * factor;
  CHECK(poisson_lambda(p, n) ==
        doctest::Approx(static_cast<double>(expected)).epsilon(1e-12));
  CHECK(poisson_lambda(p, n) == expected_n1(p, n));
}

namespace {

// Empirical mean singleton count with per-frame independent coins:
// every instance is checked on every one of the n inspected frames.
SampleStats singletons_by_coins(const std::vector<double>& p, std::uint64_t n,
                                std::size_t reps, RngStream& rng) {
  std::vector<double> counts;
  counts.reserve(reps);
  std::vector<std::uint32_t> hits(p.size());
  for (std::size_t rep = 0; rep < reps; ++rep) {
    std::fill(hits.begin(), hits.end(), 0);
    for (std::uint64_t f = 0; f < n; ++f)
      for (std::size_t i = 0; i < p.size(); ++i)
        if (rng.uniform() < p[i]) ++hits[i];
    std::uint64_t n1 = 0;
    for (auto h : hits) n1 += h == 1;
    counts.push_back(static_cast<double>(n1));
  }
  return summarize(counts);
}

// Same quantity via the sighting-time shortcut: the first two sighting times
// are a geometric and an independent geometric on top of it, and an instance
// is a singleton at n exactly when the first time has passed and the second
// has not.
SampleStats singletons_by_times(const std::vector<double>& p, std::uint64_t n,
                                std::size_t reps, RngStream& rng) {
  auto geometric = [&](double q) {
    double t = std::ceil(std::log(rng.uniform_pos()) / std::log1p(-q));
    return t < 1.0 ? std::uint64_t{1} : static_cast<std::uint64_t>(t);
  };
  std::vector<double> counts;
  counts.reserve(reps);
  for (std::size_t rep = 0; rep < reps; ++rep) {
    std::uint64_t n1 = 0;
    for (double q : p) {
      std::uint64_t t1 = geometric(q);
      std::uint64_t t2 = t1 + geometric(q);
      if (t1 <= n && n < t2) ++n1;
    }
    counts.push_back(static_cast<double>(n1));
  }
  return summarize(counts);
}

}  // namespace

TEST_CASE("coin flips and sighting times agree with the analytic mean") {
  RngStream rng(404, 0);
  std::vector<double> p = gen_lognormal_p(40, 0.02, 1.0, rng);
  const std::uint64_t n = 200;
  const std::size_t reps = 4000;

  RngStream coins(404, 1);
  RngStream times(404, 2);
  SampleStats direct = singletons_by_coins(p, n, reps, coins);
  SampleStats shortcut = singletons_by_times(p, n, reps, times);
  double target = expected_n1(p, n);

  CHECK(std::abs(direct.mean - target) <= 4.0 * direct.se_mean);
  CHECK(std::abs(shortcut.mean - target) <= 4.0 * shortcut.se_mean);
  double cross_se = std::sqrt(direct.se_mean * direct.se_mean +
                              shortcut.se_mean * shortcut.se_mean);
  CHECK(std::abs(direct.mean - shortcut.mean) <= 5.0 * cross_se);

  // independent-indicator structure caps the variance by the mean
  CHECK(direct.variance <= 1.10 * target);
  CHECK(shortcut.variance <= 1.10 * target);
}

TEST_CASE("singleton counts pass the Poisson fit when every term is small") {
  const std::size_t n_inst = 2000;
  const std::uint64_t n = 2000;
  const std::size_t reps = 2000;
  std::vector<double> p(n_inst, 5e-6);

  double q = static_cast<double>(n) * pi_first_hit(5e-6, n);
  REQUIRE(q <= 0.01);
  double lambda = poisson_lambda(p, n);

  RngStream rng(505, 0);
  std::vector<std::uint64_t> values;
  values.reserve(reps);
  for (std::size_t rep = 0; rep < reps; ++rep) {
    std::uint64_t n1 = 0;
    for (std::size_t i = 0; i < n_inst; ++i)
      if (rng.uniform() < q) ++n1;
    values.push_back(n1);
  }
  ChiSquareGof gof = poisson_gof(values, lambda, 0.01);
  CHECK(gof.dof >= 2);
  CHECK_FALSE(gof.rejected);
}

TEST_CASE("poisson_gof rejects clearly non-Poisson data") {
  std::vector<std::uint64_t> constant(2000, 20);
  CHECK(poisson_gof(constant, 20.0, 0.01).rejected);

  RngStream rng(506, 0);
  std::vector<std::uint64_t> shifted;
  shifted.reserve(2000);
  for (int rep = 0; rep < 2000; ++rep) {
    std::uint64_t k = 0;
    for (int i = 0; i < 3000; ++i)
      if (rng.uniform() < 0.01) ++k;
    shifted.push_back(k);
  }
  CHECK(poisson_gof(shifted, 20.0, 0.01).rejected);
}
