#include "exsample/validation.hpp"

#include "exsample/belief.hpp"
#include "exsample/estimator.hpp"
#include "exsample/parallel.hpp"
#include "exsample/rng.hpp"
#include "exsample/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

namespace exsample {

namespace {

constexpr std::uint64_t kTagDataset = 0x11;
constexpr std::uint64_t kTagSampler = 0x22;

// Trial index of the first success of a Bernoulli(p) sequence, 1-based.
std::uint64_t geometric(double p, RngStream& rng) {
  if (p >= 1.0) return 1;
  double t = std::ceil(std::log(rng.uniform_pos()) / std::log1p(-p));
  return t < 1.0 ? 1 : static_cast<std::uint64_t>(t);
}

struct Accumulator {
  std::vector<long double> sum_n1, sumsq_n1, sum_r_next;
  std::vector<std::vector<std::uint64_t>> n1_values;  // per checkpoint

  explicit Accumulator(std::size_t n_checkpoints)
      : sum_n1(n_checkpoints, 0.0L),
        sumsq_n1(n_checkpoints, 0.0L),
        sum_r_next(n_checkpoints, 0.0L),
        n1_values(n_checkpoints) {}

  void merge(const Accumulator& other) {
    for (std::size_t c = 0; c < sum_n1.size(); ++c) {
      sum_n1[c] += other.sum_n1[c];
      sumsq_n1[c] += other.sumsq_n1[c];
      sum_r_next[c] += other.sum_r_next[c];
      n1_values[c].insert(n1_values[c].end(), other.n1_values[c].begin(),
                          other.n1_values[c].end());
    }
  }
};

}  // namespace

ValidationReport run_estimator_validation(const ValidationConfig& config) {
  if (config.repetitions == 0)
    throw std::invalid_argument("validation: repetitions must be >= 1");
  for (std::uint64_t n : config.checkpoints)
    if (n == 0)
      throw std::invalid_argument("validation: checkpoints must be >= 1");

  ValidationReport report;
  RngStream dataset_rng =
      RngStream(config.base_seed, 0).substream(kTagDataset);
  report.p = gen_lognormal_p(config.instances, config.p_mean,
                             config.p_sigma_log, dataset_rng);
  const std::vector<double>& p = report.p;
  std::size_t n_checkpoints = config.checkpoints.size();

  // Per-repetition sampling: the singleton count at n is the number of
  // instances with first sighting at or before n and second sighting after n.
  unsigned n_threads =
      config.threads ? config.threads : std::thread::hardware_concurrency();
  if (n_threads == 0) n_threads = 1;
  std::vector<Accumulator> partial(n_threads, Accumulator(n_checkpoints));
  std::size_t block =
      (config.repetitions + n_threads - 1) / std::max<unsigned>(n_threads, 1);

  parallel_for(n_threads, n_threads, [&](std::size_t t) {
    Accumulator& acc = partial[t];
    std::size_t rep_lo = t * block;
    std::size_t rep_hi = std::min(rep_lo + block, config.repetitions);
    std::vector<std::uint64_t> first(p.size()), second(p.size());
    for (std::size_t rep = rep_lo; rep < rep_hi; ++rep) {
      RngStream rng = RngStream(config.base_seed, rep).substream(kTagSampler);
      for (std::size_t i = 0; i < p.size(); ++i) {
        first[i] = geometric(p[i], rng);
        second[i] = first[i] + geometric(p[i], rng);
      }
      for (std::size_t c = 0; c < n_checkpoints; ++c) {
        std::uint64_t n = config.checkpoints[c];
        std::uint64_t n1 = 0;
        long double remaining = 0.0L;
        for (std::size_t i = 0; i < p.size(); ++i) {
          if (first[i] <= n && n < second[i]) ++n1;
          if (first[i] > n) remaining += p[i];
        }
        acc.sum_n1[c] += n1;
        acc.sumsq_n1[c] += static_cast<long double>(n1) * n1;
        acc.sum_r_next[c] += remaining;
        acc.n1_values[c].push_back(n1);
      }
    }
  });
  Accumulator total(n_checkpoints);
  for (const auto& part : partial) total.merge(part);

  double r = static_cast<double>(config.repetitions);
  BeliefParams prior{config.prior_alpha0, config.prior_beta0,
                     Policy::kThompson};
  report.all_pass = true;
  for (std::size_t c = 0; c < n_checkpoints; ++c) {
    ValidationCheckpoint cp;
    cp.n = config.checkpoints[c];
    cp.mean_n1 = static_cast<double>(total.sum_n1[c]) / r;
    double var = 0.0;
    if (config.repetitions > 1)
      var = static_cast<double>(
          (total.sumsq_n1[c] - total.sum_n1[c] * total.sum_n1[c] / r) /
          (r - 1.0));
    cp.sd_n1 = std::sqrt(std::max(var, 0.0));
    cp.se_n1 = cp.sd_n1 / std::sqrt(r);
    double dn = static_cast<double>(cp.n);
    cp.var_n1_over_n = var / (dn * dn);
    cp.mean_r_next = static_cast<double>(total.sum_r_next[c]) / r;

    cp.expected_n1_analytic = p.empty() ? 0.0 : expected_n1(p, cp.n);
    cp.lambda = cp.expected_n1_analytic;
    cp.var_bound = cp.expected_n1_analytic / (dn * dn);
    cp.expected_r_next_analytic = p.empty() ? 0.0 : expected_r_next(p, cp.n);

    GammaBelief belief = belief_from_stats(
        ChunkStats{static_cast<std::int64_t>(std::llround(cp.mean_n1)), cp.n},
        prior);
    cp.belief_lo = gamma_quantile(belief, 0.025);
    cp.belief_hi = gamma_quantile(belief, 0.975);

    for (double v : p)
      cp.max_once_probability =
          std::max(cp.max_once_probability, dn * pi_first_hit(v, cp.n));
    cp.poisson_applicable = !p.empty() && cp.max_once_probability <= 0.01;

    cp.mean_pass = std::abs(cp.mean_n1 - cp.expected_n1_analytic) <=
                   4.0 * std::max(cp.se_n1, 1e-12);
    cp.var_pass = var <= 1.05 * cp.expected_n1_analytic + 1e-12;
    if (cp.poisson_applicable) {
      cp.gof = poisson_gof(total.n1_values[c], cp.lambda, 0.01);
      cp.poisson_pass = !cp.gof.rejected;
    } else {
      cp.poisson_pass = true;
    }
    report.all_pass = report.all_pass && cp.mean_pass && cp.var_pass &&
                      cp.poisson_pass;
    report.checkpoints.push_back(cp);
  }
  return report;
}

}  // namespace exsample
