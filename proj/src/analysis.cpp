#include "exsample/analysis.hpp"

#include "exsample/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace exsample {

double expected_random_curve(std::span<const double> p, std::uint64_t n) {
  long double missed = 0.0L;
  for (double v : p) {
    if (!(v > 0.0) || v > 1.0)
      throw std::invalid_argument("expected_random_curve: p outside (0, 1]");
    missed += pow_one_minus(v, n);
  }
  return static_cast<double>(static_cast<long double>(p.size()) - missed);
}

namespace {

void check_weights(const PMatrix& pm, std::span<const double> w) {
  if (w.size() != pm.chunks)
    throw std::invalid_argument("weight vector length differs from chunks");
  long double sum = 0.0L;
  for (double v : w) {
    if (v < 0.0) throw std::invalid_argument("weights must be nonnegative");
    sum += v;
  }
  if (std::abs(static_cast<double>(sum) - 1.0) > 1e-9)
    throw std::invalid_argument("weights must sum to 1");
}

// Expected count of instances still missed after n draws under allocation w,
// plus its gradient in w. hit[i] accumulates sum_j P_ij w_j.
double missed_and_gradient(const PMatrix& pm, std::span<const double> w,
                           std::uint64_t n, std::vector<double>* grad) {
  long double missed = 0.0L;
  if (grad) grad->assign(pm.chunks, 0.0);
  auto dn = static_cast<double>(n);
  for (std::size_t i = 0; i < pm.instances; ++i) {
    const double* row = pm.values.data() + i * pm.chunks;
    long double hit = 0.0L;
    for (std::size_t j = 0; j < pm.chunks; ++j) hit += row[j] * w[j];
    double x = std::min(static_cast<double>(hit), 1.0);
    missed += pow_one_minus(x, n);
    if (grad && n >= 1) {
      double shell = dn * pow_one_minus(x, n - 1);
      if (shell != 0.0)
        for (std::size_t j = 0; j < pm.chunks; ++j)
          (*grad)[j] -= shell * row[j];
    }
  }
  return static_cast<double>(missed);
}

}  // namespace

double expected_weighted_curve(const PMatrix& pm, std::span<const double> w,
                               std::uint64_t n) {
  check_weights(pm, w);
  return static_cast<double>(pm.instances) -
         missed_and_gradient(pm, w, n, nullptr);
}

namespace {

// Euclidean projection onto the probability simplex (sort and threshold).
void project_simplex(std::vector<double>& v) {
  std::vector<double> u(v);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0;
  double theta = 0.0;
  std::size_t rho = 0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cum += u[k];
    double t = (cum - 1.0) / static_cast<double>(k + 1);
    if (u[k] - t > 0.0) {
      rho = k + 1;
      theta = t;
    }
  }
  if (rho == 0) {
    std::fill(v.begin(), v.end(), 1.0 / static_cast<double>(v.size()));
    return;
  }
  for (double& x : v) x = std::max(x - theta, 0.0);
}

}  // namespace

AllocationSolution optimal_allocation(const PMatrix& pm, std::uint64_t n,
                                      double tol, std::size_t max_iter,
                                      const std::vector<double>* warm) {
  if (pm.chunks == 0)
    throw std::invalid_argument("optimal_allocation: no chunks");
  std::size_t m = pm.chunks;
  std::vector<double> w(m, 1.0 / static_cast<double>(m));
  if (warm && warm->size() == m) {
    double sum = std::accumulate(warm->begin(), warm->end(), 0.0);
    bool ok = sum > 0.0;
    for (double v : *warm) ok = ok && v >= 0.0;
    if (ok)
      for (std::size_t j = 0; j < m; ++j) w[j] = (*warm)[j] / sum;
  }

  std::vector<double> grad, trial_w(m), trial_grad, prev_w, prev_grad;
  double objective = missed_and_gradient(pm, w, n, &grad);

  // linearization gap: best simplex vertex against the current point
  auto gap_at = [&] {
    double max_neg = -std::numeric_limits<double>::infinity();
    double avg_neg = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      max_neg = std::max(max_neg, -grad[j]);
      avg_neg -= grad[j] * w[j];
    }
    return max_neg - avg_neg;
  };

  // Projected gradient with a spectral (Barzilai-Borwein) step guess and
  // monotone backtracking. Projection can re-open coordinates that sit at
  // zero, so warm starts on a different face stay recoverable.
  AllocationSolution out;
  double step = 1.0;
  {
    double gnorm = 0.0;
    for (double g : grad) gnorm = std::max(gnorm, std::abs(g));
    if (gnorm > 0.0) step = 1.0 / gnorm;
  }
  std::size_t iter = 0;
  for (; iter < max_iter; ++iter) {
    double gap = gap_at();
    if (gap <= tol * std::max(1.0, std::abs(objective))) {
      out.converged = true;
      break;
    }
    if (!prev_w.empty()) {
      double sy = 0.0, ss = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        double s = w[j] - prev_w[j];
        double y = grad[j] - prev_grad[j];
        sy += s * y;
        ss += s * s;
      }
      if (sy > 0.0 && ss > 0.0) step = std::clamp(ss / sy, 1e-12, 1e12);
    }
    prev_w = w;
    prev_grad = grad;
    bool accepted = false;
    double alpha = step;
    for (int bt = 0; bt < 80; ++bt) {
      for (std::size_t j = 0; j < m; ++j) trial_w[j] = w[j] - alpha * grad[j];
      project_simplex(trial_w);
      double decrease = 0.0;
      for (std::size_t j = 0; j < m; ++j)
        decrease += grad[j] * (trial_w[j] - w[j]);
      double trial_obj = missed_and_gradient(pm, trial_w, n, &trial_grad);
      if (trial_obj <= objective + 1e-4 * decrease) {
        w.swap(trial_w);
        grad.swap(trial_grad);
        objective = trial_obj;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;  // no productive step at any scale
  }
  out.iterations = iter;
  out.final_gap = gap_at();
  out.w = std::move(w);
  out.expected_found = static_cast<double>(pm.instances) - objective;
  return out;
}

std::optional<std::uint64_t> samples_to_recall(const Trajectory& traj,
                                               std::size_t total_instances,
                                               double r) {
  if (!(r > 0.0) || r > 1.0)
    throw std::invalid_argument("samples_to_recall: r must lie in (0, 1]");
  auto target = static_cast<std::uint64_t>(
      std::ceil(r * static_cast<double>(total_instances)));
  if (target == 0) return 0;
  std::uint64_t cum = 0;
  for (std::size_t k = 0; k < traj.steps.size(); ++k) {
    cum += traj.steps[k].new_found;
    if (cum >= target) return k + 1;
  }
  return std::nullopt;
}

namespace {

// Median with unreached runs treated as infinite; empty when the median
// itself lands on an unreached run.
std::optional<double> median_samples(std::span<const Trajectory> trajs,
                                     std::size_t total_instances, double r) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> values;
  values.reserve(trajs.size());
  for (const auto& t : trajs) {
    auto s = samples_to_recall(t, total_instances, r);
    values.push_back(s ? static_cast<double>(*s) : kInf);
  }
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  std::size_t h = values.size() / 2;
  double med = values.size() % 2 ? values[h] : 0.5 * (values[h - 1] + values[h]);
  if (!std::isfinite(med)) return std::nullopt;
  return med;
}

}  // namespace

std::optional<double> savings(std::span<const Trajectory> contender,
                              std::span<const Trajectory> baseline,
                              std::size_t total_instances, double r) {
  auto mc = median_samples(contender, total_instances, r);
  auto mb = median_samples(baseline, total_instances, r);
  if (!mc || !mb || *mc == 0.0) return std::nullopt;
  return *mb / *mc;
}

namespace {

double percentile(std::vector<double>& values, double q) {
  std::sort(values.begin(), values.end());
  double pos = q * static_cast<double>(values.size() - 1);
  auto lo = static_cast<std::size_t>(pos);
  double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] * (1.0 - frac) + values[lo + 1] * frac;
}

}  // namespace

PercentileBands percentile_bands(std::span<const Trajectory> trajectories,
                                 std::span<const std::uint64_t> indices) {
  if (trajectories.empty())
    throw std::invalid_argument("percentile_bands: no trajectories");
  PercentileBands bands;
  bands.index.assign(indices.begin(), indices.end());
  std::vector<std::vector<std::uint64_t>> counts;
  counts.reserve(trajectories.size());
  for (const auto& t : trajectories) counts.push_back(t.found_at(indices));
  std::vector<double> column(trajectories.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    for (std::size_t t = 0; t < trajectories.size(); ++t)
      column[t] = static_cast<double>(counts[t][k]);
    bands.p25.push_back(percentile(column, 0.25));
    bands.p50.push_back(percentile(column, 0.50));
    bands.p75.push_back(percentile(column, 0.75));
  }
  return bands;
}

double skew_metric(std::span<const std::uint64_t> counts, double coverage) {
  if (counts.empty()) throw std::invalid_argument("skew_metric: no counts");
  if (!(coverage > 0.0) || coverage > 1.0)
    throw std::invalid_argument("skew_metric: coverage must lie in (0, 1]");
  std::vector<std::uint64_t> sorted(counts.begin(), counts.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  long double total = 0.0L;
  for (auto c : sorted) total += c;
  if (total == 0.0L)
    throw std::invalid_argument("skew_metric: all counts are zero");
  long double need = coverage * total;
  long double acc = 0.0L;
  std::size_t k = 0;
  while (acc < need && k < sorted.size()) acc += sorted[k++];
  return coverage * static_cast<double>(counts.size()) /
         static_cast<double>(k);
}

}  // namespace exsample
