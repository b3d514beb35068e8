#pragma once

#include "exsample/sampler.hpp"
#include "exsample/simulation.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace exsample {

// Expected distinct instances found after n independent uniform samples:
// N - sum_i (1 - p_i)^n.
double expected_random_curve(std::span<const double> p, std::uint64_t n);

// Same under a fixed chunk allocation w (a probability vector over chunks):
// N - sum_i (1 - sum_j P_ij w_j)^n.
double expected_weighted_curve(const PMatrix& pm, std::span<const double> w,
                               std::uint64_t n);

struct AllocationSolution {
  std::vector<double> w;
  double expected_found = 0.0;
  std::size_t iterations = 0;
  double final_gap = 0.0;
  bool converged = false;
};

// Best fixed allocation for horizon n: maximizes expected_weighted_curve by
// projected gradient descent on the simplex with a spectral step guess and
// backtracking line search. Convergence is declared when the linearization
// gap drops below tol times max(1, objective); a run that stalls or exhausts
// max_iter returns its final iterate with converged = false. warm seeds the
// starting point.
AllocationSolution optimal_allocation(const PMatrix& pm, std::uint64_t n,
                                      double tol = 1e-6,
                                      std::size_t max_iter = 50000,
                                      const std::vector<double>* warm = nullptr);

// First 1-based sample index where the cumulative distinct count reaches
// ceil(r * total_instances); empty when the run ended earlier.
std::optional<std::uint64_t> samples_to_recall(const Trajectory& traj,
                                               std::size_t total_instances,
                                               double r);

// Ratio of median samples-to-recall: baseline over contender. Greater than 1
// means the contender reached the recall level with fewer samples. Empty when
// either median is undefined (too many runs never reached the level).
std::optional<double> savings(std::span<const Trajectory> contender,
                              std::span<const Trajectory> baseline,
                              std::size_t total_instances, double r);

struct PercentileBands {
  std::vector<std::uint64_t> index;
  std::vector<double> p25, p50, p75;
};

// Pointwise quartiles of the cumulative distinct counts at the given sample
// indices (nondecreasing, 1-based). Linear interpolation between order
// statistics.
PercentileBands percentile_bands(std::span<const Trajectory> trajectories,
                                 std::span<const std::uint64_t> indices);

// Concentration of per-chunk counts: with k the fewest chunks (largest first)
// covering the stated fraction of the total, returns fraction * M / k.
// Uniform counts give about 1; everything in one chunk gives fraction * M.
double skew_metric(std::span<const std::uint64_t> counts, double coverage);

}  // namespace exsample
