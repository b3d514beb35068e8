#pragma once

#include "exsample/core.hpp"
#include "exsample/rng.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace exsample {

// Half-open frame interval occupied by one instance.
struct Span {
  std::uint64_t start = 0;
  std::uint64_t length = 0;
};

// Ground-truth workload over [0, total_frames). Two models:
//  - spans: instance i occupies a fixed interval; visibility is deterministic.
//  - bernoulli: instance i appears on any inspected frame with probability
//    p[i], independently per inspection (memoryless across visits).
class SyntheticDataset {
 public:
  static SyntheticDataset bernoulli(std::uint64_t total_frames,
                                    std::vector<double> p);
  static SyntheticDataset spans(std::uint64_t total_frames,
                                std::vector<Span> spans);

  bool is_spans() const { return is_spans_; }
  std::uint64_t total_frames() const { return total_frames_; }
  std::size_t instance_count() const {
    return is_spans_ ? spans_.size() : p_.size();
  }

  // Instance ids visible on the given frame, ascending. The rng is consumed
  // only by the bernoulli model. Throws std::invalid_argument when frame is
  // out of range.
  std::vector<std::uint32_t> visible_at(FrameId frame, RngStream& rng) const;

  const std::vector<Span>& span_list() const;
  const std::vector<double>& bernoulli_p() const;

  // Per-instance probability that one uniformly random frame shows the
  // instance: span length / total frames, or p[i] for the bernoulli model.
  std::vector<double> global_p() const;

 private:
  SyntheticDataset() = default;
  void build_bucket_index();

  bool is_spans_ = false;
  std::uint64_t total_frames_ = 0;
  std::vector<double> p_;
  std::vector<Span> spans_;

  // Frame-range buckets listing the spans that overlap each bucket, so a
  // visibility query touches only nearby spans.
  std::uint64_t bucket_width_ = 0;
  std::vector<std::vector<std::uint32_t>> buckets_;
};

// Per-frame visibility probabilities with the stated mean, lognormal across
// instances (mu_log = log(target_mean) - sigma_log^2 / 2), clamped to (0, 1].
std::vector<double> gen_lognormal_p(std::size_t n, double target_mean,
                                    double sigma_log, RngStream& rng);

// Span lengths in frames, lognormal with the stated mean, rounded to >= 1.
// The default spread puts the extremes of a couple thousand draws near 1/14x
// and 8x the mean. Rescaling for other duration scales is the caller's job.
std::vector<std::uint64_t> gen_lognormal_durations(std::size_t n,
                                                   double target_mean,
                                                   RngStream& rng,
                                                   double sigma_log = 0.70);

// Multiply lengths by factor, rounding to >= 1 frame.
std::vector<std::uint64_t> scale_durations(std::span<const std::uint64_t> lengths,
                                           double factor);

// Place spans of the given lengths. Centers are normal around the middle of
// the frame range with the given sigma, redrawn until in range; a missing
// sigma means uniform placement (no concentration). Spans are clipped to the
// frame range and always keep at least one frame.
SyntheticDataset place_spans(std::span<const std::uint64_t> lengths,
                             std::uint64_t total_frames,
                             std::optional<double> placement_sigma,
                             RngStream& rng);

// Sigma such that the stated fraction of the frame range, centered, holds
// 95% of placements.
double placement_sigma_for_fraction(std::uint64_t total_frames,
                                    double fraction);

// p[i][j]: probability one uniform frame from chunk j shows instance i.
struct PMatrix {
  std::size_t instances = 0;
  std::size_t chunks = 0;
  std::vector<double> values;  // row-major

  double at(std::size_t i, std::size_t j) const {
    return values[i * chunks + j];
  }
};

// Overlap fractions of each span with each chunk. Throws
// std::invalid_argument for a bernoulli dataset or a layout whose frame count
// differs from the dataset's.
PMatrix compute_p_matrix(const SyntheticDataset& dataset,
                         const ChunkLayout& layout);

// Text format: header "exsample-spans v1 total_frames=<F>", then one
// "id,start,length" row per span, ids 0..N-1 in order.
void save_spans(const SyntheticDataset& dataset, std::ostream& out);
void save_spans_file(const SyntheticDataset& dataset, const std::string& path);
SyntheticDataset load_spans(std::istream& in);
SyntheticDataset load_spans_file(const std::string& path);

}  // namespace exsample
