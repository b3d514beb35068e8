#pragma once

#include "exsample/belief.hpp"
#include "exsample/core.hpp"
#include "exsample/rng.hpp"
#include "exsample/simulation.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace exsample {

enum class WithinChunk {
  kUniform,   // uniform without replacement
  kLevelSet,  // stratified halving refinement
};

// Stopping rule for a sampling run.
struct Limit {
  enum class Kind { kResults, kSamples, kRecall };
  Kind kind = Kind::kSamples;
  double value = 0.0;

  static Limit results(std::uint64_t k) {
    return {Kind::kResults, static_cast<double>(k)};
  }
  static Limit samples(std::uint64_t k) {
    return {Kind::kSamples, static_cast<double>(k)};
  }
  static Limit recall(double r) { return {Kind::kRecall, r}; }
};

// Instances split by sighting depth on one inspected frame: d0 holds first
// sightings, d1 second sightings. Third and later sightings affect neither.
struct DiscriminationOutcome {
  std::vector<std::uint32_t> d0;
  std::vector<std::uint32_t> d1;
};

struct TrajectoryStep {
  std::uint32_t chunk = 0;
  FrameId frame = 0;
  std::uint32_t new_found = 0;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  bool exhausted = false;

  std::uint64_t total_found() const;
  // Cumulative distinct count after each of the given 1-based sample indices.
  std::vector<std::uint64_t> found_at(std::span<const std::uint64_t> indices) const;
};

// Uniform draws without replacement from [begin, end); lazy Fisher-Yates, so
// memory grows with draws taken rather than range size.
class WithoutReplacement {
 public:
  WithoutReplacement() = default;
  WithoutReplacement(std::uint64_t begin, std::uint64_t end)
      : begin_(begin), size_(end - begin) {}

  std::uint64_t remaining() const { return size_ - used_; }
  std::optional<std::uint64_t> draw(RngStream& rng);

 private:
  std::uint64_t value_at(std::uint64_t pos) const;

  std::uint64_t begin_ = 0;
  std::uint64_t size_ = 0;
  std::uint64_t used_ = 0;
  std::unordered_map<std::uint64_t, std::uint64_t> displaced_;
};

// Stratified refinement over [begin, end): level L splits the range into 2^L
// equal strata; each pass visits the strata of one level in random order and
// draws one unsampled frame from every stratum that still has one. The next
// level starts when the pass completes. Levels stop halving once strata reach
// single frames.
class LevelSetSampler {
 public:
  LevelSetSampler() = default;
  LevelSetSampler(std::uint64_t begin, std::uint64_t end);

  std::uint64_t remaining() const { return size_ - sampled_.size(); }
  std::uint32_t level() const { return level_; }
  std::optional<std::uint64_t> draw(RngStream& rng);

 private:
  std::optional<std::uint64_t> draw_from(std::uint64_t lo, std::uint64_t hi,
                                         RngStream& rng);
  void start_pass(std::uint32_t level, RngStream& rng);

  std::uint64_t begin_ = 0;
  std::uint64_t size_ = 0;
  std::uint32_t level_ = 0;
  std::uint32_t max_level_ = 0;
  std::vector<std::uint64_t> pass_order_;
  std::size_t pass_cursor_ = 0;
  std::unordered_set<std::uint64_t> sampled_;
};

// Mutable state of one adaptive run: per-chunk tallies, per-chunk frame
// sources, and per-instance sighting counts.
class SamplerState {
 public:
  SamplerState(const ChunkLayout& layout, const BeliefParams& params,
               WithinChunk within, bool strict_global_once,
               std::size_t instance_count);

  // One belief score per chunk (exhausted chunks get -inf). Thompson scores
  // are posterior draws; the quantile policy uses the deterministic
  // 1 - 1/(t+2) upper quantile at t samples taken so far.
  std::vector<double> policy_scores(RngStream& rng) const;

  // Highest-scoring eligible chunk; exact ties break uniformly at random.
  // Empty when every chunk is exhausted.
  std::optional<std::size_t> choose_chunk(RngStream& rng);

  // b independent selections with no state updates in between, so a batch
  // can be inspected in parallel. Duplicates are expected.
  std::vector<std::size_t> choose_batch(std::size_t b, RngStream& rng);

  std::optional<FrameId> next_frame(std::size_t chunk, RngStream& rng);

  DiscriminationOutcome discriminate(std::span<const std::uint32_t> visible);

  // Credit the inspected chunk: n1 gains the first sightings and loses the
  // second sightings. In strict mode each second sighting instead debits the
  // chunk that was credited with that instance's first sighting.
  void observe(std::size_t chunk, const DiscriminationOutcome& outcome);

  const std::vector<ChunkStats>& stats() const { return stats_; }
  std::uint64_t total_samples() const { return total_samples_; }
  std::uint64_t distinct_found() const { return distinct_found_; }
  std::uint64_t frames_remaining() const { return frames_remaining_; }

 private:
  const ChunkLayout& layout_;
  BeliefParams params_;
  WithinChunk within_;
  bool strict_global_once_;
  std::vector<ChunkStats> stats_;
  std::vector<WithoutReplacement> uniform_;
  std::vector<LevelSetSampler> levelset_;
  std::vector<std::uint32_t> sighting_count_;
  std::vector<std::uint32_t> first_chunk_;
  std::uint64_t total_samples_ = 0;
  std::uint64_t distinct_found_ = 0;
  std::uint64_t frames_remaining_ = 0;
};

struct RunOptions {
  BeliefParams belief;
  WithinChunk within = WithinChunk::kUniform;
  bool strict_global_once = false;
  std::size_t batch = 1;
};

// Adaptive run: repeatedly pick the chunk whose belief currently scores
// highest, inspect one of its unseen frames, and update that chunk's tallies
// from the discrimination outcome. Stops at the limit or when every frame has
// been inspected.
Trajectory run_exsample(const SyntheticDataset& dataset,
                        const ChunkLayout& layout, const RunOptions& options,
                        Limit limit, RngStream& rng);

// Uniform without replacement over all frames.
Trajectory run_random(const SyntheticDataset& dataset, Limit limit,
                      RngStream& rng);

// Frames 0, stride, 2*stride, ... in order.
Trajectory run_sequential(const SyntheticDataset& dataset, std::uint64_t stride,
                          Limit limit, RngStream& rng);

// Stratified halving refinement over all frames as one range.
Trajectory run_levelset_global(const SyntheticDataset& dataset, Limit limit,
                               RngStream& rng);

}  // namespace exsample
