#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace exsample {

using FrameId = std::uint64_t;

// Contiguous equal-as-possible split of [0, total_frames) into chunks.
// boundaries has chunk_count()+1 entries; chunk j covers
// [boundaries[j], boundaries[j+1]).
struct ChunkLayout {
  std::uint64_t total_frames = 0;
  std::vector<std::uint64_t> boundaries;

  std::size_t chunk_count() const { return boundaries.size() - 1; }
  std::uint64_t chunk_begin(std::size_t j) const { return boundaries[j]; }
  std::uint64_t chunk_end(std::size_t j) const { return boundaries[j + 1]; }
  std::uint64_t chunk_size(std::size_t j) const {
    return boundaries[j + 1] - boundaries[j];
  }
};

// Sizes differ by at most one; the remainder goes to the lowest-index chunks.
// Throws std::invalid_argument when m == 0 or m > total_frames.
ChunkLayout partition_frames(std::uint64_t total_frames, std::size_t m);

// Index of the chunk containing frame. Throws std::invalid_argument when the
// frame is out of range.
std::size_t chunk_of(const ChunkLayout& layout, FrameId frame);

// Per-chunk sampling tallies. n1 counts instances currently credited to this
// chunk as seen exactly once; it can dip below zero transiently when second
// sightings are debited to the chunk where they occur rather than the chunk
// of the first sighting.
struct ChunkStats {
  std::int64_t n1 = 0;
  std::uint64_t n = 0;
};

enum class Policy {
  kThompson,      // one draw from each chunk's belief, pick the max
  kBayesUcbQuantile,  // deterministic upper quantile with a rising schedule
};

struct BeliefParams {
  double alpha0 = 0.1;
  double beta0 = 1.0;
  Policy policy = Policy::kThompson;
};

}  // namespace exsample
