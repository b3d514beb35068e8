#include "exsample/core.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace exsample {

ChunkLayout partition_frames(std::uint64_t total_frames, std::size_t m) {
  if (m == 0) throw std::invalid_argument("partition_frames: m must be >= 1");
  if (m > total_frames)
    throw std::invalid_argument(
        "partition_frames: more chunks than frames (m=" + std::to_string(m) +
        ", total=" + std::to_string(total_frames) + ")");
  ChunkLayout layout;
  layout.total_frames = total_frames;
  layout.boundaries.resize(m + 1);
  std::uint64_t base = total_frames / m;
  std::uint64_t rem = total_frames % m;
  std::uint64_t pos = 0;
  for (std::size_t j = 0; j < m; ++j) {
    layout.boundaries[j] = pos;
    pos += base + (j < rem ? 1 : 0);
  }
  layout.boundaries[m] = pos;
  return layout;
}

std::size_t chunk_of(const ChunkLayout& layout, FrameId frame) {
  if (frame >= layout.total_frames)
    throw std::invalid_argument("chunk_of: frame " + std::to_string(frame) +
                                " out of range");
  auto it = std::upper_bound(layout.boundaries.begin(), layout.boundaries.end(),
                             frame);
  return static_cast<std::size_t>(it - layout.boundaries.begin()) - 1;
}

}  // namespace exsample
