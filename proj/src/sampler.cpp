#include "exsample/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace exsample {

std::uint64_t Trajectory::total_found() const {
  std::uint64_t total = 0;
  for (const auto& s : steps) total += s.new_found;
  return total;
}

std::vector<std::uint64_t> Trajectory::found_at(
    std::span<const std::uint64_t> indices) const {
  std::vector<std::uint64_t> out(indices.size());
  std::uint64_t cum = 0;
  std::size_t step = 0;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (k > 0 && indices[k] < indices[k - 1])
      throw std::invalid_argument("found_at: indices must be nondecreasing");
    std::uint64_t upto = std::min<std::uint64_t>(indices[k], steps.size());
    for (; step < upto; ++step) cum += steps[step].new_found;
    out[k] = cum;
  }
  return out;
}

std::uint64_t WithoutReplacement::value_at(std::uint64_t pos) const {
  auto it = displaced_.find(pos);
  return it == displaced_.end() ? pos : it->second;
}

std::optional<std::uint64_t> WithoutReplacement::draw(RngStream& rng) {
  if (used_ == size_) return std::nullopt;
  std::uint64_t pick = used_ + rng.uniform_below(size_ - used_);
  std::uint64_t result = value_at(pick);
  displaced_[pick] = value_at(used_);
  displaced_.erase(used_);
  ++used_;
  return begin_ + result;
}

LevelSetSampler::LevelSetSampler(std::uint64_t begin, std::uint64_t end)
    : begin_(begin), size_(end - begin) {
  max_level_ = 0;
  while ((1ULL << max_level_) < size_) ++max_level_;
  pass_order_ = {0};
  pass_cursor_ = 0;
}

void LevelSetSampler::start_pass(std::uint32_t level, RngStream& rng) {
  level_ = level;
  pass_order_.resize(1ULL << level);
  for (std::uint64_t s = 0; s < pass_order_.size(); ++s) pass_order_[s] = s;
  for (std::size_t i = pass_order_.size(); i > 1; --i)
    std::swap(pass_order_[i - 1], pass_order_[rng.uniform_below(i)]);
  pass_cursor_ = 0;
}

std::optional<std::uint64_t> LevelSetSampler::draw_from(std::uint64_t lo,
                                                        std::uint64_t hi,
                                                        RngStream& rng) {
  if (lo >= hi) return std::nullopt;
  std::uint64_t width = hi - lo;
  if (width > 256) {
    for (int tries = 0; tries < 128; ++tries) {
      std::uint64_t f = lo + rng.uniform_below(width);
      if (!sampled_.count(f)) return f;
    }
  }
  std::vector<std::uint64_t> open;
  for (std::uint64_t f = lo; f < hi; ++f)
    if (!sampled_.count(f)) open.push_back(f);
  if (open.empty()) return std::nullopt;
  return open[rng.uniform_below(open.size())];
}

std::optional<std::uint64_t> LevelSetSampler::draw(RngStream& rng) {
  if (remaining() == 0) return std::nullopt;
  for (;;) {
    while (pass_cursor_ < pass_order_.size()) {
      std::uint64_t s = pass_order_[pass_cursor_++];
      std::uint64_t n_strata = 1ULL << level_;
      std::uint64_t lo = size_ * s / n_strata;
      std::uint64_t hi = size_ * (s + 1) / n_strata;
      auto f = draw_from(lo, hi, rng);
      if (f) {
        sampled_.insert(*f);
        return begin_ + *f;
      }
    }
    start_pass(std::min(level_ + 1, max_level_), rng);
  }
}

SamplerState::SamplerState(const ChunkLayout& layout,
                           const BeliefParams& params, WithinChunk within,
                           bool strict_global_once, std::size_t instance_count)
    : layout_(layout),
      params_(params),
      within_(within),
      strict_global_once_(strict_global_once),
      stats_(layout.chunk_count()),
      sighting_count_(instance_count, 0),
      first_chunk_(instance_count, std::numeric_limits<std::uint32_t>::max()),
      frames_remaining_(layout.total_frames) {
  std::size_t m = layout.chunk_count();
  if (within_ == WithinChunk::kUniform) {
    uniform_.reserve(m);
    for (std::size_t j = 0; j < m; ++j)
      uniform_.emplace_back(layout.chunk_begin(j), layout.chunk_end(j));
  } else {
    levelset_.reserve(m);
    for (std::size_t j = 0; j < m; ++j)
      levelset_.emplace_back(layout.chunk_begin(j), layout.chunk_end(j));
  }
}

std::vector<double> SamplerState::policy_scores(RngStream& rng) const {
  std::size_t m = stats_.size();
  std::vector<double> scores(m, -std::numeric_limits<double>::infinity());
  double q = 0.0;
  if (params_.policy == Policy::kBayesUcbQuantile)
    q = 1.0 - 1.0 / (static_cast<double>(total_samples_) + 2.0);
  for (std::size_t j = 0; j < m; ++j) {
    std::uint64_t rem = within_ == WithinChunk::kUniform
                            ? uniform_[j].remaining()
                            : levelset_[j].remaining();
    if (rem == 0) continue;
    GammaBelief belief = belief_from_stats(stats_[j], params_);
    scores[j] = params_.policy == Policy::kThompson
                    ? sample_gamma(belief, rng)
                    : gamma_quantile(belief, q);
  }
  return scores;
}

std::optional<std::size_t> SamplerState::choose_chunk(RngStream& rng) {
  std::vector<double> scores = policy_scores(rng);
  double best = -std::numeric_limits<double>::infinity();
  for (double s : scores) best = std::max(best, s);
  if (best == -std::numeric_limits<double>::infinity()) return std::nullopt;
  std::size_t n_ties = 0;
  std::size_t pick = 0;
  for (std::size_t j = 0; j < scores.size(); ++j)
    if (scores[j] == best) {
      ++n_ties;
      pick = j;
    }
  if (n_ties > 1) {
    std::uint64_t k = rng.uniform_below(n_ties);
    for (std::size_t j = 0; j < scores.size(); ++j)
      if (scores[j] == best && k-- == 0) {
        pick = j;
        break;
      }
  }
  return pick;
}

std::vector<std::size_t> SamplerState::choose_batch(std::size_t b,
                                                    RngStream& rng) {
  std::vector<std::size_t> picks;
  picks.reserve(b);
  for (std::size_t i = 0; i < b; ++i) {
    auto c = choose_chunk(rng);
    if (!c) break;
    picks.push_back(*c);
  }
  return picks;
}

std::optional<FrameId> SamplerState::next_frame(std::size_t chunk,
                                                RngStream& rng) {
  if (chunk >= stats_.size())
    throw std::invalid_argument("next_frame: chunk index out of range");
  auto f = within_ == WithinChunk::kUniform ? uniform_[chunk].draw(rng)
                                            : levelset_[chunk].draw(rng);
  if (f) --frames_remaining_;
  return f;
}

DiscriminationOutcome SamplerState::discriminate(
    std::span<const std::uint32_t> visible) {
  DiscriminationOutcome out;
  for (std::uint32_t id : visible) {
    if (id >= sighting_count_.size())
      throw std::invalid_argument("discriminate: instance id out of range");
    if (sighting_count_[id] == 0)
      out.d0.push_back(id);
    else if (sighting_count_[id] == 1)
      out.d1.push_back(id);
    ++sighting_count_[id];
  }
  distinct_found_ += out.d0.size();
  return out;
}

void SamplerState::observe(std::size_t chunk,
                           const DiscriminationOutcome& outcome) {
  if (chunk >= stats_.size())
    throw std::invalid_argument("observe: chunk index out of range");
  auto c32 = static_cast<std::uint32_t>(chunk);
  for (std::uint32_t id : outcome.d0) first_chunk_[id] = c32;
  stats_[chunk].n1 += static_cast<std::int64_t>(outcome.d0.size());
  if (strict_global_once_) {
    for (std::uint32_t id : outcome.d1) {
      std::uint32_t fc = first_chunk_[id];
      if (fc == std::numeric_limits<std::uint32_t>::max())
        throw std::logic_error("observe: second sighting with no first");
      stats_[fc].n1 -= 1;
    }
  } else {
    stats_[chunk].n1 -= static_cast<std::int64_t>(outcome.d1.size());
  }
  stats_[chunk].n += 1;
  ++total_samples_;
}

namespace {

struct LimitTracker {
  Limit limit;
  std::uint64_t recall_target = 0;

  LimitTracker(Limit l, std::size_t instance_count) : limit(l) {
    if (limit.kind == Limit::Kind::kRecall) {
      if (!(limit.value > 0.0) || limit.value > 1.0)
        throw std::invalid_argument("run: recall limit must lie in (0, 1]");
      recall_target = static_cast<std::uint64_t>(
          std::ceil(limit.value * static_cast<double>(instance_count)));
    } else if (limit.value < 0.0) {
      throw std::invalid_argument("run: limit must be nonnegative");
    }
  }

  bool reached(std::uint64_t samples, std::uint64_t found) const {
    switch (limit.kind) {
      case Limit::Kind::kResults:
        return static_cast<double>(found) >= limit.value;
      case Limit::Kind::kSamples:
        return static_cast<double>(samples) >= limit.value;
      case Limit::Kind::kRecall:
        return found >= recall_target;
    }
    return true;
  }

  // Remaining sample budget, or max when the limit is not sample-based.
  std::uint64_t sample_headroom(std::uint64_t samples) const {
    if (limit.kind != Limit::Kind::kSamples)
      return std::numeric_limits<std::uint64_t>::max();
    auto cap = static_cast<std::uint64_t>(limit.value);
    return cap > samples ? cap - samples : 0;
  }
};

// Shared driver for the non-adaptive baselines: frames arrive from next(),
// discrimination runs against a flat instance ledger.
Trajectory run_fixed_order(
    const SyntheticDataset& dataset, Limit limit, RngStream& rng,
    const std::function<std::optional<FrameId>()>& next) {
  LimitTracker tracker(limit, dataset.instance_count());
  std::vector<std::uint32_t> sightings(dataset.instance_count(), 0);
  Trajectory traj;
  std::uint64_t samples = 0;
  std::uint64_t found = 0;
  while (!tracker.reached(samples, found)) {
    auto frame = next();
    if (!frame) {
      traj.exhausted = true;
      break;
    }
    std::uint32_t new_found = 0;
    for (std::uint32_t id : dataset.visible_at(*frame, rng))
      if (sightings[id]++ == 0) ++new_found;
    found += new_found;
    ++samples;
    traj.steps.push_back({0, *frame, new_found});
  }
  return traj;
}

}  // namespace

Trajectory run_exsample(const SyntheticDataset& dataset,
                        const ChunkLayout& layout, const RunOptions& options,
                        Limit limit, RngStream& rng) {
  if (layout.total_frames != dataset.total_frames())
    throw std::invalid_argument("run_exsample: layout frame count differs");
  if (options.batch == 0)
    throw std::invalid_argument("run_exsample: batch must be >= 1");
  SamplerState state(layout, options.belief, options.within,
                     options.strict_global_once, dataset.instance_count());
  LimitTracker tracker(limit, dataset.instance_count());
  Trajectory traj;

  while (!tracker.reached(state.total_samples(), state.distinct_found())) {
    std::uint64_t headroom = tracker.sample_headroom(state.total_samples());
    std::size_t b = static_cast<std::size_t>(
        std::min<std::uint64_t>(options.batch, headroom));
    std::vector<std::size_t> picks = state.choose_batch(b, rng);
    if (picks.empty()) {
      traj.exhausted = true;
      break;
    }
    // Draw the whole cohort before applying any belief updates.
    std::vector<std::pair<std::size_t, FrameId>> cohort;
    cohort.reserve(picks.size());
    for (std::size_t chunk : picks) {
      auto frame = state.next_frame(chunk, rng);
      if (!frame) {
        // chunk drained within this batch; reselect among the rest
        auto again = state.choose_chunk(rng);
        if (!again) break;
        chunk = *again;
        frame = state.next_frame(chunk, rng);
        if (!frame) break;
      }
      cohort.emplace_back(chunk, *frame);
    }
    if (cohort.empty()) {
      traj.exhausted = true;
      break;
    }
    for (const auto& [chunk, frame] : cohort) {
      auto visible = dataset.visible_at(frame, rng);
      DiscriminationOutcome outcome = state.discriminate(visible);
      auto new_found = static_cast<std::uint32_t>(outcome.d0.size());
      state.observe(chunk, outcome);
      traj.steps.push_back(
          {static_cast<std::uint32_t>(chunk), frame, new_found});
    }
  }
  if (state.frames_remaining() == 0) traj.exhausted = true;
  return traj;
}

Trajectory run_random(const SyntheticDataset& dataset, Limit limit,
                      RngStream& rng) {
  WithoutReplacement source(0, dataset.total_frames());
  return run_fixed_order(dataset, limit, rng,
                         [&] { return source.draw(rng); });
}

Trajectory run_sequential(const SyntheticDataset& dataset, std::uint64_t stride,
                          Limit limit, RngStream& rng) {
  if (stride == 0)
    throw std::invalid_argument("run_sequential: stride must be >= 1");
  std::uint64_t pos = 0;
  return run_fixed_order(dataset, limit, rng,
                         [&]() -> std::optional<FrameId> {
                           if (pos >= dataset.total_frames())
                             return std::nullopt;
                           FrameId f = pos;
                           pos += stride;
                           return f;
                         });
}

Trajectory run_levelset_global(const SyntheticDataset& dataset, Limit limit,
                               RngStream& rng) {
  LevelSetSampler source(0, dataset.total_frames());
  return run_fixed_order(dataset, limit, rng,
                         [&] { return source.draw(rng); });
}

}  // namespace exsample
