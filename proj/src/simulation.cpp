#include "exsample/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace exsample {

namespace {

constexpr double kZ95 = 1.959963984540054;  // two-sided 95% normal quantile

std::uint64_t span_end(const Span& s) { return s.start + s.length; }

}  // namespace

SyntheticDataset SyntheticDataset::bernoulli(std::uint64_t total_frames,
                                             std::vector<double> p) {
  if (total_frames == 0)
    throw std::invalid_argument("bernoulli: total_frames must be >= 1");
  for (double v : p)
    if (!(v > 0.0) || v > 1.0)
      throw std::invalid_argument("bernoulli: p must lie in (0, 1]");
  SyntheticDataset d;
  d.is_spans_ = false;
  d.total_frames_ = total_frames;
  d.p_ = std::move(p);
  return d;
}

SyntheticDataset SyntheticDataset::spans(std::uint64_t total_frames,
                                         std::vector<Span> spans) {
  if (total_frames == 0)
    throw std::invalid_argument("spans: total_frames must be >= 1");
  for (const Span& s : spans) {
    if (s.length == 0) throw std::invalid_argument("spans: zero-length span");
    if (s.start >= total_frames || span_end(s) > total_frames)
      throw std::invalid_argument("spans: span exceeds frame range");
  }
  SyntheticDataset d;
  d.is_spans_ = true;
  d.total_frames_ = total_frames;
  d.spans_ = std::move(spans);
  d.build_bucket_index();
  return d;
}

void SyntheticDataset::build_bucket_index() {
  std::uint64_t n_buckets =
      std::min<std::uint64_t>(std::max<std::uint64_t>(total_frames_ / 256, 1),
                              1ULL << 20);
  bucket_width_ = (total_frames_ + n_buckets - 1) / n_buckets;
  buckets_.assign(static_cast<std::size_t>(n_buckets), {});
  for (std::size_t i = 0; i < spans_.size(); ++i) {
    std::uint64_t b0 = spans_[i].start / bucket_width_;
    std::uint64_t b1 = (span_end(spans_[i]) - 1) / bucket_width_;
    for (std::uint64_t b = b0; b <= b1; ++b)
      buckets_[static_cast<std::size_t>(b)].push_back(
          static_cast<std::uint32_t>(i));
  }
}

std::vector<std::uint32_t> SyntheticDataset::visible_at(FrameId frame,
                                                        RngStream& rng) const {
  if (frame >= total_frames_)
    throw std::invalid_argument("visible_at: frame out of range");
  std::vector<std::uint32_t> out;
  if (is_spans_) {
    const auto& bucket = buckets_[static_cast<std::size_t>(frame / bucket_width_)];
    for (std::uint32_t i : bucket)
      if (spans_[i].start <= frame && frame < span_end(spans_[i]))
        out.push_back(i);
    std::sort(out.begin(), out.end());
  } else {
    for (std::size_t i = 0; i < p_.size(); ++i)
      if (rng.uniform() < p_[i]) out.push_back(static_cast<std::uint32_t>(i));
  }
  return out;
}

const std::vector<Span>& SyntheticDataset::span_list() const {
  if (!is_spans_)
    throw std::logic_error("span_list: not a spans dataset");
  return spans_;
}

const std::vector<double>& SyntheticDataset::bernoulli_p() const {
  if (is_spans_)
    throw std::logic_error("bernoulli_p: not a bernoulli dataset");
  return p_;
}

std::vector<double> SyntheticDataset::global_p() const {
  if (!is_spans_) return p_;
  std::vector<double> p(spans_.size());
  for (std::size_t i = 0; i < spans_.size(); ++i)
    p[i] = static_cast<double>(spans_[i].length) /
           static_cast<double>(total_frames_);
  return p;
}

std::vector<double> gen_lognormal_p(std::size_t n, double target_mean,
                                    double sigma_log, RngStream& rng) {
  if (!(target_mean > 0.0) || target_mean > 1.0)
    throw std::invalid_argument("gen_lognormal_p: mean must lie in (0, 1]");
  if (sigma_log < 0.0)
    throw std::invalid_argument("gen_lognormal_p: sigma_log must be >= 0");
  double mu_log = std::log(target_mean) - sigma_log * sigma_log / 2.0;
  std::vector<double> p(n);
  for (auto& v : p) v = std::min(rng.lognormal(mu_log, sigma_log), 1.0);
  return p;
}

std::vector<std::uint64_t> gen_lognormal_durations(std::size_t n,
                                                   double target_mean,
                                                   RngStream& rng,
                                                   double sigma_log) {
  if (!(target_mean > 0.0))
    throw std::invalid_argument("gen_lognormal_durations: mean must be > 0");
  double mu_log = std::log(target_mean) - sigma_log * sigma_log / 2.0;
  std::vector<std::uint64_t> lengths(n);
  for (auto& v : lengths) {
    double draw = rng.lognormal(mu_log, sigma_log);
    v = static_cast<std::uint64_t>(std::max(1.0, std::round(draw)));
  }
  return lengths;
}

std::vector<std::uint64_t> scale_durations(
    std::span<const std::uint64_t> lengths, double factor) {
  if (!(factor > 0.0))
    throw std::invalid_argument("scale_durations: factor must be > 0");
  std::vector<std::uint64_t> out(lengths.size());
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    double scaled = static_cast<double>(lengths[i]) * factor;
    out[i] = static_cast<std::uint64_t>(std::max(1.0, std::round(scaled)));
  }
  return out;
}

SyntheticDataset place_spans(std::span<const std::uint64_t> lengths,
                             std::uint64_t total_frames,
                             std::optional<double> placement_sigma,
                             RngStream& rng) {
  if (total_frames == 0)
    throw std::invalid_argument("place_spans: total_frames must be >= 1");
  if (placement_sigma && !(*placement_sigma > 0.0))
    throw std::invalid_argument("place_spans: sigma must be > 0");
  double mid = static_cast<double>(total_frames) / 2.0;
  double range = static_cast<double>(total_frames);
  std::vector<Span> spans(lengths.size());
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    double center;
    if (placement_sigma) {
      do {
        center = mid + *placement_sigma * rng.normal();
      } while (center < 0.0 || center >= range);
    } else {
      center = rng.uniform() * range;
    }
    if (lengths[i] == 0)
      throw std::invalid_argument("place_spans: zero-length span");
    auto raw_start = static_cast<std::int64_t>(
        std::llround(center - static_cast<double>(lengths[i]) / 2.0));
    auto raw_end = raw_start + static_cast<std::int64_t>(lengths[i]);
    auto start = static_cast<std::uint64_t>(std::max<std::int64_t>(raw_start, 0));
    auto end = std::min(total_frames, static_cast<std::uint64_t>(
                                          std::max<std::int64_t>(raw_end, 0)));
    if (start >= end) {
      // clipping swallowed the whole span; keep the frame under the center
      start = static_cast<std::uint64_t>(center);
      end = start + 1;
    }
    spans[i] = {start, end - start};
  }
  return SyntheticDataset::spans(total_frames, std::move(spans));
}

double placement_sigma_for_fraction(std::uint64_t total_frames,
                                    double fraction) {
  if (!(fraction > 0.0) || fraction > 1.0)
    throw std::invalid_argument(
        "placement_sigma_for_fraction: fraction must lie in (0, 1]");
  return static_cast<double>(total_frames) * fraction / (2.0 * kZ95);
}

PMatrix compute_p_matrix(const SyntheticDataset& dataset,
                         const ChunkLayout& layout) {
  if (!dataset.is_spans())
    throw std::invalid_argument("compute_p_matrix: needs a spans dataset");
  if (layout.total_frames != dataset.total_frames())
    throw std::invalid_argument("compute_p_matrix: layout frame count differs");
  const auto& spans = dataset.span_list();
  PMatrix m;
  m.instances = spans.size();
  m.chunks = layout.chunk_count();
  m.values.assign(m.instances * m.chunks, 0.0);
  for (std::size_t i = 0; i < spans.size(); ++i) {
    std::uint64_t s = spans[i].start;
    std::uint64_t e = s + spans[i].length;
    std::size_t j0 = chunk_of(layout, s);
    std::size_t j1 = chunk_of(layout, e - 1);
    for (std::size_t j = j0; j <= j1; ++j) {
      std::uint64_t lo = std::max(s, layout.chunk_begin(j));
      std::uint64_t hi = std::min(e, layout.chunk_end(j));
      m.values[i * m.chunks + j] = static_cast<double>(hi - lo) /
                                   static_cast<double>(layout.chunk_size(j));
    }
  }
  return m;
}

void save_spans(const SyntheticDataset& dataset, std::ostream& out) {
  const auto& spans = dataset.span_list();
  out << "exsample-spans v1 total_frames=" << dataset.total_frames() << "\n";
  for (std::size_t i = 0; i < spans.size(); ++i)
    out << i << "," << spans[i].start << "," << spans[i].length << "\n";
}

void save_spans_file(const SyntheticDataset& dataset,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_spans_file: cannot open " + path);
  save_spans(dataset, out);
}

SyntheticDataset load_spans(std::istream& in) {
  std::string header;
  if (!std::getline(in, header))
    throw std::runtime_error("load_spans: empty input");
  std::uint64_t total_frames = 0;
  {
    std::istringstream hs(header);
    std::string magic, version, kv;
    hs >> magic >> version >> kv;
    if (magic != "exsample-spans" || version != "v1" ||
        kv.rfind("total_frames=", 0) != 0)
      throw std::runtime_error("load_spans: bad header: " + header);
    total_frames = std::stoull(kv.substr(13));
  }
  std::vector<Span> spans;
  std::string line;
  std::uint64_t expected_id = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::uint64_t id, start, length;
    char c1, c2;
    std::istringstream ls(line);
    if (!(ls >> id >> c1 >> start >> c2 >> length) || c1 != ',' || c2 != ',')
      throw std::runtime_error("load_spans: bad row: " + line);
    if (id != expected_id)
      throw std::runtime_error("load_spans: ids must be consecutive from 0");
    ++expected_id;
    spans.push_back({start, length});
  }
  return SyntheticDataset::spans(total_frames, std::move(spans));
}

SyntheticDataset load_spans_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_spans_file: cannot open " + path);
  return load_spans(in);
}

}  // namespace exsample
