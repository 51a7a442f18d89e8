#include "signsep/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "signsep/rng.hpp"

namespace signsep {

namespace {

KeypointFrame lerp_frame(const KeypointFrame& a, const KeypointFrame& b, double t) {
  KeypointFrame out = a;
  for (std::size_t h = 0; h < out.hands.size(); ++h) {
    auto dst = out.hands[h].values();
    auto src = b.hands[h].values();
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += t * (src[k] - dst[k]);
  }
  return out;
}

// floor(x) robust to representation error in products such as 100 * 0.2.
std::size_t floor_count(double x) {
  return static_cast<std::size_t>(std::floor(x + 1e-9));
}

}  // namespace

SignClip resample_clip(const SignClip& clip, std::size_t target_len) {
  if (clip.frames.empty()) throw EmptyClipError("cannot resample an empty clip");
  if (target_len < 2) throw OutOfRangeError("resample target length must be >= 2");

  const std::size_t span_in = clip.frames.size() - 1;
  const std::size_t span_out = target_len - 1;

  SignClip out;
  out.label = clip.label;
  out.source_id = clip.source_id;
  out.frames.reserve(target_len);
  for (std::size_t i = 0; i < target_len; ++i) {
    // Exact rational position i*span_in/span_out keeps integral positions exact.
    const std::size_t num = i * span_in;
    const std::size_t lo = num / span_out;
    const std::size_t rem = num % span_out;
    KeypointFrame f = rem == 0 ? clip.frames[lo]
                               : lerp_frame(clip.frames[lo], clip.frames[lo + 1],
                                            static_cast<double>(rem) / static_cast<double>(span_out));
    f.timestamp_index = i;
    out.frames.push_back(std::move(f));
  }
  return out;
}

ContinuousStream concat_clips(std::span<const SignClip> clips) {
  if (clips.empty()) throw EmptyListError("no clips to concatenate");

  ContinuousStream stream;
  std::vector<Segment> segments;
  segments.reserve(clips.size());
  const std::size_t hands = clips.front().frames.empty() ? 0 : clips.front().frames.front().hand_count();

  std::size_t cursor = 0;
  for (std::size_t c = 0; c < clips.size(); ++c) {
    const SignClip& clip = clips[c];
    if (clip.frames.empty()) throw EmptyClipError(fmt::format("clip {} is empty", c));
    if (c > 0 && clip.label == clips[c - 1].label) {
      throw AdjacentDuplicateLabelError(
          fmt::format("clips {} and {} share label {}", c - 1, c, clip.label));
    }
    for (const auto& f : clip.frames) {
      if (f.hand_count() != hands) {
        throw HandCountMismatchError(
            fmt::format("clip {} has a {}-hand frame, stream uses {}", c, f.hand_count(), hands));
      }
      KeypointFrame copy = f;
      copy.timestamp_index = stream.frames.size();
      stream.frames.push_back(std::move(copy));
    }
    segments.push_back({clip.label, cursor, cursor + clip.frames.size() - 1});
    cursor += clip.frames.size();
  }
  stream.ground_truth = std::move(segments);
  return stream;
}

SplitCounts split_counts(std::size_t n, const SplitSpec& spec) {
  SplitCounts counts;
  counts.test = std::max<std::size_t>(1, floor_count(static_cast<double>(n) * (1.0 - spec.train_fraction)));
  counts.test = std::min(counts.test, n - 1);
  const std::size_t pool = n - counts.test;
  std::size_t val = std::max<std::size_t>(1, floor_count(static_cast<double>(pool) * spec.val_fraction_of_train));
  // Training keeps at least one clip; validation is dropped before training is starved.
  if (val >= pool) val = pool - 1;
  counts.validation = val;
  counts.train = pool - val;
  return counts;
}

DatasetSplit split_dataset(std::span<const SignClip> clips, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) ||
      !(spec.val_fraction_of_train > 0.0 && spec.val_fraction_of_train < 1.0)) {
    throw ConfigError("split fractions must lie in (0, 1)");
  }

  std::map<ClassId, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < clips.size(); ++i) by_class[clips[i].label].push_back(i);

  DatasetSplit split;
  for (auto& [label, members] : by_class) {
    if (members.size() < 2) {
      throw InsufficientSamplesError(
          fmt::format("class {} has {} clip(s); at least 2 are required", label, members.size()));
    }
    Rng rng(mix_seed(spec.seed, static_cast<std::uint64_t>(label)));
    rng.shuffle(std::span<std::size_t>(members));

    const SplitCounts counts = split_counts(members.size(), spec);
    auto it = members.begin();
    split.test.insert(split.test.end(), it, it + static_cast<std::ptrdiff_t>(counts.test));
    it += static_cast<std::ptrdiff_t>(counts.test);
    split.validation.insert(split.validation.end(), it, it + static_cast<std::ptrdiff_t>(counts.validation));
    it += static_cast<std::ptrdiff_t>(counts.validation);
    split.train.insert(split.train.end(), it, members.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.validation.begin(), split.validation.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::vector<SignClip> select_clips(std::span<const SignClip> clips,
                                   std::span<const std::size_t> indices) {
  std::vector<SignClip> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= clips.size()) throw OutOfRangeError(fmt::format("clip index {} out of range", i));
    out.push_back(clips[i]);
  }
  return out;
}

}  // namespace signsep
