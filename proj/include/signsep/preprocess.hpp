#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "signsep/core.hpp"

namespace signsep {

/// Resamples a clip to exactly `target_len` frames. Output frame i samples
/// source position i*(L-1)/(T-1) with linear interpolation between the two
/// bracketing frames, so the first and last frames are kept verbatim.
SignClip resample_clip(const SignClip& clip, std::size_t target_len);

/// Concatenates clips without touching their frames and records one
/// ground-truth segment per clip. Frame ordinals are renumbered 0..N-1.
ContinuousStream concat_clips(std::span<const SignClip> clips);

struct SplitSpec {
  double train_fraction = 0.8;
  double val_fraction_of_train = 0.1;
  std::uint64_t seed = 0;
};

/// Indices into the input clip list.
struct DatasetSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

/// Per-class split counts for a class holding `n` clips.
struct SplitCounts {
  std::size_t train = 0;
  std::size_t validation = 0;
  std::size_t test = 0;
};
SplitCounts split_counts(std::size_t n, const SplitSpec& spec);

/// Stratified, seeded split. Every class needs at least two clips.
DatasetSplit split_dataset(std::span<const SignClip> clips, const SplitSpec& spec);

/// Copies the clips selected by `indices`.
std::vector<SignClip> select_clips(std::span<const SignClip> clips,
                                   std::span<const std::size_t> indices);

}  // namespace signsep
