#include <algorithm>
#include <set>

#include "doctest.h"
#include "signsep/preprocess.hpp"
#include "support.hpp"

using namespace signsep;

TEST_SUITE("preprocess") {

TEST_CASE("resample keeps a clip already at target length") {
  Rng rng(1);
  const SignClip clip = testsupport::random_clip(rng, 50, 3);
  const SignClip out = resample_clip(clip, 50);
  CHECK(out.label == 3);
  REQUIRE(out.frames.size() == 50);
  for (std::size_t i = 0; i < 50; ++i) CHECK(out.frames[i].hands == clip.frames[i].hands);
}

TEST_CASE("resample 99 to 50 takes every other frame") {
  Rng rng(2);
  const SignClip clip = testsupport::random_clip(rng, 99, 0);
  const SignClip out = resample_clip(clip, 50);
  REQUIRE(out.frames.size() == 50);
  for (std::size_t i = 0; i < 50; ++i) CHECK(out.frames[i].hands == clip.frames[2 * i].hands);
}

TEST_CASE("resample of a linear ramp is exact") {
  const SignClip clip = testsupport::ramp_clip(30);
  const SignClip out = resample_clip(clip, 50);
  for (std::size_t i = 0; i < 50; ++i) {
    const double expect = static_cast<double>(i) * 29.0 / 49.0;
    CHECK(std::abs(out.frames[i].hands[0](0, 0) - expect) <= 1e-9);
    CHECK(std::abs(out.frames[i].hands[0](20, 2) - (expect + 0.62)) <= 1e-9);
  }
}

TEST_CASE("resample keeps endpoints and is idempotent") {
  Rng rng(3);
  const SignClip clip = testsupport::random_clip(rng, 73, 1);
  const SignClip once = resample_clip(clip, 50);
  CHECK(once.frames.front().hands == clip.frames.front().hands);
  CHECK(once.frames.back().hands == clip.frames.back().hands);
  const SignClip twice = resample_clip(once, 50);
  for (std::size_t i = 0; i < 50; ++i) CHECK(twice.frames[i].hands == once.frames[i].hands);
}

TEST_CASE("resample errors") {
  SignClip empty;
  CHECK_THROWS_AS(resample_clip(empty, 50), EmptyClipError);
  Rng rng(4);
  CHECK_THROWS_AS(resample_clip(testsupport::random_clip(rng, 10, 0), 1), InvalidInputError);
}

TEST_CASE("concat records segments") {
  Rng rng(5);
  std::vector<SignClip> clips{testsupport::random_clip(rng, 30, 4), testsupport::random_clip(rng, 70, 9)};
  const ContinuousStream s = concat_clips(clips);
  REQUIRE(s.frames.size() == 100);
  REQUIRE(s.ground_truth.has_value());
  CHECK(*s.ground_truth == std::vector<Segment>{{4, 0, 29}, {9, 30, 99}});
  CHECK(s.frames[30].hands == clips[1].frames[0].hands);
  for (std::size_t i = 0; i < s.frames.size(); ++i) CHECK(s.frames[i].timestamp_index == i);
}

TEST_CASE("concat single clip") {
  Rng rng(6);
  std::vector<SignClip> clips{testsupport::random_clip(rng, 42, 0)};
  const ContinuousStream s = concat_clips(clips);
  CHECK(s.frames.size() == 42);
  CHECK(s.ground_truth->size() == 1);
}

TEST_CASE("concat boundaries are prefix sums") {
  Rng rng(7);
  std::vector<SignClip> clips;
  std::size_t total = 0;
  for (ClassId k = 0; k < 25; ++k) {
    const auto len = static_cast<std::size_t>(rng.uniform_int(30, 80));
    clips.push_back(testsupport::random_clip(rng, len, k, 1));
    total += len;
  }
  const ContinuousStream s = concat_clips(clips);
  CHECK(s.frames.size() == total);
  std::size_t start = 0;
  for (std::size_t i = 0; i < clips.size(); ++i) {
    const Segment& seg = (*s.ground_truth)[i];
    CHECK(seg.start_frame == start);
    CHECK(seg.length() == clips[i].frames.size());
    start += clips[i].frames.size();
  }
}

TEST_CASE("concat errors") {
  CHECK_THROWS_AS(concat_clips({}), EmptyListError);
  Rng rng(8);
  std::vector<SignClip> dup{testsupport::random_clip(rng, 5, 1), testsupport::random_clip(rng, 5, 1)};
  CHECK_THROWS_AS(concat_clips(dup), AdjacentDuplicateLabelError);
  std::vector<SignClip> mixed{testsupport::random_clip(rng, 5, 1, 2), testsupport::random_clip(rng, 5, 2, 1)};
  CHECK_THROWS_AS(concat_clips(mixed), HandCountMismatchError);
}

namespace {
std::vector<SignClip> labeled_clips(std::size_t classes, std::size_t per_class) {
  std::vector<SignClip> clips;
  for (std::size_t k = 0; k < classes; ++k)
    for (std::size_t i = 0; i < per_class; ++i) {
      SignClip c;
      c.label = static_cast<ClassId>(k);
      clips.push_back(c);
    }
  return clips;
}
}  // namespace

TEST_CASE("split counts") {
  const SplitSpec spec;
  const SplitCounts a = split_counts(100, spec);
  CHECK(a.train == 72);
  CHECK(a.validation == 8);
  CHECK(a.test == 20);
  const SplitCounts b = split_counts(7, spec);
  CHECK(b.train == 5);
  CHECK(b.validation == 1);
  CHECK(b.test == 1);
}

TEST_CASE("split is a stratified partition") {
  const auto clips = labeled_clips(100, 100);
  const DatasetSplit s = split_dataset(clips, SplitSpec{});
  CHECK(s.train.size() == 7200);
  CHECK(s.validation.size() == 800);
  CHECK(s.test.size() == 2000);
  std::set<std::size_t> all;
  for (auto i : s.train) all.insert(i);
  for (auto i : s.validation) all.insert(i);
  for (auto i : s.test) all.insert(i);
  CHECK(all.size() == clips.size());
  std::vector<int> per_class(100, 0);
  for (auto i : s.test) ++per_class[static_cast<std::size_t>(clips[i].label)];
  CHECK(std::all_of(per_class.begin(), per_class.end(), [](int n) { return n == 20; }));
}

TEST_CASE("split is deterministic per seed") {
  const auto clips = labeled_clips(5, 20);
  SplitSpec spec;
  spec.seed = 9;
  const DatasetSplit a = split_dataset(clips, spec);
  const DatasetSplit b = split_dataset(clips, spec);
  CHECK(a.test == b.test);
  CHECK(a.train == b.train);
  spec.seed = 10;
  CHECK(split_dataset(clips, spec).test != a.test);
}

TEST_CASE("split needs two clips per class") {
  auto clips = labeled_clips(3, 4);
  clips.pop_back();
  clips.pop_back();
  clips.pop_back();
  CHECK_THROWS_AS(split_dataset(clips, SplitSpec{}), InsufficientSamplesError);
}

}  // TEST_SUITE
