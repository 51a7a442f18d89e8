#include <cmath>
#include <set>

#include "doctest.h"
#include "signsep/pipeline.hpp"
#include "signsep/synthgen.hpp"
#include "support.hpp"

using namespace signsep;

namespace {

double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

SynthSpec small_spec() {
  SynthSpec s;
  s.num_classes = 6;
  s.samples_per_class = 8;
  return s;
}

}  // namespace

TEST_SUITE("synthgen") {

TEST_CASE("generation is deterministic") {
  const SynthDataset a = generate(small_spec());
  const SynthDataset b = generate(small_spec());
  REQUIRE(a.clips.size() == b.clips.size());
  for (std::size_t i = 0; i < a.clips.size(); ++i) {
    CHECK(a.clips[i].label == b.clips[i].label);
    CHECK(a.clips[i].frames == b.clips[i].frames);
  }
  SynthSpec other = small_spec();
  other.seed = 8;
  CHECK(generate(other).clips[0].frames != a.clips[0].frames);
}

TEST_CASE("shape, lengths and separation") {
  const SynthSpec spec = small_spec();
  const SynthDataset d = generate(spec);
  CHECK(d.clips.size() == 48);
  CHECK(d.class_names.size() == 6);
  CHECK(d.prototypes.size() == 6);
  for (const auto& c : d.clips) {
    CHECK(c.frames.size() >= spec.min_length);
    CHECK(c.frames.size() <= spec.max_length);
    CHECK(c.frames.front().hand_count() == 2);
    CHECK_NOTHROW(validate_frames(c.frames));
  }
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = i + 1; j < 6; ++j)
      CHECK(distance(prototype_mean_features(d.prototypes[i]), prototype_mean_features(d.prototypes[j])) >=
            5.0 * spec.noise_sigma);
}

TEST_CASE("noise-free samples are resamplings of the prototype") {
  SynthSpec spec = small_spec();
  spec.noise_sigma = 0.0;
  spec.rotation_jitter_deg = 0.0;
  spec.translation_jitter = 0.0;
  spec.hands = 1;
  const SynthDataset d = generate(spec);
  for (const auto& c : d.clips) {
    const auto ref = d.prototypes[static_cast<std::size_t>(c.label)].sample(c.frames.size());
    for (std::size_t t = 0; t < ref.size(); ++t) {
      const auto a = c.frames[t].hands[0].values();
      const auto b = ref[t].hands[0].values();
      for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(std::abs(a[i] - b[i]) <= 1e-12);
    }
  }
}

TEST_CASE("spec validation") {
  SynthSpec s;
  s.num_classes = 1;
  CHECK_THROWS_AS(generate(s), ConfigError);
  s = SynthSpec{};
  s.hands = 3;
  CHECK_THROWS_AS(generate(s), ConfigError);
  s = SynthSpec{};
  s.min_length = 90;
  CHECK_THROWS_AS(generate(s), ConfigError);
  s = SynthSpec{};
  s.noise_sigma = -1.0;
  CHECK_THROWS_AS(generate(s), ConfigError);
}

TEST_CASE("continuous suite construction") {
  const SynthDataset d = generate(small_spec());
  const auto suite = build_continuous_suite(d.clips, 6, 4, 11);
  REQUIRE(suite.size() == 4);
  for (const auto& s : suite) {
    const auto& gt = *s.ground_truth;
    REQUIRE(gt.size() == 6);
    std::set<ClassId> seen;
    std::size_t total = 0;
    for (std::size_t i = 0; i < gt.size(); ++i) {
      seen.insert(gt[i].label);
      total += gt[i].length();
      if (i > 0) CHECK(gt[i].label != gt[i - 1].label);
    }
    CHECK(seen.size() == 6);
    CHECK(total == s.frames.size());
  }
  CHECK(suite[0].stream_id == "stream_001");
  const auto again = build_continuous_suite(d.clips, 6, 4, 11);
  CHECK(again[2].frames == suite[2].frames);
}

TEST_CASE("minimal suite and missing classes") {
  Rng rng(3);
  std::vector<SignClip> pair{testsupport::random_clip(rng, 5, 0), testsupport::random_clip(rng, 6, 1)};
  const auto suite = build_continuous_suite(pair, 2, 1, 0);
  REQUIRE(suite.size() == 1);
  CHECK(suite[0].ground_truth->size() == 2);
  CHECK(suite[0].frames.size() == 11);
  CHECK_THROWS_AS(build_continuous_suite(pair, 3, 1, 0), InsufficientHeldOutError);
}

TEST_CASE("centroid classifier separates the default corpus") {
  const SynthDataset d = generate(SynthSpec{});
  Config cfg;
  cfg.seed = 7;
  const PreparedData data = prepare_data(d.clips, cfg);
  const TrainResult r = train(data.train, data.validation, 20, cfg, PredictorKind::Centroid);
  CHECK(isolated_accuracy(r.model, data.test) >= 0.99);
}

}  // TEST_SUITE
