#include "doctest.h"
#include "oracles.hpp"
#include "signsep/decoder.hpp"
#include "signsep/preprocess.hpp"
#include "support.hpp"

using namespace signsep;
using testsupport::one_hot;

TEST_SUITE("decoder") {

TEST_CASE("decide_window examples") {
  const Decision a = decide_window(validate_prob({0.54, 0.46}), std::nullopt, 0.51);
  REQUIRE(std::holds_alternative<Accept>(a));
  CHECK(std::get<Accept>(a) == Accept{0, 0.54});

  std::vector<double> row(100, (1.0 - 0.76) / 98.0);
  row[44] = 0.37;
  row[62] = 0.39;
  const ProbVector p45 = validate_prob(row);
  CHECK(decide_window(p45, std::nullopt, 0.51) == Decision{Blank{BlankReason::BelowThreshold}});
  CHECK(decide_window(p45, 62, 0.51) == Decision{Blank{BlankReason::BelowThreshold}});

  CHECK(decide_window(one_hot(5, 3, 0.98), 3, 0.51) == Decision{Blank{BlankReason::DuplicateSuppressed}});
  CHECK(decide_window(testsupport::uniform(2), std::nullopt, 0.51) == Decision{Blank{BlankReason::BelowThreshold}});
}

TEST_CASE("threshold comparison is strict") {
  CHECK(decide_window(validate_prob({0.51, 0.49}), std::nullopt, 0.51) ==
        Decision{Blank{BlankReason::BelowThreshold}});
  CHECK(std::holds_alternative<Accept>(decide_window(validate_prob({0.5101, 0.4899}), std::nullopt, 0.51)));
}

TEST_CASE("duplicate suppression spans any number of blanks") {
  std::vector<WindowProbability> seq;
  const std::vector<ProbVector> ps{one_hot(3, 0, 0.9), testsupport::uniform(3), testsupport::uniform(3),
                                   testsupport::uniform(3), one_hot(3, 0, 0.95), one_hot(3, 1, 0.8),
                                   one_hot(3, 0, 0.7)};
  for (std::size_t i = 0; i < ps.size(); ++i) seq.push_back({i, ps[i]});
  const Transcript t = decode_probabilities(seq, Config{});
  CHECK(t.words == std::vector<ClassId>{0, 1, 0});
  CHECK(t.events[4].decision == Decision{Blank{BlankReason::DuplicateSuppressed}});
}

TEST_CASE("collapse_blanks") {
  std::vector<DecodeEvent> ev(5);
  ev[0].decision = Accept{2, 0.9};
  ev[1].decision = Blank{};
  ev[2].decision = Blank{BlankReason::DuplicateSuppressed};
  ev[3].decision = Accept{4, 0.8};
  ev[4].decision = Blank{};
  CHECK(collapse_blanks(ev) == std::vector<ClassId>{2, 4});
  CHECK(collapse_blanks(std::span(ev).subspan(1, 2)).empty());
  CHECK(collapse_blanks({}).empty());
}

TEST_CASE("incremental steps") {
  const Config cfg;
  const DecoderState empty;
  CHECK(to_transcript(empty).words.empty());
  const auto [next, ev] = decode_incremental(empty, {0, one_hot(4, 2, 0.7)}, cfg);
  CHECK(next.last_accepted == 2);
  CHECK(ev.is_accept());
  CHECK(!empty.last_accepted.has_value());
  CHECK(empty.events.empty());
}

TEST_CASE("batch decode matches the oracle and the incremental fold") {
  Rng rng(33);
  const Config cfg;
  for (int i = 0; i < 100; ++i) {
    const auto seq = testsupport::random_sequence(rng, 40, 2 + static_cast<std::size_t>(i % 6));
    const Transcript batch = decode_probabilities(seq, cfg);
    DecoderState st;
    for (const auto& w : seq) st = decode_incremental(std::move(st), w, cfg).first;
    CHECK(to_transcript(st) == batch);
    const auto ref = oracle::decode(seq, cfg.threshold);
    CHECK(batch.words == ref.words);
    REQUIRE(batch.events.size() == ref.tags.size());
    for (std::size_t j = 0; j < ref.tags.size(); ++j) CHECK(decision_tag(batch.events[j].decision) == ref.tags[j]);
  }
}

TEST_CASE("raising the threshold never turns a blank into an accept") {
  Rng rng(34);
  for (int i = 0; i < 2000; ++i) {
    const ProbVector p = testsupport::random_prob(rng, 4, 3.0);
    const std::optional<ClassId> last = i % 3 == 0 ? std::optional<ClassId>(0) : std::nullopt;
    const bool low = std::holds_alternative<Accept>(decide_window(p, last, 0.51));
    const bool high = std::holds_alternative<Accept>(decide_window(p, last, 0.8));
    CHECK((!high || low));
  }
}

TEST_CASE("window count") {
  CHECK(window_count(50, 50, 1) == 1);
  CHECK(window_count(100, 50, 1) == 51);
  CHECK(window_count(100, 50, 7) == 8);
  CHECK(window_count(49, 50, 1) == 0);
}

namespace {

// Scores a window 1.0 on the true class when it lies inside one segment and
// uniform otherwise. The segment layout comes from the stream itself.
struct OracleClassifierStream {
  ContinuousStream stream;
  std::size_t k = 0;

  std::vector<WindowProbability> probabilities(std::size_t w) const {
    std::vector<WindowProbability> out;
    for (std::size_t s = 0; s + w <= stream.frames.size(); ++s) {
      std::optional<ClassId> inside;
      for (const auto& seg : *stream.ground_truth)
        if (s >= seg.start_frame && s + w - 1 <= seg.end_frame) inside = seg.label;
      out.push_back({s, inside ? testsupport::one_hot(k, static_cast<std::size_t>(*inside), 1.0)
                               : testsupport::uniform(k)});
    }
    return out;
  }
};

}  // namespace

TEST_CASE("a perfect classifier recovers the concatenation order") {
  Rng rng(35);
  std::vector<SignClip> clips;
  std::vector<ClassId> order{3, 0, 5, 1, 4, 2};
  for (ClassId c : order) clips.push_back(testsupport::random_clip(rng, 60, c, 1));
  const OracleClassifierStream o{concat_clips(clips), 6};
  const Transcript t = decode_probabilities(o.probabilities(50), Config{});
  CHECK(t.words == order);
}

TEST_CASE("decode_stream with a model") {
  Rng rng(36);
  PredictorModel m;
  CentroidModel c;
  c.centroids = Matrix(2, 12);
  for (std::size_t j = 0; j < 12; ++j) c.centroids(1, j) = 100.0;
  m.params = c;
  m.num_classes = 2;

  const SignClip clip = testsupport::random_clip(rng, 50, 0);
  ContinuousStream one{"one", clip.frames, std::nullopt};
  std::vector<WindowProbability> probs;
  const Transcript t = decode_stream(one, m, Config{}, &probs);
  CHECK(t.events.size() == 1);
  CHECK(probs.size() == 1);
  CHECK(t.words.size() <= 1);
  CHECK(decode_probabilities(probs, Config{}) == t);

  ContinuousStream shortie{"short", std::vector<KeypointFrame>(clip.frames.begin(), clip.frames.begin() + 49),
                           std::nullopt};
  CHECK_THROWS_AS(decode_stream(shortie, m, Config{}), StreamTooShortError);
}

}  // TEST_SUITE
