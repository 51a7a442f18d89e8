#include <cmath>
#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "signsep/formats.hpp"
#include "signsep/synthgen.hpp"
#include "support.hpp"

using namespace signsep;

namespace {

std::string error_of(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_manifest(in, "m.txt");
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("formats") {

TEST_CASE("keypoint line round trip is a fixed point") {
  Rng rng(1);
  const KeypointFrame f = testsupport::random_frame(rng, 2, 17);
  const std::string line = format_keypoint_line(f);
  CHECK(line.rfind("{\"frame\":17,\"hands\":[[", 0) == 0);
  const KeypointFrame back = parse_keypoint_line(line);
  CHECK(back.timestamp_index == 17);
  REQUIRE(back.hand_count() == 2);
  for (std::size_t i = 0; i < 63; ++i) CHECK(std::abs(back.hands[1].values()[i] - f.hands[1].values()[i]) <= 5e-10);
  CHECK(format_keypoint_line(back) == line);
  CHECK(parse_keypoint_line(format_keypoint_line(back)) == back);
}

TEST_CASE("keypoint stream round trip") {
  Rng rng(2);
  const SignClip clip = testsupport::random_clip(rng, 12, 0, 1);
  std::stringstream ss;
  write_keypoints(ss, clip.frames);
  const auto frames = read_keypoints(ss);
  REQUIRE(frames.size() == 12);
  std::stringstream again;
  write_keypoints(again, frames);
  std::stringstream first;
  write_keypoints(first, clip.frames);
  CHECK(again.str() == first.str());
}

TEST_CASE("keypoint parse errors carry a line number") {
  std::istringstream bad("{\"frame\":0,\"hands\":[[1,2,3]]}\n");
  CHECK_THROWS_AS(read_keypoints(bad, "k.jsonl"), ParseError);
  std::istringstream garbage("{\"frame\":0,\"hands\":[]}\nnot json\n");
  try {
    read_keypoints(garbage, "k.jsonl");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("k.jsonl:") != std::string::npos);
  }
}

TEST_CASE("manifest round trip") {
  DatasetManifest m;
  m.num_classes = 2;
  m.hands_per_frame = 1;
  m.class_names = {"hello", "world"};
  m.clips = {{"clips/a.jsonl", 0, 31}, {"clips/b.jsonl", 1, 44}};
  std::stringstream ss;
  write_manifest(ss, m);
  CHECK(parse_manifest(ss) == m);
}

TEST_CASE("manifest errors") {
  const std::string head = "format_version = 1\nnum_classes = 2\nhands_per_frame = 2\nclass.0 = a\nclass.1 = b\n";
  CHECK(error_of(head).empty());
  CHECK(error_of(head + "clip = x.jsonl 2 40\n").find("m.txt:6:") == 0);
  CHECK(error_of(head + "bogus\n").find("m.txt:6:") == 0);
  CHECK(error_of("format_version = 2\n").find("m.txt:1:") == 0);
  CHECK(error_of("format_version = 1\nnum_classes = 2\nhands_per_frame = 3\n").find("m.txt:3:") == 0);
  CHECK(error_of("format_version = 1\nnum_classes = 2\nhands_per_frame = 1\nclass.0 = a\n").find("class 1") !=
        std::string::npos);
}

TEST_CASE("dataset save and load") {
  SynthSpec spec;
  spec.num_classes = 3;
  spec.samples_per_class = 2;
  spec.hands = 1;
  const SynthDataset d = generate(spec);
  const auto dir = testsupport::scratch_dir("dataset");
  save_dataset(dir, d.clips, d.class_names, 1);
  const Dataset back = load_dataset(dir);
  CHECK(back.manifest.class_names == d.class_names);
  REQUIRE(back.clips.size() == d.clips.size());
  for (std::size_t i = 0; i < d.clips.size(); ++i) {
    CHECK(back.clips[i].label == d.clips[i].label);
    CHECK(back.clips[i].frames.size() == d.clips[i].frames.size());
  }

  // Lie about the hand count.
  std::string text = read_text_file(dir / "manifest.txt");
  text.replace(text.find("hands_per_frame = 1"), 19, "hands_per_frame = 2");
  write_text_file(dir / "manifest.txt", text);
  CHECK_THROWS_AS(load_dataset(dir), HandCountMismatchError);
  CHECK_THROWS_AS(load_dataset(dir / "absent"), IoError);
}

TEST_CASE("prob dump round trip") {
  Rng rng(3);
  const auto seq = testsupport::random_sequence(rng, 30, 5);
  const Config cfg;
  const Transcript t = decode_probabilities(seq, cfg);
  std::stringstream ss;
  write_prob_dump(ss, t, seq, cfg);
  const std::string text = ss.str();
  CHECK(text.rfind("# signsep prob-dump v1", 0) == 0);
  CHECK(text.find("window_start,decision,argmax,max_prob,p0,p1,p2,p3,p4\n") != std::string::npos);

  const ProbDump d = read_prob_dump(ss);
  CHECK(d.num_classes == 5);
  CHECK(d.window_size == 50);
  CHECK(d.stride == 1);
  CHECK(d.threshold == 0.51);
  REQUIRE(d.windows.size() == 30);
  for (std::size_t i = 0; i < 30; ++i) {
    CHECK(d.recorded_tags[i] == decision_tag(t.events[i].decision));
    for (std::size_t k = 0; k < 5; ++k) CHECK(std::abs(d.windows[i].probs[k] - seq[i].probs[k]) <= 1e-5);
  }
  CHECK(decode_probabilities(d.windows, cfg).words == t.words);
}

TEST_CASE("prob dump errors") {
  std::istringstream no_header("window_start,decision\n");
  CHECK_THROWS_AS(read_prob_dump(no_header), ParseError);
  std::istringstream short_row("# signsep prob-dump v1 num_classes=3\nwindow_start,decision,argmax,max_prob,p0,p1,p2\n0,accept,0,0.9\n");
  CHECK_THROWS_AS(read_prob_dump(short_row), ParseError);
}

TEST_CASE("ground truth round trip and ordering") {
  const std::vector<Segment> segs{{3, 0, 40}, {1, 41, 99}};
  std::stringstream ss;
  write_ground_truth(ss, segs);
  CHECK(read_ground_truth(ss) == segs);
  std::istringstream overlap("label,start_frame,end_frame\n0,0,10\n1,10,20\n");
  CHECK_THROWS_AS(read_ground_truth(overlap), ParseError);
}

TEST_CASE("feature dump formatting") {
  std::vector<FeatureVector> fv{{std::vector<double>(12, 0.5), 0}, {std::vector<double>(12, 1.0 / 3.0), 1}};
  std::ostringstream out;
  write_feature_dump(out, fv);
  CHECK(out.str().find("1,0.333333333,") != std::string::npos);
}

}  // TEST_SUITE
