#include "signsep/pipeline.hpp"

#include "signsep/features.hpp"
#include "signsep/synthgen.hpp"

namespace signsep {

std::vector<LabeledWindow> clip_windows(std::span<const SignClip> clips, const Config& cfg) {
  const auto len = static_cast<std::size_t>(cfg.window_size);
  const auto dim = static_cast<std::size_t>(cfg.num_singular_values);
  std::vector<LabeledWindow> out;
  out.reserve(clips.size());
  for (const auto& clip : clips) {
    const SignClip fixed = resample_clip(clip, len);
    const auto feats = sequence_features(fixed.frames, dim);
    out.push_back({extract_window(feats, 0, len), clip.label});
  }
  return out;
}

PreparedData prepare_data(std::span<const SignClip> clips, const Config& cfg) {
  PreparedData d;
  SplitSpec spec;
  spec.train_fraction = cfg.train_fraction;
  spec.seed = static_cast<std::uint64_t>(cfg.seed);
  d.split = split_dataset(clips, spec);
  d.train = clip_windows(select_clips(clips, d.split.train), cfg);
  d.validation = clip_windows(select_clips(clips, d.split.validation), cfg);
  d.held_out = select_clips(clips, d.split.test);
  d.test = clip_windows(d.held_out, cfg);
  return d;
}

SplitAccuracy split_accuracy(const PredictorModel& model, const PreparedData& data) {
  SplitAccuracy acc;
  acc.train = data.train.empty() ? 0.0 : isolated_accuracy(model, data.train);
  acc.validation = data.validation.empty() ? 0.0 : isolated_accuracy(model, data.validation);
  acc.test = data.test.empty() ? 0.0 : isolated_accuracy(model, data.test);
  return acc;
}

SuiteResult evaluate_suite(const PredictorModel& model, std::span<const SignClip> held_out,
                           std::size_t streams_n, const Config& cfg) {
  SuiteResult r;
  r.streams = build_continuous_suite(held_out, model.num_classes, streams_n, static_cast<std::uint64_t>(cfg.seed));
  for (const auto& stream : r.streams) {
    std::vector<WindowProbability> probs;
    Transcript t = decode_stream(stream, model, cfg, &probs);
    r.reports.push_back(make_stream_report(stream.stream_id, *stream.ground_truth, t, probs,
                                           static_cast<std::size_t>(cfg.window_size)));
    r.transcripts.push_back(std::move(t));
    r.probabilities.push_back(std::move(probs));
  }
  return r;
}

StreamReport replay_report(const std::string& stream_id, std::span<const WindowProbability> probs,
                           std::span<const Segment> ground_truth, const Config& cfg) {
  const Transcript t = decode_probabilities(probs, cfg);
  return make_stream_report(stream_id, ground_truth, t, probs, static_cast<std::size_t>(cfg.window_size));
}

}  // namespace signsep
