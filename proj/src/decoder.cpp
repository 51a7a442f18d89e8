#include "signsep/decoder.hpp"

#include <fmt/format.h>

#include "signsep/features.hpp"

namespace signsep {

namespace {

// Softmax output sums to one, so a threshold above 0.5 admits at most one
// class. A violation means the probability vector was not a simplex point.
void assert_single_candidate(const ProbVector& p, double threshold) {
  std::size_t above = 0;
  for (double v : p.probs()) above += v > threshold ? 1 : 0;
  if (above > 1) {
    throw SimplexError(fmt::format("{} classes exceed threshold {}", above, threshold));
  }
}

DecodeEvent make_event(const WindowProbability& w, std::optional<ClassId> last_accepted,
                       double threshold) {
  assert_single_candidate(w.probs, threshold);
  DecodeEvent ev;
  ev.window_start = w.window_start;
  ev.argmax_class = w.probs.argmax();
  ev.max_prob = w.probs.max();
  ev.decision = decide_window(w.probs, last_accepted, threshold);
  return ev;
}

}  // namespace

Decision decide_window(const ProbVector& p, std::optional<ClassId> last_accepted, double threshold) {
  const ClassId c = p.argmax();
  const double m = p[static_cast<std::size_t>(c)];
  if (!(m > threshold)) return Blank{BlankReason::BelowThreshold};
  if (last_accepted && *last_accepted == c) return Blank{BlankReason::DuplicateSuppressed};
  return Accept{c, m};
}

std::pair<DecoderState, DecodeEvent> decode_incremental(const DecoderState& state,
                                                        const WindowProbability& window,
                                                        const Config& cfg) {
  return decode_incremental(DecoderState(state), window, cfg);
}

std::pair<DecoderState, DecodeEvent> decode_incremental(DecoderState&& state,
                                                        const WindowProbability& window,
                                                        const Config& cfg) {
  DecodeEvent ev = make_event(window, state.last_accepted, cfg.threshold);
  DecoderState next = std::move(state);
  if (const auto* a = std::get_if<Accept>(&ev.decision)) next.last_accepted = a->cls;
  next.events.push_back(ev);
  return {std::move(next), std::move(ev)};
}

std::vector<ClassId> collapse_blanks(std::span<const DecodeEvent> events) {
  std::vector<ClassId> words;
  for (const auto& ev : events) {
    if (const auto* a = std::get_if<Accept>(&ev.decision)) words.push_back(a->cls);
  }
  return words;
}

Transcript to_transcript(const DecoderState& state) {
  return {collapse_blanks(state.events), state.events};
}

std::size_t window_count(std::size_t length, std::size_t window_size, std::size_t stride) {
  if (length < window_size) return 0;
  return (length - window_size) / stride + 1;
}

Transcript decode_probabilities(std::span<const WindowProbability> windows, const Config& cfg) {
  Transcript t;
  t.events.reserve(windows.size());
  std::optional<ClassId> last;
  for (const auto& w : windows) {
    DecodeEvent ev = make_event(w, last, cfg.threshold);
    if (const auto* a = std::get_if<Accept>(&ev.decision)) {
      last = a->cls;
      t.words.push_back(a->cls);
    }
    t.events.push_back(std::move(ev));
  }
  return t;
}

std::vector<WindowProbability> window_probabilities(const ContinuousStream& stream,
                                                    const PredictorModel& model, const Config& cfg) {
  cfg.validate();
  const auto window = static_cast<std::size_t>(cfg.window_size);
  const auto stride = static_cast<std::size_t>(cfg.stride);
  if (stream.frames.size() < window) {
    throw StreamTooShortError(fmt::format("stream '{}' has {} frames, the window needs {}",
                                          stream.stream_id, stream.frames.size(), window));
  }
  const auto features = sequence_features(stream.frames, model.input_dim());
  const std::size_t n = window_count(features.size(), window, stride);
  std::vector<WindowProbability> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t start = i * stride;
    out.push_back({start, predict(model, extract_window(features, start, window))});
  }
  return out;
}

Transcript decode_stream(const ContinuousStream& stream, const PredictorModel& model,
                         const Config& cfg, std::vector<WindowProbability>* probs_out) {
  auto probs = window_probabilities(stream, model, cfg);
  Transcript t = decode_probabilities(probs, cfg);
  if (probs_out != nullptr) *probs_out = std::move(probs);
  return t;
}

}  // namespace signsep
