#pragma once

#include <optional>
#include <span>
#include <vector>

#include "signsep/core.hpp"
#include "signsep/predictor.hpp"

namespace signsep {

/// Streaming decoder memory: the class of the most recent Accept and the
/// append-only event log.
struct DecoderState {
  std::optional<ClassId> last_accepted;
  std::vector<DecodeEvent> events;
};

/// Decoded word sequence plus the per-window decisions that produced it.
struct Transcript {
  std::vector<ClassId> words;
  std::vector<DecodeEvent> events;
  friend bool operator==(const Transcript&, const Transcript&) = default;
};

/// Class probabilities of one sliding-window position.
struct WindowProbability {
  std::size_t window_start = 0;
  ProbVector probs;
};

/// Per-window rule. With c = argmax(p) and m = p[c]:
///   m <= threshold            -> Blank(BelowThreshold)
///   c == last_accepted        -> Blank(DuplicateSuppressed)
///   otherwise                 -> Accept(c, m)
Decision decide_window(const ProbVector& p, std::optional<ClassId> last_accepted, double threshold);

/// One step of the streaming decoder. Pure: the input state is not modified.
std::pair<DecoderState, DecodeEvent> decode_incremental(const DecoderState& state,
                                                        const WindowProbability& window,
                                                        const Config& cfg);
/// Same transition, consuming the state to avoid copying the event log.
std::pair<DecoderState, DecodeEvent> decode_incremental(DecoderState&& state,
                                                        const WindowProbability& window,
                                                        const Config& cfg);

/// Accept classes in event order.
std::vector<ClassId> collapse_blanks(std::span<const DecodeEvent> events);

/// Transcript of everything a streaming decoder has seen so far.
Transcript to_transcript(const DecoderState& state);

/// Number of window positions for a stream of `length` frames.
std::size_t window_count(std::size_t length, std::size_t window_size, std::size_t stride);

/// Batch decoding of an already computed probability sequence.
Transcript decode_probabilities(std::span<const WindowProbability> windows, const Config& cfg);

/// Classifies every window position of the stream with `model`.
std::vector<WindowProbability> window_probabilities(const ContinuousStream& stream,
                                                    const PredictorModel& model, const Config& cfg);

/// Slides the window over the stream and decodes it. Throws
/// StreamTooShortError when the stream is shorter than one window. When
/// `probs_out` is given it receives the per-window probabilities.
Transcript decode_stream(const ContinuousStream& stream, const PredictorModel& model,
                         const Config& cfg, std::vector<WindowProbability>* probs_out = nullptr);

}  // namespace signsep
