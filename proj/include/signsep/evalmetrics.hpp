#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "signsep/core.hpp"
#include "signsep/decoder.hpp"
#include "signsep/predictor.hpp"

namespace signsep {

using WindowClassifier = std::function<ProbVector(const FeatureWindow&)>;

/// Fraction of windows whose argmax equals the label. Throws EmptySetError.
double isolated_accuracy(const WindowClassifier& classify, std::span<const LabeledWindow> test_set);
double isolated_accuracy(const PredictorModel& model, std::span<const LabeledWindow> test_set);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

/// Mean and sample standard deviation (0 for a single value).
MeanStd mean_std(std::span<const double> values);

/// Mean confidence over Accept events. Throws NoAcceptError when none.
double avg_max_softmax(std::span<const DecodeEvent> events);

/// A ground-truth sign that was never accepted and whose best window ranked
/// another class first. Class ids are 0-based.
struct FalseRecognition {
  std::string stream_id;
  ClassId correct_class = 0;
  double correct_prob = 0.0;
  ClassId false_class = 0;
  double false_prob = 0.0;
  std::size_t window_start = 0;
  friend bool operator==(const FalseRecognition&, const FalseRecognition&) = default;
};

/// For each segment with no overlapping Accept of its own class, take the
/// window lying fully inside the segment with the highest max probability
/// (segments shorter than a window fall back to the windows of largest
/// overlap) and report it when its argmax is a different class.
std::vector<FalseRecognition> false_recognition_report(const std::string& stream_id,
                                                       std::span<const Segment> ground_truth,
                                                       const Transcript& transcript,
                                                       std::span<const WindowProbability> probs,
                                                       std::size_t window_size);

/// Same, reading the ground truth from the stream. Throws MissingGroundTruthError.
std::vector<FalseRecognition> false_recognition_report(const ContinuousStream& stream,
                                                       const Transcript& transcript,
                                                       std::span<const WindowProbability> probs,
                                                       std::size_t window_size);

struct SequenceMetrics {
  bool exact_match = false;
  double word_recall = 0.0;
  std::size_t edit_distance = 0;
  std::size_t matched_words = 0;
};

/// Levenshtein distance over word symbols; recall is the longest common
/// subsequence length over the expected length (1 when nothing is expected).
SequenceMetrics sequence_metrics(std::span<const ClassId> expected,
                                 std::span<const ClassId> recognized);

std::size_t edit_distance(std::span<const ClassId> a, std::span<const ClassId> b);

struct StreamReport {
  std::string stream_id;
  double avg_max_softmax = 0.0;  // 0 when nothing was accepted
  std::vector<ClassId> recognized;
  std::vector<ClassId> expected;
  std::vector<FalseRecognition> false_recognitions;
  bool exact_match = false;
  std::size_t edit_distance = 0;
  std::size_t matched_words = 0;
  double word_recall = 0.0;
};

StreamReport make_stream_report(const std::string& stream_id, std::span<const Segment> ground_truth,
                                const Transcript& transcript,
                                std::span<const WindowProbability> probs, std::size_t window_size);

struct SuiteSummary {
  std::size_t streams = 0;
  std::size_t exact_matches = 0;
  std::size_t expected_words = 0;
  std::size_t matched_words = 0;
  std::size_t false_recognitions = 0;
  double word_recall = 0.0;  // matched_words / expected_words
  double avg_max_softmax = 0.0;  // mean over streams that accepted anything
};

SuiteSummary summarize(std::span<const StreamReport> reports);

/// Aligned text table mirroring the published false-recognition tables
/// (1-based class indices, two decimals).
std::string format_report_text(std::span<const StreamReport> reports,
                               std::span<const std::string> class_names);

/// Machine-readable reports with 0-based class ids.
void write_stream_reports_csv(std::ostream& out, std::span<const StreamReport> reports);
void write_false_recognitions_csv(std::ostream& out, std::span<const StreamReport> reports);

}  // namespace signsep
