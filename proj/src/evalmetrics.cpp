#include "signsep/evalmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

namespace signsep {

namespace {

std::string join_words(std::span<const ClassId> words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0) out += ' ';
    out += std::to_string(words[i]);
  }
  return out;
}

std::size_t lcs_length(std::span<const ClassId> a, std::span<const ClassId> b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

bool segment_accepted(const Segment& seg, std::span<const DecodeEvent> events, std::size_t window_size) {
  for (const auto& ev : events) {
    const auto* a = std::get_if<Accept>(&ev.decision);
    if (a == nullptr || a->cls != seg.label) continue;
    const std::size_t first = ev.window_start;
    const std::size_t last = ev.window_start + window_size - 1;
    if (first <= seg.end_frame && last >= seg.start_frame) return true;
  }
  return false;
}

}  // namespace

double isolated_accuracy(const WindowClassifier& classify, std::span<const LabeledWindow> test_set) {
  if (test_set.empty()) throw EmptySetError("isolated accuracy over an empty test set");
  std::size_t correct = 0;
  for (const auto& s : test_set) {
    if (classify(s.window).argmax() == s.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test_set.size());
}

double isolated_accuracy(const PredictorModel& model, std::span<const LabeledWindow> test_set) {
  return isolated_accuracy([&model](const FeatureWindow& w) { return predict(model, w); }, test_set);
}

MeanStd mean_std(std::span<const double> values) {
  if (values.empty()) throw EmptySetError("mean of an empty list");
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  if (values.size() == 1) return {mean, 0.0};
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return {mean, std::sqrt(sq / static_cast<double>(values.size() - 1))};
}

double avg_max_softmax(std::span<const DecodeEvent> events) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& ev : events) {
    if (const auto* a = std::get_if<Accept>(&ev.decision)) {
      sum += a->confidence;
      ++n;
    }
  }
  if (n == 0) throw NoAcceptError("no accepted window to average");
  return sum / static_cast<double>(n);
}

std::vector<FalseRecognition> false_recognition_report(const std::string& stream_id,
                                                       std::span<const Segment> ground_truth,
                                                       const Transcript& transcript,
                                                       std::span<const WindowProbability> probs,
                                                       std::size_t window_size) {
  std::vector<FalseRecognition> rows;
  for (const Segment& seg : ground_truth) {
    if (segment_accepted(seg, transcript.events, window_size)) continue;

    // Windows fully inside the segment; short segments use maximal overlap.
    std::size_t best_overlap = 0;
    for (const auto& w : probs) {
      const std::size_t lo = std::max(w.window_start, seg.start_frame);
      const std::size_t hi = std::min(w.window_start + window_size - 1, seg.end_frame);
      if (hi >= lo) best_overlap = std::max(best_overlap, hi - lo + 1);
    }
    if (best_overlap == 0) continue;

    const WindowProbability* best = nullptr;
    for (const auto& w : probs) {
      const std::size_t lo = std::max(w.window_start, seg.start_frame);
      const std::size_t hi = std::min(w.window_start + window_size - 1, seg.end_frame);
      if (hi < lo || hi - lo + 1 != best_overlap) continue;
      if (best == nullptr || w.probs.max() > best->probs.max()) best = &w;
    }
    const ClassId top = best->probs.argmax();
    if (top == seg.label) continue;
    rows.push_back({stream_id, seg.label, best->probs[static_cast<std::size_t>(seg.label)], top,
                    best->probs.max(), best->window_start});
  }
  return rows;
}

std::vector<FalseRecognition> false_recognition_report(const ContinuousStream& stream,
                                                       const Transcript& transcript,
                                                       std::span<const WindowProbability> probs,
                                                       std::size_t window_size) {
  if (!stream.ground_truth) {
    throw MissingGroundTruthError(fmt::format("stream '{}' has no ground truth", stream.stream_id));
  }
  return false_recognition_report(stream.stream_id, *stream.ground_truth, transcript, probs, window_size);
}

std::size_t edit_distance(std::span<const ClassId> a, std::span<const ClassId> b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

SequenceMetrics sequence_metrics(std::span<const ClassId> expected, std::span<const ClassId> recognized) {
  SequenceMetrics m;
  m.exact_match = std::equal(expected.begin(), expected.end(), recognized.begin(), recognized.end());
  m.edit_distance = edit_distance(expected, recognized);
  m.matched_words = lcs_length(expected, recognized);
  m.word_recall = expected.empty() ? 1.0
                                   : static_cast<double>(m.matched_words) / static_cast<double>(expected.size());
  return m;
}

StreamReport make_stream_report(const std::string& stream_id, std::span<const Segment> ground_truth,
                                const Transcript& transcript,
                                std::span<const WindowProbability> probs, std::size_t window_size) {
  StreamReport r;
  r.stream_id = stream_id;
  r.recognized = transcript.words;
  for (const auto& seg : ground_truth) r.expected.push_back(seg.label);
  try {
    r.avg_max_softmax = avg_max_softmax(transcript.events);
  } catch (const NoAcceptError&) {
    r.avg_max_softmax = 0.0;
  }
  r.false_recognitions = false_recognition_report(stream_id, ground_truth, transcript, probs, window_size);
  const SequenceMetrics m = sequence_metrics(r.expected, r.recognized);
  r.exact_match = m.exact_match;
  r.edit_distance = m.edit_distance;
  r.matched_words = m.matched_words;
  r.word_recall = m.word_recall;
  return r;
}

SuiteSummary summarize(std::span<const StreamReport> reports) {
  SuiteSummary s;
  double softmax_sum = 0.0;
  std::size_t softmax_n = 0;
  for (const auto& r : reports) {
    ++s.streams;
    if (r.exact_match) ++s.exact_matches;
    s.expected_words += r.expected.size();
    s.matched_words += r.matched_words;
    s.false_recognitions += r.false_recognitions.size();
    if (!r.recognized.empty()) {
      softmax_sum += r.avg_max_softmax;
      ++softmax_n;
    }
  }
  s.word_recall = s.expected_words == 0
                      ? 1.0
                      : static_cast<double>(s.matched_words) / static_cast<double>(s.expected_words);
  s.avg_max_softmax = softmax_n == 0 ? 0.0 : softmax_sum / static_cast<double>(softmax_n);
  return s;
}

std::string format_report_text(std::span<const StreamReport> reports,
                               std::span<const std::string> class_names) {
  auto label = [&](ClassId c) {
    const auto idx = static_cast<std::size_t>(c);
    if (idx < class_names.size()) return fmt::format("{} ({})", c + 1, class_names[idx]);
    return fmt::format("{}", c + 1);
  };

  std::string out;
  out += fmt::format("{:<8} {:>8}  {:<22} {:>8}  {:<22} {:>8}  {}\n", "Stream", "AvgMax", "Correct class",
                     "P(corr)", "False class", "P(false)", "Exact");
  for (const StreamReport& r : reports) {
    const std::string avg = fmt::format("{:.2f}", r.avg_max_softmax);
    const std::string exact = r.exact_match ? "yes" : "no";
    if (r.false_recognitions.empty()) {
      out += fmt::format("{:<8} {:>8}  {:<22} {:>8}  {:<22} {:>8}  {}\n", r.stream_id, avg, "-", "-", "-", "-", exact);
      continue;
    }
    for (std::size_t k = 0; k < r.false_recognitions.size(); ++k) {
      const FalseRecognition& f = r.false_recognitions[k];
      out += fmt::format("{:<8} {:>8}  {:<22} {:>8.2f}  {:<22} {:>8.2f}  {}\n",
                         k == 0 ? r.stream_id : "", k == 0 ? avg : "", label(f.correct_class),
                         f.correct_prob, label(f.false_class), f.false_prob, k == 0 ? exact : "");
    }
  }
  const SuiteSummary s = summarize(reports);
  out += fmt::format("\nstreams: {}  exact matches: {}/{}  word recall: {:.4f}  false recognitions: {}/{}\n",
                     s.streams, s.exact_matches, s.streams, s.word_recall, s.false_recognitions,
                     s.expected_words);
  out += "class indices are 1-based; AvgMax is the mean top probability over accepted windows\n";
  return out;
}

void write_stream_reports_csv(std::ostream& out, std::span<const StreamReport> reports) {
  out << "# signsep stream report v1\n";
  out << "stream_id,avg_max_softmax,exact_match,edit_distance,word_recall,num_expected,num_recognized,"
         "num_false,expected,recognized\n";
  for (const auto& r : reports) {
    out << fmt::format("{},{:.6f},{},{},{:.6f},{},{},{},{},{}\n", r.stream_id, r.avg_max_softmax,
                       r.exact_match ? 1 : 0, r.edit_distance, r.word_recall, r.expected.size(),
                       r.recognized.size(), r.false_recognitions.size(), join_words(r.expected),
                       join_words(r.recognized));
  }
}

void write_false_recognitions_csv(std::ostream& out, std::span<const StreamReport> reports) {
  out << "# signsep false-recognition report v1\n";
  out << "stream_id,window_start,correct_class,correct_prob,false_class,false_prob\n";
  for (const auto& r : reports) {
    for (const auto& f : r.false_recognitions) {
      out << fmt::format("{},{},{},{:.6f},{},{:.6f}\n", f.stream_id, f.window_start, f.correct_class,
                         f.correct_prob, f.false_class, f.false_prob);
    }
  }
}

}  // namespace signsep
