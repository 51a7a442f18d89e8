#pragma once

#include <span>
#include <string>
#include <vector>

#include "signsep/core.hpp"
#include "signsep/decoder.hpp"
#include "signsep/evalmetrics.hpp"
#include "signsep/preprocess.hpp"
#include "signsep/predictor.hpp"

namespace signsep {

/// Each clip resampled to cfg.window_size frames and turned into one labeled
/// feature window.
std::vector<LabeledWindow> clip_windows(std::span<const SignClip> clips, const Config& cfg);

/// Stratified split of an isolated corpus plus the training windows of each
/// part. `held_out` keeps the test clips at their native length for the
/// continuous suite.
struct PreparedData {
  DatasetSplit split;
  std::vector<LabeledWindow> train;
  std::vector<LabeledWindow> validation;
  std::vector<LabeledWindow> test;
  std::vector<SignClip> held_out;
};

PreparedData prepare_data(std::span<const SignClip> clips, const Config& cfg);

/// Accuracy of a trained model on every part of a prepared split.
struct SplitAccuracy {
  double train = 0.0;
  double validation = 0.0;
  double test = 0.0;
};
SplitAccuracy split_accuracy(const PredictorModel& model, const PreparedData& data);

struct SuiteResult {
  std::vector<ContinuousStream> streams;
  std::vector<Transcript> transcripts;
  std::vector<std::vector<WindowProbability>> probabilities;
  std::vector<StreamReport> reports;
};

/// Builds `streams_n` continuous streams from the held-out clips, decodes
/// each with `model` and scores it. Reports come back in stream-id order.
SuiteResult evaluate_suite(const PredictorModel& model, std::span<const SignClip> held_out,
                           std::size_t streams_n, const Config& cfg);

/// Scores an already computed probability sequence against ground truth.
StreamReport replay_report(const std::string& stream_id, std::span<const WindowProbability> probs,
                           std::span<const Segment> ground_truth, const Config& cfg);

}  // namespace signsep
