#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "signsep/core.hpp"
#include "signsep/features.hpp"
#include "signsep/gru.hpp"

namespace signsep {

inline constexpr std::uint32_t kModelFormatVersion = 1;

/// Nearest-centroid baseline: softmax of negative Euclidean distance between
/// the mean-pooled window and each class centroid, divided by temperature.
struct CentroidModel {
  Matrix centroids;  // K x D
  double temperature = 1.0;
  friend bool operator==(const CentroidModel&, const CentroidModel&) = default;
};

struct RecurrentModel {
  GruNetwork network;
  friend bool operator==(const RecurrentModel&, const RecurrentModel&) = default;
};

enum class PredictorKind : std::uint8_t { Centroid = 1, Recurrent = 2 };

std::string to_string(PredictorKind kind);
PredictorKind parse_predictor_kind(const std::string& name);

struct PredictorModel {
  std::variant<CentroidModel, RecurrentModel> params;
  std::size_t num_classes = 0;
  Config config;
  std::uint32_t format_version = kModelFormatVersion;

  PredictorKind kind() const noexcept {
    return std::holds_alternative<CentroidModel>(params) ? PredictorKind::Centroid
                                                         : PredictorKind::Recurrent;
  }
  std::size_t input_dim() const noexcept;
  friend bool operator==(const PredictorModel&, const PredictorModel&) = default;
};

struct LabeledWindow {
  FeatureWindow window;
  ClassId label = 0;
};

ProbVector predict(const PredictorModel& model, const FeatureWindow& window);

struct EpochStats {
  std::int64_t epoch = 0;
  double learning_rate = 0.0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
  friend bool operator==(const EpochStats&, const EpochStats&) = default;
};

struct TrainReport {
  PredictorKind kind = PredictorKind::Recurrent;
  std::vector<EpochStats> epochs;
  std::int64_t stopped_epoch = 0;  // number of epochs actually run
  std::int64_t best_epoch = 0;     // epoch whose parameters were restored
  double final_train_accuracy = 0.0;
  double final_val_accuracy = 0.0;
  double final_test_accuracy = 0.0;  // filled in by the caller that holds the test split
  std::uint64_t seed = 0;
  friend bool operator==(const TrainReport&, const TrainReport&) = default;
};

struct TrainOptions {
  std::size_t hidden_dim = 64;
  std::int64_t patience = 10;
  // Smallest drop in the monitored loss that counts as an improvement.
  double min_delta = 1e-5;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct TrainResult {
  PredictorModel model;
  TrainReport report;
};

/// Step-decay schedule: learning_rate / lr_decay_factor^floor(epoch / lr_decay_every),
/// with 0-based epochs.
double learning_rate_at(const Config& cfg, std::int64_t epoch);

/// Trains a predictor on fixed-length labeled windows.
///
/// Recurrent: mini-batch cross-entropy with Adam (beta1 = cfg.momentum_beta1),
/// decoupled weight decay on weight matrices, the step-decay schedule above
/// and early stopping on validation loss that restores the best parameters.
/// Centroid: per-class means, then a temperature grid search that keeps the
/// best validation accuracy and breaks ties by validation log-loss.
///
/// Deterministic for a given cfg.seed. Throws EmptyClassError when a class in
/// [0, num_classes) has no training window and DivergenceError when the loss
/// stops being finite.
TrainResult train(std::span<const LabeledWindow> train_set, std::span<const LabeledWindow> val_set,
                  std::size_t num_classes, const Config& cfg, PredictorKind kind,
                  const TrainOptions& options = {});

/// Mean cross-entropy and argmax accuracy of `model` on `set`.
struct SetScore {
  double loss = 0.0;
  double accuracy = 0.0;
};
SetScore score(const PredictorModel& model, std::span<const LabeledWindow> set);

struct GradientCheckResult {
  double max_relative_error = 0.0;
  std::array<double, GruNetwork::kBlockCount> block_max_relative_error{};
};

/// Compares backpropagated gradients with central differences for every
/// recurrent parameter. Relative error is |a - n| / max(|a| + |n|, 1e-7).
GradientCheckResult gradient_check(const PredictorModel& model, const LabeledWindow& sample,
                                   double step = 1e-5);

void save_model(const PredictorModel& model, const std::filesystem::path& path);
PredictorModel load_model(const std::filesystem::path& path);

/// In-memory model container, the exact bytes save_model writes.
std::vector<std::uint8_t> serialize_model(const PredictorModel& model);
PredictorModel deserialize_model(std::span<const std::uint8_t> bytes);

}  // namespace signsep
