#include "signsep/core.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace signsep {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    throw DimensionError(fmt::format("matrix {}x{} needs {} values, got {}", rows, cols,
                                     rows * cols, values_.size()));
  }
}

ClassId ProbVector::argmax() const noexcept {
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs_.size(); ++i) {
    if (probs_[i] > probs_[best]) best = i;
  }
  return static_cast<ClassId>(best);
}

std::string decision_tag(const Decision& d) {
  if (std::holds_alternative<Accept>(d)) return "accept";
  return std::get<Blank>(d).reason == BlankReason::BelowThreshold ? "blank_below" : "blank_dup";
}

void Config::validate() const {
  if (window_size < 1) throw ConfigError("window_size must be >= 1");
  if (stride < 1) throw ConfigError("stride must be >= 1");
  if (!(threshold > 0.5 && threshold < 1.0)) {
    throw ConfigError(fmt::format("threshold must lie in (0.5, 1), got {}", threshold));
  }
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train_fraction must lie in (0, 1)");
  }
  if (num_singular_values < 1) throw ConfigError("num_singular_values must be >= 1");
  if (keypoints_per_hand != static_cast<std::int64_t>(kKeypointsPerHand)) {
    throw ConfigError("keypoints_per_hand must be 21");
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate must be positive");
  }
  if (lr_decay_every < 1) throw ConfigError("lr_decay_every must be >= 1");
  if (!(lr_decay_factor >= 1.0)) throw ConfigError("lr_decay_factor must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
  if (!(weight_decay >= 0.0)) throw ConfigError("weight_decay must be >= 0");
  if (!(momentum_beta1 >= 0.0 && momentum_beta1 < 1.0)) {
    throw ConfigError("momentum_beta1 must lie in [0, 1)");
  }
}

const KeypointFrame& validate_frame(const KeypointFrame& frame) {
  if (frame.hands.empty() || frame.hands.size() > 2) {
    throw DimensionError(fmt::format("frame {}: expected 1 or 2 hands, got {}",
                                     frame.timestamp_index, frame.hands.size()));
  }
  for (std::size_t h = 0; h < frame.hands.size(); ++h) {
    const Matrix& m = frame.hands[h];
    if (m.rows() != kKeypointsPerHand || m.cols() != kCoordsPerKeypoint) {
      throw DimensionError(fmt::format("frame {}: hand {} is {}x{}, expected 21x3",
                                       frame.timestamp_index, h, m.rows(), m.cols()));
    }
    for (double v : m.values()) {
      if (!std::isfinite(v)) {
        throw NonFiniteError(fmt::format("frame {}: hand {} has a non-finite coordinate",
                                         frame.timestamp_index, h));
      }
    }
  }
  return frame;
}

void validate_frames(std::span<const KeypointFrame> frames) {
  if (frames.empty()) return;
  const std::size_t hands = frames.front().hand_count();
  for (const auto& f : frames) {
    validate_frame(f);
    if (f.hand_count() != hands) {
      throw HandCountMismatchError(fmt::format("frame {} has {} hands, sequence uses {}",
                                               f.timestamp_index, f.hand_count(), hands));
    }
  }
}

ProbVector validate_prob(std::vector<double> raw) {
  if (raw.empty()) throw SimplexError("probability vector is empty");
  double sum = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double p = raw[i];
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      throw SimplexError(fmt::format("entry {} = {} outside [0, 1]", i, p));
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSimplexTolerance) {
    throw SimplexError(fmt::format("entries sum to {}, expected 1", sum));
  }
  return ProbVector(std::move(raw));
}

ProbVector softmax(std::span<const double> logits) {
  if (logits.empty()) throw SimplexError("softmax over empty logits");
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - top);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return validate_prob(std::move(p));
}

}  // namespace signsep
