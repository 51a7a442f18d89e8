#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "signsep/errors.hpp"

namespace signsep {

inline constexpr std::size_t kKeypointsPerHand = 21;
inline constexpr std::size_t kCoordsPerKeypoint = 3;
inline constexpr double kSimplexTolerance = 1e-6;

/// Dense class identifier in [0, K).
using ClassId = std::int32_t;

/// Row-major dense real matrix. Used for hand keypoint matrices (21x3) and
/// for small linear-algebra work in the feature extractor.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// Hand landmarks of one video frame: one or two 21x3 matrices.
struct KeypointFrame {
  std::vector<Matrix> hands;
  std::size_t timestamp_index = 0;

  std::size_t hand_count() const noexcept { return hands.size(); }
  friend bool operator==(const KeypointFrame&, const KeypointFrame&) = default;
};

/// An isolated sign: a labeled frame sequence.
struct SignClip {
  std::vector<KeypointFrame> frames;
  ClassId label = 0;
  std::string source_id;
};

/// Ground-truth span of one sign inside a continuous stream, inclusive bounds.
struct Segment {
  ClassId label = 0;
  std::size_t start_frame = 0;
  std::size_t end_frame = 0;

  std::size_t length() const noexcept { return end_frame - start_frame + 1; }
  friend bool operator==(const Segment&, const Segment&) = default;
};

/// Unlabeled concatenation of isolated signs. Ground truth is carried along
/// for evaluation only and never consulted by the decoder.
struct ContinuousStream {
  std::string stream_id;
  std::vector<KeypointFrame> frames;
  std::optional<std::vector<Segment>> ground_truth;
};

/// A point of the probability simplex. Only constructible through
/// validate_prob() or make_prob(), so every instance satisfies the invariants.
class ProbVector {
 public:
  std::span<const double> probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }

  /// Index of the largest entry; ties go to the lowest index.
  ClassId argmax() const noexcept;
  double max() const noexcept { return probs_[static_cast<std::size_t>(argmax())]; }

  friend bool operator==(const ProbVector&, const ProbVector&) = default;

 private:
  explicit ProbVector(std::vector<double> p) : probs_(std::move(p)) {}
  friend ProbVector validate_prob(std::vector<double> raw);

  std::vector<double> probs_;
};

enum class BlankReason { BelowThreshold, DuplicateSuppressed };

struct Accept {
  ClassId cls = 0;
  double confidence = 0.0;
  friend bool operator==(const Accept&, const Accept&) = default;
};

struct Blank {
  BlankReason reason = BlankReason::BelowThreshold;
  friend bool operator==(const Blank&, const Blank&) = default;
};

using Decision = std::variant<Accept, Blank>;

/// Outcome of classifying one sliding-window position.
struct DecodeEvent {
  std::size_t window_start = 0;
  Decision decision;
  double max_prob = 0.0;
  ClassId argmax_class = 0;

  bool is_accept() const noexcept { return std::holds_alternative<Accept>(decision); }
  friend bool operator==(const DecodeEvent&, const DecodeEvent&) = default;
};

/// Short machine tag for a decision: "accept", "blank_below" or "blank_dup".
std::string decision_tag(const Decision& d);

/// Pipeline configuration. Defaults are the published model parameters.
struct Config {
  std::int64_t window_size = 50;
  std::int64_t stride = 1;
  double threshold = 0.51;
  std::int64_t num_singular_values = 12;
  std::int64_t keypoints_per_hand = 21;
  double learning_rate = 0.005;
  std::int64_t lr_decay_every = 10;
  double lr_decay_factor = 10.0;
  std::int64_t batch_size = 50;
  std::int64_t max_epochs = 200;
  double weight_decay = 1e-4;
  double momentum_beta1 = 0.92;
  double train_fraction = 0.8;
  std::int64_t seed = 0;

  /// Throws ConfigError when an invariant does not hold.
  void validate() const;

  friend bool operator==(const Config&, const Config&) = default;
};

/// Returns the frame unchanged when each hand is a finite 21x3 matrix.
/// Throws DimensionError or NonFiniteError otherwise.
const KeypointFrame& validate_frame(const KeypointFrame& frame);

/// Checks a whole frame sequence, including a constant hand count.
void validate_frames(std::span<const KeypointFrame> frames);

/// Builds a ProbVector; throws SimplexError unless every entry is in [0, 1]
/// and the entries sum to 1 within kSimplexTolerance.
ProbVector validate_prob(std::vector<double> raw);

/// Numerically stable softmax over logits.
ProbVector softmax(std::span<const double> logits);

}  // namespace signsep
