#pragma once

#include <optional>
#include <span>
#include <vector>

#include "signsep/core.hpp"

namespace signsep {

inline constexpr std::size_t kDefaultFeatureDim = 12;

/// Per-frame descriptor. Layout per hand: 3 singular values of the
/// centroid-centered keypoint matrix, then 3 singular values of the raw
/// displacement from the previous frame. One-hand frames are zero padded.
struct FeatureVector {
  std::vector<double> values;
  std::size_t frame_index = 0;
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// window_size x D block of consecutive feature rows.
struct FeatureWindow {
  Matrix matrix;
  std::size_t start_frame = 0;

  std::size_t rows() const noexcept { return matrix.rows(); }
  std::size_t dim() const noexcept { return matrix.cols(); }
};

/// Keypoints minus their centroid row.
Matrix center_rows(const Matrix& keypoints);

FeatureVector frame_features(const KeypointFrame& cur, const KeypointFrame* prev,
                             std::size_t dim = kDefaultFeatureDim);

inline FeatureVector frame_features(const KeypointFrame& cur,
                                    const std::optional<KeypointFrame>& prev,
                                    std::size_t dim = kDefaultFeatureDim) {
  return frame_features(cur, prev ? &*prev : nullptr, dim);
}

/// Features for a frame sequence; frame 0 has no predecessor, every later
/// frame uses the one before it.
std::vector<FeatureVector> sequence_features(std::span<const KeypointFrame> frames,
                                             std::size_t dim = kDefaultFeatureDim);

/// Copies rows [start, start + window_size). Throws OutOfRangeError when the
/// window does not fit.
FeatureWindow extract_window(std::span<const FeatureVector> features, std::size_t start,
                             std::size_t window_size);

}  // namespace signsep
