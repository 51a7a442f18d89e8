#include "signsep/features.hpp"

#include <fmt/format.h>

#include "signsep/svd.hpp"

namespace signsep {

Matrix center_rows(const Matrix& keypoints) {
  Matrix out = keypoints;
  for (std::size_t c = 0; c < out.cols(); ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < out.rows(); ++r) mean += out(r, c);
    mean /= static_cast<double>(out.rows());
    for (std::size_t r = 0; r < out.rows(); ++r) out(r, c) -= mean;
  }
  return out;
}

FeatureVector frame_features(const KeypointFrame& cur, const KeypointFrame* prev, std::size_t dim) {
  validate_frame(cur);
  const std::size_t hands = cur.hand_count();
  if (prev != nullptr && prev->hand_count() != hands) {
    throw HandCountMismatchError(fmt::format("frame {} has {} hands but its predecessor has {}",
                                             cur.timestamp_index, hands, prev->hand_count()));
  }
  if (dim < 6 * hands) {
    throw ConfigError(fmt::format("feature dimension {} cannot hold {} hand(s)", dim, hands));
  }

  FeatureVector out;
  out.frame_index = cur.timestamp_index;
  out.values.assign(dim, 0.0);
  std::size_t slot = 0;
  for (std::size_t h = 0; h < hands; ++h) {
    const Matrix& pose = cur.hands[h];
    for (double sv : singular_values(center_rows(pose))) out.values[slot++] = sv;
    if (prev != nullptr) {
      Matrix disp = pose;
      auto d = disp.values();
      auto p = prev->hands[h].values();
      for (std::size_t k = 0; k < d.size(); ++k) d[k] -= p[k];
      for (double sv : singular_values(disp)) out.values[slot++] = sv;
    } else {
      slot += kCoordsPerKeypoint;
    }
  }
  return out;
}

std::vector<FeatureVector> sequence_features(std::span<const KeypointFrame> frames, std::size_t dim) {
  std::vector<FeatureVector> out;
  out.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    out.push_back(frame_features(frames[i], i == 0 ? nullptr : &frames[i - 1], dim));
  }
  return out;
}

FeatureWindow extract_window(std::span<const FeatureVector> features, std::size_t start,
                             std::size_t window_size) {
  if (window_size == 0 || start + window_size > features.size()) {
    throw OutOfRangeError(fmt::format("window [{}, {}) exceeds {} feature rows", start,
                                      start + window_size, features.size()));
  }
  const std::size_t dim = features[start].values.size();
  FeatureWindow w{Matrix(window_size, dim), start};
  for (std::size_t r = 0; r < window_size; ++r) {
    const auto& row = features[start + r].values;
    if (row.size() != dim) throw DimensionMismatchError("feature rows differ in dimension");
    for (std::size_t c = 0; c < dim; ++c) w.matrix(r, c) = row[c];
  }
  return w;
}

}  // namespace signsep
