#pragma once

// Small builders shared by the unit and acceptance tests.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "signsep/core.hpp"
#include "signsep/decoder.hpp"
#include "signsep/rng.hpp"

namespace testsupport {

using signsep::ClassId;
using signsep::KeypointFrame;
using signsep::Matrix;
using signsep::ProbVector;
using signsep::Rng;
using signsep::SignClip;
using signsep::WindowProbability;

inline Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, double scale = 1.0) {
  Matrix m(rows, cols);
  for (double& v : m.values()) v = scale * rng.normal();
  return m;
}

inline KeypointFrame random_frame(Rng& rng, std::size_t hands = 2, std::size_t index = 0) {
  KeypointFrame f;
  for (std::size_t h = 0; h < hands; ++h) f.hands.push_back(random_matrix(rng, 21, 3, 0.1));
  f.timestamp_index = index;
  return f;
}

inline SignClip random_clip(Rng& rng, std::size_t length, ClassId label, std::size_t hands = 2) {
  SignClip c;
  c.label = label;
  for (std::size_t i = 0; i < length; ++i) c.frames.push_back(random_frame(rng, hands, i));
  return c;
}

// Every coordinate of frame t equals t (plus a per-coordinate offset).
inline SignClip ramp_clip(std::size_t length, std::size_t hands = 1) {
  SignClip c;
  for (std::size_t t = 0; t < length; ++t) {
    KeypointFrame f;
    for (std::size_t h = 0; h < hands; ++h) {
      Matrix m(21, 3);
      for (std::size_t r = 0; r < 21; ++r)
        for (std::size_t k = 0; k < 3; ++k) m(r, k) = static_cast<double>(t) + 0.01 * static_cast<double>(r * 3 + k);
      f.hands.push_back(std::move(m));
    }
    f.timestamp_index = t;
    c.frames.push_back(std::move(f));
  }
  return c;
}

// A point of the simplex. `peak` controls how concentrated it is; larger
// values make one entry dominate more often.
inline ProbVector random_prob(Rng& rng, std::size_t k, double peak = 1.0) {
  std::vector<double> logits(k);
  for (double& v : logits) v = peak * rng.normal();
  return signsep::softmax(logits);
}

inline ProbVector one_hot(std::size_t k, std::size_t cls, double mass) {
  std::vector<double> p(k, (1.0 - mass) / static_cast<double>(k - 1));
  p[cls] = mass;
  return signsep::validate_prob(p);
}

inline ProbVector uniform(std::size_t k) {
  return signsep::validate_prob(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

inline std::vector<WindowProbability> random_sequence(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<WindowProbability> seq;
  seq.reserve(n);
  // Mix flat and peaked windows so every decision kind shows up.
  for (std::size_t i = 0; i < n; ++i) {
    const double peak = rng.uniform01() < 0.5 ? 0.5 : 6.0;
    seq.push_back({i, random_prob(rng, k, peak)});
  }
  return seq;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("signsep_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testsupport
