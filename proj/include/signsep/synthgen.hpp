#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "signsep/core.hpp"

namespace signsep {

struct SynthSpec {
  std::size_t num_classes = 20;
  std::size_t samples_per_class = 30;
  std::size_t min_length = 30;
  std::size_t max_length = 80;
  double noise_sigma = 0.01;
  double rotation_jitter_deg = 5.0;
  double translation_jitter = 0.05;
  std::size_t hands = 2;
  std::uint64_t seed = 7;

  /// Throws ConfigError on an unusable spec.
  void validate() const;
};

/// Noise-free class trajectory. Every keypoint follows a quadratic in
/// normalized time tau in [0, 1]: base + tau * linear + tau^2 * quadratic.
struct Prototype {
  std::vector<Matrix> base;       // per hand, 21x3
  std::vector<Matrix> linear;     // per hand
  std::vector<Matrix> quadratic;  // per hand

  KeypointFrame frame_at(double tau, std::size_t index) const;
  /// The prototype sampled at `length` uniformly spaced times.
  std::vector<KeypointFrame> sample(std::size_t length) const;
};

struct SynthDataset {
  std::vector<SignClip> clips;  // grouped by class, samples in generation order
  std::vector<std::string> class_names;
  std::vector<Prototype> prototypes;
  std::size_t hands = 2;
};

/// Deterministic synthetic isolated-sign corpus. Class prototypes differ in
/// hand extents (so pose singular values separate them) and motion speed;
/// each sample is the prototype at a random length plus Gaussian noise, a
/// small rigid rotation and a translation. Prototypes are regenerated until
/// their mean feature vectors are pairwise at least 5 * noise_sigma apart;
/// throws SeparationFailureError if that does not happen within the retry
/// budget.
SynthDataset generate(const SynthSpec& spec);

/// Mean per-frame feature vector of a prototype sampled at `length` frames.
std::vector<double> prototype_mean_features(const Prototype& proto, std::size_t length = 50);

/// Builds `streams_n` continuous streams, each holding one held-out clip of
/// every class in a seeded random order. Classes with fewer held-out clips
/// than streams reuse them cyclically. Throws InsufficientHeldOutError when
/// a class in [0, num_classes) has no clip at all.
std::vector<ContinuousStream> build_continuous_suite(std::span<const SignClip> held_out,
                                                     std::size_t num_classes, std::size_t streams_n,
                                                     std::uint64_t seed);

}  // namespace signsep
