#include "signsep/synthgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "signsep/features.hpp"
#include "signsep/preprocess.hpp"
#include "signsep/rng.hpp"

namespace signsep {

namespace {

constexpr int kMaxPrototypeAttempts = 64;

// Extent ranges of the three principal axes of a hand, before scaling by sqrt(21).
constexpr std::array<std::array<double, 2>, 3> kExtentRange = {{{0.8, 1.6}, {0.40, 0.75}, {0.10, 0.35}}};

using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 rotation(const std::array<double, 3>& axis, double angle) {
  const double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
  const double x = axis[0], y = axis[1], z = axis[2];
  return {{{t * x * x + c, t * x * y - s * z, t * x * z + s * y},
           {t * x * y + s * z, t * y * y + c, t * y * z - s * x},
           {t * x * z - s * y, t * y * z + s * x, t * z * z + c}}};
}

// Centered 21x3 template with orthogonal columns of squared norm 21, scaled
// per column by `extent`; its singular values are sqrt(21) * extent.
Matrix hand_template(Rng& rng, const std::array<double, 3>& extent) {
  Matrix m(kKeypointsPerHand, 3);
  for (double& v : m.values()) v = rng.normal();
  const Matrix centered = center_rows(m);
  m = centered;
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t p = 0; p < c; ++p) {
      double dot = 0.0;
      for (std::size_t r = 0; r < m.rows(); ++r) dot += m(r, c) * m(r, p);
      for (std::size_t r = 0; r < m.rows(); ++r) m(r, c) -= dot * m(r, p);
    }
    double norm = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) norm += m(r, c) * m(r, c);
    norm = std::sqrt(norm);
    for (std::size_t r = 0; r < m.rows(); ++r) m(r, c) /= norm;
  }
  const double scale = std::sqrt(static_cast<double>(kKeypointsPerHand));
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < 3; ++c) m(r, c) *= scale * extent[c];
  return m;
}

Prototype make_prototype(std::uint64_t seed, std::size_t hands,
                         const std::vector<std::array<double, 3>>& extents, int attempt) {
  Rng rng(seed);
  Prototype p;
  const double speed = rng.uniform(0.1, 0.5);           // global travel over the sign
  const double deform = rng.uniform(0.02, 0.08);        // per-keypoint shape drift
  std::array<double, 3> dir{rng.normal(), rng.normal(), rng.normal()};
  const double dn = std::sqrt(dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]);
  for (double& d : dir) d /= dn;
  const double curve = rng.uniform(-0.5, 0.5);

  for (std::size_t h = 0; h < hands; ++h) {
    std::array<double, 3> ext = extents[h];
    if (attempt > 0) {
      for (double& e : ext) e *= 1.0 + 0.1 * rng.uniform(-1.0, 1.0);
    }
    Matrix base = hand_template(rng, ext);
    // Hands sit side by side.
    for (std::size_t r = 0; r < base.rows(); ++r) base(r, 0) += h == 0 ? -1.0 : 1.0;
    Matrix lin(kKeypointsPerHand, 3), quad(kKeypointsPerHand, 3);
    for (std::size_t r = 0; r < lin.rows(); ++r) {
      for (std::size_t c = 0; c < 3; ++c) {
        lin(r, c) = speed * dir[c] + deform * rng.normal();
        quad(r, c) = curve * speed * dir[(c + 1) % 3] + 0.5 * deform * rng.normal();
      }
    }
    p.base.push_back(std::move(base));
    p.linear.push_back(std::move(lin));
    p.quadratic.push_back(std::move(quad));
  }
  return p;
}

double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sq += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(sq);
}

}  // namespace

void SynthSpec::validate() const {
  if (num_classes < 2) throw ConfigError("synth: at least 2 classes are required");
  if (samples_per_class < 1) throw ConfigError("synth: samples_per_class must be >= 1");
  if (min_length < 2 || max_length < min_length) throw ConfigError("synth: invalid length range");
  if (!(noise_sigma >= 0.0)) throw ConfigError("synth: noise_sigma must be >= 0");
  if (!(rotation_jitter_deg >= 0.0)) throw ConfigError("synth: rotation jitter must be >= 0");
  if (!(translation_jitter >= 0.0)) throw ConfigError("synth: translation jitter must be >= 0");
  if (hands != 1 && hands != 2) throw ConfigError("synth: hands must be 1 or 2");
}

KeypointFrame Prototype::frame_at(double tau, std::size_t index) const {
  KeypointFrame f;
  f.timestamp_index = index;
  for (std::size_t h = 0; h < base.size(); ++h) {
    Matrix m = base[h];
    auto v = m.values();
    auto l = linear[h].values();
    auto q = quadratic[h].values();
    for (std::size_t k = 0; k < v.size(); ++k) v[k] += tau * l[k] + tau * tau * q[k];
    f.hands.push_back(std::move(m));
  }
  return f;
}

std::vector<KeypointFrame> Prototype::sample(std::size_t length) const {
  std::vector<KeypointFrame> frames;
  frames.reserve(length);
  for (std::size_t i = 0; i < length; ++i) {
    const double tau = length == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(length - 1);
    frames.push_back(frame_at(tau, i));
  }
  return frames;
}

std::vector<double> prototype_mean_features(const Prototype& proto, std::size_t length) {
  const auto feats = sequence_features(proto.sample(length));
  std::vector<double> mean(feats.front().values.size(), 0.0);
  for (const auto& f : feats)
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += f.values[i];
  for (double& v : mean) v /= static_cast<double>(feats.size());
  return mean;
}

SynthDataset generate(const SynthSpec& spec) {
  spec.validate();
  const std::size_t k = spec.num_classes;

  // Stratified extent levels, independently permuted per hand and axis, so
  // no two classes share a level on any axis.
  Rng layout(mix_seed(spec.seed, 0xE7));
  std::vector<std::vector<std::array<double, 3>>> extents(k, std::vector<std::array<double, 3>>(spec.hands));
  for (std::size_t h = 0; h < spec.hands; ++h) {
    for (std::size_t axis = 0; axis < 3; ++axis) {
      std::vector<std::size_t> levels(k);
      for (std::size_t i = 0; i < k; ++i) levels[i] = i;
      layout.shuffle(std::span<std::size_t>(levels));
      const auto [lo, hi] = kExtentRange[axis];
      for (std::size_t c = 0; c < k; ++c) {
        extents[c][h][axis] = lo + (hi - lo) * (static_cast<double>(levels[c]) + 0.5) / static_cast<double>(k);
      }
    }
  }

  SynthDataset out;
  out.hands = spec.hands;
  const double margin = 5.0 * spec.noise_sigma;
  std::vector<std::vector<double>> means;
  for (std::size_t c = 0; c < k; ++c) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxPrototypeAttempts && !placed; ++attempt) {
      const std::uint64_t sub = mix_seed(mix_seed(spec.seed, c), static_cast<std::uint64_t>(attempt));
      Prototype proto = make_prototype(sub, spec.hands, extents[c], attempt);
      std::vector<double> mean = prototype_mean_features(proto);
      const bool separated = std::all_of(means.begin(), means.end(),
                                         [&](const auto& other) { return distance(mean, other) >= margin; });
      if (separated) {
        out.prototypes.push_back(std::move(proto));
        means.push_back(std::move(mean));
        placed = true;
      }
    }
    if (!placed) {
      throw SeparationFailureError(fmt::format("class {} could not be separated by {} after {} attempts",
                                               c, margin, kMaxPrototypeAttempts));
    }
    out.class_names.push_back(fmt::format("sign_{:03}", c));
  }

  const double max_angle = spec.rotation_jitter_deg * std::numbers::pi / 180.0;
  for (std::size_t c = 0; c < k; ++c) {
    Rng rng(mix_seed(mix_seed(spec.seed, c), 0x5A3D1E));
    for (std::size_t s = 0; s < spec.samples_per_class; ++s) {
      const auto len = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(spec.min_length),
                                                                static_cast<std::int64_t>(spec.max_length)));
      std::array<double, 3> axis{rng.normal(), rng.normal(), rng.normal()};
      const double an = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
      for (double& a : axis) a /= an;
      const Mat3 rot = rotation(axis, rng.uniform(-max_angle, max_angle));
      const std::array<double, 3> shift{rng.uniform(-1.0, 1.0) * spec.translation_jitter,
                                        rng.uniform(-1.0, 1.0) * spec.translation_jitter,
                                        rng.uniform(-1.0, 1.0) * spec.translation_jitter};

      SignClip clip;
      clip.label = static_cast<ClassId>(c);
      clip.source_id = fmt::format("synth/c{:03}/s{:03}", c, s);
      clip.frames = out.prototypes[c].sample(len);
      for (auto& frame : clip.frames) {
        for (auto& hand : frame.hands) {
          for (std::size_t r = 0; r < hand.rows(); ++r) {
            const double x = hand(r, 0), y = hand(r, 1), z = hand(r, 2);
            for (std::size_t i = 0; i < 3; ++i) {
              double v = rot[i][0] * x + rot[i][1] * y + rot[i][2] * z + shift[i];
              if (spec.noise_sigma > 0.0) v += spec.noise_sigma * rng.normal();
              hand(r, i) = v;
            }
          }
        }
      }
      out.clips.push_back(std::move(clip));
    }
  }
  return out;
}

std::vector<ContinuousStream> build_continuous_suite(std::span<const SignClip> held_out,
                                                     std::size_t num_classes, std::size_t streams_n,
                                                     std::uint64_t seed) {
  std::vector<std::vector<const SignClip*>> pool(num_classes);
  for (const auto& clip : held_out) {
    if (clip.label < 0 || static_cast<std::size_t>(clip.label) >= num_classes) {
      throw OutOfRangeError(fmt::format("held-out clip label {} outside [0, {})", clip.label, num_classes));
    }
    pool[static_cast<std::size_t>(clip.label)].push_back(&clip);
  }
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (pool[c].empty()) throw InsufficientHeldOutError(fmt::format("class {} has no held-out clip", c));
    Rng rng(mix_seed(seed, c));
    rng.shuffle(std::span<const SignClip*>(pool[c]));
  }

  std::vector<ContinuousStream> streams;
  streams.reserve(streams_n);
  for (std::size_t s = 0; s < streams_n; ++s) {
    std::vector<std::size_t> order(num_classes);
    for (std::size_t c = 0; c < num_classes; ++c) order[c] = c;
    Rng rng(mix_seed(seed, 0x100000 + s));
    rng.shuffle(std::span<std::size_t>(order));

    std::vector<SignClip> clips;
    clips.reserve(num_classes);
    for (std::size_t c : order) clips.push_back(*pool[c][s % pool[c].size()]);
    ContinuousStream stream = concat_clips(clips);
    stream.stream_id = fmt::format("stream_{:03}", s + 1);
    streams.push_back(std::move(stream));
  }
  return streams;
}

}  // namespace signsep
