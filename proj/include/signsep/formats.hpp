#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "signsep/core.hpp"
#include "signsep/decoder.hpp"
#include "signsep/features.hpp"
#include "signsep/predictor.hpp"

namespace signsep {

inline constexpr int kManifestFormatVersion = 1;

struct ManifestEntry {
  std::string path;  // relative to the manifest's directory
  ClassId label = 0;
  std::size_t length = 0;
  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

/// Key-value dataset description:
///
///   format_version = 1
///   num_classes = 20
///   hands_per_frame = 2
///   class.0 = sign_000
///   clip = clips/c000_s000.jsonl 0 57
struct DatasetManifest {
  int format_version = kManifestFormatVersion;
  std::size_t num_classes = 0;
  std::size_t hands_per_frame = 0;
  std::vector<std::string> class_names;
  std::vector<ManifestEntry> clips;
  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

/// Throws ParseError with a "name:line:" prefix on malformed input.
DatasetManifest parse_manifest(std::istream& in, const std::string& source_name = "manifest");
void write_manifest(std::ostream& out, const DatasetManifest& manifest);

struct Dataset {
  DatasetManifest manifest;
  std::vector<SignClip> clips;
};

/// Reads `dir`/manifest.txt and every listed clip, checking labels, lengths
/// and the declared hand count.
Dataset load_dataset(const std::filesystem::path& dir);
void save_dataset(const std::filesystem::path& dir, std::span<const SignClip> clips,
                  std::span<const std::string> class_names, std::size_t hands_per_frame);

/// Keypoint files hold one JSON object per line:
///   {"frame":0,"hands":[[x0,y0,z0,...,x20,y20,z20],[...]]}
/// Coordinates are written with 9 fractional digits.
std::string format_keypoint_line(const KeypointFrame& frame);
KeypointFrame parse_keypoint_line(const std::string& line);
void write_keypoints(std::ostream& out, std::span<const KeypointFrame> frames);
std::vector<KeypointFrame> read_keypoints(std::istream& in, const std::string& source_name = "keypoints");
void save_keypoints(const std::filesystem::path& path, std::span<const KeypointFrame> frames);
std::vector<KeypointFrame> load_keypoints(const std::filesystem::path& path);

/// Probability dump: one row per window with
///   window_start,decision,argmax,max_prob,p0..p{K-1}
/// after a "# signsep prob-dump v1 ..." header line.
struct ProbDump {
  std::size_t num_classes = 0;
  std::size_t window_size = 0;
  std::size_t stride = 0;
  double threshold = 0.0;
  std::vector<WindowProbability> windows;
  std::vector<std::string> recorded_tags;
};

void write_prob_dump(std::ostream& out, const Transcript& transcript,
                     std::span<const WindowProbability> probs, const Config& cfg);
/// Probabilities are renormalized after parsing to absorb the 6-digit rounding.
ProbDump read_prob_dump(std::istream& in, const std::string& source_name = "prob-dump");

void write_ground_truth(std::ostream& out, std::span<const Segment> segments);
std::vector<Segment> read_ground_truth(std::istream& in, const std::string& source_name = "ground-truth");

/// frame_index followed by the feature values with 9 fractional digits.
void write_feature_dump(std::ostream& out, std::span<const FeatureVector> features);

void write_train_report(std::ostream& out, const TrainReport& report);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace signsep
