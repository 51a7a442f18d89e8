#include "signsep/formats.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"

namespace signsep {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void parse_fail(const std::string& source, std::size_t line, const std::string& msg) {
  throw ParseError(fmt::format("{}:{}: {}", source, line, msg));
}

template <typename T>
bool parse_number(const std::string& text, T& out) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

// "key=value" fields of a "# signsep ... v1 key=value ..." header.
std::optional<std::string> header_field(const std::string& header, const std::string& key) {
  for (const auto& tok : split_ws(header)) {
    const auto eq = tok.find('=');
    if (eq != std::string::npos && tok.substr(0, eq) == key) return tok.substr(eq + 1);
  }
  return std::nullopt;
}

}  // namespace

DatasetManifest parse_manifest(std::istream& in, const std::string& source) {
  DatasetManifest m;
  m.format_version = 0;
  bool have_classes = false, have_hands = false;
  std::vector<std::optional<std::string>> names;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) parse_fail(source, line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "format_version") {
      if (!parse_number(value, m.format_version)) parse_fail(source, line_no, "format_version must be an integer");
      if (m.format_version != kManifestFormatVersion) {
        parse_fail(source, line_no, fmt::format("unsupported manifest format_version {}", m.format_version));
      }
    } else if (key == "num_classes") {
      if (!parse_number(value, m.num_classes) || m.num_classes < 2) {
        parse_fail(source, line_no, "num_classes must be an integer >= 2");
      }
      have_classes = true;
      names.resize(m.num_classes);
    } else if (key == "hands_per_frame") {
      if (!parse_number(value, m.hands_per_frame) || (m.hands_per_frame != 1 && m.hands_per_frame != 2)) {
        parse_fail(source, line_no, "hands_per_frame must be 1 or 2");
      }
      have_hands = true;
    } else if (key.rfind("class.", 0) == 0) {
      if (!have_classes) parse_fail(source, line_no, "class names must follow num_classes");
      std::size_t idx = 0;
      if (!parse_number(key.substr(6), idx) || idx >= m.num_classes) {
        parse_fail(source, line_no, fmt::format("bad class index in '{}'", key));
      }
      if (value.empty()) parse_fail(source, line_no, "empty class name");
      names[idx] = value;
    } else if (key == "clip") {
      const auto fields = split_ws(value);
      ManifestEntry e;
      long long label = -1;
      if (fields.size() != 3 || !parse_number(fields[1], label) || !parse_number(fields[2], e.length)) {
        parse_fail(source, line_no, "clip entry must be '<path> <label> <length>'");
      }
      if (!have_classes || label < 0 || static_cast<std::size_t>(label) >= m.num_classes) {
        parse_fail(source, line_no, fmt::format("clip label {} out of range", label));
      }
      if (e.length == 0) parse_fail(source, line_no, "clip length must be positive");
      e.path = fields[0];
      e.label = static_cast<ClassId>(label);
      m.clips.push_back(std::move(e));
    } else {
      parse_fail(source, line_no, fmt::format("unknown key '{}'", key));
    }
  }
  if (m.format_version == 0) parse_fail(source, line_no, "missing format_version");
  if (!have_classes) parse_fail(source, line_no, "missing num_classes");
  if (!have_hands) parse_fail(source, line_no, "missing hands_per_frame");
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!names[i]) parse_fail(source, line_no, fmt::format("missing name for class {}", i));
    m.class_names.push_back(*names[i]);
  }
  return m;
}

void write_manifest(std::ostream& out, const DatasetManifest& m) {
  out << "# signsep dataset manifest\n";
  out << "format_version = " << m.format_version << "\n";
  out << "num_classes = " << m.num_classes << "\n";
  out << "hands_per_frame = " << m.hands_per_frame << "\n";
  for (std::size_t i = 0; i < m.class_names.size(); ++i) out << "class." << i << " = " << m.class_names[i] << "\n";
  for (const auto& c : m.clips) out << "clip = " << c.path << " " << c.label << " " << c.length << "\n";
}

Dataset load_dataset(const fs::path& dir) {
  const fs::path manifest_path = dir / "manifest.txt";
  std::ifstream in(manifest_path);
  if (!in) throw IoError(fmt::format("cannot open manifest '{}'", manifest_path.string()));
  Dataset ds;
  ds.manifest = parse_manifest(in, manifest_path.string());
  ds.clips.reserve(ds.manifest.clips.size());
  for (const auto& entry : ds.manifest.clips) {
    SignClip clip;
    clip.label = entry.label;
    clip.source_id = entry.path;
    clip.frames = load_keypoints(dir / entry.path);
    if (clip.frames.size() != entry.length) {
      throw ParseError(fmt::format("{}: manifest declares {} frames, file has {}", entry.path, entry.length,
                                   clip.frames.size()));
    }
    for (const auto& f : clip.frames) {
      if (f.hand_count() != ds.manifest.hands_per_frame) {
        throw HandCountMismatchError(fmt::format("{}: frame {} has {} hands, dataset declares {}", entry.path,
                                                 f.timestamp_index, f.hand_count(),
                                                 ds.manifest.hands_per_frame));
      }
    }
    ds.clips.push_back(std::move(clip));
  }
  return ds;
}

void save_dataset(const fs::path& dir, std::span<const SignClip> clips, std::span<const std::string> class_names,
                  std::size_t hands_per_frame) {
  std::error_code ec;
  fs::create_directories(dir / "clips", ec);
  if (ec) throw IoError(fmt::format("cannot create '{}': {}", (dir / "clips").string(), ec.message()));

  DatasetManifest m;
  m.num_classes = class_names.size();
  m.hands_per_frame = hands_per_frame;
  m.class_names.assign(class_names.begin(), class_names.end());
  std::vector<std::size_t> per_class(class_names.size(), 0);
  for (const auto& clip : clips) {
    const auto label = static_cast<std::size_t>(clip.label);
    const std::string rel = fmt::format("clips/c{:03}_s{:03}.jsonl", label, per_class.at(label)++);
    save_keypoints(dir / rel, clip.frames);
    m.clips.push_back({rel, clip.label, clip.frames.size()});
  }
  std::ostringstream out;
  write_manifest(out, m);
  write_text_file(dir / "manifest.txt", out.str());
}

std::string format_keypoint_line(const KeypointFrame& frame) {
  std::string out = fmt::format("{{\"frame\":{},\"hands\":[", frame.timestamp_index);
  for (std::size_t h = 0; h < frame.hands.size(); ++h) {
    if (h > 0) out += ',';
    out += '[';
    const auto v = frame.hands[h].values();
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i > 0) out += ',';
      out += fmt::format("{:.9f}", v[i]);
    }
    out += ']';
  }
  out += "]}";
  return out;
}

KeypointFrame parse_keypoint_line(const std::string& line) {
  const auto j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ParseError("keypoint record is not a JSON object");
  if (!j.contains("frame") || !j["frame"].is_number_unsigned()) throw ParseError("keypoint record lacks 'frame'");
  if (!j.contains("hands") || !j["hands"].is_array()) throw ParseError("keypoint record lacks 'hands'");
  KeypointFrame f;
  f.timestamp_index = j["frame"].get<std::size_t>();
  for (const auto& hand : j["hands"]) {
    if (!hand.is_array() || hand.size() % kCoordsPerKeypoint != 0) {
      throw ParseError("hand must be a flat array of xyz triples");
    }
    std::vector<double> values;
    values.reserve(hand.size());
    for (const auto& v : hand) {
      if (!v.is_number()) throw ParseError("non-numeric coordinate");
      values.push_back(v.get<double>());
    }
    const std::size_t rows = values.size() / kCoordsPerKeypoint;
    f.hands.emplace_back(rows, kCoordsPerKeypoint, std::move(values));
  }
  validate_frame(f);
  return f;
}

void write_keypoints(std::ostream& out, std::span<const KeypointFrame> frames) {
  for (const auto& f : frames) out << format_keypoint_line(f) << '\n';
}

std::vector<KeypointFrame> read_keypoints(std::istream& in, const std::string& source) {
  std::vector<KeypointFrame> frames;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      frames.push_back(parse_keypoint_line(line));
    } catch (const InvalidInputError& e) {
      parse_fail(source, line_no, e.what());
    }
  }
  validate_frames(frames);
  return frames;
}

void save_keypoints(const fs::path& path, std::span<const KeypointFrame> frames) {
  std::ostringstream out;
  write_keypoints(out, frames);
  write_text_file(path, out.str());
}

std::vector<KeypointFrame> load_keypoints(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open keypoint file '{}'", path.string()));
  return read_keypoints(in, path.string());
}

void write_prob_dump(std::ostream& out, const Transcript& transcript, std::span<const WindowProbability> probs,
                     const Config& cfg) {
  if (transcript.events.size() != probs.size()) {
    throw DimensionMismatchError("prob dump needs one event per window");
  }
  const std::size_t k = probs.empty() ? 0 : probs.front().probs.size();
  out << fmt::format("# signsep prob-dump v1 num_classes={} window_size={} stride={} threshold={}\n", k,
                     cfg.window_size, cfg.stride, cfg.threshold);
  out << "window_start,decision,argmax,max_prob";
  for (std::size_t i = 0; i < k; ++i) out << ",p" << i;
  out << '\n';
  for (std::size_t w = 0; w < probs.size(); ++w) {
    const DecodeEvent& ev = transcript.events[w];
    std::string row = fmt::format("{},{},{},{:.6f}", probs[w].window_start, decision_tag(ev.decision),
                                  ev.argmax_class, ev.max_prob);
    for (double p : probs[w].probs.probs()) row += fmt::format(",{:.6f}", p);
    out << row << '\n';
  }
}

ProbDump read_prob_dump(std::istream& in, const std::string& source) {
  ProbDump dump;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false, columns_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.find("prob-dump v1") == std::string::npos) continue;
      const auto k = header_field(line, "num_classes");
      if (!k || !parse_number(*k, dump.num_classes) || dump.num_classes < 2) {
        parse_fail(source, line_no, "header lacks a valid num_classes");
      }
      if (auto w = header_field(line, "window_size")) parse_number(*w, dump.window_size);
      if (auto s = header_field(line, "stride")) parse_number(*s, dump.stride);
      if (auto t = header_field(line, "threshold")) parse_number(*t, dump.threshold);
      header_seen = true;
      continue;
    }
    if (!header_seen) parse_fail(source, line_no, "missing '# signsep prob-dump v1' header");
    if (!columns_seen) {
      if (line.rfind("window_start,", 0) != 0) parse_fail(source, line_no, "missing column header");
      columns_seen = true;
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 4 + dump.num_classes) {
      parse_fail(source, line_no, fmt::format("expected {} fields, got {}", 4 + dump.num_classes, fields.size()));
    }
    WindowProbability w{0, validate_prob({1.0})};
    if (!parse_number(fields[0], w.window_start)) parse_fail(source, line_no, "bad window_start");
    std::vector<double> p(dump.num_classes);
    double sum = 0.0;
    for (std::size_t i = 0; i < dump.num_classes; ++i) {
      if (!parse_number(fields[4 + i], p[i]) || p[i] < 0.0) {
        parse_fail(source, line_no, fmt::format("bad probability in column p{}", i));
      }
      sum += p[i];
    }
    if (!(sum > 0.0)) parse_fail(source, line_no, "probabilities sum to zero");
    for (double& v : p) v /= sum;
    try {
      w.probs = validate_prob(std::move(p));
    } catch (const SimplexError& e) {
      parse_fail(source, line_no, e.what());
    }
    dump.windows.push_back(std::move(w));
    dump.recorded_tags.push_back(fields[1]);
  }
  if (!header_seen) parse_fail(source, line_no, "empty prob dump");
  return dump;
}

void write_ground_truth(std::ostream& out, std::span<const Segment> segments) {
  out << "# signsep ground truth v1\n";
  out << "label,start_frame,end_frame\n";
  for (const auto& s : segments) out << s.label << ',' << s.start_frame << ',' << s.end_frame << '\n';
}

std::vector<Segment> read_ground_truth(std::istream& in, const std::string& source) {
  std::vector<Segment> segments;
  std::string line;
  std::size_t line_no = 0;
  bool columns_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (!columns_seen && line.rfind("label,", 0) == 0) {
      columns_seen = true;
      continue;
    }
    const auto f = split(line, ',');
    Segment s;
    if (f.size() != 3 || !parse_number(f[0], s.label) || !parse_number(f[1], s.start_frame) ||
        !parse_number(f[2], s.end_frame) || s.end_frame < s.start_frame || s.label < 0) {
      parse_fail(source, line_no, "expected 'label,start_frame,end_frame'");
    }
    if (!segments.empty() && s.start_frame <= segments.back().end_frame) {
      parse_fail(source, line_no, "segments must be ordered and non-overlapping");
    }
    segments.push_back(s);
  }
  return segments;
}

void write_feature_dump(std::ostream& out, std::span<const FeatureVector> features) {
  const std::size_t d = features.empty() ? 0 : features.front().values.size();
  out << "frame_index";
  for (std::size_t i = 0; i < d; ++i) out << ",f" << i;
  out << '\n';
  for (const auto& f : features) {
    std::string row = std::to_string(f.frame_index);
    for (double v : f.values) row += fmt::format(",{:.9f}", v);
    out << row << '\n';
  }
}

void write_train_report(std::ostream& out, const TrainReport& r) {
  out << "# signsep train report v1\n";
  out << fmt::format("kind={} seed={} stopped_epoch={} best_epoch={}\n", to_string(r.kind), r.seed,
                     r.stopped_epoch, r.best_epoch);
  out << "epoch,learning_rate,train_loss,train_accuracy,val_loss,val_accuracy\n";
  for (const auto& e : r.epochs) {
    out << fmt::format("{},{:.9g},{:.9f},{:.6f},{:.9f},{:.6f}\n", e.epoch, e.learning_rate, e.train_loss,
                       e.train_accuracy, e.val_loss, e.val_accuracy);
  }
  out << fmt::format("final,train={:.6f},validation={:.6f},test={:.6f}\n", r.final_train_accuracy,
                     r.final_val_accuracy, r.final_test_accuracy);
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  out << contents;
  if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

}  // namespace signsep
