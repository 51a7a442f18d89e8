// signsep: synthesize keypoint corpora, train window classifiers and segment
// continuous keypoint streams into sign words.

#include <cstdio>
#include <functional>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "signsep/decoder.hpp"
#include "signsep/evalmetrics.hpp"
#include "signsep/features.hpp"
#include "signsep/formats.hpp"
#include "signsep/pipeline.hpp"
#include "signsep/predictor.hpp"
#include "signsep/synthgen.hpp"

namespace fs = std::filesystem;
using namespace signsep;

namespace {

constexpr const char* kExitCodes =
    "Exit codes:\n"
    "  0  success\n"
    "  2  invalid usage, configuration or input data\n"
    "  3  file I/O, model version or checksum failure\n"
    "  4  training diverged\n"
    "  5  stream shorter than one window\n";

struct DecodeFlags {
  std::optional<double> threshold;
  std::optional<std::int64_t> window;
  std::optional<std::int64_t> stride;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--threshold", threshold, "Acceptance threshold, must lie in (0.5, 1) [0.51]");
    cmd->add_option("--window", window, "Sliding window length in frames [50]");
    cmd->add_option("--stride", stride, "Window stride in frames [1]");
  }

  Config apply(Config cfg) const {
    if (threshold) cfg.threshold = *threshold;
    if (window) cfg.window_size = *window;
    if (stride) cfg.stride = *stride;
    cfg.validate();
    return cfg;
  }
};

std::vector<std::string> default_class_names(std::size_t k) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < k; ++i) names.push_back(fmt::format("class_{}", i));
  return names;
}

std::string describe_words(std::span<const ClassId> words, std::span<const std::string> names) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto idx = static_cast<std::size_t>(words[i]);
    if (i > 0) out += ' ';
    out += fmt::format("{}({})", idx < names.size() ? names[idx] : "?", words[i] + 1);
  }
  return out;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ostringstream out;
  body(out);
  write_text_file(path, out.str());
}

// ---- synth ----

struct SynthArgs {
  SynthSpec spec;
  std::string lengths = "30:80";
  std::string out;
};

int run_synth(const SynthArgs& a) {
  SynthSpec spec = a.spec;
  const auto colon = a.lengths.find(':');
  try {
    if (colon == std::string::npos) throw std::invalid_argument("");
    spec.min_length = std::stoul(a.lengths.substr(0, colon));
    spec.max_length = std::stoul(a.lengths.substr(colon + 1));
  } catch (const std::logic_error&) {
    throw ConfigError(fmt::format("--len expects MIN:MAX, got '{}'", a.lengths));
  }
  const SynthDataset ds = generate(spec);
  save_dataset(a.out, ds.clips, ds.class_names, ds.hands);
  fmt::print("wrote {} clips of {} classes to {}\n", ds.clips.size(), ds.class_names.size(), a.out);
  return 0;
}

// ---- train ----

struct TrainArgs {
  std::string data;
  std::string model;
  std::string report;
  std::string kind = "recurrent";
  Config cfg;
  TrainOptions options;
};

int run_train(const TrainArgs& a) {
  a.cfg.validate();
  const PredictorKind kind = parse_predictor_kind(a.kind);
  const Dataset ds = load_dataset(a.data);
  const PreparedData data = prepare_data(ds.clips, a.cfg);
  TrainResult result = train(data.train, data.validation, ds.manifest.num_classes, a.cfg, kind, a.options);
  const SplitAccuracy acc = split_accuracy(result.model, data);
  result.report.final_test_accuracy = acc.test;

  save_model(result.model, a.model);
  const fs::path report = a.report.empty() ? fs::path(a.model + ".report.csv") : fs::path(a.report);
  write_file(report, [&](std::ostream& o) { write_train_report(o, result.report); });

  fmt::print("{:<10} {:>8} {:>8} {:>8} {:>10} {:>8}\n", "model", "train", "val", "test", "epochs", "clips");
  fmt::print("{:<10} {:>8.4f} {:>8.4f} {:>8.4f} {:>10} {:>8}\n", to_string(kind), acc.train, acc.validation,
             acc.test, result.report.stopped_epoch, ds.clips.size());
  fmt::print("split: {} train / {} validation / {} test\n", data.train.size(), data.validation.size(),
             data.test.size());
  fmt::print("model written to {}, report to {}\n", a.model, report.string());
  return 0;
}

// ---- segment ----

struct SegmentArgs {
  std::string model;
  std::string stream;
  std::string replay;
  std::string data;
  std::size_t suite_stream = 0;
  std::size_t streams = 10;
  std::string dump_probs;
  DecodeFlags flags;
};

int run_segment(const SegmentArgs& a) {
  std::vector<std::string> names;
  Transcript transcript;
  std::vector<WindowProbability> probs;
  Config cfg;

  if (!a.replay.empty()) {
    std::ifstream in(a.replay);
    if (!in) throw IoError(fmt::format("cannot open '{}'", a.replay));
    ProbDump dump = read_prob_dump(in, a.replay);
    cfg.window_size = static_cast<std::int64_t>(dump.window_size ? dump.window_size : 50);
    cfg.stride = static_cast<std::int64_t>(dump.stride ? dump.stride : 1);
    if (dump.threshold > 0.0) cfg.threshold = dump.threshold;
    cfg = a.flags.apply(cfg);
    probs = std::move(dump.windows);
    DecoderState state;
    for (const auto& w : probs) state = decode_incremental(std::move(state), w, cfg).first;
    transcript = to_transcript(state);
    names = default_class_names(dump.num_classes);
  } else {
    if (a.model.empty()) throw ConfigError("segment needs --model unless --replay is given");
    const PredictorModel model = load_model(a.model);
    cfg = a.flags.apply(model.config);
    ContinuousStream stream;
    if (!a.stream.empty()) {
      stream.stream_id = fs::path(a.stream).stem().string();
      stream.frames = load_keypoints(a.stream);
    } else if (!a.data.empty()) {
      const Dataset ds = load_dataset(a.data);
      const PreparedData data = prepare_data(ds.clips, model.config);
      auto suite = build_continuous_suite(data.held_out, model.num_classes, a.streams,
                                          static_cast<std::uint64_t>(model.config.seed));
      if (a.suite_stream < 1 || a.suite_stream > suite.size()) {
        throw ConfigError(fmt::format("--suite-stream must lie in [1, {}]", suite.size()));
      }
      stream = std::move(suite[a.suite_stream - 1]);
      names = ds.manifest.class_names;
    } else {
      throw ConfigError("segment needs --stream, --data or --replay");
    }
    transcript = decode_stream(stream, model, cfg, &probs);
    if (names.empty()) names = default_class_names(model.num_classes);
    if (stream.ground_truth) {
      std::vector<ClassId> expected;
      for (const auto& s : *stream.ground_truth) expected.push_back(s.label);
      fmt::print("expected:   {}\n", describe_words(expected, names));
    }
  }

  fmt::print("recognized: {}\n", describe_words(transcript.words, names));
  fmt::print("windows: {}  accepted: {}\n", transcript.events.size(), transcript.words.size());
  if (!a.dump_probs.empty()) {
    write_file(a.dump_probs, [&](std::ostream& o) { write_prob_dump(o, transcript, probs, cfg); });
  }
  return 0;
}

// ---- eval ----

struct EvalArgs {
  std::string model;
  std::string data;
  std::string out;
  std::string replay;
  std::string truth;
  std::size_t streams = 10;
  bool export_streams = false;
  DecodeFlags flags;
};

void write_reports(const fs::path& dir, std::span<const StreamReport> reports,
                   std::span<const std::string> names) {
  write_text_file(dir / "report.txt", format_report_text(reports, names));
  write_file(dir / "streams.csv", [&](std::ostream& o) { write_stream_reports_csv(o, reports); });
  write_file(dir / "false_recognitions.csv", [&](std::ostream& o) { write_false_recognitions_csv(o, reports); });
}

int run_eval(const EvalArgs& a) {
  if (!a.replay.empty()) {
    if (a.truth.empty()) throw ConfigError("--replay needs --truth");
    std::ifstream in(a.replay);
    if (!in) throw IoError(fmt::format("cannot open '{}'", a.replay));
    ProbDump dump = read_prob_dump(in, a.replay);
    std::ifstream tin(a.truth);
    if (!tin) throw IoError(fmt::format("cannot open '{}'", a.truth));
    const auto truth = read_ground_truth(tin, a.truth);
    if (truth.empty()) throw EmptyListError("ground truth holds no segment");
    Config cfg;
    cfg.window_size = static_cast<std::int64_t>(dump.window_size ? dump.window_size : 50);
    cfg.stride = static_cast<std::int64_t>(dump.stride ? dump.stride : 1);
    if (dump.threshold > 0.0) cfg.threshold = dump.threshold;
    cfg = a.flags.apply(cfg);
    const std::vector<StreamReport> reports{
        replay_report(fs::path(a.replay).stem().string(), dump.windows, truth, cfg)};
    const auto names = default_class_names(dump.num_classes);
    const std::string text = format_report_text(reports, names);
    std::fputs(text.c_str(), stdout);
    if (!a.out.empty()) write_reports(a.out, reports, names);
    return 0;
  }

  if (a.model.empty() || a.data.empty()) throw ConfigError("eval needs --model and --data, or --replay");
  if (a.streams == 0) throw EmptyListError("the continuous suite must hold at least one stream");
  const PredictorModel model = load_model(a.model);
  const Config cfg = a.flags.apply(model.config);
  const Dataset ds = load_dataset(a.data);
  if (ds.manifest.num_classes != model.num_classes) {
    throw DimensionMismatchError(fmt::format("dataset has {} classes, model {}", ds.manifest.num_classes,
                                             model.num_classes));
  }
  const PreparedData data = prepare_data(ds.clips, model.config);
  const SuiteResult suite = evaluate_suite(model, data.held_out, a.streams, cfg);

  const std::string text = format_report_text(suite.reports, ds.manifest.class_names);
  std::fputs(text.c_str(), stdout);
  if (!a.out.empty()) {
    const fs::path dir(a.out);
    write_reports(dir, suite.reports, ds.manifest.class_names);
    if (a.export_streams) {
      for (std::size_t i = 0; i < suite.streams.size(); ++i) {
        const auto& s = suite.streams[i];
        save_keypoints(dir / "streams" / (s.stream_id + ".jsonl"), s.frames);
        write_file(dir / "streams" / (s.stream_id + ".truth.csv"),
                   [&](std::ostream& o) { write_ground_truth(o, *s.ground_truth); });
        write_file(dir / "streams" / (s.stream_id + ".probs.csv"),
                   [&](std::ostream& o) { write_prob_dump(o, suite.transcripts[i], suite.probabilities[i], cfg); });
      }
    }
  }
  return 0;
}

// ---- inspect ----

struct InspectArgs {
  std::string model;
  std::string keypoints;
  std::string features;
};

int run_inspect(const InspectArgs& a) {
  if (!a.model.empty()) {
    const PredictorModel m = load_model(a.model);
    const Config& c = m.config;
    fmt::print("format_version: {}\nkind: {}\nnum_classes: {}\ninput_dim: {}\n", m.format_version,
               to_string(m.kind()), m.num_classes, m.input_dim());
    if (const auto* r = std::get_if<RecurrentModel>(&m.params)) {
      fmt::print("hidden_dim: {}\nparameters: {}\n", r->network.hidden_dim(), r->network.params().size());
    } else {
      fmt::print("temperature: {}\n", std::get<CentroidModel>(m.params).temperature);
    }
    fmt::print("window_size: {}\nstride: {}\nthreshold: {}\nlearning_rate: {}\nlr_decay: /{} every {} epochs\n"
               "batch_size: {}\nmax_epochs: {}\nweight_decay: {}\nbeta1: {}\ntrain_fraction: {}\nseed: {}\n",
               c.window_size, c.stride, c.threshold, c.learning_rate, c.lr_decay_factor, c.lr_decay_every,
               c.batch_size, c.max_epochs, c.weight_decay, c.momentum_beta1, c.train_fraction, c.seed);
    return 0;
  }
  if (!a.keypoints.empty()) {
    const auto frames = load_keypoints(a.keypoints);
    fmt::print("frames: {}\nhands: {}\n", frames.size(), frames.front().hand_count());
    if (!a.features.empty()) {
      const auto feats = sequence_features(frames);
      write_file(a.features, [&](std::ostream& o) { write_feature_dump(o, feats); });
    }
    return 0;
  }
  throw ConfigError("inspect needs --model or --keypoints");
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const InvalidInputError*>(&e)) return 2;
  if (dynamic_cast<const IoError*>(&e)) return 3;
  if (dynamic_cast<const DivergenceError*>(&e)) return 4;
  if (dynamic_cast<const StreamTooShortError*>(&e)) return 5;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"signsep: sliding-window segmentation of continuous hand-keypoint streams", "signsep"};
  app.footer(kExitCodes);
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a deterministic synthetic isolated-sign corpus");
  synth_cmd->add_option("--classes", synth.spec.num_classes, "Number of classes")->capture_default_str();
  synth_cmd->add_option("--per-class", synth.spec.samples_per_class, "Clips per class")->capture_default_str();
  synth_cmd->add_option("--len", synth.lengths, "Clip length range MIN:MAX")->capture_default_str();
  synth_cmd->add_option("--noise", synth.spec.noise_sigma, "Keypoint noise sigma")->capture_default_str();
  synth_cmd->add_option("--rotation", synth.spec.rotation_jitter_deg, "Max rotation jitter in degrees")
      ->capture_default_str();
  synth_cmd->add_option("--translation", synth.spec.translation_jitter, "Max translation jitter")
      ->capture_default_str();
  synth_cmd->add_option("--hands", synth.spec.hands, "Hands per frame (1 or 2)")->capture_default_str();
  synth_cmd->add_option("--seed", synth.spec.seed, "Generator seed")->capture_default_str();
  synth_cmd->add_option("--out", synth.out, "Output dataset directory")->required();
  synth_cmd->footer(kExitCodes);

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train a window classifier on an isolated-sign dataset");
  train_cmd->add_option("--data", tr.data, "Dataset directory holding manifest.txt")->required();
  train_cmd->add_option("--model", tr.model, "Output model file")->required();
  train_cmd->add_option("--report", tr.report, "Training report CSV [<model>.report.csv]");
  train_cmd->add_option("--kind", tr.kind, "recurrent or centroid")->capture_default_str();
  train_cmd->add_option("--seed", tr.cfg.seed, "Split, initialization and shuffling seed")->capture_default_str();
  train_cmd->add_option("--lr", tr.cfg.learning_rate, "Initial learning rate")->capture_default_str();
  train_cmd->add_option("--lr-decay-every", tr.cfg.lr_decay_every, "Epochs per learning-rate step")
      ->capture_default_str();
  train_cmd->add_option("--lr-decay-factor", tr.cfg.lr_decay_factor, "Learning-rate divisor per step")
      ->capture_default_str();
  train_cmd->add_option("--batch", tr.cfg.batch_size, "Mini-batch size")->capture_default_str();
  train_cmd->add_option("--epochs", tr.cfg.max_epochs, "Maximum epochs")->capture_default_str();
  train_cmd->add_option("--weight-decay", tr.cfg.weight_decay, "Decoupled weight decay")->capture_default_str();
  train_cmd->add_option("--beta1", tr.cfg.momentum_beta1, "Adam first-moment decay")->capture_default_str();
  train_cmd->add_option("--train-fraction", tr.cfg.train_fraction, "Share of clips outside the test split")
      ->capture_default_str();
  train_cmd->add_option("--window", tr.cfg.window_size, "Frames per training window")->capture_default_str();
  train_cmd->add_option("--threshold", tr.cfg.threshold, "Decoder threshold stored with the model")
      ->capture_default_str();
  train_cmd->add_option("--hidden", tr.options.hidden_dim, "Recurrent hidden size")->capture_default_str();
  train_cmd->add_option("--patience", tr.options.patience, "Early-stopping patience in epochs")
      ->capture_default_str();
  train_cmd->add_option("--min-delta", tr.options.min_delta, "Smallest validation-loss drop that resets patience")
      ->capture_default_str();
  train_cmd->footer(kExitCodes);

  SegmentArgs seg;
  auto* seg_cmd = app.add_subcommand("segment", "Decode one continuous stream into a word sequence");
  seg_cmd->add_option("--model", seg.model, "Model file");
  auto* seg_stream = seg_cmd->add_option("--stream", seg.stream, "Keypoint stream file (JSON lines)");
  auto* seg_data = seg_cmd->add_option("--data", seg.data, "Dataset whose held-out suite supplies the stream");
  seg_cmd->add_option("--suite-stream", seg.suite_stream, "1-based stream index within the suite")
      ->needs(seg_data);
  seg_cmd->add_option("--streams", seg.streams, "Number of suite streams")->capture_default_str();
  auto* seg_replay = seg_cmd->add_option("--replay", seg.replay, "Replay a probability dump instead of a model");
  seg_cmd->add_option("--dump-probs", seg.dump_probs, "Write per-window probabilities and decisions (CSV)");
  seg_stream->excludes(seg_data)->excludes(seg_replay);
  seg_data->excludes(seg_replay);
  seg.flags.add_to(seg_cmd);
  seg_cmd->footer(kExitCodes);

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Decode the continuous suite and write reports");
  eval_cmd->add_option("--model", ev.model, "Model file");
  eval_cmd->add_option("--data", ev.data, "Dataset directory");
  eval_cmd->add_option("--streams", ev.streams, "Number of continuous streams")->capture_default_str();
  eval_cmd->add_option("--out", ev.out, "Report directory");
  eval_cmd->add_flag("--export-streams", ev.export_streams, "Also write stream keypoints, truth and dumps");
  eval_cmd->add_option("--replay", ev.replay, "Score a probability dump instead of running a model");
  eval_cmd->add_option("--truth", ev.truth, "Ground-truth CSV for --replay");
  ev.flags.add_to(eval_cmd);
  eval_cmd->footer(kExitCodes);

  InspectArgs ins;
  auto* inspect_cmd = app.add_subcommand("inspect", "Describe a model file or a keypoint file");
  inspect_cmd->add_option("--model", ins.model, "Model file");
  inspect_cmd->add_option("--keypoints", ins.keypoints, "Keypoint file");
  inspect_cmd->add_option("--features", ins.features, "Write per-frame features of --keypoints (CSV)");
  inspect_cmd->footer(kExitCodes);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*synth_cmd) return run_synth(synth);
    if (*train_cmd) return run_train(tr);
    if (*seg_cmd) return run_segment(seg);
    if (*eval_cmd) return run_eval(ev);
    if (*inspect_cmd) return run_inspect(ins);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return exit_code_for(e);
  }
  return 2;
}
