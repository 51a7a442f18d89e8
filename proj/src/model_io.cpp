// Binary model container:
//
//   "SGSG" | u32 format_version | config snapshot | u8 kind | u64 num_classes
//   | kind-specific block | u32 CRC-32 of every preceding byte
//
// All integers and IEEE-754 doubles are little-endian.

#include <array>
#include <bit>
#include <fstream>
#include <iterator>

#include <fmt/format.h>

#include "signsep/predictor.hpp"

namespace signsep {

namespace {

constexpr std::array<std::uint8_t, 4> kMagic = {'S', 'G', 'S', 'G'};
constexpr std::uint32_t kCellGru = 1;

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  static const auto table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1U) ? 0xEDB88320U ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  std::uint32_t c = 0xFFFFFFFFU;
  for (std::uint8_t b : bytes) c = table[(c ^ b) & 0xFFU] ^ (c >> 8);
  return c ^ 0xFFFFFFFFU;
}

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void f64s(std::span<const double> vs) {
    for (double v : vs) f64(v);
  }
  std::vector<std::uint8_t>& bytes() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8() { return take(1)[0]; }
  std::uint32_t u32() {
    auto b = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[static_cast<std::size_t>(i)]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    auto b = take(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[static_cast<std::size_t>(i)]) << (8 * i);
    return v;
  }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  double f64() { return std::bit_cast<double>(u64()); }
  void f64s(std::span<double> out) {
    for (double& v : out) v = f64();
  }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  std::span<const std::uint8_t> take(std::size_t n) {
    if (pos_ + n > in_.size()) throw CorruptModelError("model file is truncated");
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

void write_config(Writer& w, const Config& c) {
  w.i64(c.window_size);
  w.i64(c.stride);
  w.f64(c.threshold);
  w.i64(c.num_singular_values);
  w.i64(c.keypoints_per_hand);
  w.f64(c.learning_rate);
  w.i64(c.lr_decay_every);
  w.f64(c.lr_decay_factor);
  w.i64(c.batch_size);
  w.i64(c.max_epochs);
  w.f64(c.weight_decay);
  w.f64(c.momentum_beta1);
  w.f64(c.train_fraction);
  w.i64(c.seed);
}

Config read_config(Reader& r) {
  Config c;
  c.window_size = r.i64();
  c.stride = r.i64();
  c.threshold = r.f64();
  c.num_singular_values = r.i64();
  c.keypoints_per_hand = r.i64();
  c.learning_rate = r.f64();
  c.lr_decay_every = r.i64();
  c.lr_decay_factor = r.f64();
  c.batch_size = r.i64();
  c.max_epochs = r.i64();
  c.weight_decay = r.f64();
  c.momentum_beta1 = r.f64();
  c.train_fraction = r.f64();
  c.seed = r.i64();
  return c;
}

// Guards allocations driven by header fields of a damaged file.
std::size_t checked_dim(std::uint64_t v, std::size_t limit, const char* what) {
  if (v == 0 || v > limit) throw CorruptModelError(fmt::format("implausible {} = {}", what, v));
  return static_cast<std::size_t>(v);
}

}  // namespace

std::vector<std::uint8_t> serialize_model(const PredictorModel& model) {
  Writer w;
  for (auto b : kMagic) w.u8(b);
  w.u32(model.format_version);
  write_config(w, model.config);
  w.u8(static_cast<std::uint8_t>(model.kind()));
  w.u64(model.num_classes);
  if (const auto* c = std::get_if<CentroidModel>(&model.params)) {
    w.u64(c->centroids.rows());
    w.u64(c->centroids.cols());
    w.f64(c->temperature);
    w.f64s(c->centroids.values());
  } else {
    const GruNetwork& net = std::get<RecurrentModel>(model.params).network;
    w.u32(kCellGru);
    w.u64(net.input_dim());
    w.u64(net.hidden_dim());
    w.u64(net.num_classes());
    w.f64s(net.input_mean());
    w.f64s(net.input_scale());
    w.f64s(net.params());
  }
  const std::uint32_t crc = crc32(w.bytes());
  w.u32(crc);
  return std::move(w.bytes());
}

PredictorModel deserialize_model(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMagic.size() + 8 || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw CorruptModelError("not a model file (bad magic)");
  }
  Reader header(bytes.subspan(kMagic.size()));
  const std::uint32_t version = header.u32();
  if (version != kModelFormatVersion) {
    throw VersionError(fmt::format("unsupported model format version {} (expected {})", version,
                                   kModelFormatVersion));
  }
  const auto body = bytes.first(bytes.size() - 4);
  Reader tail(bytes.last(4));
  if (crc32(body) != tail.u32()) throw CorruptModelError("model checksum mismatch");

  Reader r(body.subspan(kMagic.size() + 4));
  PredictorModel model;
  model.format_version = version;
  model.config = read_config(r);
  const std::uint8_t kind = r.u8();
  model.num_classes = checked_dim(r.u64(), 1 << 20, "num_classes");
  if (kind == static_cast<std::uint8_t>(PredictorKind::Centroid)) {
    const std::size_t k = checked_dim(r.u64(), 1 << 20, "centroid rows");
    const std::size_t d = checked_dim(r.u64(), 1 << 16, "centroid cols");
    CentroidModel c{Matrix(k, d), r.f64()};
    r.f64s(c.centroids.values());
    model.params = std::move(c);
  } else if (kind == static_cast<std::uint8_t>(PredictorKind::Recurrent)) {
    if (r.u32() != kCellGru) throw CorruptModelError("unknown recurrent cell type");
    const std::size_t d = checked_dim(r.u64(), 1 << 16, "input_dim");
    const std::size_t h = checked_dim(r.u64(), 1 << 14, "hidden_dim");
    const std::size_t k = checked_dim(r.u64(), 1 << 20, "num_classes");
    GruNetwork net(d, h, k);
    r.f64s(net.input_mean());
    r.f64s(net.input_scale());
    r.f64s(net.params());
    model.params = RecurrentModel{std::move(net)};
  } else {
    throw CorruptModelError(fmt::format("unknown predictor kind tag {}", kind));
  }
  if (r.remaining() != 0) throw CorruptModelError("trailing bytes after model payload");
  return model;
}

void save_model(const PredictorModel& model, const std::filesystem::path& path) {
  const auto bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

PredictorModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open model '{}'", path.string()));
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

}  // namespace signsep
