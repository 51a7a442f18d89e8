#include "signsep/gru.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "signsep/rng.hpp"

namespace signsep {

namespace {

using Block = GruNetwork::Block;

// y += W x, W is rows x cols row-major.
void gemv_add(const double* w, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* wi = w + i * cols;
    double acc = 0.0;
    for (std::size_t j = 0; j < cols; ++j) acc += wi[j] * x[j];
    y[i] += acc;
  }
}

// y += W^T v.
void gemv_t_add(const double* w, std::size_t rows, std::size_t cols, const double* v, double* y) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double vi = v[i];
    if (vi == 0.0) continue;
    const double* wi = w + i * cols;
    for (std::size_t j = 0; j < cols; ++j) y[j] += wi[j] * vi;
  }
}

// G += a b^T.
void outer_add(double* g, std::size_t rows, std::size_t cols, const double* a, const double* b) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double ai = a[i];
    if (ai == 0.0) continue;
    double* gi = g + i * cols;
    for (std::size_t j = 0; j < cols; ++j) gi[j] += ai * b[j];
  }
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct StepCache {
  std::vector<double> x, h_prev, z, r, n, rh;
};

}  // namespace

GruNetwork::GruNetwork(std::size_t input_dim, std::size_t hidden_dim, std::size_t num_classes)
    : input_dim_(input_dim), hidden_dim_(hidden_dim), num_classes_(num_classes) {
  if (input_dim == 0 || hidden_dim == 0 || num_classes < 2) {
    throw DimensionError(fmt::format("invalid network shape D={} H={} K={}", input_dim, hidden_dim,
                                     num_classes));
  }
  offsets_.resize(kBlockCount + 1);
  std::size_t cursor = 0;
  for (std::size_t b = 0; b < kBlockCount; ++b) {
    offsets_[b] = cursor;
    cursor += block_size(static_cast<Block>(b));
  }
  offsets_[kBlockCount] = cursor;
  params_.assign(cursor, 0.0);
  input_mean_.assign(input_dim, 0.0);
  input_scale_.assign(input_dim, 1.0);
}

std::size_t GruNetwork::block_size(Block b) const noexcept {
  const std::size_t d = input_dim_, h = hidden_dim_, k = num_classes_;
  switch (b) {
    case Block::Wz: case Block::Wr: case Block::Wn: return h * d;
    case Block::Uz: case Block::Ur: case Block::Un: return h * h;
    case Block::Bz: case Block::Br: case Block::Bn: return h;
    case Block::ReadoutW: return k * h;
    case Block::ReadoutB: return k;
  }
  return 0;
}

std::string_view GruNetwork::block_name(Block b) {
  static constexpr std::string_view names[] = {"W_update", "W_reset", "W_candidate",
                                               "U_update", "U_reset", "U_candidate",
                                               "b_update", "b_reset", "b_candidate",
                                               "readout_W", "readout_b"};
  return names[static_cast<std::size_t>(b)];
}

bool GruNetwork::is_matrix(Block b) noexcept {
  switch (b) {
    case Block::Bz: case Block::Br: case Block::Bn: case Block::ReadoutB: return false;
    default: return true;
  }
}

void GruNetwork::initialize(Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_dim_));
  for (std::size_t b = 0; b < kBlockCount; ++b) {
    const auto blk = static_cast<Block>(b);
    for (double& p : block(blk)) p = is_matrix(blk) ? rng.uniform(-bound, bound) : 0.0;
  }
}

std::vector<double> GruNetwork::logits(const Matrix& window) const {
  if (window.cols() != input_dim_) {
    throw DimensionMismatchError(fmt::format("window has {} features, network expects {}",
                                             window.cols(), input_dim_));
  }
  const std::size_t d = input_dim_, h = hidden_dim_;
  const double* p = params_.data();
  const double* wz = p + block_offset(Block::Wz);
  const double* wr = p + block_offset(Block::Wr);
  const double* wn = p + block_offset(Block::Wn);
  const double* uz = p + block_offset(Block::Uz);
  const double* ur = p + block_offset(Block::Ur);
  const double* un = p + block_offset(Block::Un);
  const double* bz = p + block_offset(Block::Bz);
  const double* br = p + block_offset(Block::Br);
  const double* bn = p + block_offset(Block::Bn);

  std::vector<double> x(d), hs(h, 0.0), az(h), ar(h), an(h), rh(h);
  for (std::size_t t = 0; t < window.rows(); ++t) {
    for (std::size_t j = 0; j < d; ++j) x[j] = (window(t, j) - input_mean_[j]) * input_scale_[j];
    az.assign(bz, bz + h);
    ar.assign(br, br + h);
    an.assign(bn, bn + h);
    gemv_add(wz, h, d, x.data(), az.data());
    gemv_add(uz, h, h, hs.data(), az.data());
    gemv_add(wr, h, d, x.data(), ar.data());
    gemv_add(ur, h, h, hs.data(), ar.data());
    for (std::size_t i = 0; i < h; ++i) rh[i] = sigmoid(ar[i]) * hs[i];
    gemv_add(wn, h, d, x.data(), an.data());
    gemv_add(un, h, h, rh.data(), an.data());
    for (std::size_t i = 0; i < h; ++i) {
      const double z = sigmoid(az[i]);
      hs[i] = (1.0 - z) * std::tanh(an[i]) + z * hs[i];
    }
  }

  std::vector<double> out(block(Block::ReadoutB).begin(), block(Block::ReadoutB).end());
  gemv_add(p + block_offset(Block::ReadoutW), num_classes_, h, hs.data(), out.data());
  return out;
}

double GruNetwork::loss_and_gradient(const Matrix& window, ClassId label, std::span<double> grad) const {
  if (window.cols() != input_dim_) {
    throw DimensionMismatchError(fmt::format("window has {} features, network expects {}",
                                             window.cols(), input_dim_));
  }
  if (grad.size() != params_.size()) throw DimensionMismatchError("gradient buffer size mismatch");
  if (label < 0 || static_cast<std::size_t>(label) >= num_classes_) {
    throw OutOfRangeError(fmt::format("label {} outside [0, {})", label, num_classes_));
  }
  const std::size_t d = input_dim_, h = hidden_dim_, k = num_classes_;
  const std::size_t steps = window.rows();
  const double* p = params_.data();
  const double* wz = p + block_offset(Block::Wz);
  const double* wr = p + block_offset(Block::Wr);
  const double* wn = p + block_offset(Block::Wn);
  const double* uz = p + block_offset(Block::Uz);
  const double* ur = p + block_offset(Block::Ur);
  const double* un = p + block_offset(Block::Un);
  const double* bz = p + block_offset(Block::Bz);
  const double* br = p + block_offset(Block::Br);
  const double* bn = p + block_offset(Block::Bn);
  const double* vw = p + block_offset(Block::ReadoutW);
  const double* vb = p + block_offset(Block::ReadoutB);

  // Forward, keeping every step's activations.
  std::vector<StepCache> cache(steps);
  std::vector<double> hs(h, 0.0);
  for (std::size_t t = 0; t < steps; ++t) {
    StepCache& c = cache[t];
    c.x.resize(d);
    for (std::size_t j = 0; j < d; ++j) c.x[j] = (window(t, j) - input_mean_[j]) * input_scale_[j];
    c.h_prev = hs;
    c.z.assign(bz, bz + h);
    c.r.assign(br, br + h);
    c.n.assign(bn, bn + h);
    gemv_add(wz, h, d, c.x.data(), c.z.data());
    gemv_add(uz, h, h, hs.data(), c.z.data());
    gemv_add(wr, h, d, c.x.data(), c.r.data());
    gemv_add(ur, h, h, hs.data(), c.r.data());
    c.rh.resize(h);
    for (std::size_t i = 0; i < h; ++i) {
      c.z[i] = sigmoid(c.z[i]);
      c.r[i] = sigmoid(c.r[i]);
      c.rh[i] = c.r[i] * hs[i];
    }
    gemv_add(wn, h, d, c.x.data(), c.n.data());
    gemv_add(un, h, h, c.rh.data(), c.n.data());
    for (std::size_t i = 0; i < h; ++i) {
      c.n[i] = std::tanh(c.n[i]);
      hs[i] = (1.0 - c.z[i]) * c.n[i] + c.z[i] * hs[i];
    }
  }

  std::vector<double> logit(vb, vb + k);
  gemv_add(vw, k, h, hs.data(), logit.data());
  for (double v : logit) {
    if (!std::isfinite(v)) throw DivergenceError("non-finite logit in forward pass");
  }
  const ProbVector prob = softmax(logit);
  const double top = *std::max_element(logit.begin(), logit.end());
  double denom = 0.0;
  for (double v : logit) denom += std::exp(v - top);
  const double loss = std::log(denom) + top - logit[static_cast<std::size_t>(label)];

  double* g = grad.data();
  double* g_wz = g + block_offset(Block::Wz);
  double* g_wr = g + block_offset(Block::Wr);
  double* g_wn = g + block_offset(Block::Wn);
  double* g_uz = g + block_offset(Block::Uz);
  double* g_ur = g + block_offset(Block::Ur);
  double* g_un = g + block_offset(Block::Un);
  double* g_bz = g + block_offset(Block::Bz);
  double* g_br = g + block_offset(Block::Br);
  double* g_bn = g + block_offset(Block::Bn);
  double* g_vw = g + block_offset(Block::ReadoutW);
  double* g_vb = g + block_offset(Block::ReadoutB);

  // Readout: dlogit = p - onehot(label).
  std::vector<double> dlogit(k);
  for (std::size_t i = 0; i < k; ++i)
    dlogit[i] = prob[i] - (static_cast<ClassId>(i) == label ? 1.0 : 0.0);
  for (std::size_t i = 0; i < k; ++i) g_vb[i] += dlogit[i];
  outer_add(g_vw, k, h, dlogit.data(), hs.data());
  std::vector<double> dh(h, 0.0);
  gemv_t_add(vw, k, h, dlogit.data(), dh.data());

  // Backward through time.
  std::vector<double> da_z(h), da_r(h), da_n(h), drh(h), dh_prev(h);
  for (std::size_t t = steps; t-- > 0;) {
    const StepCache& c = cache[t];
    for (std::size_t i = 0; i < h; ++i) {
      const double dn = dh[i] * (1.0 - c.z[i]);
      const double dz = dh[i] * (c.h_prev[i] - c.n[i]);
      da_n[i] = dn * (1.0 - c.n[i] * c.n[i]);
      da_z[i] = dz * c.z[i] * (1.0 - c.z[i]);
      dh_prev[i] = dh[i] * c.z[i];
    }
    outer_add(g_wn, h, d, da_n.data(), c.x.data());
    outer_add(g_un, h, h, da_n.data(), c.rh.data());
    for (std::size_t i = 0; i < h; ++i) g_bn[i] += da_n[i];

    std::fill(drh.begin(), drh.end(), 0.0);
    gemv_t_add(un, h, h, da_n.data(), drh.data());
    for (std::size_t i = 0; i < h; ++i) {
      const double dr = drh[i] * c.h_prev[i];
      da_r[i] = dr * c.r[i] * (1.0 - c.r[i]);
      dh_prev[i] += drh[i] * c.r[i];
    }

    outer_add(g_wz, h, d, da_z.data(), c.x.data());
    outer_add(g_uz, h, h, da_z.data(), c.h_prev.data());
    outer_add(g_wr, h, d, da_r.data(), c.x.data());
    outer_add(g_ur, h, h, da_r.data(), c.h_prev.data());
    for (std::size_t i = 0; i < h; ++i) {
      g_bz[i] += da_z[i];
      g_br[i] += da_r[i];
    }
    gemv_t_add(uz, h, h, da_z.data(), dh_prev.data());
    gemv_t_add(ur, h, h, da_r.data(), dh_prev.data());
    dh.swap(dh_prev);
  }
  return loss;
}

}  // namespace signsep
