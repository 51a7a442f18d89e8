#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "signsep/core.hpp"

namespace signsep {

class Rng;

/// Many-to-one gated recurrent classifier:
///
///   z_t = sigmoid(Wz x_t + Uz h_{t-1} + bz)
///   r_t = sigmoid(Wr x_t + Ur h_{t-1} + br)
///   n_t = tanh(Wn x_t + Un (r_t * h_{t-1}) + bn)
///   h_t = (1 - z_t) * n_t + z_t * h_{t-1}
///   logits = V h_T + c
///
/// All trainable parameters live in one flat vector so optimizers and the
/// gradient checker can treat them uniformly. Inputs are standardized with
/// fixed per-feature statistics (not trained) before entering the cell.
class GruNetwork {
 public:
  enum class Block { Wz, Wr, Wn, Uz, Ur, Un, Bz, Br, Bn, ReadoutW, ReadoutB };
  static constexpr std::size_t kBlockCount = 11;

  GruNetwork() = default;
  GruNetwork(std::size_t input_dim, std::size_t hidden_dim, std::size_t num_classes);

  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t hidden_dim() const noexcept { return hidden_dim_; }
  std::size_t num_classes() const noexcept { return num_classes_; }

  std::span<double> params() noexcept { return params_; }
  std::span<const double> params() const noexcept { return params_; }

  std::size_t block_offset(Block b) const noexcept { return offsets_[static_cast<std::size_t>(b)]; }
  std::size_t block_size(Block b) const noexcept;
  std::span<const double> block(Block b) const { return params().subspan(block_offset(b), block_size(b)); }
  std::span<double> block(Block b) { return params().subspan(block_offset(b), block_size(b)); }
  static std::string_view block_name(Block b);
  /// True for the weight matrices (the blocks that receive weight decay).
  static bool is_matrix(Block b) noexcept;

  std::span<double> input_mean() noexcept { return input_mean_; }
  std::span<const double> input_mean() const noexcept { return input_mean_; }
  std::span<double> input_scale() noexcept { return input_scale_; }
  std::span<const double> input_scale() const noexcept { return input_scale_; }

  /// Weights uniform in [-1/sqrt(H), 1/sqrt(H)], biases zero.
  void initialize(Rng& rng);

  /// Class logits for a T x D window.
  std::vector<double> logits(const Matrix& window) const;

  /// Cross-entropy loss of one window; adds d(loss)/d(params) into `grad`.
  double loss_and_gradient(const Matrix& window, ClassId label, std::span<double> grad) const;

  friend bool operator==(const GruNetwork&, const GruNetwork&) = default;

 private:
  std::size_t input_dim_ = 0;
  std::size_t hidden_dim_ = 0;
  std::size_t num_classes_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
  std::vector<double> input_mean_;
  std::vector<double> input_scale_;
};

}  // namespace signsep
