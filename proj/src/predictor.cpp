#include "signsep/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <fmt/format.h>

#include "signsep/rng.hpp"

namespace signsep {

namespace {

std::vector<double> mean_pool(const Matrix& window) {
  std::vector<double> mean(window.cols(), 0.0);
  for (std::size_t r = 0; r < window.rows(); ++r)
    for (std::size_t c = 0; c < window.cols(); ++c) mean[c] += window(r, c);
  for (double& v : mean) v /= static_cast<double>(window.rows());
  return mean;
}

ProbVector predict_centroid(const CentroidModel& m, const FeatureWindow& w) {
  if (w.dim() != m.centroids.cols()) {
    throw DimensionMismatchError(fmt::format("window has {} features, model expects {}", w.dim(),
                                             m.centroids.cols()));
  }
  const std::vector<double> pooled = mean_pool(w.matrix);
  std::vector<double> logits(m.centroids.rows());
  for (std::size_t k = 0; k < m.centroids.rows(); ++k) {
    double sq = 0.0;
    for (std::size_t c = 0; c < pooled.size(); ++c) {
      const double diff = pooled[c] - m.centroids(k, c);
      sq += diff * diff;
    }
    logits[k] = -std::sqrt(sq) / m.temperature;
  }
  return softmax(logits);
}

void check_labels(std::span<const LabeledWindow> set, std::size_t num_classes) {
  for (const auto& s : set) {
    if (s.label < 0 || static_cast<std::size_t>(s.label) >= num_classes) {
      throw OutOfRangeError(fmt::format("label {} outside [0, {})", s.label, num_classes));
    }
  }
}

void require_every_class(std::span<const LabeledWindow> set, std::size_t num_classes) {
  std::vector<std::size_t> counts(num_classes, 0);
  for (const auto& s : set) ++counts[static_cast<std::size_t>(s.label)];
  for (std::size_t k = 0; k < num_classes; ++k) {
    if (counts[k] == 0) throw EmptyClassError(fmt::format("class {} has no training window", k));
  }
}

TrainResult train_centroid(std::span<const LabeledWindow> train_set,
                           std::span<const LabeledWindow> val_set, std::size_t num_classes,
                           const Config& cfg) {
  const std::size_t dim = train_set.front().window.dim();
  // Pooled vectors are summed in sorted order so the centroid does not depend
  // on the order samples arrive in.
  std::vector<std::vector<std::vector<double>>> pooled(num_classes);
  for (const auto& s : train_set) {
    if (s.window.dim() != dim) throw DimensionMismatchError("training windows differ in dimension");
    pooled[static_cast<std::size_t>(s.label)].push_back(mean_pool(s.window.matrix));
  }
  CentroidModel cm{Matrix(num_classes, dim), 1.0};
  for (std::size_t k = 0; k < num_classes; ++k) {
    auto& rows = pooled[k];
    std::sort(rows.begin(), rows.end());
    for (const auto& r : rows)
      for (std::size_t c = 0; c < dim; ++c) cm.centroids(k, c) += r[c];
    for (std::size_t c = 0; c < dim; ++c) cm.centroids(k, c) /= static_cast<double>(rows.size());
  }

  PredictorModel model{cm, num_classes, cfg, kModelFormatVersion};
  const auto tuning = val_set.empty() ? train_set : val_set;
  double best_acc = -1.0;
  double best_loss = 0.0;
  double best_t = 1.0;
  for (int step = -30; step <= 30; ++step) {
    const double t = std::pow(10.0, step / 10.0);
    std::get<CentroidModel>(model.params).temperature = t;
    const SetScore s = score(model, tuning);
    if (s.accuracy > best_acc || (s.accuracy == best_acc && s.loss < best_loss)) {
      best_acc = s.accuracy;
      best_loss = s.loss;
      best_t = t;
    }
  }
  std::get<CentroidModel>(model.params).temperature = best_t;

  TrainReport report;
  report.kind = PredictorKind::Centroid;
  report.seed = static_cast<std::uint64_t>(cfg.seed);
  const SetScore tr = score(model, train_set);
  const SetScore va = val_set.empty() ? SetScore{} : score(model, val_set);
  report.epochs.push_back({0, 0.0, tr.loss, tr.accuracy, va.loss, va.accuracy});
  report.stopped_epoch = 1;
  report.best_epoch = 0;
  report.final_train_accuracy = tr.accuracy;
  report.final_val_accuracy = va.accuracy;
  return {std::move(model), std::move(report)};
}

void standardize_inputs(GruNetwork& net, std::span<const LabeledWindow> train_set) {
  const std::size_t dim = net.input_dim();
  std::vector<double> sum(dim, 0.0), sq(dim, 0.0);
  double count = 0.0;
  for (const auto& s : train_set) {
    const Matrix& m = s.window.matrix;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (std::size_t c = 0; c < dim; ++c) {
        sum[c] += m(r, c);
        sq[c] += m(r, c) * m(r, c);
      }
      count += 1.0;
    }
  }
  for (std::size_t c = 0; c < dim; ++c) {
    const double mean = sum[c] / count;
    const double var = std::max(sq[c] / count - mean * mean, 0.0);
    const double sd = std::sqrt(var);
    net.input_mean()[c] = mean;
    // Constant features (zero padding for one-hand data) pass through unscaled.
    net.input_scale()[c] = sd > 1e-12 ? 1.0 / sd : 1.0;
  }
}

TrainResult train_recurrent(std::span<const LabeledWindow> train_set,
                            std::span<const LabeledWindow> val_set, std::size_t num_classes,
                            const Config& cfg, const TrainOptions& opt) {
  const std::size_t dim = train_set.front().window.dim();
  Rng rng(static_cast<std::uint64_t>(cfg.seed));
  GruNetwork net(dim, opt.hidden_dim, num_classes);
  net.initialize(rng);
  standardize_inputs(net, train_set);

  PredictorModel model{RecurrentModel{std::move(net)}, num_classes, cfg, kModelFormatVersion};
  GruNetwork& live = std::get<RecurrentModel>(model.params).network;
  const std::size_t n_params = live.params().size();

  // Weight-decay mask over the flat parameter vector.
  std::vector<char> decay(n_params, 0);
  for (std::size_t b = 0; b < GruNetwork::kBlockCount; ++b) {
    const auto blk = static_cast<GruNetwork::Block>(b);
    if (!GruNetwork::is_matrix(blk)) continue;
    const std::size_t off = live.block_offset(blk);
    std::fill_n(decay.begin() + static_cast<std::ptrdiff_t>(off), live.block_size(blk), 1);
  }

  std::vector<double> m1(n_params, 0.0), m2(n_params, 0.0), grad(n_params);
  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  TrainReport report;
  report.kind = PredictorKind::Recurrent;
  report.seed = static_cast<std::uint64_t>(cfg.seed);

  const bool have_val = !val_set.empty();
  std::vector<double> best_params(live.params().begin(), live.params().end());
  double best_loss = std::numeric_limits<double>::infinity();
  std::int64_t best_epoch = 0;
  std::int64_t since_best = 0;
  std::uint64_t step = 0;
  const auto batch = static_cast<std::size_t>(cfg.batch_size);
  const double beta1 = cfg.momentum_beta1;

  for (std::int64_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const double lr = learning_rate_at(cfg, epoch);
    rng.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(start + batch, order.size());
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t i = start; i < end; ++i) {
        const LabeledWindow& s = train_set[order[i]];
        loss_sum += live.loss_and_gradient(s.window.matrix, s.label, grad);
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      ++step;
      const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(opt.beta2, static_cast<double>(step));
      auto p = live.params();
      for (std::size_t j = 0; j < n_params; ++j) {
        const double g = grad[j] * inv;
        if (!std::isfinite(g)) throw DivergenceError(fmt::format("non-finite gradient at epoch {}", epoch));
        m1[j] = beta1 * m1[j] + (1.0 - beta1) * g;
        m2[j] = opt.beta2 * m2[j] + (1.0 - opt.beta2) * g * g;
        const double update = (m1[j] / c1) / (std::sqrt(m2[j] / c2) + opt.epsilon);
        p[j] -= lr * update;
        if (decay[j]) p[j] -= lr * cfg.weight_decay * p[j];
      }
    }
    if (!std::isfinite(loss_sum)) throw DivergenceError(fmt::format("training loss diverged at epoch {}", epoch));

    EpochStats stats;
    stats.epoch = epoch;
    stats.learning_rate = lr;
    const SetScore tr = score(model, train_set);
    stats.train_loss = tr.loss;
    stats.train_accuracy = tr.accuracy;
    if (have_val) {
      const SetScore va = score(model, val_set);
      stats.val_loss = va.loss;
      stats.val_accuracy = va.accuracy;
    }
    report.epochs.push_back(stats);
    if (!std::isfinite(stats.train_loss)) throw DivergenceError(fmt::format("loss diverged at epoch {}", epoch));

    const double monitored = have_val ? stats.val_loss : stats.train_loss;
    if (monitored < best_loss - opt.min_delta) {
      best_loss = monitored;
      best_epoch = epoch;
      since_best = 0;
      best_params.assign(live.params().begin(), live.params().end());
    } else if (++since_best >= opt.patience) {
      break;
    }
  }

  std::copy(best_params.begin(), best_params.end(), live.params().begin());
  report.stopped_epoch = static_cast<std::int64_t>(report.epochs.size());
  report.best_epoch = best_epoch;
  report.final_train_accuracy = report.epochs[static_cast<std::size_t>(best_epoch)].train_accuracy;
  report.final_val_accuracy = report.epochs[static_cast<std::size_t>(best_epoch)].val_accuracy;
  return {std::move(model), std::move(report)};
}

}  // namespace

std::string to_string(PredictorKind kind) {
  return kind == PredictorKind::Centroid ? "centroid" : "recurrent";
}

PredictorKind parse_predictor_kind(const std::string& name) {
  if (name == "centroid") return PredictorKind::Centroid;
  if (name == "recurrent" || name == "gru") return PredictorKind::Recurrent;
  throw ConfigError(fmt::format("unknown predictor kind '{}'", name));
}

std::size_t PredictorModel::input_dim() const noexcept {
  if (const auto* c = std::get_if<CentroidModel>(&params)) return c->centroids.cols();
  return std::get<RecurrentModel>(params).network.input_dim();
}

ProbVector predict(const PredictorModel& model, const FeatureWindow& window) {
  if (const auto* c = std::get_if<CentroidModel>(&model.params)) return predict_centroid(*c, window);
  const GruNetwork& net = std::get<RecurrentModel>(model.params).network;
  return softmax(net.logits(window.matrix));
}

double learning_rate_at(const Config& cfg, std::int64_t epoch) {
  return cfg.learning_rate /
         std::pow(cfg.lr_decay_factor, static_cast<double>(epoch / cfg.lr_decay_every));
}

SetScore score(const PredictorModel& model, std::span<const LabeledWindow> set) {
  if (set.empty()) return {};
  double loss = 0.0;
  std::size_t correct = 0;
  for (const auto& s : set) {
    const ProbVector p = predict(model, s.window);
    loss -= std::log(std::max(p[static_cast<std::size_t>(s.label)], 1e-300));
    if (p.argmax() == s.label) ++correct;
  }
  const auto n = static_cast<double>(set.size());
  return {loss / n, static_cast<double>(correct) / n};
}

TrainResult train(std::span<const LabeledWindow> train_set, std::span<const LabeledWindow> val_set,
                  std::size_t num_classes, const Config& cfg, PredictorKind kind,
                  const TrainOptions& options) {
  cfg.validate();
  if (num_classes < 2) throw ConfigError("at least two classes are required");
  if (train_set.empty()) throw EmptyClassError("training set is empty");
  check_labels(train_set, num_classes);
  check_labels(val_set, num_classes);
  require_every_class(train_set, num_classes);
  if (kind == PredictorKind::Centroid) return train_centroid(train_set, val_set, num_classes, cfg);
  return train_recurrent(train_set, val_set, num_classes, cfg, options);
}

GradientCheckResult gradient_check(const PredictorModel& model, const LabeledWindow& sample,
                                   double step) {
  const auto* rec = std::get_if<RecurrentModel>(&model.params);
  if (rec == nullptr) throw ConfigError("gradient check needs a recurrent model");
  GruNetwork net = rec->network;
  std::vector<double> analytic(net.params().size(), 0.0);
  net.loss_and_gradient(sample.window.matrix, sample.label, analytic);

  std::vector<double> scratch(net.params().size());
  auto loss_at = [&](std::size_t j, double value) {
    const double saved = net.params()[j];
    net.params()[j] = value;
    const double l = net.loss_and_gradient(sample.window.matrix, sample.label, scratch);
    net.params()[j] = saved;
    return l;
  };

  GradientCheckResult result;
  for (std::size_t b = 0; b < GruNetwork::kBlockCount; ++b) {
    const auto blk = static_cast<GruNetwork::Block>(b);
    const std::size_t off = net.block_offset(blk);
    double worst = 0.0;
    for (std::size_t j = off; j < off + net.block_size(blk); ++j) {
      const double x = net.params()[j];
      const double numeric = (loss_at(j, x + step) - loss_at(j, x - step)) / (2.0 * step);
      const double err = std::abs(analytic[j] - numeric) /
                         std::max(std::abs(analytic[j]) + std::abs(numeric), 1e-7);
      worst = std::max(worst, err);
    }
    result.block_max_relative_error[b] = worst;
    result.max_relative_error = std::max(result.max_relative_error, worst);
  }
  return result;
}

}  // namespace signsep
