#include "brlstm/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "brlstm/error.hpp"
#include "brlstm/metrics.hpp"

namespace brlstm {
namespace {

constexpr double kProbClip = 1e-7;
constexpr std::uint64_t kShuffleStream = 0x5407;
constexpr std::uint64_t kTrainNoiseStream = 0x7A1E;
constexpr std::uint64_t kEvalNoiseStream = 0xE7A1;

void check_pair(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw ArgumentError(std::string(what) + ": length mismatch " + std::to_string(a) + " vs " +
                        std::to_string(b));
  }
  if (a == 0) throw ArgumentError(std::string(what) + ": empty input");
}

double epoch_metric(Head head, std::span<const double> pred, std::span<const double> target) {
  if (head == Head::classification) {
    std::size_t hits = 0;
    for (std::size_t k = 0; k < pred.size(); ++k) {
      hits += (pred[k] >= 0.5) == (target[k] >= 0.5) ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(pred.size());
  }
  try {
    return r2(pred, target);
  } catch (const ArgumentError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

LossResult compute_loss(LossKind kind, std::span<const double> pred,
                        std::span<const double> target) {
  return kind == LossKind::mse ? mse_loss(pred, target) : bce_loss(pred, target);
}

}  // namespace

std::string_view to_string(OptimizerKind k) noexcept {
  return k == OptimizerKind::sgd ? "sgd" : "adam";
}

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "sgd") return OptimizerKind::sgd;
  if (name == "adam") return OptimizerKind::adam;
  throw ConfigError("unknown optimizer '" + std::string(name) + "' (expected sgd or adam)");
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning rate must be > 0");
  }
  if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (patience < 0) throw ConfigError("patience must be >= 0");
  if (!(min_delta >= 0.0)) throw ConfigError("min_delta must be >= 0");
  if (!(alpha_limit > 0.0)) throw ConfigError("alpha_limit must be > 0");
}

LossResult mse_loss(std::span<const double> pred, std::span<const double> target) {
  check_pair(pred.size(), target.size(), "mse_loss");
  const double n = static_cast<double>(pred.size());
  LossResult r{0.0, std::vector<double>(pred.size())};
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const double e = pred[k] - target[k];
    r.loss += e * e;
    r.grad[k] = 2.0 * e / n;
  }
  r.loss /= n;
  return r;
}

LossResult bce_loss(std::span<const double> prob, std::span<const double> label) {
  check_pair(prob.size(), label.size(), "bce_loss");
  const double n = static_cast<double>(prob.size());
  LossResult r{0.0, std::vector<double>(prob.size())};
  for (std::size_t k = 0; k < prob.size(); ++k) {
    const double y = label[k];
    if (y != 0.0 && y != 1.0) throw ArgumentError("bce_loss: labels must be 0 or 1");
    const double p = std::clamp(prob[k], kProbClip, 1.0 - kProbClip);
    r.loss -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
    r.grad[k] = (-y / p + (1.0 - y) / (1.0 - p)) / n;
  }
  r.loss /= n;
  return r;
}

OptimizerState make_optimizer_state(const LstmParams& params, const TrainConfig& config) {
  OptimizerState s;
  s.kind = config.optimizer;
  if (s.kind == OptimizerKind::adam) {
    s.first_moment = LstmParams::zeros(params.input_dim, params.hidden_dim, params.output_dim);
    s.second_moment = s.first_moment;
  }
  return s;
}

void optimizer_step(LstmParams& params, const ParamGrads& grads, OptimizerState& state,
                    const TrainConfig& config) {
  auto p = params.tensors();
  const auto g = grads.tensors();
  for (std::size_t k = 0; k < LstmParams::kTensorCount; ++k) {
    if (!p[k]->same_shape(*g[k])) {
      throw DimensionError("optimizer_step: gradient " +
                           std::string(LstmParams::kTensorNames[k]) + " is " +
                           g[k]->shape_string() + ", parameter is " + p[k]->shape_string());
    }
  }
  const double lr = config.learning_rate;
  if (state.kind == OptimizerKind::sgd) {
    for (std::size_t k = 0; k < LstmParams::kTensorCount; ++k)
      for (std::size_t i = 0; i < p[k]->size(); ++i) (*p[k])[i] -= lr * (*g[k])[i];
    if (config.learn_alpha) params.alpha -= lr * grads.alpha;
    return;
  }

  ++state.step;
  const AdamSettings& a = config.adam;
  const double c1 = 1.0 - std::pow(a.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(a.beta2, static_cast<double>(state.step));
  auto update = [&](double& theta, double grad, double& m, double& v) {
    m = a.beta1 * m + (1.0 - a.beta1) * grad;
    v = a.beta2 * v + (1.0 - a.beta2) * grad * grad;
    theta -= lr * (m / c1) / (std::sqrt(v / c2) + a.epsilon);
  };
  auto m = state.first_moment.tensors();
  auto v = state.second_moment.tensors();
  for (std::size_t k = 0; k < LstmParams::kTensorCount; ++k)
    for (std::size_t i = 0; i < p[k]->size(); ++i)
      update((*p[k])[i], (*g[k])[i], (*m[k])[i], (*v[k])[i]);
  if (config.learn_alpha) {
    update(params.alpha, grads.alpha, state.first_moment.alpha, state.second_moment.alpha);
  }
}

std::vector<double> predict(const Model& model, const SequenceDataset& data, NoiseMode noise,
                            const RngStream& rng) {
  std::vector<double> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    out[i] = sequence_forward(model.params, data.inputs[i], model.activation, model.head,
                              rng.derive(i), noise)
                 .prediction[0];
  }
  return out;
}

TrainHistory train(Model& model, const SequenceDataset& train_set,
                   const SequenceDataset& validation_set, const TrainConfig& config) {
  config.validate();
  model.params.validate();
  model.activation.validate();
  if (train_set.empty()) throw ArgumentError("train: empty training set");
  if (validation_set.empty()) throw ArgumentError("train: empty validation set");
  if (model.params.output_dim != 1) throw ArgumentError("train: output_dim must be 1");

  const std::size_t n = train_set.size();
  const auto batch = static_cast<std::size_t>(config.batch_size);
  OptimizerState opt = make_optimizer_state(model.params, config);
  const RngStream shuffle_root(config.seed, kShuffleStream);
  const RngStream noise_root(config.seed, kTrainNoiseStream);
  const RngStream eval_root(config.seed, kEvalNoiseStream);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  TrainHistory history;
  LstmParams best = model.params;
  double best_val = std::numeric_limits<double>::infinity();
  double patience_ref = std::numeric_limits<double>::infinity();
  int stale = 0;

  std::vector<ForwardTrace> traces;
  std::vector<double> batch_pred, batch_target;
  std::vector<double> epoch_pred(n), epoch_target(n);

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    if (config.shuffle) {
      RngStream s = shuffle_root.derive(static_cast<std::uint64_t>(epoch));
      for (std::size_t k = n; k > 1; --k) {
        const auto j = static_cast<std::size_t>(s.next_u64() % k);
        std::swap(order[k - 1], order[j]);
      }
    }
    const RngStream epoch_noise = noise_root.derive(static_cast<std::uint64_t>(epoch));
    double loss_sum = 0.0;

    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t stop = std::min(n, start + batch);
      traces.clear();
      batch_pred.clear();
      batch_target.clear();
      for (std::size_t k = start; k < stop; ++k) {
        const std::size_t idx = order[k];
        auto out = sequence_forward(model.params, train_set.inputs[idx], model.activation,
                                    model.head, epoch_noise.derive(idx));
        batch_pred.push_back(out.prediction[0]);
        batch_target.push_back(train_set.targets[idx]);
        epoch_pred[k] = out.prediction[0];
        epoch_target[k] = train_set.targets[idx];
        traces.push_back(std::move(out.trace));
      }
      const LossResult loss = compute_loss(config.loss, batch_pred, batch_target);
      if (!std::isfinite(loss.loss)) {
        throw TrainingError("non-finite training loss at epoch " + std::to_string(epoch + 1) +
                            ", batch starting at sample " + std::to_string(start));
      }
      loss_sum += loss.loss * static_cast<double>(stop - start);

      ParamGrads grads = LstmParams::zeros(model.params.input_dim, model.params.hidden_dim,
                                           model.params.output_dim);
      Matrix dpred(1, 1);
      for (std::size_t k = 0; k < traces.size(); ++k) {
        dpred[0] = loss.grad[k];
        accumulate(grads, backward_bptt(model.params, traces[k], dpred));
      }
      if (!config.learn_alpha) grads.alpha = 0.0;
      if (config.grad_clip > 0.0) {
        const double norm = global_norm(grads);
        if (norm > config.grad_clip) {
          const double scale = config.grad_clip / norm;
          ParamGrads scaled = LstmParams::zeros(model.params.input_dim, model.params.hidden_dim,
                                                model.params.output_dim);
          accumulate(scaled, grads, scale);
          grads = std::move(scaled);
        }
      }
      optimizer_step(model.params, grads, opt, config);
      if (!model.params.all_finite()) {
        throw TrainingError("parameters became non-finite at epoch " +
                            std::to_string(epoch + 1));
      }
      if (std::abs(model.params.alpha) > config.alpha_limit) {
        throw TrainingError("alpha diverged to " + std::to_string(model.params.alpha) +
                            " at epoch " + std::to_string(epoch + 1));
      }
    }

    const auto val_pred = predict(model, validation_set, config.eval_noise,
                                  eval_root.derive(static_cast<std::uint64_t>(epoch)));
    const double val_loss = compute_loss(config.loss, val_pred, validation_set.targets).loss;
    if (!std::isfinite(val_loss)) {
      throw TrainingError("non-finite validation loss at epoch " + std::to_string(epoch + 1));
    }

    history.train_loss.push_back(loss_sum / static_cast<double>(n));
    history.val_loss.push_back(val_loss);
    history.metric.push_back(epoch_metric(model.head, epoch_pred, epoch_target));
    history.alpha.push_back(model.params.alpha);

    if (val_loss < best_val) {
      best_val = val_loss;
      best = model.params;
      history.epoch_of_convergence = epoch + 1;
    }
    if (val_loss < patience_ref - config.min_delta) {
      patience_ref = val_loss;
      stale = 0;
    } else if (++stale >= config.patience) {
      break;
    }
  }

  model.params = std::move(best);
  history.final_alpha = model.params.alpha;
  return history;
}

void write_history_csv(const TrainHistory& history, std::ostream& out) {
  out << "epoch,train_loss,val_loss,metric,alpha\n";
  char buf[160];
  for (std::size_t e = 0; e < history.epochs(); ++e) {
    std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,%.6f,%.6f\n", e + 1, history.train_loss[e],
                  history.val_loss[e], history.metric[e], history.alpha[e]);
    out << buf;
  }
}

}  // namespace brlstm
