#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "brlstm/activation.hpp"
#include "brlstm/data.hpp"
#include "brlstm/lstm.hpp"

namespace brlstm {

enum class OptimizerKind { sgd, adam };
enum class LossKind { mse, bce };

std::string_view to_string(OptimizerKind k) noexcept;
OptimizerKind parse_optimizer(std::string_view name);

struct AdamSettings {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct TrainConfig {
  double learning_rate = 1e-3;
  int max_epochs = 50;
  int batch_size = 32;
  OptimizerKind optimizer = OptimizerKind::adam;
  AdamSettings adam;
  int patience = 5;
  double min_delta = 1e-5;
  std::uint64_t seed = 0;
  LossKind loss = LossKind::mse;
  NoiseMode eval_noise = NoiseMode::stochastic;
  /// false freezes alpha (its gradient is masked).
  bool learn_alpha = true;
  /// Global-norm clip; <= 0 disables.
  double grad_clip = 5.0;
  /// Training aborts once |alpha| exceeds this.
  double alpha_limit = 1e3;
  /// Reshuffle training samples every epoch.
  bool shuffle = true;

  /// Throws ConfigError on out-of-range fields.
  void validate() const;
};

struct TrainHistory {
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  /// Train R^2 (regression) or accuracy (classification) over the epoch's
  /// training-pass predictions; NaN when undefined.
  std::vector<double> metric;
  std::vector<double> alpha;
  /// 1-based epoch with the lowest validation loss; its parameters are kept.
  int epoch_of_convergence = 0;
  double final_alpha = 0.0;

  std::size_t epochs() const noexcept { return train_loss.size(); }
};

struct LossResult {
  double loss = 0.0;
  std::vector<double> grad;  // dL/dpred
};

/// (1/N) sum (pred - target)^2 and its gradient (2/N)(pred - target).
LossResult mse_loss(std::span<const double> pred, std::span<const double> target);

/// Mean binary cross-entropy with probabilities clipped to [1e-7, 1 - 1e-7].
LossResult bce_loss(std::span<const double> prob, std::span<const double> label);

struct OptimizerState {
  OptimizerKind kind = OptimizerKind::adam;
  ParamGrads first_moment;
  ParamGrads second_moment;
  long step = 0;
};

OptimizerState make_optimizer_state(const LstmParams& params, const TrainConfig& config);

/// theta <- theta - lr * g (sgd) or the bias-corrected Adam update, applied
/// to every tensor and to alpha. alpha is skipped when config.learn_alpha is false.
void optimizer_step(LstmParams& params, const ParamGrads& grads, OptimizerState& state,
                    const TrainConfig& config);

/// First-output predictions for every sample. Sample i uses noise stream rng.derive(i).
std::vector<double> predict(const Model& model, const SequenceDataset& data, NoiseMode noise,
                            const RngStream& rng);

/// Minibatch training with fresh activation noise per batch, early stopping on
/// validation loss and restoration of the best epoch's parameters.
TrainHistory train(Model& model, const SequenceDataset& train_set,
                   const SequenceDataset& validation_set, const TrainConfig& config);

/// CSV with header "epoch,train_loss,val_loss,metric,alpha".
void write_history_csv(const TrainHistory& history, std::ostream& out);

}  // namespace brlstm
